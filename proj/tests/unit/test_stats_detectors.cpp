#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "helpers.hpp"
#include "sensorfault/detectors.hpp"
#include "sensorfault/events.hpp"
#include "sensorfault/experiment.hpp"
#include "sensorfault/stats.hpp"

namespace sensorfault {
namespace {

using testing::code_of;
using testing::gaussian_values;
using testing::make_series;

// Two-pass textbook formula in long double.
double stddev_oracle(const std::vector<double>& v) {
  long double m = 0;
  for (double x : v) m += x;
  m /= static_cast<long double>(v.size());
  long double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size() - 1)));
}

// Uncentered normal equations [[n, Sx], [Sx, Sxx]] b = [Sy, Sxy], solved by Cramer's rule.
std::pair<long double, long double> ols_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += static_cast<long double>(x[k]) * x[k];
    sxy += static_cast<long double>(x[k]) * y[k];
  }
  const long double det = n * sxx - sx * sx;
  return {(sy * sxx - sx * sxy) / det, (n * sxy - sx * sy) / det};
}

// ceil(p * n / 100)-th smallest by full sort, integer rank arithmetic for integral p.
double percentile_oracle(std::vector<double> v, int p) {
  std::sort(v.begin(), v.end());
  const std::size_t rank = (static_cast<std::size_t>(p) * v.size() + 99) / 100;
  return v[std::max<std::size_t>(rank, 1) - 1];
}

bool close_rel(double a, long double b, double tol) {
  return std::fabs(static_cast<long double>(a) - b) <= tol * std::max<long double>(1.0L, std::fabs(b));
}

// --- stats ----------------------------------------------------------------

TEST(Stats, MeanAndStd) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::mean(v), 5.0);
  EXPECT_DOUBLE_EQ(stats::sample_stddev(v), stddev_oracle(v));
  EXPECT_EQ(stats::sample_stddev(std::vector<double>(7, 0.1)), 0.0);
  EXPECT_THROW(stats::sample_stddev(std::vector<double>{1.0}), Error);
}

TEST(Stats, StdIsOrderFree) {
  auto v = gaussian_values(3, 18, 2.0, 20.0);
  const double a = stats::sample_stddev(v);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(stats::sample_stddev(v), a);
  std::rotate(v.begin(), v.begin() + 5, v.end());
  EXPECT_EQ(stats::sample_stddev(v), a);
  EXPECT_NEAR(a, stddev_oracle(v), 1e-12);
}

TEST(Stats, NearestRank) {
  EXPECT_EQ(stats::nearest_rank(100, 95), 95u);
  EXPECT_EQ(stats::nearest_rank(101, 95), 96u);
  EXPECT_EQ(stats::nearest_rank(20, 95), 19u);
  EXPECT_EQ(stats::nearest_rank(3, 100), 3u);
  EXPECT_EQ(stats::nearest_rank(1, 1), 1u);
  EXPECT_THROW(stats::nearest_rank(10, 0), Error);
  EXPECT_THROW(stats::nearest_rank(10, 101), Error);
}

TEST(Stats, PercentileMatchesSortOracle) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Rng rng(seed);
    const auto v = gaussian_values(seed, 1 + rng.uniform_below(300));
    for (int p : {1, 50, 90, 95, 99, 100}) {
      EXPECT_EQ(stats::nearest_rank_percentile(v, p), percentile_oracle(v, p)) << "seed " << seed << " p " << p;
    }
  }
}

// --- SHORT ----------------------------------------------------------------

TEST(Short, Examples) {
  auto r = short_detect(make_series({10, 20, 21}), {5.0});
  EXPECT_EQ(r.source, FlagSource::Short);
  EXPECT_EQ(r.flagged_samples, (IndexSet{1}));
  EXPECT_TRUE(short_detect(make_series(std::vector<double>(20, 3.0)), {0.001}).flagged_samples.empty());
}

TEST(Short, ThresholdIsStrict) {
  EXPECT_TRUE(short_detect(make_series({0.0, 0.5}), {0.5}).flagged_samples.empty());
}

TEST(Short, ComparesAgainstRawPredecessor) {
  // Both edges of an isolated spike are flagged.
  EXPECT_EQ(short_detect(make_series({1, 1, 9, 1, 1}), {2.0}).flagged_samples, (IndexSet{2, 3}));
}

TEST(Short, SoilOnsetStepIsFlagged) {
  auto s = make_series({0.20, 0.20, 0.20, 0.35, 0.35, 0.34}, 1200, 0, Modality::SoilMoisture);
  const auto r = short_detect(s, {0.1});
  const auto ev = event_sample_indices(s, {{3600, 7200}});
  EXPECT_EQ(r.flagged_samples, (IndexSet{3}));
  EXPECT_TRUE(index_set::is_subset(r.flagged_samples, ev));
}

TEST(Short, Errors) {
  EXPECT_EQ(code_of([] { short_detect(make_series({1.0}), {1.0}); }), ErrorCode::DegenerateInput);
  EXPECT_EQ(code_of([] { short_detect(make_series({1.0, 2.0}), {0.0}); }), ErrorCode::BadParameter);
}

TEST(Short, MonotoneInDelta) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = make_series(gaussian_values(seed, 300));
    IndexSet prev = short_detect(s, {0.01}).flagged_samples;
    for (double d = 0.25; d < 4.0; d += 0.25) {
      const auto cur = short_detect(s, {d}).flagged_samples;
      EXPECT_TRUE(index_set::is_subset(cur, prev));
      prev = cur;
    }
  }
}

// --- NOISE ----------------------------------------------------------------

TEST(Noise, ConstantTraining) {
  const auto m = noise_train(make_series(std::vector<double>(90, 4.0)), 18);
  EXPECT_EQ(m.window_len, 18u);
  EXPECT_EQ(m.sigma_train, 0.0);
  EXPECT_EQ(m.sigma_hist_spread, 0.0);
  const auto r = noise_detect(make_series(std::vector<double>(36, 7.0)), m, 0.0);
  EXPECT_TRUE(r.flagged_windows.empty());
}

TEST(Noise, WindowStdExample) {
  const auto s = make_series({0, 0, 0, 3, 3, 3, 0, 3, 0});
  const auto stds = windowed_stddevs(s, 3);
  ASSERT_EQ(stds.size(), 3u);
  EXPECT_EQ(stds[0], 0.0);
  EXPECT_EQ(stds[1], 0.0);
  EXPECT_NEAR(stds[2], stddev_oracle({0, 3, 0}), 1e-15);
  const auto m = noise_train(s, 3);
  EXPECT_NEAR(m.sigma_train, (0.0 + 0.0 + std::sqrt(3.0)) / 3.0, 1e-12);
  EXPECT_NEAR(m.sigma_hist_spread, stddev_oracle(stds), 1e-12);
  EXPECT_NEAR(m.sigma_hist_spread, 1.0, 1e-12);
}

TEST(Noise, BandComparison) {
  const NoiseModel m{3, 1.0, 0.5};
  // Sample std of {-2, 0, 2} is exactly 2 = sigma_train + 2 * spread.
  const auto s = make_series({-2, 0, 2});
  const auto r1 = noise_detect(s, m, 1.0);
  ASSERT_EQ(r1.flagged_windows.size(), 1u);
  EXPECT_EQ(r1.flagged_windows[0], (FlaggedWindow{0, 3, BandSide::High}));
  EXPECT_TRUE(noise_detect(s, m, 3.0).flagged_windows.empty());
  EXPECT_TRUE(noise_detect(s, m, 2.0).flagged_windows.empty());  // band edge is not a fault
  const auto low = noise_detect(make_series({5, 5, 5}), m, 1.0);
  ASSERT_EQ(low.flagged_windows.size(), 1u);
  EXPECT_EQ(low.flagged_windows[0].side, BandSide::Low);
}

TEST(Noise, TailIsNotEvaluated) {
  const NoiseModel m{3, 0.0, 0.0};
  const auto r = noise_detect(make_series({0, 0, 0, 0, 9, 0, 9}), m, 0.0);
  ASSERT_EQ(r.flagged_windows.size(), 1u);
  EXPECT_EQ(r.flagged_windows[0].start, 3u);
  EXPECT_EQ(r.flagged_indices(), (IndexSet{3, 4, 5}));
}

TEST(Noise, PermutationWithinWindowsKeepsModel) {
  auto v = gaussian_values(11, 18 * 10, 1.5, 20.0);
  const auto a = noise_train(make_series(v));
  for (std::size_t w = 0; w < 10; ++w) std::reverse(v.begin() + 18 * w, v.begin() + 18 * (w + 1));
  EXPECT_EQ(noise_train(make_series(v)), a);
}

TEST(Noise, Errors) {
  EXPECT_EQ(code_of([] { noise_train(make_series(std::vector<double>(20, 1.0)), 18); }),
            ErrorCode::InsufficientTraining);
  EXPECT_EQ(code_of([] { noise_detect(make_series(std::vector<double>(5, 1.0)), NoiseModel{}, 1.0); }),
            ErrorCode::DegenerateInput);
  EXPECT_EQ(code_of([] { noise_detect(make_series(std::vector<double>(40, 1.0)), NoiseModel{}, -1.0); }),
            ErrorCode::BadParameter);
}

TEST(Noise, MonotoneInMultiplier) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto train = make_series(gaussian_values(seed, 18 * 12));
    const auto test = make_series(gaussian_values(seed + 1000, 18 * 12, 1.3));
    const auto m = noise_train(train);
    IndexSet prev = noise_detect(test, m, 0.0).flagged_indices();
    for (double mult = 0.5; mult <= 4.0; mult += 0.5) {
      const auto cur = noise_detect(test, m, mult).flagged_indices();
      EXPECT_TRUE(index_set::is_subset(cur, prev));
      prev = cur;
    }
  }
}

TEST(Noise, RainyBoxWindowsFallOnTheLowSide) {
  SweepConfig c;
  c.seed = 1;
  const auto d = prepare_data(resolve_defaults(c));
  std::size_t low = 0, high = 0;
  for (std::size_t i = 0; i < d.test.size(); ++i) {
    const auto ev = event_sample_indices(d.test[i], d.events);
    const auto r = noise_detect(d.test[i], noise_train(d.train[i]), 1.0);
    for (const auto& w : r.flagged_windows) {
      bool in_event = false;
      for (std::size_t k = w.start; k < w.end(); ++k) in_event = in_event || index_set::contains(ev, k);
      if (in_event) ++(w.side == BandSide::Low ? low : high);
    }
  }
  EXPECT_GT(low, 0u);
  EXPECT_GT(low, high);
}

// --- LLSE -----------------------------------------------------------------

TEST(Llse, ExactAffinePair) {
  const auto f = llse_fit(make_series({1, 3, 5}), make_series({0, 1, 2}));
  EXPECT_NEAR(f.beta0, 1.0, 1e-12);
  EXPECT_NEAR(f.beta1, 2.0, 1e-12);
  EXPECT_NEAR(f.threshold, 0.0, 1e-12);
  const auto s = make_series(gaussian_values(5, 50));
  const auto g = llse_fit(s, s);
  EXPECT_NEAR(g.beta0, 0.0, 1e-12);
  EXPECT_NEAR(g.beta1, 1.0, 1e-12);
  EXPECT_NEAR(g.threshold, 0.0, 1e-12);
}

TEST(Llse, MatchesNormalEquationsAndPercentileBound) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Rng rng(seed);
    const std::size_t n = 100;
    const double b0 = rng.normal(0, 10), b1 = rng.normal(0, 3);
    std::vector<double> x = gaussian_values(seed, n, 5.0, rng.normal(0, 20)), y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = b0 + b1 * x[k] + rng.normal(0, 0.5);
    const auto f = llse_fit(make_series(y), make_series(x), 95.0);
    const auto [o0, o1] = ols_oracle(x, y);
    EXPECT_TRUE(close_rel(f.beta0, o0, 1e-9)) << f.beta0 << " vs " << static_cast<double>(o0);
    EXPECT_TRUE(close_rel(f.beta1, o1, 1e-9)) << f.beta1 << " vs " << static_cast<double>(o1);
    std::vector<double> err(n);
    for (std::size_t k = 0; k < n; ++k) err[k] = std::fabs(f.estimate(x[k]) - y[k]);
    EXPECT_EQ(f.threshold, percentile_oracle(err, 95));
    const auto above = std::count_if(err.begin(), err.end(), [&](double e) { return e > f.threshold; });
    EXPECT_LE(static_cast<std::size_t>(above), n - (95 * n + 99) / 100);
  }
}

TEST(Llse, ResidualsAreOrthogonal) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto x = gaussian_values(seed, 200, 3.0, 25.0);
    auto y = gaussian_values(seed + 77, 200, 0.4);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += 2.0 - 0.7 * x[k];
    const auto f = llse_fit(make_series(y), make_series(x));
    long double sum = 0, dot = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const long double r = static_cast<long double>(y[k]) - f.estimate(x[k]);
      sum += r;
      dot += r * (x[k] - 25.0);
    }
    EXPECT_NEAR(static_cast<double>(sum), 0.0, 1e-9);
    EXPECT_NEAR(static_cast<double>(dot), 0.0, 1e-9);
  }
}

TEST(Llse, SignedModeIsOneSided) {
  const auto x = gaussian_values(8, 200);
  auto y = gaussian_values(9, 200, 0.2);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += x[k];
  const auto fa = llse_fit(make_series(y), make_series(x), 95, ErrorMode::Absolute);
  const auto fs = llse_fit(make_series(y), make_series(x), 95, ErrorMode::Signed);
  EXPECT_EQ(fa.beta1, fs.beta1);
  EXPECT_LT(fs.threshold, fa.threshold);
}

TEST(Llse, FitErrors) {
  EXPECT_EQ(code_of([] { llse_fit(make_series({1, 2, 3}), make_series({4, 4, 4})); }), ErrorCode::UnusableNeighbor);
  EXPECT_EQ(code_of([] { llse_fit(make_series({1, 2, 3}), make_series({1, 2})); }), ErrorCode::BadPairing);
  EXPECT_EQ(code_of([] { llse_fit(make_series({1, 2, 3}), make_series({1, 2, 4}), 0.0); }), ErrorCode::BadParameter);
}

struct Trio {
  Series target;
  std::map<std::string, Series> neighbors;
};

Trio affine_trio(std::size_t n, std::uint64_t seed, double noise) {
  const auto base = gaussian_values(seed, n, 2.0, 20.0);
  auto mk = [&](double a, double b, std::uint64_t salt, const std::string& id) {
    auto e = gaussian_values(seed * 31 + salt, n, noise);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = a + b * base[k] + e[k];
    return make_series(v, 1200, 0, Modality::BoxTemperature, id);
  };
  Trio t{mk(0, 1, 1, "n1"), {}};
  t.neighbors.emplace("n2", mk(3, 0.5, 2, "n2"));
  t.neighbors.emplace("n3", mk(-1, 2, 3, "n3"));
  return t;
}

TEST(Llse, ExactRelationFlagsNothingAndSpikeIsCaught) {
  auto t = affine_trio(200, 4, 0.0);
  const auto model = llse_train(t.target, t.neighbors);
  EXPECT_EQ(model.neighbors.size(), 2u);
  EXPECT_TRUE(llse_detect(t.target, t.neighbors, model).flagged_samples.empty());

  auto noisy = affine_trio(200, 4, 0.05);
  const auto m2 = llse_train(noisy.target, noisy.neighbors);
  auto spiked = noisy.target;
  spiked.values[77] += 100.0;
  auto r = llse_detect(spiked, noisy.neighbors, m2);
  EXPECT_TRUE(index_set::contains(r.flagged_samples, 77));
  const auto baseline = llse_detect(noisy.target, noisy.neighbors, m2).flagged_samples;
  EXPECT_EQ(index_set::set_difference(r.flagged_samples, baseline), (IndexSet{77}));
}

TEST(Llse, VoteOneIsSupersetOfVoteTwo) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto t = affine_trio(300, seed, 0.3);
    auto m = llse_train(t.target, t.neighbors, 90.0, 2);
    const auto q2 = llse_detect(t.target, t.neighbors, m).flagged_samples;
    m.vote_q = 1;
    const auto q1 = llse_detect(t.target, t.neighbors, m).flagged_samples;
    EXPECT_TRUE(index_set::is_subset(q2, q1));
    EXPECT_EQ(llse_detect(t.target, t.neighbors, m), llse_detect(t.target, t.neighbors, m));
  }
}

TEST(Llse, DetectErrors) {
  auto t = affine_trio(50, 2, 0.1);
  const auto m = llse_train(t.target, t.neighbors);
  auto missing = t.neighbors;
  missing.erase("n3");
  EXPECT_EQ(code_of([&] { llse_detect(t.target, missing, m); }), ErrorCode::ModelDataMismatch);
  auto shifted = t.neighbors;
  shifted.at("n2").start_time += 1200;
  EXPECT_EQ(code_of([&] { llse_detect(t.target, shifted, m); }), ErrorCode::BadPairing);
  auto bad = m;
  bad.vote_q = 3;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::BadParameter);
}

TEST(Llse, HeterogeneousSoilEventsAreFlagged) {
  SweepConfig c;
  c.seed = 1;
  c.modality = Modality::SoilMoisture;
  c.detector = FlagSource::Llse;
  const auto d = prepare_data(resolve_defaults(c));
  std::map<std::string, Series> train, test;
  for (std::size_t i = 0; i < d.test.size(); ++i) {
    train.emplace(d.llse_train[i].node_id, d.llse_train[i]);
    test.emplace(d.test[i].node_id, d.test[i]);
  }
  // The attenuated, lagging node disagrees with both co-moving neighbours during events.
  auto neighbors = train;
  neighbors.erase("n3");
  const auto model = llse_train(train.at("n3"), neighbors);
  const auto flags = llse_detect(test.at("n3"), test, model);
  const auto ev = event_sample_indices(test.at("n3"), d.events);
  const double in_events = static_cast<double>(index_set::set_intersection(flags.flagged_samples, ev).size()) /
                           static_cast<double>(ev.size());
  const double overall = static_cast<double>(flags.flagged_samples.size()) / static_cast<double>(test.at("n3").size());
  EXPECT_GT(in_events, 0.3);
  EXPECT_GT(in_events, 5.0 * overall);
}

TEST(FlagSource, Names) {
  EXPECT_EQ(to_string(FlagSource::Llse), "llse");
  EXPECT_EQ(parse_flag_source("noise"), FlagSource::Noise);
  EXPECT_THROW(parse_flag_source("x"), Error);
  EXPECT_EQ(parse_error_mode("signed"), ErrorMode::Signed);
}

}  // namespace
}  // namespace sensorfault
