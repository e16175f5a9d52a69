#include "sensorfault/injectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sensorfault/error.hpp"
#include "sensorfault/random.hpp"

namespace sensorfault {

namespace {

constexpr std::uint64_t kShortStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

bool is_fraction(double f) { return f > 0.0 && f < 1.0; }

}  // namespace

void InjectionPlan::validate() const {
  if (!is_fraction(short_fraction)) throw Error(ErrorCode::BadParameter, "short_fraction must be in (0, 1)");
  if (!is_fraction(noise_total_fraction)) throw Error(ErrorCode::BadParameter, "noise_total_fraction must be in (0, 1)");
  if (!(short_intensity > 0.0) || !std::isfinite(short_intensity)) {
    throw Error(ErrorCode::BadParameter, "short_intensity must be > 0");
  }
  if (!(noise_multiplier >= 0.0) || !std::isfinite(noise_multiplier)) {
    throw Error(ErrorCode::BadParameter, "noise_multiplier must be >= 0");
  }
  if (noise_burst_lengths.empty()) throw Error(ErrorCode::BadParameter, "no noise burst lengths");
  for (auto len : noise_burst_lengths) {
    if (len < 2) throw Error(ErrorCode::BadParameter, "noise bursts must be at least 2 samples long");
  }
}

InjectionOutcome inject_short(const Series& s, const InjectionPlan& plan) {
  plan.validate();
  const std::size_t n = s.size();
  const auto count = static_cast<std::size_t>(std::llround(plan.short_fraction * static_cast<double>(n)));
  if (count == 0) {
    throw Error(ErrorCode::DegeneratePlan, "short_fraction of a " + std::to_string(n) + "-sample series yields no faults");
  }

  Rng rng(mix_seed(plan.seed, kShortStream));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());

  InjectionOutcome out{s, {}};
  for (std::size_t k : pool) {
    const double v = s.values[k];
    out.series.values[k] = v + plan.short_intensity * v;
  }
  out.labels.short_indices = std::move(pool);
  return out;
}

std::vector<std::size_t> compose_bursts(const std::vector<std::size_t>& lengths, std::size_t target) {
  // Unbounded subset sum; via[t] remembers the longest length that reaches t.
  std::vector<std::size_t> via(target + 1, 0);
  std::vector<bool> reachable(target + 1, false);
  reachable[0] = true;
  std::vector<std::size_t> sorted = lengths;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (std::size_t t = 1; t <= target; ++t) {
    for (auto len : sorted) {
      if (len > 0 && len <= t && reachable[t - len]) {
        reachable[t] = true;
        via[t] = len;
        break;
      }
    }
  }
  std::size_t best = target;
  while (best > 0 && !reachable[best]) --best;
  std::vector<std::size_t> bursts;
  for (std::size_t t = best; t > 0; t -= via[t]) bursts.push_back(via[t]);
  std::sort(bursts.begin(), bursts.end(), std::greater<>());
  return bursts;
}

InjectionOutcome inject_noise(const Series& s, const InjectionPlan& plan, double base_sigma) {
  plan.validate();
  if (!(base_sigma >= 0.0) || !std::isfinite(base_sigma)) {
    throw Error(ErrorCode::BadParameter, "base sigma must be a finite value >= 0");
  }
  const std::size_t n = s.size();
  std::vector<std::size_t> usable;
  for (auto len : plan.noise_burst_lengths) {
    if (len <= n) usable.push_back(len);
  }
  const auto target = static_cast<std::size_t>(std::llround(plan.noise_total_fraction * static_cast<double>(n)));
  const auto bursts = usable.empty() ? std::vector<std::size_t>{} : compose_bursts(usable, target);
  if (bursts.empty()) {
    throw Error(ErrorCode::SeriesTooShort, "no noise burst fits a " + std::to_string(n) + "-sample series at fraction " +
                                               std::to_string(plan.noise_total_fraction));
  }

  Rng rng(mix_seed(plan.seed, kNoiseStream));
  std::vector<NoiseBurst> placed;
  const std::size_t max_attempts = 10000 * bursts.size();
  std::size_t attempts = 0;
  for (auto len : bursts) {
    for (;;) {
      if (++attempts > max_attempts) {
        throw Error(ErrorCode::SeriesTooShort, "could not place non-overlapping noise bursts");
      }
      const NoiseBurst candidate{static_cast<std::size_t>(rng.uniform_below(n - len + 1)), len};
      const bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const NoiseBurst& b) {
        return candidate.start < b.end() && b.start < candidate.end();
      });
      if (!overlaps) {
        placed.push_back(candidate);
        break;
      }
    }
  }
  std::sort(placed.begin(), placed.end(), [](const NoiseBurst& a, const NoiseBurst& b) { return a.start < b.start; });

  InjectionOutcome out{s, {}};
  const double sd = plan.noise_multiplier * base_sigma;
  for (const auto& b : placed) {
    for (std::size_t k = b.start; k < b.end(); ++k) {
      const double draw = rng.standard_normal();
      if (sd > 0.0) out.series.values[k] = s.values[k] + sd * draw;
    }
  }
  out.labels.noise_windows = std::move(placed);
  return out;
}

InjectionOutcome inject_noise_then_short(const Series& s, const InjectionPlan& plan, double base_sigma) {
  auto noised = inject_noise(s, plan, base_sigma);
  auto shorted = inject_short(noised.series, plan);
  shorted.labels.noise_windows = std::move(noised.labels.noise_windows);
  return shorted;
}

}  // namespace sensorfault
