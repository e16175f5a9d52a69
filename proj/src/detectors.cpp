#include "sensorfault/detectors.hpp"

#include <cmath>
#include <span>

#include "sensorfault/error.hpp"
#include "sensorfault/stats.hpp"

namespace sensorfault {

std::string_view to_string(FlagSource source) {
  switch (source) {
    case FlagSource::Short: return "short";
    case FlagSource::Noise: return "noise";
    case FlagSource::Llse: return "llse";
  }
  return "short";
}

FlagSource parse_flag_source(std::string_view name) {
  if (name == "short") return FlagSource::Short;
  if (name == "noise") return FlagSource::Noise;
  if (name == "llse") return FlagSource::Llse;
  throw Error(ErrorCode::BadParameter, "unknown detector '" + std::string(name) + "'");
}

std::string_view to_string(ErrorMode mode) { return mode == ErrorMode::Absolute ? "absolute" : "signed"; }

ErrorMode parse_error_mode(std::string_view name) {
  if (name == "absolute") return ErrorMode::Absolute;
  if (name == "signed") return ErrorMode::Signed;
  throw Error(ErrorCode::BadParameter, "unknown error mode '" + std::string(name) + "'");
}

IndexSet DetectionResult::flagged_indices() const {
  IndexSet out = flagged_samples;
  for (const auto& w : flagged_windows) {
    for (std::size_t k = w.start; k < w.end(); ++k) out.push_back(k);
  }
  return index_set::normalized(std::move(out));
}

DetectionResult short_detect(const Series& s, const ShortParams& params) {
  if (!(params.delta > 0.0)) throw Error(ErrorCode::BadParameter, "SHORT delta must be > 0");
  if (s.size() < 2) throw Error(ErrorCode::DegenerateInput, "SHORT rule needs at least 2 samples");
  DetectionResult result;
  result.source = FlagSource::Short;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (std::abs(s.values[k] - s.values[k - 1]) > params.delta) result.flagged_samples.push_back(k);
  }
  return result;
}

std::vector<double> windowed_stddevs(const Series& s, std::size_t window_len) {
  if (window_len < 2) throw Error(ErrorCode::BadParameter, "NOISE window must hold at least 2 samples");
  std::vector<double> out;
  const std::span<const double> values(s.values);
  for (std::size_t start = 0; start + window_len <= values.size(); start += window_len) {
    out.push_back(stats::sample_stddev(values.subspan(start, window_len)));
  }
  return out;
}

NoiseModel noise_train(const Series& train, std::size_t window_len) {
  if (window_len < 2) throw Error(ErrorCode::BadParameter, "NOISE window must hold at least 2 samples");
  if (train.size() < 2 * window_len) {
    throw Error(ErrorCode::InsufficientTraining, "NOISE training needs at least two full windows (" +
                                                     std::to_string(2 * window_len) + " samples), got " +
                                                     std::to_string(train.size()));
  }
  const auto stds = windowed_stddevs(train, window_len);
  NoiseModel model;
  model.window_len = window_len;
  model.sigma_train = stats::mean(stds);
  model.sigma_hist_spread = stats::sample_stddev(stds);
  return model;
}

DetectionResult noise_detect(const Series& s, const NoiseModel& model, double allow_multiplier) {
  if (!(allow_multiplier >= 0.0) || !std::isfinite(allow_multiplier)) {
    throw Error(ErrorCode::BadParameter, "sigma_allow multiplier must be a finite value >= 0");
  }
  if (model.window_len < 2 || model.sigma_train < 0.0 || model.sigma_hist_spread < 0.0) {
    throw Error(ErrorCode::BadParameter, "invalid NOISE model");
  }
  if (s.size() < model.window_len) {
    throw Error(ErrorCode::DegenerateInput, "series is shorter than the NOISE window");
  }
  const double allow = allow_multiplier * model.sigma_hist_spread;
  const double lower = model.sigma_train - allow;
  const double upper = model.sigma_train + allow;

  DetectionResult result;
  result.source = FlagSource::Noise;
  const auto stds = windowed_stddevs(s, model.window_len);
  for (std::size_t w = 0; w < stds.size(); ++w) {
    const std::size_t start = w * model.window_len;
    if (stds[w] < lower) {
      result.flagged_windows.push_back({start, model.window_len, BandSide::Low});
    } else if (stds[w] > upper) {
      result.flagged_windows.push_back({start, model.window_len, BandSide::High});
    }
  }
  return result;
}

void LlseModel::validate() const {
  if (neighbors.empty()) throw Error(ErrorCode::BadParameter, "LLSE model has no neighbors");
  if (!(percentile_p > 0.0 && percentile_p < 100.0)) {
    throw Error(ErrorCode::BadParameter, "LLSE percentile must be in (0, 100)");
  }
  if (vote_q < 1 || vote_q > neighbors.size()) {
    throw Error(ErrorCode::BadParameter, "LLSE vote q must be in [1, neighbor count]");
  }
  for (const auto& n : neighbors) {
    if (!(n.fit.threshold >= 0.0) && error_mode == ErrorMode::Absolute) {
      throw Error(ErrorCode::BadParameter, "LLSE threshold must be >= 0");
    }
    if (!std::isfinite(n.fit.beta0) || !std::isfinite(n.fit.beta1) || !std::isfinite(n.fit.threshold)) {
      throw Error(ErrorCode::BadParameter, "LLSE coefficients must be finite");
    }
  }
}

namespace {

double estimation_error(const LlseFit& fit, double neighbor, double target, ErrorMode mode) {
  const double e = fit.estimate(neighbor) - target;
  return mode == ErrorMode::Absolute ? std::abs(e) : e;
}

void require_aligned(const Series& a, const Series& b, const std::string& what) {
  if (a.size() != b.size() || a.start_time != b.start_time || a.sample_interval != b.sample_interval) {
    throw Error(ErrorCode::BadPairing, what + ": series are not aligned (start, interval and length must match)");
  }
}

}  // namespace

LlseFit llse_fit(const Series& target, const Series& neighbor, double percentile_p, ErrorMode mode) {
  if (target.size() != neighbor.size()) {
    throw Error(ErrorCode::BadPairing, "LLSE training series differ in length");
  }
  const std::size_t n = target.size();
  if (n < 3) throw Error(ErrorCode::InsufficientTraining, "LLSE training needs at least 3 samples");
  if (!(percentile_p > 0.0 && percentile_p < 100.0)) {
    throw Error(ErrorCode::BadParameter, "LLSE percentile must be in (0, 100)");
  }

  // Normal equations for [1 | x] beta = y, solved after eliminating beta0.
  const double x_mean = stats::mean(neighbor.values);
  const double y_mean = stats::mean(target.values);
  double sxx = 0.0;
  double sxy = 0.0;
  double sx2 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dx = neighbor.values[t] - x_mean;
    sxx += dx * dx;
    sxy += dx * (target.values[t] - y_mean);
    sx2 += neighbor.values[t] * neighbor.values[t];
  }
  if (!(sxx > 1e-14 * sx2)) {
    throw Error(ErrorCode::UnusableNeighbor,
                "neighbor '" + neighbor.node_id + "' is constant over the training window");
  }

  LlseFit fit;
  fit.beta1 = sxy / sxx;
  fit.beta0 = y_mean - fit.beta1 * x_mean;

  std::vector<double> errors(n);
  for (std::size_t t = 0; t < n; ++t) {
    errors[t] = estimation_error(fit, neighbor.values[t], target.values[t], mode);
  }
  fit.threshold = stats::nearest_rank_percentile(errors, percentile_p);
  return fit;
}

LlseModel llse_train(const Series& target, const std::map<std::string, Series>& neighbors, double percentile_p,
                     std::size_t vote_q, ErrorMode mode) {
  LlseModel model;
  model.target = target.node_id;
  model.percentile_p = percentile_p;
  model.vote_q = vote_q;
  model.error_mode = mode;
  for (const auto& [id, series] : neighbors) {
    if (id == target.node_id) continue;
    require_aligned(target, series, "LLSE training pair " + target.node_id + "/" + id);
    model.neighbors.push_back({id, llse_fit(target, series, percentile_p, mode)});
  }
  model.validate();
  return model;
}

DetectionResult llse_detect(const Series& target, const std::map<std::string, Series>& neighbors,
                            const LlseModel& model) {
  model.validate();
  std::vector<const Series*> inputs;
  for (const auto& n : model.neighbors) {
    auto it = neighbors.find(n.node_id);
    if (it == neighbors.end()) {
      throw Error(ErrorCode::ModelDataMismatch, "neighbor '" + n.node_id + "' missing from the input data");
    }
    require_aligned(target, it->second, "LLSE detection pair " + model.target + "/" + n.node_id);
    inputs.push_back(&it->second);
  }

  DetectionResult result;
  result.source = FlagSource::Llse;
  for (std::size_t t = 0; t < target.size(); ++t) {
    std::size_t votes = 0;
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      const auto& fit = model.neighbors[j].fit;
      if (estimation_error(fit, inputs[j]->values[t], target.values[t], model.error_mode) > fit.threshold) ++votes;
    }
    if (votes >= model.vote_q) result.flagged_samples.push_back(t);
  }
  return result;
}

}  // namespace sensorfault
