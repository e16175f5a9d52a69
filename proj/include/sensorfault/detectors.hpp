#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sensorfault/series.hpp"

namespace sensorfault {

enum class FlagSource { Short, Noise, Llse };

std::string_view to_string(FlagSource source);
FlagSource parse_flag_source(std::string_view name);

/// Which edge of the NOISE band a window fell outside of.
enum class BandSide { Low, High };

struct FlaggedWindow {
  std::size_t start = 0;
  std::size_t length = 0;
  BandSide side = BandSide::High;

  std::size_t end() const { return start + length; }
  friend bool operator==(const FlaggedWindow&, const FlaggedWindow&) = default;
};

/// Per-sample flags (SHORT, LLSE) or flagged tumbling windows (NOISE).
struct DetectionResult {
  FlagSource source = FlagSource::Short;
  IndexSet flagged_samples;
  std::vector<FlaggedWindow> flagged_windows;

  /// flagged_samples plus every sample inside a flagged window.
  IndexSet flagged_indices() const;
  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

// --- SHORT rule ------------------------------------------------------------

struct ShortParams {
  double delta = 0.0;  // modality units, > 0
};

/// Flags k >= 1 iff |s[k] - s[k-1]| > delta, always against the raw predecessor.
DetectionResult short_detect(const Series& s, const ShortParams& params);

// --- NOISE rule ------------------------------------------------------------

/// Six hours at the 20-minute smoothed interval.
inline constexpr std::size_t kDefaultNoiseWindow = 18;

struct NoiseModel {
  std::size_t window_len = kDefaultNoiseWindow;
  double sigma_train = 0.0;        // mean of the windowed standard deviations
  double sigma_hist_spread = 0.0;  // their standard deviation

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Splits `train` into tumbling windows of `window_len` samples (a short tail
/// is dropped) and summarizes the per-window sample standard deviations.
/// Needs at least two full windows.
NoiseModel noise_train(const Series& train, std::size_t window_len = kDefaultNoiseWindow);

/// Per-window standard deviations over tumbling windows (tail dropped).
std::vector<double> windowed_stddevs(const Series& s, std::size_t window_len);

/// Flags every tumbling window whose sample std lies outside
/// sigma_train +/- allow_multiplier * sigma_hist_spread. Band edges are not faults.
DetectionResult noise_detect(const Series& s, const NoiseModel& model, double allow_multiplier);

// --- LLSE ------------------------------------------------------------------

/// How estimation errors are compared against the threshold.
enum class ErrorMode {
  Absolute,  // |s_hat - s|
  Signed,    // s_hat - s, one-sided
};

std::string_view to_string(ErrorMode mode);
ErrorMode parse_error_mode(std::string_view name);

inline constexpr double kDefaultPercentile = 95.0;
inline constexpr std::size_t kDefaultVoteQ = 2;

/// s_hat_i = beta0 + beta1 * s_j, with threshold T_ij.
struct LlseFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double threshold = 0.0;

  double estimate(double neighbor_value) const { return beta0 + beta1 * neighbor_value; }
  friend bool operator==(const LlseFit&, const LlseFit&) = default;
};

struct LlseNeighbor {
  std::string node_id;
  LlseFit fit;

  friend bool operator==(const LlseNeighbor&, const LlseNeighbor&) = default;
};

struct LlseModel {
  std::string target;
  std::vector<LlseNeighbor> neighbors;
  double percentile_p = kDefaultPercentile;
  std::size_t vote_q = kDefaultVoteQ;
  ErrorMode error_mode = ErrorMode::Absolute;

  /// Throws BadParameter when the model invariants do not hold.
  void validate() const;
  friend bool operator==(const LlseModel&, const LlseModel&) = default;
};

/// Ordinary least squares of `target` on `neighbor` over the training window;
/// the threshold is the nearest-rank p-th percentile of the training errors.
LlseFit llse_fit(const Series& target, const Series& neighbor, double percentile_p = kDefaultPercentile,
                 ErrorMode mode = ErrorMode::Absolute);

/// Fits every neighbor in `neighbors` against `target`.
LlseModel llse_train(const Series& target, const std::map<std::string, Series>& neighbors,
                     double percentile_p = kDefaultPercentile, std::size_t vote_q = kDefaultVoteQ,
                     ErrorMode mode = ErrorMode::Absolute);

/// Flags sample t when at least vote_q neighbors have an estimation error above
/// their threshold. A literal "more than q" vote could never fire with two
/// neighbors and q = 2, so the vote is inclusive.
DetectionResult llse_detect(const Series& target, const std::map<std::string, Series>& neighbors,
                            const LlseModel& model);

}  // namespace sensorfault
