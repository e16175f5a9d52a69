#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sensorfault/detectors.hpp"
#include "sensorfault/metrics.hpp"
#include "sensorfault/synthgen.hpp"

namespace sensorfault {

inline constexpr int kConfigVersion = 1;

/// Everything a sweep needs. Loaded from a versioned JSON document; unset keys
/// take the defaults below, and `resolve_defaults` fills modality-dependent ones.
struct SweepConfig {
  Modality modality = Modality::BoxTemperature;
  FlagSource detector = FlagSource::Short;
  /// SHORT: delta values. NOISE: sigma_allow multipliers. LLSE: percentiles p.
  std::vector<double> grid;
  std::uint64_t seed = 1;

  // Data: synthetic unless series_csv is given.
  std::optional<std::string> series_csv;
  std::optional<std::string> events_csv;
  std::optional<std::string> precipitation_csv;
  int days = 90;
  int event_count = 21;
  std::vector<NodeSpec> nodes = default_nodes();
  Profiles profiles;

  // Preprocessing.
  bool smooth_pairs = true;
  int training_days = 30;
  std::size_t median_width = 5;       // NOISE training cleanup
  std::size_t llse_median_width = 1;  // LLSE training cleanup; 1 leaves the data as is

  // Injection. Empty lists are replaced by the modality defaults.
  std::vector<double> short_intensities;
  std::vector<double> noise_multipliers;
  double short_fraction = 0.015;
  double noise_total_fraction = 0.065;
  std::vector<std::size_t> noise_burst_lengths{144, 360};

  // Detectors.
  std::size_t noise_window = kDefaultNoiseWindow;
  std::size_t vote_q = kDefaultVoteQ;
  ErrorMode error_mode = ErrorMode::Absolute;

  /// Throws BadParameter on an empty or non-increasing grid and on other
  /// out-of-range settings.
  void validate() const;
};

/// Fills an empty grid and empty injection lists from the modality/detector defaults.
SweepConfig resolve_defaults(SweepConfig config);

std::vector<double> default_grid(Modality modality, FlagSource detector);
std::vector<double> default_short_intensities(Modality modality);

SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepConfig& config);

struct SweepPoint {
  double param = 0.0;
  EvalReport report;  // pooled over nodes and injection intensities
};

struct SweepResult {
  std::vector<SweepPoint> points;
  nlohmann::json config;  // resolved config echo
};

/// Synthesize or load data, split train/test, inject faults, then detect and
/// evaluate at every grid point. Deterministic in (config, seed).
SweepResult run_sweep(const SweepConfig& config);

/// `param,mu,mu_first_half_hour,fn_ratio`; undefined metrics are left empty.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::json sweep_report_json(const SweepResult& result);

/// Training/test material after smoothing and the train/test split.
struct PreparedData {
  std::vector<Series> train;       // median-filtered with median_width
  std::vector<Series> llse_train;  // median-filtered with llse_median_width
  std::vector<Series> test;
  std::vector<EventWindow> events;
};

PreparedData prepare_data(const SweepConfig& config);

}  // namespace sensorfault
