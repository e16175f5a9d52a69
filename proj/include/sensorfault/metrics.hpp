#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sensorfault/detectors.hpp"
#include "sensorfault/series.hpp"

namespace sensorfault {

enum class FaultKind { Short, Noise };

/// Fraction of event samples flagged. Throws UndefinedMetric on an empty event set.
double mu_samples(const IndexSet& flags, const IndexSet& event_indices);

/// Duration form: sum over events of flagged-window overlap divided by the sum
/// of event lengths, both counted in samples on `s`'s grid.
double mu_duration(std::span<const FlaggedWindow> windows, const std::vector<EventWindow>& events, const Series& s);

/// SHORT: fraction of labeled samples left unflagged. NOISE: fraction of
/// labeled bursts with no flagged sample inside. Throws UndefinedMetric when
/// there is no ground truth of that kind.
double false_negative_ratio(const DetectionResult& flags, const GroundTruthLabels& truth, FaultKind kind);

/// Fraction of labeled NOISE samples left unflagged.
double noise_sample_false_negative_ratio(const DetectionResult& flags, const GroundTruthLabels& truth);

/// A count ratio that keeps its numerator and denominator so results from
/// several runs can be pooled. Empty denominators have no value.
struct Ratio {
  std::size_t hits = 0;
  std::size_t total = 0;

  std::optional<double> value() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(total);
  }
  Ratio& operator+=(const Ratio& o) {
    hits += o.hits;
    total += o.total;
    return *this;
  }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct EventBreakdown {
  std::string series;  // node id of the evaluated series
  std::size_t event_index = 0;
  std::size_t event_samples = 0;
  std::size_t misclassified = 0;
  std::size_t onset_samples = 0;
  std::size_t onset_misclassified = 0;

  friend bool operator==(const EventBreakdown&, const EventBreakdown&) = default;
};

struct EvalReport {
  FlagSource source = FlagSource::Short;
  Ratio misclassified;         // mu
  Ratio onset_misclassified;   // mu over each event's first half hour
  Ratio short_missed;          // SHORT false negatives, per sample
  Ratio noise_bursts_missed;   // NOISE false negatives, per burst
  Ratio noise_samples_missed;  // NOISE false negatives, per sample
  std::vector<EventBreakdown> per_event;
  nlohmann::json parameters = nlohmann::json::object();

  std::optional<double> mu() const { return misclassified.value(); }
  std::optional<double> mu_first_half_hour() const { return onset_misclassified.value(); }
  /// The false-negative ratio for the fault kind this detector targets:
  /// NOISE bursts for the NOISE rule, SHORT samples otherwise.
  std::optional<double> false_negative_ratio() const;

  /// Adds another report's counts and per-event rows.
  EvalReport& operator+=(const EvalReport& other);
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline constexpr Seconds kOnsetHorizon = 1800;

/// Computes every metric for one evaluated series. Event samples that carry an
/// injected fault label are not event measurements and are left out of mu.
EvalReport assemble_report(const Series& s, const DetectionResult& flags, const std::vector<EventWindow>& events,
                           const GroundTruthLabels& truth, nlohmann::json parameters = nlohmann::json::object());

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

}  // namespace sensorfault
