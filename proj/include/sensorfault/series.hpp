#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sensorfault {

/// UTC epoch seconds.
using Timestamp = std::int64_t;
/// Duration in seconds.
using Seconds = std::int64_t;

/// Sorted, duplicate-free sample indices.
using IndexSet = std::vector<std::size_t>;

enum class Modality {
  BoxTemperature,  // degrees C
  SoilMoisture,    // volumetric water content, [0,1]
};

/// "box_temp" / "soil_moisture", the names used in CSV files and on the CLI.
std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view name);

/// Uniformly sampled readings of one modality from one node.
/// Sample k is taken at start_time + k * sample_interval.
struct Series {
  std::string node_id;
  Modality modality = Modality::BoxTemperature;
  Timestamp start_time = 0;
  Seconds sample_interval = 600;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  Timestamp time_at(std::size_t k) const {
    return start_time + static_cast<Timestamp>(k) * sample_interval;
  }
  /// One past the last sample's time.
  Timestamp end_time() const { return time_at(values.size()); }

  /// Same metadata, values [first, first + count).
  Series slice(std::size_t first, std::size_t count) const;

  /// Throws BadParameter / UnsupportedData when the invariants do not hold.
  void validate() const;
};

/// Half-open interval [start, end).
struct EventWindow {
  Timestamp start = 0;
  Timestamp end = 0;

  Seconds duration() const { return end - start; }
  bool contains(Timestamp t) const { return start <= t && t < end; }
  friend bool operator==(const EventWindow&, const EventWindow&) = default;
};

/// Rainfall depth (mm) accumulated over the interval ending at `time`.
struct PrecipRecord {
  Timestamp time = 0;
  double amount = 0.0;
};

struct NoiseBurst {
  std::size_t start = 0;
  std::size_t length = 0;

  std::size_t end() const { return start + length; }
  friend bool operator==(const NoiseBurst&, const NoiseBurst&) = default;
};

/// Positions of injected faults, kept per fault kind.
struct GroundTruthLabels {
  IndexSet short_indices;
  std::vector<NoiseBurst> noise_windows;

  /// Every labeled sample index of both kinds.
  IndexSet all_indices() const;
  /// Sample indices covered by noise bursts.
  IndexSet noise_indices() const;
};

/// Throws if windows are empty, unsorted or overlapping.
void validate_events(const std::vector<EventWindow>& events);

namespace index_set {

IndexSet normalized(IndexSet v);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
bool contains(const IndexSet& s, std::size_t k);
bool is_subset(const IndexSet& sub, const IndexSet& super);

}  // namespace index_set

}  // namespace sensorfault
