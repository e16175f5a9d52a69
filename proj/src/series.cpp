#include "sensorfault/series.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "sensorfault/error.hpp"

namespace sensorfault {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadInputFile: return "bad input file";
    case ErrorCode::UnsupportedData: return "unsupported data";
    case ErrorCode::EmptyInput: return "empty input";
    case ErrorCode::DegenerateInput: return "degenerate input";
    case ErrorCode::BadParameter: return "bad parameter";
    case ErrorCode::InsufficientTraining: return "insufficient training";
    case ErrorCode::UnusableNeighbor: return "unusable neighbor";
    case ErrorCode::BadPairing: return "bad pairing";
    case ErrorCode::ModelDataMismatch: return "model/data mismatch";
    case ErrorCode::DegeneratePlan: return "degenerate plan";
    case ErrorCode::SeriesTooShort: return "series too short";
    case ErrorCode::UndefinedMetric: return "undefined metric";
  }
  return "unknown error";
}

std::string_view to_string(Modality m) {
  return m == Modality::BoxTemperature ? "box_temp" : "soil_moisture";
}

std::optional<Modality> parse_modality(std::string_view name) {
  if (name == "box_temp") return Modality::BoxTemperature;
  if (name == "soil_moisture") return Modality::SoilMoisture;
  return std::nullopt;
}

Series Series::slice(std::size_t first, std::size_t count) const {
  if (first > values.size() || count > values.size() - first) {
    throw Error(ErrorCode::BadParameter, "slice out of range");
  }
  Series out;
  out.node_id = node_id;
  out.modality = modality;
  out.sample_interval = sample_interval;
  out.start_time = time_at(first);
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first),
                    values.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

void Series::validate() const {
  if (sample_interval <= 0) {
    throw Error(ErrorCode::BadParameter, "series '" + node_id + "': sample_interval must be > 0");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::UnsupportedData, "series '" + node_id + "' contains non-finite values");
    }
  }
}

IndexSet GroundTruthLabels::noise_indices() const {
  IndexSet out;
  for (const auto& b : noise_windows) {
    for (std::size_t k = b.start; k < b.end(); ++k) out.push_back(k);
  }
  return index_set::normalized(std::move(out));
}

IndexSet GroundTruthLabels::all_indices() const {
  return index_set::set_union(short_indices, noise_indices());
}

void validate_events(const std::vector<EventWindow>& events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].start >= events[i].end) {
      throw Error(ErrorCode::BadParameter, "event window with start >= end");
    }
    if (i > 0 && events[i].start < events[i - 1].end) {
      throw Error(ErrorCode::BadParameter, "event windows must be sorted and disjoint");
    }
  }
}

namespace index_set {

IndexSet normalized(IndexSet v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool contains(const IndexSet& s, std::size_t k) { return std::binary_search(s.begin(), s.end(), k); }

bool is_subset(const IndexSet& sub, const IndexSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace index_set

}  // namespace sensorfault
