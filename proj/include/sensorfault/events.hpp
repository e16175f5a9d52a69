#pragma once

#include <vector>

#include "sensorfault/series.hpp"

namespace sensorfault {

struct EventExtraction {
  /// Candidate windows whose rainfall total is below this (mm) are discarded.
  double min_total = 1.0;
  /// Wet runs separated by at most this much dry time are merged.
  Seconds gap_tolerance = 3600;
};

/// Derives rain events from precipitation records. Each record covers the
/// interval that ends at its timestamp; the first record's interval length is
/// taken from the spacing to its successor.
std::vector<EventWindow> events_from_precipitation(const std::vector<PrecipRecord>& records,
                                                   const EventExtraction& options = {});

/// Indices k with start <= t_k < end for some event.
IndexSet event_sample_indices(const Series& s, const std::vector<EventWindow>& events);

/// Per event, the indices inside the event's first `horizon` seconds.
std::vector<IndexSet> event_onset_indices(const Series& s, const std::vector<EventWindow>& events,
                                          Seconds horizon = 1800);

/// Per event, all of its sample indices.
std::vector<IndexSet> per_event_indices(const Series& s, const std::vector<EventWindow>& events);

}  // namespace sensorfault
