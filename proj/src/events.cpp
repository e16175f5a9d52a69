#include "sensorfault/events.hpp"

#include <algorithm>

#include "sensorfault/error.hpp"

namespace sensorfault {

namespace {

// Smallest k with start_time + k * interval >= t, clamped to [0, n].
std::size_t first_index_at_or_after(const Series& s, Timestamp t) {
  const Timestamp offset = t - s.start_time;
  if (offset <= 0) return 0;
  const Timestamp k = (offset + s.sample_interval - 1) / s.sample_interval;
  return static_cast<std::size_t>(std::min<Timestamp>(k, static_cast<Timestamp>(s.size())));
}

IndexSet indices_in(const Series& s, Timestamp start, Timestamp end) {
  IndexSet out;
  if (end <= start) return out;
  const std::size_t lo = first_index_at_or_after(s, start);
  const std::size_t hi = first_index_at_or_after(s, end);
  for (std::size_t k = lo; k < hi; ++k) out.push_back(k);
  return out;
}

}  // namespace

std::vector<EventWindow> events_from_precipitation(const std::vector<PrecipRecord>& records,
                                                   const EventExtraction& options) {
  if (options.min_total < 0.0 || options.gap_tolerance < 0) {
    throw Error(ErrorCode::BadParameter, "event extraction thresholds must be non-negative");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].amount < 0.0) throw Error(ErrorCode::BadParameter, "negative precipitation amount");
    if (i > 0 && records[i].time <= records[i - 1].time) {
      throw Error(ErrorCode::BadParameter, "precipitation records must be sorted by time");
    }
  }

  Seconds interval = 900;
  if (records.size() >= 2) {
    interval = records[1].time - records[0].time;
    for (std::size_t i = 2; i < records.size(); ++i) interval = std::min(interval, records[i].time - records[i - 1].time);
  }

  struct Candidate {
    EventWindow window;
    double total;
  };
  std::vector<Candidate> candidates;
  for (const auto& r : records) {
    if (r.amount <= 0.0) continue;
    const Timestamp wet_start = r.time - interval;
    if (!candidates.empty() && wet_start - candidates.back().window.end <= options.gap_tolerance) {
      candidates.back().window.end = r.time;
      candidates.back().total += r.amount;
    } else {
      candidates.push_back({{wet_start, r.time}, r.amount});
    }
  }

  std::vector<EventWindow> events;
  for (const auto& c : candidates) {
    if (c.total >= options.min_total) events.push_back(c.window);
  }
  return events;
}

IndexSet event_sample_indices(const Series& s, const std::vector<EventWindow>& events) {
  IndexSet out;
  for (const auto& e : events) {
    auto part = indices_in(s, e.start, e.end);
    out.insert(out.end(), part.begin(), part.end());
  }
  return index_set::normalized(std::move(out));
}

std::vector<IndexSet> per_event_indices(const Series& s, const std::vector<EventWindow>& events) {
  std::vector<IndexSet> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(indices_in(s, e.start, e.end));
  return out;
}

std::vector<IndexSet> event_onset_indices(const Series& s, const std::vector<EventWindow>& events, Seconds horizon) {
  if (horizon <= 0) throw Error(ErrorCode::BadParameter, "onset horizon must be > 0");
  std::vector<IndexSet> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(indices_in(s, e.start, std::min(e.end, e.start + horizon)));
  return out;
}

}  // namespace sensorfault
