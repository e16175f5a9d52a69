#include "sensorfault/metrics.hpp"

#include <algorithm>

#include "sensorfault/error.hpp"
#include "sensorfault/events.hpp"

namespace sensorfault {

namespace {

struct Span {
  std::size_t lo;
  std::size_t hi;  // exclusive
};

std::vector<Span> merged(std::span<const FlaggedWindow> windows) {
  std::vector<Span> spans;
  for (const auto& w : windows) {
    if (w.length > 0) spans.push_back({w.start, w.end()});
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, s.hi);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::size_t count_in(const IndexSet& set, std::size_t lo, std::size_t hi) {
  auto first = std::lower_bound(set.begin(), set.end(), lo);
  auto last = std::lower_bound(first, set.end(), hi);
  return static_cast<std::size_t>(last - first);
}

}  // namespace

double mu_samples(const IndexSet& flags, const IndexSet& event_indices) {
  if (event_indices.empty()) throw Error(ErrorCode::UndefinedMetric, "misclassification error needs event samples");
  const auto hit = index_set::set_intersection(flags, event_indices).size();
  return static_cast<double>(hit) / static_cast<double>(event_indices.size());
}

double mu_duration(std::span<const FlaggedWindow> windows, const std::vector<EventWindow>& events, const Series& s) {
  validate_events(events);
  for (const auto& w : windows) {
    if (w.end() > s.size()) throw Error(ErrorCode::BadParameter, "flagged window exceeds the series");
  }
  const auto spans = merged(windows);
  std::size_t overlap = 0;
  std::size_t event_total = 0;
  for (const auto& idx : per_event_indices(s, events)) {
    if (idx.empty()) continue;
    const std::size_t lo = idx.front();
    const std::size_t hi = idx.back() + 1;
    event_total += hi - lo;
    for (const auto& sp : spans) {
      const std::size_t a = std::max(lo, sp.lo);
      const std::size_t b = std::min(hi, sp.hi);
      if (a < b) overlap += b - a;
    }
  }
  if (event_total == 0) throw Error(ErrorCode::UndefinedMetric, "misclassification error needs event samples");
  return static_cast<double>(overlap) / static_cast<double>(event_total);
}

double false_negative_ratio(const DetectionResult& flags, const GroundTruthLabels& truth, FaultKind kind) {
  const IndexSet flagged = flags.flagged_indices();
  if (kind == FaultKind::Short) {
    if (truth.short_indices.empty()) throw Error(ErrorCode::UndefinedMetric, "no SHORT ground truth");
    const auto missed = index_set::set_difference(truth.short_indices, flagged).size();
    return static_cast<double>(missed) / static_cast<double>(truth.short_indices.size());
  }
  if (truth.noise_windows.empty()) throw Error(ErrorCode::UndefinedMetric, "no NOISE ground truth");
  std::size_t missed = 0;
  for (const auto& b : truth.noise_windows) {
    if (count_in(flagged, b.start, b.end()) == 0) ++missed;
  }
  return static_cast<double>(missed) / static_cast<double>(truth.noise_windows.size());
}

double noise_sample_false_negative_ratio(const DetectionResult& flags, const GroundTruthLabels& truth) {
  const IndexSet labeled = truth.noise_indices();
  if (labeled.empty()) throw Error(ErrorCode::UndefinedMetric, "no NOISE ground truth");
  const auto missed = index_set::set_difference(labeled, flags.flagged_indices()).size();
  return static_cast<double>(missed) / static_cast<double>(labeled.size());
}

std::optional<double> EvalReport::false_negative_ratio() const {
  return source == FlagSource::Noise ? noise_bursts_missed.value() : short_missed.value();
}

EvalReport& EvalReport::operator+=(const EvalReport& other) {
  misclassified += other.misclassified;
  onset_misclassified += other.onset_misclassified;
  short_missed += other.short_missed;
  noise_bursts_missed += other.noise_bursts_missed;
  noise_samples_missed += other.noise_samples_missed;
  per_event.insert(per_event.end(), other.per_event.begin(), other.per_event.end());
  return *this;
}

EvalReport assemble_report(const Series& s, const DetectionResult& flags, const std::vector<EventWindow>& events,
                           const GroundTruthLabels& truth, nlohmann::json parameters) {
  validate_events(events);
  EvalReport report;
  report.source = flags.source;
  report.parameters = std::move(parameters);

  const IndexSet flagged = flags.flagged_indices();
  const IndexSet injected = truth.all_indices();
  const auto all_events = per_event_indices(s, events);
  const auto onsets = event_onset_indices(s, events, kOnsetHorizon);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const IndexSet members = index_set::set_difference(all_events[i], injected);
    const IndexSet onset = index_set::set_difference(onsets[i], injected);
    EventBreakdown row;
    row.series = s.node_id;
    row.event_index = i;
    row.event_samples = members.size();
    row.misclassified = index_set::set_intersection(members, flagged).size();
    row.onset_samples = onset.size();
    row.onset_misclassified = index_set::set_intersection(onset, flagged).size();
    report.misclassified += {row.misclassified, row.event_samples};
    report.onset_misclassified += {row.onset_misclassified, row.onset_samples};
    report.per_event.push_back(std::move(row));
  }

  if (!truth.short_indices.empty()) {
    report.short_missed = {index_set::set_difference(truth.short_indices, flagged).size(), truth.short_indices.size()};
  }
  if (!truth.noise_windows.empty()) {
    std::size_t missed = 0;
    for (const auto& b : truth.noise_windows) {
      if (count_in(flagged, b.start, b.end()) == 0) ++missed;
    }
    report.noise_bursts_missed = {missed, truth.noise_windows.size()};
    const IndexSet labeled = truth.noise_indices();
    report.noise_samples_missed = {index_set::set_difference(labeled, flagged).size(), labeled.size()};
  }
  return report;
}

namespace {

void put_optional(nlohmann::json& j, const char* key, std::optional<double> v) {
  if (v) j[key] = *v;
}

nlohmann::json ratio_json(const Ratio& r) { return {{"hits", r.hits}, {"total", r.total}}; }

Ratio ratio_from(const nlohmann::json& j) { return {j.at("hits").get<std::size_t>(), j.at("total").get<std::size_t>()}; }

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["detector"] = std::string(to_string(report.source));
  put_optional(j, "mu", report.mu());
  put_optional(j, "mu_first_half_hour", report.mu_first_half_hour());
  put_optional(j, "false_negative_ratio", report.false_negative_ratio());
  put_optional(j, "fn_short", report.short_missed.value());
  put_optional(j, "fn_noise_bursts", report.noise_bursts_missed.value());
  put_optional(j, "fn_noise_samples", report.noise_samples_missed.value());
  j["counts"] = {
      {"misclassified", ratio_json(report.misclassified)},
      {"onset_misclassified", ratio_json(report.onset_misclassified)},
      {"short_missed", ratio_json(report.short_missed)},
      {"noise_bursts_missed", ratio_json(report.noise_bursts_missed)},
      {"noise_samples_missed", ratio_json(report.noise_samples_missed)},
  };
  auto rows = nlohmann::json::array();
  for (const auto& e : report.per_event) {
    rows.push_back({{"series", e.series},
                    {"event", e.event_index},
                    {"event_samples", e.event_samples},
                    {"misclassified", e.misclassified},
                    {"onset_samples", e.onset_samples},
                    {"onset_misclassified", e.onset_misclassified}});
  }
  j["per_event"] = std::move(rows);
  j["parameters"] = report.parameters;
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.source = parse_flag_source(j.at("detector").get<std::string>());
    const auto& c = j.at("counts");
    r.misclassified = ratio_from(c.at("misclassified"));
    r.onset_misclassified = ratio_from(c.at("onset_misclassified"));
    r.short_missed = ratio_from(c.at("short_missed"));
    r.noise_bursts_missed = ratio_from(c.at("noise_bursts_missed"));
    r.noise_samples_missed = ratio_from(c.at("noise_samples_missed"));
    for (const auto& e : j.at("per_event")) {
      r.per_event.push_back({e.at("series").get<std::string>(), e.at("event").get<std::size_t>(),
                             e.at("event_samples").get<std::size_t>(), e.at("misclassified").get<std::size_t>(),
                             e.at("onset_samples").get<std::size_t>(), e.at("onset_misclassified").get<std::size_t>()});
    }
    r.parameters = j.value("parameters", nlohmann::json::object());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadInputFile, std::string("malformed report JSON: ") + e.what());
  }
}

}  // namespace sensorfault
