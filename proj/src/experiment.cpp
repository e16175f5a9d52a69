#include "sensorfault/experiment.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "sensorfault/csv_io.hpp"
#include "sensorfault/error.hpp"
#include "sensorfault/events.hpp"
#include "sensorfault/injectors.hpp"
#include "sensorfault/preprocess.hpp"
#include "sensorfault/random.hpp"
#include "sensorfault/serialization.hpp"

namespace sensorfault {

namespace {

using nlohmann::json;

std::uint64_t injection_seed(std::uint64_t seed, std::size_t node, std::size_t variant) {
  return mix_seed(seed, 1000 + 64 * node + variant);
}

InjectionPlan base_plan(const SweepConfig& c) {
  InjectionPlan plan;
  plan.short_fraction = c.short_fraction;
  plan.noise_total_fraction = c.noise_total_fraction;
  plan.noise_burst_lengths = c.noise_burst_lengths;
  return plan;
}

json point_parameters(const SweepConfig& c, double param) {
  return {{"detector", std::string(to_string(c.detector))},
          {"modality", std::string(to_string(c.modality))},
          {"param", param},
          {"seed", c.seed}};
}

std::vector<SweepPoint> empty_points(const SweepConfig& c) {
  std::vector<SweepPoint> points;
  for (double p : c.grid) {
    SweepPoint pt;
    pt.param = p;
    pt.report.source = c.detector;
    pt.report.parameters = point_parameters(c, p);
    points.push_back(std::move(pt));
  }
  return points;
}

std::vector<SweepPoint> sweep_short(const SweepConfig& c, const PreparedData& data) {
  auto points = empty_points(c);
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    for (std::size_t a = 0; a < c.short_intensities.size(); ++a) {
      InjectionPlan plan = base_plan(c);
      plan.seed = injection_seed(c.seed, i, a);
      plan.short_intensity = c.short_intensities[a];
      const auto injected = inject_short(data.test[i], plan);
      for (auto& pt : points) {
        const auto flags = short_detect(injected.series, ShortParams{pt.param});
        pt.report += assemble_report(injected.series, flags, data.events, injected.labels);
      }
    }
  }
  return points;
}

std::vector<SweepPoint> sweep_noise(const SweepConfig& c, const PreparedData& data) {
  auto points = empty_points(c);
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    const NoiseModel model = noise_train(data.train[i], c.noise_window);
    for (std::size_t a = 0; a < c.noise_multipliers.size(); ++a) {
      InjectionPlan plan = base_plan(c);
      plan.seed = injection_seed(c.seed, i, 32 + a);
      plan.noise_multiplier = c.noise_multipliers[a];
      const auto injected = inject_noise(data.test[i], plan, model.sigma_train);
      for (auto& pt : points) {
        const auto flags = noise_detect(injected.series, model, pt.param);
        pt.report += assemble_report(injected.series, flags, data.events, injected.labels);
      }
    }
  }
  return points;
}

std::vector<SweepPoint> sweep_llse(const SweepConfig& c, const PreparedData& data) {
  if (data.test.size() < 2) throw Error(ErrorCode::BadParameter, "LLSE needs at least two nodes");
  auto points = empty_points(c);
  std::map<std::string, Series> train_by_id;
  for (const auto& s : data.llse_train) train_by_id.emplace(s.node_id, s);
  if (train_by_id.size() != data.llse_train.size()) throw Error(ErrorCode::BadParameter, "duplicate node ids");

  for (std::size_t a = 0; a < c.short_intensities.size(); ++a) {
    std::map<std::string, Series> faulted;
    std::map<std::string, GroundTruthLabels> labels;
    for (std::size_t i = 0; i < data.test.size(); ++i) {
      InjectionPlan plan = base_plan(c);
      plan.seed = injection_seed(c.seed, i, a);
      plan.short_intensity = c.short_intensities[a];
      auto injected = inject_short(data.test[i], plan);
      labels.emplace(data.test[i].node_id, std::move(injected.labels));
      faulted.emplace(data.test[i].node_id, std::move(injected.series));
    }
    for (auto& pt : points) {
      for (const auto& target : data.llse_train) {
        std::map<std::string, Series> neighbors = train_by_id;
        neighbors.erase(target.node_id);
        const auto model = llse_train(target, neighbors, pt.param, c.vote_q, c.error_mode);
        const auto& test = faulted.at(target.node_id);
        const auto flags = llse_detect(test, faulted, model);
        pt.report += assemble_report(test, flags, data.events, labels.at(target.node_id));
      }
    }
  }
  return points;
}

std::vector<Series> synthetic_series(const SweepConfig& c, std::vector<EventWindow>& events) {
  DeploymentSpec spec;
  spec.seed = c.seed;
  spec.nodes = c.nodes;
  spec.clock.days = c.days;
  ScheduleOptions options;
  options.count = c.event_count;
  spec.schedule = make_event_schedule(spec.clock, options, mix_seed(c.seed, 10));
  auto deployment = gen_deployment(spec, c.profiles);
  events = deployment.events;
  return c.modality == Modality::BoxTemperature ? deployment.box_temperature : deployment.soil_moisture;
}

std::vector<Series> loaded_series(const SweepConfig& c, std::vector<EventWindow>& events) {
  const auto ingested = ingest_csv(std::filesystem::path(*c.series_csv));
  // Keep the longest segment per node.
  std::map<std::string, Series> by_node;
  for (const auto& s : ingested.series) {
    if (s.modality != c.modality) continue;
    auto it = by_node.find(s.node_id);
    if (it == by_node.end() || it->second.size() < s.size()) by_node[s.node_id] = s;
  }
  if (by_node.empty()) {
    throw Error(ErrorCode::EmptyInput, "no " + std::string(to_string(c.modality)) + " series in " + *c.series_csv);
  }
  if (c.events_csv) {
    events = read_events_csv(std::filesystem::path(*c.events_csv));
  } else if (c.precipitation_csv) {
    events = events_from_precipitation(read_precipitation_csv(std::filesystem::path(*c.precipitation_csv)));
  } else {
    throw Error(ErrorCode::BadParameter, "series_csv needs events_csv or precipitation_csv");
  }
  std::vector<Series> out;
  for (auto& [id, s] : by_node) out.push_back(std::move(s));
  return out;
}

std::vector<double> grid_from(const json& j) { return j.get<std::vector<double>>(); }

// Rejects keys outside `allowed`; a misspelled setting would otherwise fall back to its default.
void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::BadParameter, "config " + where + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw Error(ErrorCode::BadParameter, "unknown config key '" + item.key() + "' in " + where);
    }
  }
}

}  // namespace

std::vector<double> default_grid(Modality modality, FlagSource detector) {
  switch (detector) {
    case FlagSource::Short:
      if (modality == Modality::BoxTemperature) {
        std::vector<double> g;
        for (int d = 10; d <= 60; d += 5) g.push_back(d);
        return g;
      }
      return {0.003, 0.004, 0.005, 0.0075, 0.01, 0.015, 0.02, 0.03, 0.05, 0.075, 0.1};
    case FlagSource::Noise:
      return {1.0, 1.5, 2.0, 2.5, 3.0};
    case FlagSource::Llse:
      return {kDefaultPercentile};
  }
  return {};
}

std::vector<double> default_short_intensities(Modality modality) {
  if (modality == Modality::BoxTemperature) return {0.5, 1.0, 2.0};
  return {0.1, 0.2, 0.5};
}

SweepConfig resolve_defaults(SweepConfig config) {
  if (config.grid.empty()) config.grid = default_grid(config.modality, config.detector);
  if (config.short_intensities.empty()) config.short_intensities = default_short_intensities(config.modality);
  if (config.noise_multipliers.empty()) config.noise_multipliers = {0.5, 1.5, 3.0};
  return config;
}

void SweepConfig::validate() const {
  if (grid.empty()) throw Error(ErrorCode::BadParameter, "sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::BadParameter, "sweep grid must be strictly increasing");
  }
  if (days < 2 || training_days < 1 || training_days >= days) {
    throw Error(ErrorCode::BadParameter, "training_days must be in [1, days)");
  }
  if (event_count < 0) throw Error(ErrorCode::BadParameter, "event_count must be >= 0");
  if (nodes.empty()) throw Error(ErrorCode::BadParameter, "at least one node is required");
  if (short_intensities.empty() || noise_multipliers.empty()) {
    throw Error(ErrorCode::BadParameter, "injection intensity lists must not be empty");
  }
  if (series_csv && !events_csv && !precipitation_csv) {
    throw Error(ErrorCode::BadParameter, "series_csv needs events_csv or precipitation_csv");
  }
}

SweepConfig sweep_config_from_json(const json& j) {
  try {
    if (j.contains("version") && j.at("version").get<int>() != kConfigVersion) {
      throw Error(ErrorCode::BadParameter, "unsupported config version");
    }
    check_keys(j, {"version", "modality", "detector", "grid", "seed", "data", "synth", "preprocess", "injection", "detectors"},
               "the top level");
    SweepConfig c;
    if (j.contains("modality")) {
      auto m = parse_modality(j.at("modality").get<std::string>());
      if (!m) throw Error(ErrorCode::BadParameter, "unknown modality in config");
      c.modality = *m;
    }
    if (j.contains("detector")) c.detector = parse_flag_source(j.at("detector").get<std::string>());
    if (j.contains("grid")) c.grid = grid_from(j.at("grid"));
    c.seed = j.value("seed", c.seed);
    if (j.contains("data")) {
      const auto& d = j.at("data");
      check_keys(d, {"series_csv", "events_csv", "precipitation_csv"}, "data");
      if (d.contains("series_csv")) c.series_csv = d.at("series_csv").get<std::string>();
      if (d.contains("events_csv")) c.events_csv = d.at("events_csv").get<std::string>();
      if (d.contains("precipitation_csv")) c.precipitation_csv = d.at("precipitation_csv").get<std::string>();
    }
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      check_keys(s, {"days", "event_count", "nodes", "box_temp", "soil_moisture"}, "synth");
      c.days = s.value("days", c.days);
      c.event_count = s.value("event_count", c.event_count);
      if (s.contains("nodes")) {
        c.nodes.clear();
        for (const auto& n : s.at("nodes")) {
          check_keys(n, {"node_id", "response_scale", "lag_seconds"}, "synth.nodes");
          c.nodes.push_back({n.at("node_id").get<std::string>(), n.value("response_scale", 1.0),
                             n.value("lag_seconds", Seconds{0})});
        }
      }
      if (s.contains("box_temp")) {
        const auto& b = s.at("box_temp");
        check_keys(b, {"mean", "diurnal_amplitude", "noise_sigma", "event_depression", "recovery_seconds"}, "synth.box_temp");
        auto& p = c.profiles.box;
        p.mean = b.value("mean", p.mean);
        p.diurnal_amplitude = b.value("diurnal_amplitude", p.diurnal_amplitude);
        p.noise_sigma = b.value("noise_sigma", p.noise_sigma);
        p.event_depression = b.value("event_depression", p.event_depression);
        p.recovery = b.value("recovery_seconds", p.recovery);
      }
      if (s.contains("soil_moisture")) {
        const auto& b = s.at("soil_moisture");
        check_keys(b, {"baseline", "baseline_noise", "spike_gain", "decay_time_constant_seconds", "onset_fraction"},
                   "synth.soil_moisture");
        auto& p = c.profiles.soil;
        p.baseline = b.value("baseline", p.baseline);
        p.baseline_noise = b.value("baseline_noise", p.baseline_noise);
        p.spike_gain = b.value("spike_gain", p.spike_gain);
        p.decay_time_constant = b.value("decay_time_constant_seconds", p.decay_time_constant);
        p.onset_fraction = b.value("onset_fraction", p.onset_fraction);
      }
    }
    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      check_keys(p, {"smooth_pairs", "training_days", "median_width", "llse_median_width"}, "preprocess");
      c.smooth_pairs = p.value("smooth_pairs", c.smooth_pairs);
      c.training_days = p.value("training_days", c.training_days);
      c.median_width = p.value("median_width", c.median_width);
      c.llse_median_width = p.value("llse_median_width", c.llse_median_width);
    }
    if (j.contains("injection")) {
      const auto& in = j.at("injection");
      check_keys(in, {"short_intensities", "noise_multipliers", "short_fraction", "noise_total_fraction", "noise_burst_lengths"},
                 "injection");
      c.short_intensities = in.value("short_intensities", c.short_intensities);
      c.noise_multipliers = in.value("noise_multipliers", c.noise_multipliers);
      c.short_fraction = in.value("short_fraction", c.short_fraction);
      c.noise_total_fraction = in.value("noise_total_fraction", c.noise_total_fraction);
      c.noise_burst_lengths = in.value("noise_burst_lengths", c.noise_burst_lengths);
    }
    if (j.contains("detectors")) {
      const auto& d = j.at("detectors");
      check_keys(d, {"noise_window", "vote_q", "error_mode"}, "detectors");
      c.noise_window = d.value("noise_window", c.noise_window);
      c.vote_q = d.value("vote_q", c.vote_q);
      if (d.contains("error_mode")) c.error_mode = parse_error_mode(d.at("error_mode").get<std::string>());
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadParameter, std::string("malformed config: ") + e.what());
  }
}

json to_json(const SweepConfig& c) {
  json j;
  j["version"] = kConfigVersion;
  j["modality"] = std::string(to_string(c.modality));
  j["detector"] = std::string(to_string(c.detector));
  j["grid"] = c.grid;
  j["seed"] = c.seed;
  json data = json::object();
  if (c.series_csv) data["series_csv"] = *c.series_csv;
  if (c.events_csv) data["events_csv"] = *c.events_csv;
  if (c.precipitation_csv) data["precipitation_csv"] = *c.precipitation_csv;
  j["data"] = data;
  json nodes = json::array();
  for (const auto& n : c.nodes) {
    nodes.push_back({{"node_id", n.node_id}, {"response_scale", n.response_scale}, {"lag_seconds", n.lag}});
  }
  const auto& b = c.profiles.box;
  const auto& s = c.profiles.soil;
  j["synth"] = {{"days", c.days},
                {"event_count", c.event_count},
                {"nodes", nodes},
                {"box_temp",
                 {{"mean", b.mean},
                  {"diurnal_amplitude", b.diurnal_amplitude},
                  {"noise_sigma", b.noise_sigma},
                  {"event_depression", b.event_depression},
                  {"recovery_seconds", b.recovery}}},
                {"soil_moisture",
                 {{"baseline", s.baseline},
                  {"baseline_noise", s.baseline_noise},
                  {"spike_gain", s.spike_gain},
                  {"decay_time_constant_seconds", s.decay_time_constant},
                  {"onset_fraction", s.onset_fraction}}}};
  j["preprocess"] = {{"smooth_pairs", c.smooth_pairs}, {"training_days", c.training_days}, {"median_width", c.median_width},
                      {"llse_median_width", c.llse_median_width}};
  j["injection"] = {{"short_intensities", c.short_intensities},
                    {"noise_multipliers", c.noise_multipliers},
                    {"short_fraction", c.short_fraction},
                    {"noise_total_fraction", c.noise_total_fraction},
                    {"noise_burst_lengths", c.noise_burst_lengths}};
  j["detectors"] = {{"noise_window", c.noise_window},
                    {"vote_q", c.vote_q},
                    {"error_mode", std::string(to_string(c.error_mode))}};
  return j;
}

PreparedData prepare_data(const SweepConfig& c) {
  PreparedData data;
  auto series = c.series_csv ? loaded_series(c, data.events) : synthetic_series(c, data.events);
  for (auto& s : series) {
    if (c.smooth_pairs) s = smooth_pairs(s);
    const auto per_day = static_cast<std::size_t>(86400 / s.sample_interval);
    const std::size_t n_train = per_day * static_cast<std::size_t>(c.training_days);
    if (n_train >= s.size()) {
      throw Error(ErrorCode::DegenerateInput, "series '" + s.node_id + "' is too short for the training split");
    }
    const Series train = s.slice(0, n_train);
    data.train.push_back(median_filter(train, c.median_width));
    data.llse_train.push_back(median_filter(train, c.llse_median_width));
    data.test.push_back(s.slice(n_train, s.size() - n_train));
  }
  return data;
}

SweepResult run_sweep(const SweepConfig& config_in) {
  const SweepConfig c = resolve_defaults(config_in);
  c.validate();
  const PreparedData data = prepare_data(c);
  SweepResult result;
  result.config = to_json(c);
  switch (c.detector) {
    case FlagSource::Short: result.points = sweep_short(c, data); break;
    case FlagSource::Noise: result.points = sweep_noise(c, data); break;
    case FlagSource::Llse: result.points = sweep_llse(c, data); break;
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  auto cell = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
  out << "param,mu,mu_first_half_hour,fn_ratio\n";
  for (const auto& pt : result.points) {
    out << format_double(pt.param) << ',' << cell(pt.report.mu()) << ',' << cell(pt.report.mu_first_half_hour()) << ','
        << cell(pt.report.false_negative_ratio()) << '\n';
  }
}

json sweep_report_json(const SweepResult& result) {
  json points = json::array();
  for (const auto& pt : result.points) points.push_back({{"param", pt.param}, {"report", to_json(pt.report)}});
  return {{"format", "sensorfault.sweep_report"}, {"version", kFormatVersion}, {"config", result.config}, {"points", points}};
}

}  // namespace sensorfault
