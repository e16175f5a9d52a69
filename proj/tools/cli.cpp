#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sensorfault/csv_io.hpp"
#include "sensorfault/detectors.hpp"
#include "sensorfault/error.hpp"
#include "sensorfault/events.hpp"
#include "sensorfault/experiment.hpp"
#include "sensorfault/injectors.hpp"
#include "sensorfault/metrics.hpp"
#include "sensorfault/preprocess.hpp"
#include "sensorfault/random.hpp"
#include "sensorfault/serialization.hpp"
#include "sensorfault/synthgen.hpp"

namespace sensorfault::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Files of one run, held in memory until everything has been computed.
// commit() writes them next to their final names and renames them into place;
// on failure nothing from this run is left behind.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.first);
    return out;
  }

  void commit() const {
    std::vector<fs::path> staged, placed;
    try {
      fs::create_directories(dir_);
      for (const auto& [name, content] : files_) {
        const fs::path part = dir_ / (name + ".part");
        staged.push_back(part);
        std::ofstream f(part, std::ios::binary);
        f << content;
        f.close();
        if (!f) throw Error(ErrorCode::BadInputFile, "cannot write '" + part.string() + "'");
      }
      for (std::size_t i = 0; i < files_.size(); ++i) {
        const fs::path final_path = dir_ / files_[i].first;
        fs::rename(staged[i], final_path);
        placed.push_back(final_path);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : staged) fs::remove(p, ec);
      for (const auto& p : placed) fs::remove(p, ec);
      throw;
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

template <typename F>
std::string render(F&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Common {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string modality;
  CLI::Option* seed_opt = nullptr;
};

SweepConfig load_config(const Common& common) {
  SweepConfig c = common.config_path.empty() ? SweepConfig{} : sweep_config_from_json(read_json_file(common.config_path));
  if (common.seed_opt && common.seed_opt->count() > 0) c.seed = common.seed;
  if (!common.modality.empty()) {
    auto m = parse_modality(common.modality);
    if (!m) throw Error(ErrorCode::BadParameter, "unknown modality '" + common.modality + "'");
    c.modality = *m;
  }
  return c;
}

// Shared loading options for commands that read a series CSV.
struct SeriesInput {
  std::string path;
  std::string smooth;  // "", "true" or "false"; empty means the config value
  double from_day = 0.0;
  double to_day = -1.0;
};

void add_series_input(CLI::App* cmd, SeriesInput& in) {
  cmd->add_option("--input", in.path, "Series CSV (timestamp,node_id,modality,value)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--smooth", in.smooth, "Pair-average samples on load (default from config)")
      ->check(CLI::IsMember({"true", "false"}));
  cmd->add_option("--from-day", in.from_day, "Drop samples before this many days from the series start")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--to-day", in.to_day, "Drop samples from this many days after the series start on");
}

json input_echo(const SeriesInput& in, bool smooth) {
  json j = {{"input", in.path}, {"smooth", smooth}, {"from_day", in.from_day}};
  if (in.to_day >= 0) j["to_day"] = in.to_day;
  return j;
}

Series window_of(const Series& s, const SeriesInput& in) {
  const double per_day = 86400.0 / static_cast<double>(s.sample_interval);
  const auto first = static_cast<std::size_t>(std::llround(in.from_day * per_day));
  std::size_t last = s.size();
  if (in.to_day >= 0) last = std::min(last, static_cast<std::size_t>(std::llround(in.to_day * per_day)));
  if (first >= last) throw Error(ErrorCode::BadParameter, "day range selects no samples of '" + s.node_id + "'");
  return s.slice(first, last - first);
}

// Every series of the modality, keyed by node, after smoothing and windowing.
// Split series keep their longest segment.
std::map<std::string, Series> load_modality(const SeriesInput& in, Modality modality, bool smooth) {
  const auto ingested = ingest_csv(fs::path(in.path));
  std::map<std::string, Series> by_node;
  for (const auto& s : ingested.series) {
    if (s.modality != modality) continue;
    auto it = by_node.find(s.node_id);
    if (it == by_node.end() || it->second.size() < s.size()) by_node[s.node_id] = s;
  }
  if (by_node.empty()) {
    throw Error(ErrorCode::EmptyInput, "no " + std::string(to_string(modality)) + " series in '" + in.path + "'");
  }
  for (auto& [id, s] : by_node) {
    if (smooth) s = smooth_pairs(s);
    s = window_of(s, in);
  }
  return by_node;
}

const Series& pick(const std::map<std::string, Series>& all, const std::string& node) {
  auto it = all.find(node);
  if (it == all.end()) throw Error(ErrorCode::BadParameter, "no series for node '" + node + "'");
  return it->second;
}

bool smooth_flag(const SeriesInput& in, const SweepConfig& c) { return in.smooth.empty() ? c.smooth_pairs : in.smooth == "true"; }

std::vector<Series> values_of(const std::map<std::string, Series>& all) {
  std::vector<Series> out;
  for (const auto& [id, s] : all) out.push_back(s);
  return out;
}

json echo(const std::string& command, const json& options, const Outputs& outputs) {
  return {{"format", "sensorfault.run"}, {"version", kFormatVersion}, {"command", command},
          {"options", options}, {"outputs", outputs.names()}};
}

// --- commands --------------------------------------------------------------

void cmd_synth(const Common& common) {
  SweepConfig c = load_config(common);
  DeploymentSpec spec;
  spec.seed = c.seed;
  spec.nodes = c.nodes;
  spec.clock.days = c.days;
  ScheduleOptions options;
  options.count = c.event_count;
  spec.schedule = make_event_schedule(spec.clock, options, mix_seed(c.seed, 10));
  const auto dep = gen_deployment(spec, c.profiles);

  auto all = dep.box_temperature;
  all.insert(all.end(), dep.soil_moisture.begin(), dep.soil_moisture.end());
  Outputs out(common.out_dir);
  out.add("series.csv", render([&](std::ostream& o) { write_series_csv(o, all); }));
  out.add("events.csv", render([&](std::ostream& o) { write_events_csv(o, dep.events); }));
  out.add("precipitation.csv",
          render([&](std::ostream& o) { write_precipitation_csv(o, precipitation_from_schedule(spec.schedule, spec.clock)); }));
  json cfg = to_json(c);
  out.add("synth.config.json", dump(echo("synth", {{"config", cfg}}, out)));
  out.commit();
}

struct InjectArgs {
  SeriesInput in;
  std::string node;
  std::string kind = "short";
  std::optional<double> intensity;
  std::optional<double> multiplier;
  std::optional<double> base_sigma;
  std::string noise_model;
};

void cmd_inject(const Common& common, const InjectArgs& a) {
  SweepConfig c = resolve_defaults(load_config(common));
  const bool smooth = smooth_flag(a.in, c);
  auto all = load_modality(a.in, c.modality, smooth);
  const Series& target = pick(all, a.node);

  InjectionPlan plan;
  plan.seed = c.seed;
  plan.short_fraction = c.short_fraction;
  plan.noise_total_fraction = c.noise_total_fraction;
  plan.noise_burst_lengths = c.noise_burst_lengths;
  plan.short_intensity = a.intensity.value_or(c.short_intensities.front());
  plan.noise_multiplier = a.multiplier.value_or(c.noise_multipliers.front());

  double base = 0.0;
  if (a.kind != "short") {
    if (a.base_sigma) {
      base = *a.base_sigma;
    } else if (!a.noise_model.empty()) {
      base = noise_model_from_json(read_json_file(a.noise_model)).sigma_train;
    } else {
      throw Error(ErrorCode::BadParameter, "NOISE injection needs --base-sigma or --noise-model");
    }
  }
  InjectionOutcome result = a.kind == "short"   ? inject_short(target, plan)
                            : a.kind == "noise" ? inject_noise(target, plan, base)
                                                : inject_noise_then_short(target, plan, base);
  all[a.node] = result.series;

  Outputs out(common.out_dir);
  out.add("faulted.csv", render([&](std::ostream& o) { write_series_csv(o, values_of(all)); }));
  json labels = labels_to_json(result.labels, plan);
  labels["node_id"] = a.node;
  labels["modality"] = std::string(to_string(c.modality));
  out.add("labels.json", dump(labels));
  json opts = input_echo(a.in, smooth);
  opts.update({{"node", a.node}, {"kind", a.kind}, {"modality", std::string(to_string(c.modality))},
               {"plan", to_json(plan)}, {"base_sigma", base}});
  out.add("inject.config.json", dump(echo("inject", opts, out)));
  out.commit();
}

struct TrainArgs {
  SeriesInput in;
  std::string node;
  std::string detector = "noise";
  std::optional<std::size_t> median_width;
  std::optional<double> percentile;
};

void cmd_train(const Common& common, const TrainArgs& a) {
  SweepConfig c = load_config(common);
  const bool smooth = smooth_flag(a.in, c);
  const FlagSource detector = parse_flag_source(a.detector);
  if (detector == FlagSource::Short) throw Error(ErrorCode::BadParameter, "the SHORT rule has no model to train");
  const std::size_t width = a.median_width.value_or(detector == FlagSource::Noise ? c.median_width : c.llse_median_width);

  auto all = load_modality(a.in, c.modality, smooth);
  for (auto& [id, s] : all) s = median_filter(s, width);

  json model;
  if (detector == FlagSource::Noise) {
    model = to_json(noise_train(pick(all, a.node), c.noise_window));
  } else {
    model = to_json(llse_train(pick(all, a.node), all, a.percentile.value_or(kDefaultPercentile), c.vote_q, c.error_mode));
  }
  Outputs out(common.out_dir);
  out.add("model.json", dump(model));
  json opts = input_echo(a.in, smooth);
  opts.update({{"node", a.node}, {"detector", a.detector}, {"modality", std::string(to_string(c.modality))},
               {"median_width", width}});
  out.add("train.config.json", dump(echo("train", opts, out)));
  out.commit();
}

struct DetectArgs {
  SeriesInput in;
  std::string node;
  std::string detector = "short";
  std::optional<double> delta;
  std::optional<double> multiplier;
  std::string model;
};

void cmd_detect(const Common& common, const DetectArgs& a) {
  SweepConfig c = load_config(common);
  const bool smooth = a.in.smooth == "true";  // inputs are usually already-prepared faulted series
  const FlagSource detector = parse_flag_source(a.detector);
  auto all = load_modality(a.in, c.modality, smooth);
  const Series& target = pick(all, a.node);

  json opts = input_echo(a.in, smooth);
  opts.update({{"node", a.node}, {"detector", a.detector}, {"modality", std::string(to_string(c.modality))}});
  DetectionResult result;
  switch (detector) {
    case FlagSource::Short:
      if (!a.delta) throw Error(ErrorCode::BadParameter, "SHORT detection needs --delta");
      result = short_detect(target, {*a.delta});
      opts["delta"] = *a.delta;
      break;
    case FlagSource::Noise: {
      if (a.model.empty() || !a.multiplier) throw Error(ErrorCode::BadParameter, "NOISE detection needs --model and --multiplier");
      result = noise_detect(target, noise_model_from_json(read_json_file(a.model)), *a.multiplier);
      opts.update({{"model", a.model}, {"multiplier", *a.multiplier}});
      break;
    }
    case FlagSource::Llse: {
      if (a.model.empty()) throw Error(ErrorCode::BadParameter, "LLSE detection needs --model");
      const auto model = llse_model_from_json(read_json_file(a.model));
      if (model.target != a.node) {
        throw Error(ErrorCode::ModelDataMismatch, "model was trained for '" + model.target + "', not '" + a.node + "'");
      }
      result = llse_detect(target, all, model);
      opts["model"] = a.model;
      break;
    }
  }
  Outputs out(common.out_dir);
  out.add("detections.csv", render([&](std::ostream& o) { write_detection_csv(o, result); }));
  out.add("detect.config.json", dump(echo("detect", opts, out)));
  out.commit();
}

struct EvaluateArgs {
  SeriesInput in;
  std::string node;
  std::string detections;
  std::string events;
  std::string precipitation;
  std::string labels;
};

void cmd_evaluate(const Common& common, const EvaluateArgs& a) {
  SweepConfig c = load_config(common);
  const bool smooth = a.in.smooth == "true";
  auto all = load_modality(a.in, c.modality, smooth);
  const Series& target = pick(all, a.node);

  std::ifstream det_in(a.detections);
  if (!det_in) throw Error(ErrorCode::BadInputFile, "cannot open '" + a.detections + "'");
  const DetectionResult flags = read_detection_csv(det_in);
  if (a.events.empty() == a.precipitation.empty()) {
    throw Error(ErrorCode::BadParameter, "give exactly one of --events and --precipitation");
  }
  const auto events = a.events.empty() ? events_from_precipitation(read_precipitation_csv(fs::path(a.precipitation)))
                                       : read_events_csv(fs::path(a.events));
  GroundTruthLabels truth;
  if (!a.labels.empty()) truth = labels_from_json(read_json_file(a.labels));
  for (std::size_t k : flags.flagged_indices()) {
    if (k >= target.size()) throw Error(ErrorCode::ModelDataMismatch, "detection index beyond the series");
  }

  json opts = input_echo(a.in, smooth);
  opts.update({{"node", a.node}, {"detections", a.detections}, {"labels", a.labels}, {"modality", std::string(to_string(c.modality))}});
  if (!a.events.empty()) opts["events"] = a.events;
  if (!a.precipitation.empty()) opts["precipitation"] = a.precipitation;
  const auto report = assemble_report(target, flags, events, truth, opts);
  Outputs out(common.out_dir);
  out.add("report.json", dump(to_json(report)));
  out.add("evaluate.config.json", dump(echo("evaluate", opts, out)));
  out.commit();
}

struct SweepArgs {
  std::string detector;
  std::vector<double> grid;
  CLI::Option* grid_opt = nullptr;
};

void cmd_sweep(const Common& common, const SweepArgs& a) {
  SweepConfig c = load_config(common);
  if (!a.detector.empty()) c.detector = parse_flag_source(a.detector);
  if (a.grid_opt && a.grid_opt->count() > 0) {
    c.grid = a.grid;
    if (c.grid.empty()) throw Error(ErrorCode::BadParameter, "sweep grid is empty");
  }
  const auto result = run_sweep(c);
  Outputs out(common.out_dir);
  out.add("sweep.csv", render([&](std::ostream& o) { write_sweep_csv(o, result); }));
  out.add("sweep_report.json", dump(sweep_report_json(result)));
  out.add("sweep.config.json", dump(echo("sweep", {{"config", result.config}}, out)));
  out.commit();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-aware sensor fault detection: synthesize, inject, train, detect, evaluate and sweep.",
               "sensorfault"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  common.seed_opt = app.add_option("--seed", common.seed, "Random seed (overrides the config)");
  app.add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  app.add_option("--modality", common.modality, "Sensor modality")->check(CLI::IsMember({"box_temp", "soil_moisture"}));

  auto* synth = app.add_subcommand("synth", "Generate a synthetic deployment (series, events, precipitation)");

  InjectArgs inj;
  auto* inject = app.add_subcommand("inject", "Inject SHORT and/or NOISE faults into one node's series");
  add_series_input(inject, inj.in);
  inject->add_option("--node", inj.node, "Node to fault")->required();
  inject->add_option("--kind", inj.kind, "Fault kind")->check(CLI::IsMember({"short", "noise", "both"}))->capture_default_str();
  inject->add_option("--intensity", inj.intensity, "SHORT intensity f (v -> v + f*v)");
  inject->add_option("--multiplier", inj.multiplier, "NOISE std in units of the base sigma");
  inject->add_option("--base-sigma", inj.base_sigma, "Base sigma for NOISE injection");
  inject->add_option("--noise-model", inj.noise_model, "Take the base sigma from a NOISE model")->check(CLI::ExistingFile);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a NOISE or LLSE model");
  add_series_input(train, tr.in);
  train->add_option("--node", tr.node, "Target node")->required();
  train->add_option("--detector", tr.detector, "noise or llse")->check(CLI::IsMember({"noise", "llse"}))->capture_default_str();
  train->add_option("--median-width", tr.median_width, "Median-filter cleanup width (1 disables)");
  train->add_option("--percentile", tr.percentile, "LLSE threshold percentile p");

  DetectArgs dt;
  auto* detect = app.add_subcommand("detect", "Flag faults with the SHORT, NOISE or LLSE detector");
  add_series_input(detect, dt.in);
  detect->add_option("--node", dt.node, "Node to check")->required();
  detect->add_option("--detector", dt.detector, "short, noise or llse")
      ->check(CLI::IsMember({"short", "noise", "llse"}))
      ->capture_default_str();
  detect->add_option("--delta", dt.delta, "SHORT threshold");
  detect->add_option("--multiplier", dt.multiplier, "NOISE sigma_allow multiplier");
  detect->add_option("--model", dt.model, "Trained model JSON")->check(CLI::ExistingFile);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score detections against events and injected labels");
  add_series_input(evaluate, ev.in);
  evaluate->add_option("--node", ev.node, "Evaluated node")->required();
  evaluate->add_option("--detections", ev.detections, "Detections CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--events", ev.events, "Events CSV")->check(CLI::ExistingFile);
  evaluate->add_option("--precipitation", ev.precipitation, "Precipitation CSV")->check(CLI::ExistingFile);
  evaluate->add_option("--labels", ev.labels, "Injected-fault labels JSON")->check(CLI::ExistingFile);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Sweep a detector parameter and report mu and false negatives");
  sweep->add_option("--detector", sw.detector, "short, noise or llse")->check(CLI::IsMember({"short", "noise", "llse"}));
  sw.grid_opt = sweep->add_option("--grid", sw.grid, "Grid values (overrides the config)")->delimiter(',')->expected(0, -1);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::Config);
  }

  try {
    if (synth->parsed()) cmd_synth(common);
    if (inject->parsed()) cmd_inject(common, inj);
    if (train->parsed()) cmd_train(common, tr);
    if (detect->parsed()) cmd_detect(common, dt);
    if (evaluate->parsed()) cmd_evaluate(common, ev);
    if (sweep->parsed()) cmd_sweep(common, sw);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::Data);
  }
  return 0;
}

}  // namespace sensorfault::cli
