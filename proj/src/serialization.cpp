#include "sensorfault/serialization.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "sensorfault/csv_io.hpp"
#include "sensorfault/error.hpp"

namespace sensorfault {

namespace {

using nlohmann::json;

void check_format(const json& j, const char* expected) {
  if (j.value("format", std::string()) != expected) {
    throw Error(ErrorCode::BadInputFile, std::string("expected a '") + expected + "' document");
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw Error(ErrorCode::BadInputFile, std::string("unsupported '") + expected + "' version");
  }
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadInputFile, std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json to_json(const NoiseModel& model) {
  return {{"format", "sensorfault.noise_model"},
          {"version", kFormatVersion},
          {"window_len", model.window_len},
          {"sigma_train", model.sigma_train},
          {"sigma_hist_spread", model.sigma_hist_spread}};
}

json to_json(const LlseModel& model) {
  json neighbors = json::array();
  for (const auto& n : model.neighbors) {
    neighbors.push_back({{"node_id", n.node_id},
                         {"beta0", n.fit.beta0},
                         {"beta1", n.fit.beta1},
                         {"threshold", n.fit.threshold}});
  }
  return {{"format", "sensorfault.llse_model"},
          {"version", kFormatVersion},
          {"target", model.target},
          {"neighbors", std::move(neighbors)},
          {"percentile_p", model.percentile_p},
          {"vote_q", model.vote_q},
          {"error_mode", std::string(to_string(model.error_mode))}};
}

json to_json(const InjectionPlan& plan) {
  return {{"seed", plan.seed},
          {"short_intensity", plan.short_intensity},
          {"short_fraction", plan.short_fraction},
          {"noise_burst_lengths", plan.noise_burst_lengths},
          {"noise_multiplier", plan.noise_multiplier},
          {"noise_total_fraction", plan.noise_total_fraction}};
}

json labels_to_json(const GroundTruthLabels& labels, const InjectionPlan& plan) {
  json noise = json::array();
  for (const auto& b : labels.noise_windows) noise.push_back({{"start", b.start}, {"len", b.length}});
  return {{"format", "sensorfault.labels"},
          {"version", kFormatVersion},
          {"short", labels.short_indices},
          {"noise", std::move(noise)},
          {"seed", plan.seed},
          {"plan", to_json(plan)}};
}

NoiseModel noise_model_from_json(const json& j) {
  check_format(j, "sensorfault.noise_model");
  return guarded("NOISE model", [&] {
    NoiseModel m;
    m.window_len = j.at("window_len").get<std::size_t>();
    m.sigma_train = j.at("sigma_train").get<double>();
    m.sigma_hist_spread = j.at("sigma_hist_spread").get<double>();
    if (m.window_len < 2 || m.sigma_train < 0.0 || m.sigma_hist_spread < 0.0) {
      throw Error(ErrorCode::BadInputFile, "NOISE model violates its invariants");
    }
    return m;
  });
}

LlseModel llse_model_from_json(const json& j) {
  check_format(j, "sensorfault.llse_model");
  auto model = guarded("LLSE model", [&] {
    LlseModel m;
    m.target = j.at("target").get<std::string>();
    for (const auto& n : j.at("neighbors")) {
      m.neighbors.push_back({n.at("node_id").get<std::string>(),
                             {n.at("beta0").get<double>(), n.at("beta1").get<double>(), n.at("threshold").get<double>()}});
    }
    m.percentile_p = j.at("percentile_p").get<double>();
    m.vote_q = j.at("vote_q").get<std::size_t>();
    m.error_mode = parse_error_mode(j.value("error_mode", std::string("absolute")));
    return m;
  });
  try {
    model.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::BadInputFile, std::string("LLSE model: ") + e.what());
  }
  return model;
}

InjectionPlan plan_from_json(const json& j) {
  return guarded("injection plan", [&] {
    InjectionPlan p;
    p.seed = j.value("seed", p.seed);
    p.short_intensity = j.value("short_intensity", p.short_intensity);
    p.short_fraction = j.value("short_fraction", p.short_fraction);
    p.noise_burst_lengths = j.value("noise_burst_lengths", p.noise_burst_lengths);
    p.noise_multiplier = j.value("noise_multiplier", p.noise_multiplier);
    p.noise_total_fraction = j.value("noise_total_fraction", p.noise_total_fraction);
    return p;
  });
}

GroundTruthLabels labels_from_json(const json& j) {
  check_format(j, "sensorfault.labels");
  return guarded("labels", [&] {
    GroundTruthLabels labels;
    labels.short_indices = index_set::normalized(j.at("short").get<IndexSet>());
    for (const auto& b : j.at("noise")) {
      labels.noise_windows.push_back({b.at("start").get<std::size_t>(), b.at("len").get<std::size_t>()});
    }
    return labels;
  });
}

void write_detection_csv(std::ostream& out, const DetectionResult& result) {
  out << "index,flag_source\n";
  const auto source = to_string(result.source);
  for (std::size_t k : result.flagged_indices()) out << k << ',' << source << '\n';
}

DetectionResult read_detection_csv(std::istream& in) {
  std::string line;
  bool header_seen = false;
  DetectionResult result;
  bool source_seen = false;
  IndexSet indices;
  while (std::getline(in, line)) {
    const auto trimmed = csv::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!header_seen) {
      if (csv::split_row(trimmed) != std::vector<std::string>{"index", "flag_source"}) {
        throw Error(ErrorCode::BadInputFile, "detection CSV must start with 'index,flag_source'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = csv::split_row(trimmed);
    if (fields.size() != 2) throw Error(ErrorCode::BadInputFile, "detection CSV row needs 2 fields");
    FlagSource source;
    try {
      source = parse_flag_source(fields[1]);
    } catch (const Error&) {
      throw Error(ErrorCode::BadInputFile, "unknown flag_source '" + fields[1] + "'");
    }
    if (source_seen && source != result.source) {
      throw Error(ErrorCode::BadInputFile, "detection CSV mixes flag sources");
    }
    result.source = source;
    source_seen = true;
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoull(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadInputFile, "bad index '" + fields[0] + "'");
    }
    indices.push_back(k);
  }
  indices = index_set::normalized(std::move(indices));
  if (result.source != FlagSource::Noise) {
    result.flagged_samples = std::move(indices);
    return result;
  }
  for (std::size_t i = 0; i < indices.size();) {
    std::size_t j = i + 1;
    while (j < indices.size() && indices[j] == indices[j - 1] + 1) ++j;
    result.flagged_windows.push_back({indices[i], j - i, BandSide::High});
    i = j;
  }
  return result;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadInputFile, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadInputFile, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace sensorfault
