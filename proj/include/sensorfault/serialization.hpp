#pragma once

#include <filesystem>
#include <iosfwd>

#include "json.hpp"
#include "sensorfault/detectors.hpp"
#include "sensorfault/injectors.hpp"
#include "sensorfault/series.hpp"

namespace sensorfault {

/// Version stamped into every model and label document.
inline constexpr int kFormatVersion = 1;

nlohmann::json to_json(const NoiseModel& model);
nlohmann::json to_json(const LlseModel& model);
nlohmann::json to_json(const InjectionPlan& plan);
/// `{short:[idx...], noise:[{start,len}...], seed, plan}`.
nlohmann::json labels_to_json(const GroundTruthLabels& labels, const InjectionPlan& plan);

NoiseModel noise_model_from_json(const nlohmann::json& j);
LlseModel llse_model_from_json(const nlohmann::json& j);
InjectionPlan plan_from_json(const nlohmann::json& j);
GroundTruthLabels labels_from_json(const nlohmann::json& j);

/// One `index,flag_source` row per flagged sample (NOISE windows are expanded).
void write_detection_csv(std::ostream& out, const DetectionResult& result);
/// Inverse of write_detection_csv. Runs of consecutive NOISE indices come back
/// as single windows, which leaves every metric unchanged.
DetectionResult read_detection_csv(std::istream& in);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace sensorfault
