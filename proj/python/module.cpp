#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

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

namespace py = pybind11;
using namespace sensorfault;

namespace {

Deployment synthesize(const std::string& config_json) {
  const SweepConfig c = sweep_config_from_json(nlohmann::json::parse(config_json));
  DeploymentSpec spec;
  spec.seed = c.seed;
  spec.nodes = c.nodes;
  spec.clock.days = c.days;
  ScheduleOptions options;
  options.count = c.event_count;
  spec.schedule = make_event_schedule(spec.clock, options, mix_seed(c.seed, 10));
  return gen_deployment(spec, c.profiles);
}

// Returns (sweep csv, report json text); the Python side parses the JSON.
std::pair<std::string, std::string> sweep(const std::string& config_json) {
  const auto result = run_sweep(sweep_config_from_json(nlohmann::json::parse(config_json)));
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  return {csv.str(), sweep_report_json(result).dump()};
}

}  // namespace

PYBIND11_MODULE(_sensorfault, m) {
  m.doc() = "Event-aware sensor fault detection core";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&] { return py::object(py::exception<Error>(m, "SensorFaultError")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type.get_stored()("[" + std::string(to_string(e.code())) + "] " + e.what());
      exc.attr("code") = to_string(e.code());
      exc.attr("exit_code") = static_cast<int>(e.category());
      PyErr_SetObject(error_type.get_stored().ptr(), exc.ptr());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::enum_<Modality>(m, "Modality")
      .value("BOX_TEMPERATURE", Modality::BoxTemperature)
      .value("SOIL_MOISTURE", Modality::SoilMoisture);
  py::enum_<FlagSource>(m, "FlagSource")
      .value("SHORT", FlagSource::Short)
      .value("NOISE", FlagSource::Noise)
      .value("LLSE", FlagSource::Llse);
  py::enum_<BandSide>(m, "BandSide").value("LOW", BandSide::Low).value("HIGH", BandSide::High);

  py::class_<Series>(m, "Series")
      .def(py::init([](std::vector<double> values, std::string node_id, Modality modality, Timestamp start_time,
                       Seconds sample_interval) {
             Series s{std::move(node_id), modality, start_time, sample_interval, std::move(values)};
             s.validate();
             return s;
           }),
           py::arg("values"), py::arg("node_id") = "n1", py::arg("modality") = Modality::BoxTemperature,
           py::arg("start_time") = 0, py::arg("sample_interval") = 1200)
      .def_readwrite("node_id", &Series::node_id)
      .def_readwrite("modality", &Series::modality)
      .def_readwrite("start_time", &Series::start_time)
      .def_readwrite("sample_interval", &Series::sample_interval)
      .def_readwrite("values", &Series::values)
      .def("__len__", &Series::size)
      .def("time_at", &Series::time_at)
      .def("slice", &Series::slice, py::arg("first"), py::arg("count"));

  py::class_<EventWindow>(m, "EventWindow")
      .def(py::init([](Timestamp start, Timestamp end) { return EventWindow{start, end}; }), py::arg("start"), py::arg("end"))
      .def_readwrite("start", &EventWindow::start)
      .def_readwrite("end", &EventWindow::end);

  py::class_<FlaggedWindow>(m, "FlaggedWindow")
      .def(py::init([](std::size_t start, std::size_t length, BandSide side) { return FlaggedWindow{start, length, side}; }),
           py::arg("start"), py::arg("length"), py::arg("side") = BandSide::High)
      .def_readonly("start", &FlaggedWindow::start)
      .def_readonly("length", &FlaggedWindow::length)
      .def_readonly("side", &FlaggedWindow::side);

  py::class_<DetectionResult>(m, "DetectionResult")
      .def_readonly("source", &DetectionResult::source)
      .def_readonly("flagged_samples", &DetectionResult::flagged_samples)
      .def_readonly("flagged_windows", &DetectionResult::flagged_windows)
      .def("flagged_indices", &DetectionResult::flagged_indices);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def_readonly("window_len", &NoiseModel::window_len)
      .def_readonly("sigma_train", &NoiseModel::sigma_train)
      .def_readonly("sigma_hist_spread", &NoiseModel::sigma_hist_spread);

  py::class_<LlseFit>(m, "LlseFit")
      .def_readonly("beta0", &LlseFit::beta0)
      .def_readonly("beta1", &LlseFit::beta1)
      .def_readonly("threshold", &LlseFit::threshold)
      .def("estimate", &LlseFit::estimate);

  py::class_<InjectionPlan>(m, "InjectionPlan")
      .def(py::init<>())
      .def_readwrite("seed", &InjectionPlan::seed)
      .def_readwrite("short_intensity", &InjectionPlan::short_intensity)
      .def_readwrite("short_fraction", &InjectionPlan::short_fraction)
      .def_readwrite("noise_burst_lengths", &InjectionPlan::noise_burst_lengths)
      .def_readwrite("noise_multiplier", &InjectionPlan::noise_multiplier)
      .def_readwrite("noise_total_fraction", &InjectionPlan::noise_total_fraction);

  py::class_<NoiseBurst>(m, "NoiseBurst").def_readonly("start", &NoiseBurst::start).def_readonly("length", &NoiseBurst::length);

  py::class_<GroundTruthLabels>(m, "GroundTruthLabels")
      .def_readonly("short_indices", &GroundTruthLabels::short_indices)
      .def_readonly("noise_windows", &GroundTruthLabels::noise_windows)
      .def("noise_indices", &GroundTruthLabels::noise_indices);

  py::class_<InjectionOutcome>(m, "InjectionOutcome")
      .def_readonly("series", &InjectionOutcome::series)
      .def_readonly("labels", &InjectionOutcome::labels);

  py::class_<Deployment>(m, "Deployment")
      .def_readonly("soil_moisture", &Deployment::soil_moisture)
      .def_readonly("box_temperature", &Deployment::box_temperature)
      .def_readonly("events", &Deployment::events);

  m.def("smooth_pairs", &smooth_pairs, py::arg("series"));
  m.def("median_filter", &median_filter, py::arg("series"), py::arg("width") = kDefaultMedianWidth);

  m.def(
      "short_detect", [](const Series& s, double delta) { return short_detect(s, {delta}); }, py::arg("series"),
      py::arg("delta"));
  m.def("noise_train", &noise_train, py::arg("train"), py::arg("window_len") = kDefaultNoiseWindow);
  m.def("noise_detect", &noise_detect, py::arg("series"), py::arg("model"), py::arg("allow_multiplier"));
  m.def(
      "llse_fit",
      [](const Series& target, const Series& neighbor, double p) { return llse_fit(target, neighbor, p); },
      py::arg("target"), py::arg("neighbor"), py::arg("percentile_p") = kDefaultPercentile);

  m.def("inject_short", &inject_short, py::arg("series"), py::arg("plan"));
  m.def("inject_noise", &inject_noise, py::arg("series"), py::arg("plan"), py::arg("base_sigma"));

  m.def("mu_samples", &mu_samples, py::arg("flags"), py::arg("event_indices"));
  m.def(
      "mu_duration",
      [](const std::vector<FlaggedWindow>& w, const std::vector<EventWindow>& e, const Series& s) { return mu_duration(w, e, s); },
      py::arg("windows"), py::arg("events"), py::arg("series"));
  m.def("event_sample_indices", &event_sample_indices, py::arg("series"), py::arg("events"));

  m.def("_synthesize", &synthesize, py::arg("config_json"));
  m.def("_sweep", &sweep, py::arg("config_json"));
}
