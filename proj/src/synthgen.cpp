#include "sensorfault/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sensorfault/error.hpp"
#include "sensorfault/random.hpp"

namespace sensorfault {

namespace {

constexpr Seconds kDay = 86400;

Series empty_series(const SynthClock& clock, Modality modality, const std::string& node_id) {
  Series s;
  s.node_id = node_id;
  s.modality = modality;
  s.start_time = clock.start_time;
  s.sample_interval = clock.interval;
  s.values.reserve(clock.samples());
  return s;
}

// 0 -> 1 across the event, then back to 0 over `recovery`.
double occlusion(Timestamp t, const EventWindow& e, Seconds recovery) {
  if (t < e.start) return 0.0;
  if (t < e.end) return static_cast<double>(t - e.start) / static_cast<double>(e.duration());
  if (recovery <= 0 || t >= e.end + recovery) return 0.0;
  return 1.0 - static_cast<double>(t - e.end) / static_cast<double>(recovery);
}

Timestamp align_down(Timestamp t, Seconds grid) {
  Timestamp r = t % grid;
  if (r < 0) r += grid;
  return t - r;
}

}  // namespace

void SynthClock::validate() const {
  if (days < 1) throw Error(ErrorCode::BadParameter, "synthetic span must be at least one day");
  if (interval <= 0 || kDay % interval != 0) {
    throw Error(ErrorCode::BadParameter, "sample interval must divide 24 h");
  }
}

double box_temperature_mean_at(Timestamp t, const BoxTempProfile& profile, const EventSchedule& events) {
  Timestamp tod = t % kDay;
  if (tod < 0) tod += kDay;
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(tod) / static_cast<double>(kDay) - std::numbers::pi / 2;
  double occ = 0.0;
  for (const auto& e : events) occ = std::max(occ, occlusion(t, e.window, profile.recovery));
  return profile.mean + profile.diurnal_amplitude * std::sin(phase) - profile.event_depression * occ;
}

double soil_excess_at(Timestamp t, const SoilMoistureProfile& profile, const EventSchedule& events) {
  double excess = 0.0;
  for (const auto& e : events) {
    if (t < e.window.start) continue;
    const double peak = profile.spike_gain * e.rain_mm;
    if (t < e.window.end) {
      const double ramp = static_cast<double>(t - e.window.start) / static_cast<double>(e.window.duration());
      excess += peak * (profile.onset_fraction + (1.0 - profile.onset_fraction) * ramp);
    } else {
      excess += peak * std::exp(-static_cast<double>(t - e.window.end) /
                                static_cast<double>(profile.decay_time_constant));
    }
  }
  return excess;
}

Series gen_box_temperature(const SynthClock& clock, const BoxTempProfile& profile, const EventSchedule& events,
                           std::uint64_t seed, const std::string& node_id) {
  clock.validate();
  if (profile.diurnal_amplitude < 0.0 || profile.noise_sigma < 0.0 || profile.event_depression < 0.0 ||
      profile.recovery < 0) {
    throw Error(ErrorCode::BadParameter, "box temperature profile parameters must be non-negative");
  }
  Rng rng(seed);
  Series s = empty_series(clock, Modality::BoxTemperature, node_id);
  for (std::size_t k = 0; k < clock.samples(); ++k) {
    const double noise = rng.standard_normal();
    s.values.push_back(box_temperature_mean_at(s.time_at(k), profile, events) + profile.noise_sigma * noise);
  }
  return s;
}

Series gen_soil_moisture(const SynthClock& clock, const SoilMoistureProfile& profile, const EventSchedule& events,
                         std::uint64_t seed, const std::string& node_id) {
  clock.validate();
  if (!(profile.baseline > 0.0 && profile.baseline < 1.0) || profile.baseline_noise < 0.0 || profile.spike_gain < 0.0 ||
      profile.decay_time_constant <= 0 || profile.onset_fraction < 0.0 || profile.onset_fraction > 1.0) {
    throw Error(ErrorCode::BadParameter, "invalid soil moisture profile");
  }
  Rng rng(seed);
  Series s = empty_series(clock, Modality::SoilMoisture, node_id);
  for (std::size_t k = 0; k < clock.samples(); ++k) {
    const double noise = rng.standard_normal();
    const double v = profile.baseline + soil_excess_at(s.time_at(k), profile, events) + profile.baseline_noise * noise;
    s.values.push_back(std::clamp(v, 0.0, 1.0));
  }
  return s;
}

EventSchedule make_event_schedule(const SynthClock& clock, const ScheduleOptions& options, std::uint64_t seed) {
  clock.validate();
  if (options.count < 0 || options.granularity <= 0 || options.min_duration <= 0 ||
      options.max_duration < options.min_duration || options.min_rain_mm < 0.0 ||
      options.max_rain_mm < options.min_rain_mm) {
    throw Error(ErrorCode::BadParameter, "invalid event schedule options");
  }
  EventSchedule schedule;
  if (options.count == 0) return schedule;

  const Seconds span = clock.end_time() - clock.start_time;
  const Seconds slot = span / options.count;
  // Keeps neighbouring events well apart so gauge-derived windows do not merge.
  const Seconds margin = 3 * 3600;
  if (slot < options.max_duration + 2 * margin) {
    throw Error(ErrorCode::BadParameter, "too many events for the synthetic span");
  }

  Rng rng(seed);
  const Seconds g = options.granularity;
  for (int i = 0; i < options.count; ++i) {
    const auto steps = static_cast<std::uint64_t>((options.max_duration - options.min_duration) / g);
    const Seconds duration = options.min_duration + static_cast<Seconds>(rng.uniform_below(steps + 1)) * g;
    const Timestamp slot_start = clock.start_time + static_cast<Timestamp>(i) * slot;
    const Timestamp earliest = align_down(slot_start + margin + g - 1, g);
    const Timestamp latest = align_down(slot_start + slot - margin - duration, g);
    const auto choices = static_cast<std::uint64_t>((latest - earliest) / g);
    const Timestamp start = earliest + static_cast<Timestamp>(rng.uniform_below(choices + 1)) * g;
    const double rain = options.min_rain_mm + (options.max_rain_mm - options.min_rain_mm) * rng.uniform01();
    schedule.push_back({{start, start + duration}, std::round(rain * 10.0) / 10.0});
  }
  return schedule;
}

std::vector<PrecipRecord> precipitation_from_schedule(const EventSchedule& schedule, const SynthClock& clock,
                                                      Seconds interval) {
  clock.validate();
  if (interval <= 0) throw Error(ErrorCode::BadParameter, "gauge interval must be > 0");
  std::vector<PrecipRecord> records;
  for (Timestamp t = clock.start_time + interval; t <= clock.end_time(); t += interval) {
    double amount = 0.0;
    for (const auto& e : schedule) {
      const Timestamp lo = std::max(t - interval, e.window.start);
      const Timestamp hi = std::min(t, e.window.end);
      if (lo < hi) amount += e.rain_mm * static_cast<double>(hi - lo) / static_cast<double>(e.window.duration());
    }
    records.push_back({t, amount});
  }
  return records;
}

std::vector<EventWindow> windows_of(const EventSchedule& schedule) {
  std::vector<EventWindow> out;
  out.reserve(schedule.size());
  for (const auto& e : schedule) out.push_back(e.window);
  return out;
}

void DeploymentSpec::validate() const {
  clock.validate();
  if (nodes.empty()) throw Error(ErrorCode::BadParameter, "deployment needs at least one node");
  for (const auto& n : nodes) {
    if (!(n.response_scale > 0.0)) throw Error(ErrorCode::BadParameter, "response_scale must be > 0");
    if (n.lag < 0) throw Error(ErrorCode::BadParameter, "lag must be >= 0");
    if (n.node_id.empty()) throw Error(ErrorCode::BadParameter, "node id must not be empty");
  }
  validate_events(windows_of(schedule));
}

Deployment gen_deployment(const DeploymentSpec& spec, const Profiles& profiles) {
  spec.validate();
  Deployment out;
  out.events = windows_of(spec.schedule);
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const auto& node = spec.nodes[i];
    const std::uint64_t node_seed = spec.seed ^ static_cast<std::uint64_t>(i);

    SoilMoistureProfile soil = profiles.soil;
    soil.spike_gain *= node.response_scale;
    EventSchedule shifted = spec.schedule;
    for (auto& e : shifted) {
      e.window.start += node.lag;
      e.window.end += node.lag;
    }
    out.soil_moisture.push_back(gen_soil_moisture(spec.clock, soil, shifted, mix_seed(node_seed, 11), node.node_id));
    out.box_temperature.push_back(
        gen_box_temperature(spec.clock, profiles.box, spec.schedule, mix_seed(node_seed, 12), node.node_id));
  }
  return out;
}

std::vector<NodeSpec> default_nodes() { return {{"n1", 1.0, 0}, {"n2", 1.0, 0}, {"n3", 0.3, 2 * 3600}}; }

DeploymentSpec default_deployment_spec(std::uint64_t seed) {
  DeploymentSpec spec;
  spec.seed = seed;
  spec.clock = SynthClock{};
  spec.nodes = default_nodes();
  spec.schedule = make_event_schedule(spec.clock, ScheduleOptions{}, mix_seed(seed, 10));
  return spec;
}

}  // namespace sensorfault
