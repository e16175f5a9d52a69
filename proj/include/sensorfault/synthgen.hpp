#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sensorfault/series.hpp"

namespace sensorfault {

/// Diurnal sinusoid with a rain-driven depression.
struct BoxTempProfile {
  double mean = 25.0;               // C
  double diurnal_amplitude = 6.0;   // C; minimum at 00:00 UTC, maximum at 12:00
  double noise_sigma = 0.3;         // C
  double event_depression = 4.0;    // C, full depression reached at event end
  Seconds recovery = 6 * 3600;      // linear return to normal after an event
};

/// Baseline plus a sudden rise at rain onset and exponential drying afterwards.
struct SoilMoistureProfile {
  double baseline = 0.20;           // vwc
  double baseline_noise = 0.003;    // vwc
  double spike_gain = 0.015;        // vwc per mm of rain: 10 mm -> +0.15
  Seconds decay_time_constant = 48 * 3600;
  /// Share of the event's peak excess reached by the first sample after onset;
  /// the remainder accrues linearly until the event ends.
  double onset_fraction = 0.5;
};

struct ScheduledEvent {
  EventWindow window;
  double rain_mm = 0.0;
};

using EventSchedule = std::vector<ScheduledEvent>;

/// Sampling grid of a generated series.
struct SynthClock {
  Timestamp start_time = 1182470400;  // 2007-06-22T00:00:00Z
  int days = 90;
  Seconds interval = 600;

  std::size_t samples() const { return static_cast<std::size_t>(days) * 86400 / static_cast<std::size_t>(interval); }
  Timestamp end_time() const { return start_time + static_cast<Timestamp>(days) * 86400; }
  void validate() const;
};

Series gen_box_temperature(const SynthClock& clock, const BoxTempProfile& profile, const EventSchedule& events,
                           std::uint64_t seed, const std::string& node_id = "node");

Series gen_soil_moisture(const SynthClock& clock, const SoilMoistureProfile& profile, const EventSchedule& events,
                         std::uint64_t seed, const std::string& node_id = "node");

/// Noise-free box temperature at time t.
double box_temperature_mean_at(Timestamp t, const BoxTempProfile& profile, const EventSchedule& events);
/// Noise-free, unclamped soil-moisture excess over baseline at time t.
double soil_excess_at(Timestamp t, const SoilMoistureProfile& profile, const EventSchedule& events);

struct ScheduleOptions {
  int count = 21;
  Seconds min_duration = 2 * 3600;
  Seconds max_duration = 13 * 3600;
  double min_rain_mm = 2.0;
  double max_rain_mm = 25.0;
  /// Event boundaries fall on this grid (the rain gauge interval).
  Seconds granularity = 900;
};

/// Spreads `count` events over the clock's span, one per equal-width slot,
/// at seeded-random positions.
EventSchedule make_event_schedule(const SynthClock& clock, const ScheduleOptions& options, std::uint64_t seed);

/// Rain-gauge records at `interval` spacing covering the clock's span, with each
/// event's rain spread uniformly over its duration.
std::vector<PrecipRecord> precipitation_from_schedule(const EventSchedule& schedule, const SynthClock& clock,
                                                      Seconds interval = 900);

std::vector<EventWindow> windows_of(const EventSchedule& schedule);

struct NodeSpec {
  std::string node_id;
  double response_scale = 1.0;  // multiplies spike_gain
  Seconds lag = 0;              // delays this node's soil response
};

struct DeploymentSpec {
  std::vector<NodeSpec> nodes;
  EventSchedule schedule;
  SynthClock clock;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Profiles {
  BoxTempProfile box;
  SoilMoistureProfile soil;
};

struct Deployment {
  std::vector<Series> soil_moisture;  // one per node, in spec order
  std::vector<Series> box_temperature;
  std::vector<EventWindow> events;    // unshifted ground-truth windows
};

Deployment gen_deployment(const DeploymentSpec& spec, const Profiles& profiles = {});

/// n1 and n2 co-moving; n3 attenuated to 0.3 and lagging by 2 h.
std::vector<NodeSpec> default_nodes();

/// Three default nodes over 90 days with 21 events.
DeploymentSpec default_deployment_spec(std::uint64_t seed);

}  // namespace sensorfault
