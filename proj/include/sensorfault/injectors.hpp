#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sensorfault/series.hpp"

namespace sensorfault {

struct InjectionPlan {
  std::uint64_t seed = 0;
  /// SHORT faults replace v by v + f * v.
  double short_intensity = 0.5;
  double short_fraction = 0.015;
  std::vector<std::size_t> noise_burst_lengths{144, 360};
  /// Added noise std, in units of the caller's base sigma.
  double noise_multiplier = 1.5;
  double noise_total_fraction = 0.065;

  /// Throws BadParameter when fractions, lengths or intensities are out of range.
  void validate() const;
};

struct InjectionOutcome {
  Series series;
  GroundTruthLabels labels;
};

/// Picks exactly round(short_fraction * n) distinct samples uniformly without
/// replacement and scales each by (1 + short_intensity). Other samples are
/// copied bit for bit.
InjectionOutcome inject_short(const Series& s, const InjectionPlan& plan);

/// Places non-overlapping bursts drawn from the plan's lengths so that the
/// labeled total is the largest achievable value <= round(fraction * n), then
/// adds N(0, (noise_multiplier * base_sigma)^2) to every sample in each burst.
InjectionOutcome inject_noise(const Series& s, const InjectionPlan& plan, double base_sigma);

/// NOISE first, then SHORT on the noised series; labels stay separate per kind.
InjectionOutcome inject_noise_then_short(const Series& s, const InjectionPlan& plan, double base_sigma);

/// Burst lengths (longest first) whose sum is the largest total <= target that
/// the given lengths can reach with repetition. Exposed for testing.
std::vector<std::size_t> compose_bursts(const std::vector<std::size_t>& lengths, std::size_t target);

}  // namespace sensorfault
