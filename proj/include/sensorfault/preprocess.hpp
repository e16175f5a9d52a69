#pragma once

#include <cstddef>

#include "sensorfault/series.hpp"

namespace sensorfault {

/// Averages consecutive non-overlapping pairs: out[k] = (s[2k] + s[2k+1]) / 2.
/// The interval doubles, the start time is kept and a trailing odd sample is
/// dropped. Needs at least two samples.
Series smooth_pairs(const Series& s);

inline constexpr std::size_t kDefaultMedianWidth = 5;

/// Centered sliding median. Near the edges the window is clipped to the
/// samples that exist, so it shrinks (and may become even-sized, in which case
/// the two middle values are averaged). Output length equals input length.
Series median_filter(const Series& s, std::size_t width = kDefaultMedianWidth);

}  // namespace sensorfault
