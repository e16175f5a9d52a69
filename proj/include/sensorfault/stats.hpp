#pragma once

#include <cstddef>
#include <span>

namespace sensorfault::stats {

double mean(std::span<const double> xs);

/// Sample standard deviation (n - 1 denominator). The result does not depend
/// on the order of `xs` and is exactly zero for constant input. Needs n >= 2.
double sample_stddev(std::span<const double> xs);

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value, p in (0, 100].
double nearest_rank_percentile(std::span<const double> xs, double p);

/// 1-based rank used by nearest_rank_percentile.
std::size_t nearest_rank(std::size_t n, double p);

}  // namespace sensorfault::stats
