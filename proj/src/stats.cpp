#include "sensorfault/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sensorfault/error.hpp"

namespace sensorfault::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::DegenerateInput, "mean of an empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(ErrorCode::DegenerateInput, "standard deviation needs at least 2 samples");
  // Sorting fixes the summation order; shifting by the minimum makes constant
  // input produce exact zeros.
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double shift = sorted.front();
  double sum = 0.0;
  for (double x : sorted) sum += x - shift;
  const double m = sum / static_cast<double>(sorted.size());
  double ss = 0.0;
  for (double x : sorted) {
    const double d = (x - shift) - m;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(sorted.size() - 1));
}

std::size_t nearest_rank(std::size_t n, double p) {
  if (!(p > 0.0 && p <= 100.0)) throw Error(ErrorCode::BadParameter, "percentile must be in (0, 100]");
  if (n == 0) throw Error(ErrorCode::DegenerateInput, "percentile of an empty sample");
  // The small slack keeps p*n/100 landing on an integer from rounding up.
  const double exact = p * static_cast<double>(n) / 100.0;
  auto rank = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::clamp<std::size_t>(rank, 1, n);
}

double nearest_rank_percentile(std::span<const double> xs, double p) {
  const std::size_t rank = nearest_rank(xs.size(), p);
  std::vector<double> sorted(xs.begin(), xs.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return sorted[rank - 1];
}

}  // namespace sensorfault::stats
