#include "sensorfault/preprocess.hpp"

#include <algorithm>
#include <vector>

#include "sensorfault/error.hpp"

namespace sensorfault {

Series smooth_pairs(const Series& s) {
  if (s.size() < 2) throw Error(ErrorCode::DegenerateInput, "smooth_pairs needs at least 2 samples");
  Series out;
  out.node_id = s.node_id;
  out.modality = s.modality;
  out.start_time = s.start_time;
  out.sample_interval = 2 * s.sample_interval;
  out.values.reserve(s.size() / 2);
  for (std::size_t k = 0; k + 1 < s.size(); k += 2) {
    out.values.push_back((s.values[k] + s.values[k + 1]) / 2.0);
  }
  return out;
}

Series median_filter(const Series& s, std::size_t width) {
  if (width % 2 == 0) {
    throw Error(ErrorCode::BadParameter, "median filter width must be odd");
  }
  if (s.size() < width) throw Error(ErrorCode::BadParameter, "median filter wider than the series");

  const std::size_t half = width / 2;
  const std::size_t n = s.size();
  Series out = s;
  std::vector<double> window;
  window.reserve(width);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(n - 1, k + half);
    window.assign(s.values.begin() + static_cast<std::ptrdiff_t>(lo),
                  s.values.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    std::sort(window.begin(), window.end());
    const std::size_t m = window.size();
    out.values[k] = m % 2 == 1 ? window[m / 2] : (window[m / 2 - 1] + window[m / 2]) / 2.0;
  }
  return out;
}

}  // namespace sensorfault
