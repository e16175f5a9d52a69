#pragma once

#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sensorfault/error.hpp"
#include "sensorfault/random.hpp"
#include "sensorfault/series.hpp"

namespace sensorfault::testing {

inline Series make_series(std::vector<double> values, Seconds interval = 1200, Timestamp start = 0,
                          Modality modality = Modality::BoxTemperature, std::string node_id = "n1") {
  Series s;
  s.node_id = std::move(node_id);
  s.modality = modality;
  s.start_time = start;
  s.sample_interval = interval;
  s.values = std::move(values);
  return s;
}

inline std::vector<double> gaussian_values(std::uint64_t seed, std::size_t n, double sd = 1.0, double mean = 0.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(mean, sd);
  return v;
}

/// Code of the sensorfault::Error thrown by f; fails the test if none is thrown.
inline ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected sensorfault::Error";
  return ErrorCode::UndefinedMetric;
}

}  // namespace sensorfault::testing
