#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "distexp/core.hpp"
#include "distexp/forecasters.hpp"

namespace testing {

using namespace distexp;

inline std::vector<PayoffVector> uniform_sequence(std::int64_t T, std::uint64_t seed) {
  RngStream rng(seed, 77);
  std::vector<PayoffVector> out;
  out.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) {
    const double a = rng.uniform01();
    const double b = rng.uniform01();
    out.push_back(PayoffVector{a, b});
  }
  return out;
}

/// Plain FPL(eta) over a fixed sequence, one decision per step.
inline std::vector<ExpertIndex> fpl_actions(const std::vector<PayoffVector>& seq, double eta,
                                            RngStream rng) {
  Fpl fpl(2, eta, rng);
  std::vector<ExpertIndex> out;
  out.reserve(seq.size());
  for (const auto& p : seq) {
    out.push_back(fpl.choose());
    fpl.update(p);
  }
  return out;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace testing
