#pragma once

#include <cstdint>
#include <random>

namespace distexp {

/// Deterministic random stream keyed by (seed, stream_id).
///
/// Each actor of a run (site, coordinator, adversary) owns one stream.
/// Uniform and Bernoulli draws are converted here, not by <random>
/// distributions.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent child stream; same (seed, stream_id, salt) gives the same child.
  RngStream substream(std::uint64_t salt) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// True with probability p. p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stream-id assignments shared by every module.
namespace streams {
inline constexpr std::uint64_t kAdversary = 1;
inline constexpr std::uint64_t kCoordinator = 2;
inline constexpr std::uint64_t kJitter = 3;
inline constexpr std::uint64_t kSiteBase = 1000;
constexpr std::uint64_t site(int s) { return kSiteBase + static_cast<std::uint64_t>(s); }
}  // namespace streams

}  // namespace distexp
