#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace gsw {

/// Identifies one random stream. Streams with distinct (master_seed,
/// stream_id) pairs are seeded from well-mixed, distinct 64-bit states.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Derives a sub-stream, e.g. one per trial or bootstrap replicate.
  SeedSpec child(std::uint64_t sub) const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// mt19937_64 plus Boost distributions: both are fully specified, so draws
/// are reproducible across standard libraries (std:: distributions are not).
class Rng {
 public:
  explicit Rng(SeedSpec seed);

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  std::size_t index(std::size_t n) {
    return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
  boost::random::uniform_01<double> uniform_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace gsw
