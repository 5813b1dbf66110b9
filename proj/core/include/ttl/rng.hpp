#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace ttl {

struct RngSeed {
  std::uint64_t root = 0;
  std::uint64_t stream = 0;

  // Child stream; children of distinct (parent, tag) pairs do not collide in practice.
  RngSeed child(std::uint64_t tag) const;
  bool operator==(const RngSeed&) const = default;
};

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(RngSeed seed);

  // 53 random bits in [0, 1); distributions are fixed so streams do not
  // depend on the standard library.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() { return norm_(engine_); }
  std::uint64_t bits() { return engine_(); }
  // Uniform direction on the unit sphere in R^m.
  void unit_vector(double* out, int m);

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace ttl
