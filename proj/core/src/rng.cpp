#include "ttl/rng.hpp"

#include <cmath>

namespace ttl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSeed RngSeed::child(std::uint64_t tag) const {
  return {root, splitmix64(stream ^ splitmix64(tag + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(RngSeed seed) {
  std::uint64_t a = splitmix64(seed.root);
  std::uint64_t b = splitmix64(seed.stream ^ 0xd1b54a32d192ed03ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

void Rng::unit_vector(double* out, int m) {
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (int i = 0; i < m; ++i) {
      out[i] = normal();
      n2 += out[i] * out[i];
    }
  } while (n2 < 1e-300);
  double s = 1.0 / std::sqrt(n2);
  for (int i = 0; i < m; ++i) out[i] *= s;
}

}  // namespace ttl
