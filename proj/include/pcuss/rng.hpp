#pragma once

#include <cstdint>
#include <random>

#include "pcuss/bitvec.hpp"

namespace pcuss {

std::uint64_t splitmix64(std::uint64_t x);

// Per-trial seed derivation: seed_i = mix(master, i).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Stateless pseudo-random bit at `position` for a stream `seed`. Backs the
// lazily evaluated adversarial proof strings.
inline bool hash_bit(std::uint64_t seed, std::uint64_t position) {
  return splitmix64(seed ^ splitmix64(position + 0x632be59bd9b4e019ULL)) >> 63;
}
// Uniform double in [0, 1) keyed on (seed, position).
double hash_unit(std::uint64_t seed, std::uint64_t position);

// Explicitly seeded generator. The engine and every derived draw are
// specified bit-for-bit so runs reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  std::uint64_t bits(unsigned count);
  bool coin() { return next() >> 63; }
  // Uniform double in [0, 1) with 53 bits of precision.
  double unit();
  bool bernoulli(double p) { return unit() < p; }
  BitVec bitvec(std::size_t n);
  Rng split(std::uint64_t index) { return Rng(derive_seed(next(), index)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pcuss
