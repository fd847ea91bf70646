#include "pcuss/rng.hpp"

#include <bit>

#include "pcuss/error.hpp"

namespace pcuss {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

double hash_unit(std::uint64_t seed, std::uint64_t position) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(position ^ 0x5851f42d4c957f2dULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InputError("Rng::below requires a positive bound");
  if ((bound & (bound - 1)) == 0) return next() & (bound - 1);
  // Rejection sampling on the smallest covering power of two.
  const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
  for (;;) {
    const std::uint64_t x = next() & mask;
    if (x < bound) return x;
  }
}

std::uint64_t Rng::bits(unsigned count) {
  if (count == 0) return 0;
  const std::uint64_t x = next();
  return count >= 64 ? x : x >> (64 - count);
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

BitVec Rng::bitvec(std::size_t n) {
  BitVec v(n);
  for (std::size_t i = 0; i < n; i += 64) {
    const std::size_t c = n - i < 64 ? n - i : 64;
    v.set_bits(i, c, next());
  }
  return v;
}

}  // namespace pcuss
