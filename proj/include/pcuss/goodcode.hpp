#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pcuss/bitvec.hpp"
#include "pcuss/field.hpp"
#include "pcuss/fraction.hpp"
#include "pcuss/poly.hpp"

namespace pcuss {

enum class CertMethod { Enumeration, ConcatenationBound };

std::string to_string(CertMethod m);

// Systematic binary linear code {0,1}^k -> {0,1}^(100k) with a certified
// lower bound on its relative distance.
//
// k <= 12: codeword = w || w*R for a seeded random k x 99k matrix R; the
// distance is computed exactly by enumerating all 2^k - 1 nonzero messages.
//
// k > 12: codeword = w || inner(RS(w)) || 0...0, where RS is a Reed-Solomon
// code over GF(2^8) evaluated at 0, 1, ..., N-1 and inner is a seeded random
// [n_in, 8] binary code certified by enumeration. The distance bound is
// (N - K + 1) * d_in / (100k).
class GoodCode {
 public:
  static constexpr std::size_t kEnumerationLimit = 12;
  static constexpr std::size_t kMaxK = 1024;

  static GoodCode generate(std::size_t k, std::uint64_t seed);

  std::size_t k() const { return k_; }
  std::size_t n() const { return 100 * k_; }
  std::uint64_t seed() const { return seed_; }
  CertMethod method() const { return method_; }
  Fraction certified_distance() const { return certified_; }
  unsigned attempts() const { return attempts_; }

  BitVec encode(const BitVec& w) const;
  // Message given as the low k bits of an integer (k <= 64).
  BitVec encode_uint(std::uint64_t w) const;
  BitVec decode(const BitVec& c) const;
  bool is_member(const BitVec& c) const;

  // Bit j of every codeword as a mask over message bits (k <= 64).
  std::vector<std::uint64_t> column_masks() const;

  // Enumeration-method parity rows (k rows of 99k bits each).
  const std::vector<BitVec>& parity_rows() const { return rows_; }
  // Concatenation-method parameters.
  std::size_t outer_length() const { return outer_n_; }
  std::size_t inner_length() const { return inner_n_; }
  const std::vector<BitVec>& inner_rows() const { return inner_rows_; }
  unsigned inner_distance() const { return inner_d_; }

  // Exact minimum relative distance by enumeration (k <= 20).
  Fraction exact_distance() const;

  // Content equality of two specs (used by artifact round trips).
  bool same_code(const GoodCode& other) const;

  // Rebuild from serialized fields; recomputes caches.
  static GoodCode from_parts(std::size_t k, std::uint64_t seed, CertMethod method, Fraction certified,
                             unsigned attempts, std::vector<BitVec> rows, std::size_t outer_n,
                             std::size_t inner_n, std::vector<BitVec> inner_rows, unsigned inner_d);

 private:
  void build_cache();
  BitVec encode_concat(const BitVec& w) const;

  std::size_t k_ = 0;
  std::uint64_t seed_ = 0;
  CertMethod method_ = CertMethod::Enumeration;
  Fraction certified_{0, 1};
  unsigned attempts_ = 0;
  std::vector<BitVec> rows_;
  std::size_t outer_n_ = 0;
  std::size_t inner_n_ = 0;
  std::vector<BitVec> inner_rows_;
  unsigned inner_d_ = 0;
  // All 2^k codewords when k <= kEnumerationLimit.
  std::vector<BitVec> table_;
};

BitVec spiel_encode(const GoodCode& code, const BitVec& w);
BitVec spiel_decode(const GoodCode& code, const BitVec& c);
bool spiel_membership(const GoodCode& code, const BitVec& c);

// Concatenation of Spiel(<f(beta)>) over F in canonical order. `code` must
// have k = t.
BitVec spiel_of_function(const GoodCode& code, const FunctionTable& f);

// Lazily generated codes, one per message length, all derived from a master
// seed. Thread safe.
class SpielFamily {
 public:
  explicit SpielFamily(std::uint64_t master_seed) : master_(master_seed) {}
  std::shared_ptr<const GoodCode> get(std::size_t k) const;
  std::uint64_t master_seed() const { return master_; }

 private:
  std::uint64_t master_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, std::shared_ptr<const GoodCode>> cache_;
};

}  // namespace pcuss
