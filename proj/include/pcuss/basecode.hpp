#pragma once

#include <cstdint>
#include <vector>

#include "pcuss/bitvec.hpp"
#include "pcuss/fraction.hpp"
#include "pcuss/rng.hpp"

namespace pcuss {

// Generator A (4k x 3k) of the level-0 hard code. Column j is stored as a
// 4k-bit mask; the first k columns carry the secret.
struct HardCodeSpec {
  unsigned k = 0;
  std::vector<std::uint64_t> columns;
  std::uint64_t seed = 0;
  unsigned attempts = 0;
  // Certified relative distance of Span{v_1..v_3k}.
  Fraction dist_cert{0, 1};
  // Certified dual distance of Span{v_(k+1)..v_3k}.
  Fraction dual_cert{0, 1};
  // Minimum distance between H_k(w) and H_k(w') over w != w'.
  Fraction ensemble_cert{0, 1};

  unsigned n() const { return 4 * k; }
  // Row i of A as a mask over the 3k unknowns.
  std::vector<std::uint64_t> rows() const;
  // Row i of the last 2k columns as a mask over 2k unknowns.
  std::vector<std::uint64_t> tail_rows() const;
  // A * u, with u packed as w in bits 0..k-1 and the tail above.
  std::uint64_t apply(std::uint64_t u) const;

  friend bool operator==(const HardCodeSpec& a, const HardCodeSpec& b) = default;
};

struct HardCodeOptions {
  unsigned max_attempts = 1000;
  // Also demand ensemble distance > 1/10.
  bool require_ensemble_distance = false;
};

struct CertificationReport {
  unsigned k = 0;
  unsigned rank = 0;
  unsigned min_weight = 0;
  unsigned dual_min_weight = 0;
  unsigned ensemble_min_weight = 0;
  Fraction distance{0, 1};
  Fraction dual_distance{0, 1};
  Fraction ensemble_distance{0, 1};
  bool distance_ok = false;
  bool dual_ok = false;
  bool ensemble_ok = false;
  // Thresholds at this length admit weight-1 codewords (4k < 30).
  bool vacuous = false;

  bool passed(bool require_ensemble = false) const {
    return distance_ok && dual_ok && (!require_ensemble || ensemble_ok);
  }
};

constexpr unsigned kMaxHardCodeK = 12;

HardCodeSpec hardcode_generate(unsigned k, Rng& rng, const HardCodeOptions& opts = {});
CertificationReport certify_hardcode(const HardCodeSpec& spec);

// Spec with the given columns, certificates filled from certify_hardcode.
HardCodeSpec hardcode_from_columns(unsigned k, std::vector<std::uint64_t> columns, std::uint64_t seed = 0);

struct BaseEncoding {
  BitVec bits;
  std::uint64_t u = 0;
};

BaseEncoding base_encode(const HardCodeSpec& spec, const BitVec& w, Rng& rng);
bool base_membership(const HardCodeSpec& spec, const BitVec& w, const BitVec& v);
bool base_restricted_uniformity(const HardCodeSpec& spec, const BitVec& w, const std::vector<std::size_t>& Q);

}  // namespace pcuss
