#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcuss/ensemble.hpp"
#include "pcuss/fraction.hpp"

namespace pcuss {

// Uniform element of E^(ell)(w).
BitVec sample_dyes(const LevelParams& params, const BitVec& w, Rng& rng);

struct NoSample {
  BitVec bits;
  // ell >= 1: lambda(beta) for each beta in F \ H, and the block witnesses.
  std::vector<std::uint64_t> lambda;
  std::vector<Witness> blocks;
};

NoSample sample_dno_full(const LevelParams& params, Rng& rng);
BitVec sample_dno(const LevelParams& params, Rng& rng);

enum class RestrictionMethod { Auto, ExactRank, ExactEnumeration, Statistical };
enum class Verdict { Indistinguishable, Distinguishable, Inconclusive };

std::string to_string(RestrictionMethod m);
std::string to_string(Verdict v);

struct RestrictionTestReport {
  std::vector<std::size_t> Q;
  RestrictionMethod method = RestrictionMethod::Auto;
  // Exact methods: the exact total variation distance (0 or positive).
  // Statistical: empirical TV as a count ratio.
  Fraction tv_estimate;
  double threshold = 0;
  std::uint64_t samples = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string detail;
};

struct RestrictionOptions {
  RestrictionMethod method = RestrictionMethod::Auto;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

// Compares the restrictions to Q of D_yes(w) and D_no.
RestrictionTestReport restricted_equality(const LevelParams& params, const BitVec& w, const std::vector<std::size_t>& Q,
                                          const RestrictionOptions& opts = {});

// Statistical regime bound 3 * sqrt(2^|Q| / N).
double statistical_threshold(std::size_t q, std::uint64_t samples);

// True iff the exact level-1 argument applies: every touched block is
// rank-uniform, or at most |F|/2 + 1 - k blocks are touched.
bool level1_exact_regime(const LevelParams& params, const std::vector<std::size_t>& Q, std::string* why = nullptr);

struct DistanceReport {
  Fraction value;
  bool exact = false;
  std::uint64_t samples = 0;
  double prediction = 0;
};

// Exact minimum over encoding pairs at ell = 0 with k <= 4; otherwise the
// minimum over sampled pairs, an upper bound on the true minimum.
DistanceReport min_distance_check(const LevelParams& params, const BitVec& w, const BitVec& w2,
                                  std::uint64_t samples = 10000, std::uint64_t seed = 1);

struct FarReport {
  std::uint64_t trials = 0;
  std::uint64_t far = 0;
  double rate = 0;
  // Smallest distance (or lower bound) seen.
  Fraction min_seen;
  bool exact = false;
};

// Fraction of D_no samples at distance >= threshold from every E^(ell)(w).
// ell = 0: exact distance to the span of A (k <= 6). ell = 1: lower bound
// (disagreements of lambda with its nearest low-degree polynomial) times the
// certified ensemble weight of the base code.
FarReport far_from_all_check(const LevelParams& params, std::uint64_t trials, Fraction threshold,
                             std::uint64_t seed = 1);

// ell = 1: lower bound on the distance of a D_no sample to every E^(1)(w).
Fraction dno_distance_lower_bound(const LevelParams& params, const NoSample& sample);

// Distance of v to the whole of E^(0) (all secrets), exactly.
Fraction base_distance_to_all(const HardCodeSpec& spec, const BitVec& v);

}  // namespace pcuss
