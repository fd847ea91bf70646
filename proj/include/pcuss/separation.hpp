#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcuss/ensemble.hpp"
#include "pcuss/fraction.hpp"

namespace pcuss {

// y^s, a partial copy, then the proof region:
//   N = (L + 1) z with L = ceil(log^(ell) n), copies region z L = s n + partial.
struct SeparationLayout {
  unsigned ell = 0;
  std::uint64_t n = 0;
  std::uint64_t z = 0;
  std::uint64_t log_n = 0;
  std::uint64_t s = 0;
  std::uint64_t partial = 0;
  std::uint64_t N = 0;

  std::uint64_t copies_length() const { return z * log_n; }
  std::uint64_t proof_offset() const { return copies_length(); }
  Fraction proof_fraction() const { return Fraction(z, N); }
};

SeparationLayout separation_layout(const LevelParams& params);

struct SeparationInstance {
  SeparationLayout layout;
  BitVec y;
  SourcePtr bits;
  // Honest proof for y, if one was built.
  ProofPtr proof;
  bool erased_proof = false;
};

// Source of y^s || partial || proof.
SourcePtr separation_source(const SeparationLayout& layout, const BitVec& y, SourcePtr proof_region);

SeparationInstance build_member(const LevelParams& params, Rng& rng);

// Oracle for y^s || partial || tail that answers each position with at most
// one query to y. The tail is all zeros or all erased.
class ReductionOracle : public Oracle {
 public:
  ReductionOracle(Oracle& y, const SeparationLayout& layout, bool erased_tail)
      : y_(y), layout_(layout), erased_(erased_tail) {}
  std::size_t size() const override { return layout_.N; }
  std::optional<bool> query(std::size_t i) override;

 private:
  Oracle& y_;
  SeparationLayout layout_;
  bool erased_;
};

SeparationInstance tolerant_reduction(const BitVec& y, const LevelParams& params);
SeparationInstance erasure_reduction(const BitVec& y, const LevelParams& params);

struct TesterOptions {
  // Reject (eps, n) pairs with ceil(log^(ell) n) <= 6 / eps.
  bool enforce_guard = true;
  double pcu_delta = 2.0 / 3.0;
};

std::uint64_t copy_probe_count(double eps);
void check_tester_guard(const SeparationLayout& layout, double eps);

// Copy-consistency probes, then the PCU verifier on the first copy with the
// proof region as proof. input_queries counts distinct instance positions.
VerdictReport q_tester(Oracle& instance, double eps, const LevelParams& params, std::uint64_t seed,
                       const TesterOptions& opts = {});

struct FamilyResult {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  double mean_queries = 0;
  std::uint64_t max_queries = 0;
  std::uint64_t copy_stage_rejects = 0;
  double accept_rate() const { return trials ? double(accepted) / double(trials) : 0; }
};

struct SeparationConfig {
  unsigned ell = 1;
  unsigned t = 6;
  std::string backend = "exhaustive";
  double eps = 0.6;
  std::uint64_t trials = 1000;
  std::uint64_t far_trials = 300;
  std::uint64_t probes = 10000;
  std::uint64_t seed = 1;
  bool enforce_guard = true;
  // Run the member family only (query-count measurements).
  bool member_only = false;
  unsigned threads = 0;
};

struct SeparationReport {
  SeparationLayout layout;
  double eps = 0;
  std::vector<FamilyResult> families;
  // Proof-region Hamming weight over N for member y with tolerant_reduction.
  Fraction tolerant_member_distance;
  Fraction tolerant_bound;
  Fraction erased_fraction;
  std::uint64_t forwarding_probes = 0;
  std::uint64_t forwarding_max = 0;
  bool erasure_prefix_matches = false;
  // Lower bound on dist(tolerant_reduction(y_no), Q) from the D_no witness.
  Fraction far_instance_lower_bound;
  Fraction eps1;
  std::vector<std::string> flags;
};

SeparationReport run_separation_experiment(const SeparationConfig& config);

// 1 / (5 * 4^ell).
Fraction default_eps1(unsigned ell);

}  // namespace pcuss
