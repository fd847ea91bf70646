#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pcuss/basecode.hpp"
#include "pcuss/bitvec.hpp"
#include "pcuss/field.hpp"
#include "pcuss/goodcode.hpp"
#include "pcuss/oracle.hpp"
#include "pcuss/pcpp.hpp"
#include "pcuss/poly.hpp"
#include "pcuss/rng.hpp"

namespace pcuss {

struct Constants {
  unsigned c = 4;
  unsigned d = 2;
  unsigned c_ell = 16;
};

struct ParamsRequest {
  unsigned ell = 0;
  // Bits per element of the top-level field (ell >= 1).
  unsigned t = 6;
  // Secret length at the top level.
  std::size_t k = 0;
  Constants constants;
  // Backend of the level-0 Spiel-PCU; the language checks always read
  // their whole input.
  std::string backend = "exhaustive";
  std::uint64_t seed = 1;
  // Compute lengths only; no codes are generated.
  bool arithmetic_only = false;
  bool require_ensemble_distance = true;
};

struct LevelSpec {
  unsigned level = 0;
  FieldParams field = FieldParams::from_r(1);
  std::size_t k = 0;
  // First k elements of F in canonical order.
  std::vector<std::uint64_t> H;
  // F \ H in canonical order: block j of a level codeword belongs to outside[j].
  std::vector<std::uint64_t> outside;

  unsigned t() const { return field.t(); }
  // Length of S_v at this level.
  std::uint64_t s_length() const { return 100ULL * field.t() * outside.size(); }
};

class LevelParams {
 public:
  unsigned ell() const;
  // Secret length at level i (i = 0 is the base code).
  std::size_t k(unsigned i) const;
  std::size_t k() const { return k(ell()); }
  // Level i >= 1.
  const LevelSpec& level(unsigned i) const;
  const Constants& constants() const;
  const std::string& backend_id() const;
  std::uint64_t seed() const;

  // m^(0..ell) and z^(0..ell).
  const std::vector<std::uint64_t>& m() const;
  const std::vector<std::uint64_t>& z() const;
  // Proof lengths with each PCPP proof replaced by s * ceil(log2 s)^2 for an
  // input of length s.
  const std::vector<double>& z_model() const;

  bool arithmetic_only() const;
  bool relaxed() const;
  const std::vector<std::string>& flags() const;

  const HardCodeSpec& base() const;
  std::shared_ptr<const HardCodeSpec> base_ptr() const;
  std::shared_ptr<const GoodCode> spiel(std::size_t k) const;
  const SpielPcu& base_pcu() const;
  // Spiel-PCU for the language check at level i >= 1.
  const SpielPcu& l_pcu(unsigned i) const;

  // Canonical text of every parameter; equal texts mean equal parameters.
  std::string describe() const;

  struct Impl;

 private:
  friend LevelParams derive_params(const ParamsRequest& req);
  std::shared_ptr<const Impl> impl_;
};

// Smallest r with (log|F|)^d <= 2^(2 * 3^r), i.e. the next field down.
unsigned next_field_r(unsigned t, unsigned d);

LevelParams derive_params(const ParamsRequest& req);

struct Witness {
  unsigned level = 0;
  // Secret as an integer (bit i = w_i).
  std::uint64_t secret = 0;
  // Level 0: u = (w, tail).
  std::uint64_t u = 0;
  // Level >= 1: coefficients of g and one child per element of F \ H.
  std::vector<std::uint64_t> g;
  std::vector<Witness> children;
};

struct Encoding {
  unsigned level = 0;
  BitVec w;
  BitVec bits;
  std::shared_ptr<const Witness> witness;
};

Encoding pcuss_encode(const LevelParams& params, const BitVec& w, Rng& rng);
// Re-encodes a level-`level` block with secret `secret`.
Encoding encode_level(const LevelParams& params, unsigned level, std::uint64_t secret, Rng& rng);
// Encoding assembled from per-block witnesses (level >= 1).
Encoding assemble_level(const LevelParams& params, unsigned level, std::uint64_t secret,
                        std::vector<std::uint64_t> g, std::vector<Witness> children);
BitVec pcuss_value(const LevelParams& params, const BitVec& w);
// Replays the witness tree: every block is a member for its recorded secret.
bool witness_consistent(const LevelParams& params, const Encoding& e);

struct Section {
  std::string name;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

// S_v || Proof(v_beta) for each beta in F \ H || Proof_L(S_v); at level 0
// the base Spiel-PCU proof. Bits of sub-proofs are computed on demand.
class ProofString : public BitSource {
 public:
  unsigned level() const { return level_; }
  std::size_t size() const override { return size_; }
  bool get(std::size_t i) const override;
  std::uint64_t get_bits(std::size_t offset, std::size_t count) const override;

  std::vector<Section> sections() const;
  const BitVec& s_v() const { return s_v_; }
  std::size_t num_children() const { return children_.size(); }
  const ProofString& child(std::size_t j) const { return *children_[j]; }
  const PcppProof& pcpp_proof() const { return pcpp_; }

 private:
  friend std::shared_ptr<const ProofString> build_proof_level(const LevelParams&, unsigned, const Witness&,
                                                              const BitVec&);
  unsigned level_ = 0;
  std::size_t size_ = 0;
  BitVec s_v_;
  std::vector<std::shared_ptr<const ProofString>> children_;
  std::size_t child_size_ = 0;
  PcppProof pcpp_;
};

using ProofPtr = std::shared_ptr<const ProofString>;

ProofPtr pcuss_build_proof(const LevelParams& params, const Encoding& v);
ProofPtr build_proof_level(const LevelParams& params, unsigned level, const Witness& witness, const BitVec& bits);

bool language_L_check(const LevelParams& params, unsigned level, const BitVec& S, const BitVec& w);

struct VerifyOptions {
  // Use the repetition wrapper when delta > 2^(-ell-1).
  bool allow_amplification = true;
};

VerdictReport pcuss_verify(const LevelParams& params, QueryOracle& v, QueryOracle& tau, QueryOracle& pi, double eps,
                           double delta, std::uint64_t seed, const VerifyOptions& opts = {});

// One run of the raw level procedure. On rejection `stage` names the failing
// step.
bool verify_level(const LevelParams& params, unsigned level, Oracle& v, Oracle& tau, Oracle& pi, double eps,
                  double delta, Rng& rng, std::string* stage);

// Repetition count of the wrapper: ceil(ln(1/(1-delta)) / 2^(-ell-1)).
std::uint64_t amplification_runs(unsigned ell, double delta);
// Upper bound on reads (with repeats) of one pcuss_verify call.
double predicted_queries(const LevelParams& params, double eps, double delta);

// Hypothetical quasilinear PCPP length s * ceil(log2 s)^2.
double model_pcpp_length(double s);

// log^(i) applied i times with the convention log^(0) x = x.
double iterated_log(double x, unsigned i);
std::uint64_t ceil_iterated_log(std::uint64_t x, unsigned i);

}  // namespace pcuss
