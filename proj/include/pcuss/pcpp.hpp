#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcuss/bitvec.hpp"
#include "pcuss/goodcode.hpp"
#include "pcuss/oracle.hpp"
#include "pcuss/rng.hpp"

namespace pcuss {

// sum(linear & u) + sum over set bits (i*N + j) of quad of u_i u_j + constant = 0
struct QuadConstraint {
  std::uint64_t linear = 0;
  std::uint64_t quad = 0;
  bool constant = false;
};

// Witness system over u in {0,1}^N: the input is x_i = parity(input_row(i) & u)
// and u must satisfy every constraint.
struct ConstraintSystem {
  unsigned num_vars = 0;
  std::function<std::uint64_t(std::size_t)> input_row;
  std::vector<QuadConstraint> constraints;

  bool quadratic() const;
  bool satisfied(std::uint64_t u) const;
  BitVec project(std::uint64_t u, std::size_t n) const;
};

struct PredicateSpec {
  std::string name;
  std::size_t arity = 0;
  std::function<bool(const BitVec&)> evaluate;
  // Claimed circuit size, used only for length accounting.
  std::uint64_t declared_size = 0;
  std::optional<ConstraintSystem> constraints;
};

// Exhaustive cross-check of the constraint system against evaluate (n, N <= 16).
bool constraints_match(const PredicateSpec& spec);

struct PcppProof {
  std::string backend_id;
  SourcePtr bits;
  std::size_t length() const { return bits ? bits->size() : 0; }
};

struct VerdictReport {
  bool accept = false;
  std::size_t input_queries = 0;
  std::size_t proof_queries = 0;
  std::size_t value_queries = 0;
  std::uint64_t seed = 0;
  std::string rejected_stage;
};

class PcppBackend {
 public:
  virtual ~PcppBackend() = default;
  virtual std::string id() const = 0;
  virtual std::uint64_t proof_length(const PredicateSpec& spec) const = 0;
  virtual PcppProof prove(const PredicateSpec& spec, const BitVec& x) const = 0;
  // Prover that already knows a witness of the constraint system.
  virtual PcppProof prove_with_witness(const PredicateSpec& spec, const BitVec& x, std::uint64_t u) const;
  // Accepts or rejects; the verifier reads x and proof only through the oracles.
  virtual bool verify(const PredicateSpec& spec, Oracle& x, Oracle& proof, double eps, double delta,
                      Rng& rng) const = 0;
  // Worst-case number of reads of one verify call, counting repeats.
  virtual std::uint64_t query_budget(const PredicateSpec& spec, double eps, double delta) const = 0;
  virtual void check_supported(double eps, double delta) const;
};

using BackendPtr = std::shared_ptr<const PcppBackend>;

// Reads the whole input and decides it directly; the proof is empty.
class ExhaustiveBackend : public PcppBackend {
 public:
  std::string id() const override { return "exhaustive"; }
  std::uint64_t proof_length(const PredicateSpec&) const override { return 0; }
  PcppProof prove(const PredicateSpec& spec, const BitVec& x) const override;
  bool verify(const PredicateSpec& spec, Oracle& x, Oracle& proof, double eps, double delta,
              Rng& rng) const override;
  std::uint64_t query_budget(const PredicateSpec& spec, double, double) const override { return spec.arity; }
};

// Hadamard-code PCPP over the witness system. The proof is f = Had(u),
// followed by g = Had(u (x) u) when some constraint is quadratic.
class HadamardBackend : public PcppBackend {
 public:
  static constexpr unsigned kMaxLinearVars = 26;
  static constexpr unsigned kMaxQuadraticVars = 5;

  std::string id() const override { return "hadamard"; }
  std::uint64_t proof_length(const PredicateSpec& spec) const override;
  PcppProof prove(const PredicateSpec& spec, const BitVec& x) const override;
  PcppProof prove_with_witness(const PredicateSpec& spec, const BitVec& x, std::uint64_t u) const override;
  bool verify(const PredicateSpec& spec, Oracle& x, Oracle& proof, double eps, double delta,
              Rng& rng) const override;
  std::uint64_t query_budget(const PredicateSpec& spec, double eps, double delta) const override;

  // Lower bound on the rejection probability of one round when x is
  // eps-far from the accept set.
  static double round_rejection(bool quadratic, double eps);
  static std::uint64_t rounds(bool quadratic, double eps, double delta);
  static std::uint64_t queries_per_round(const ConstraintSystem& cs);
  // Proof length without the capability check (length accounting only).
  static std::uint64_t formal_length(unsigned num_vars, bool quadratic);
};

// Runs `base` reps = ceil(2 ln(1/tau) / base_delta) times with soundness
// parameter base_delta and rejects if any run rejects. reps = 0 runs the
// base verifier once.
class AmplifiedBackend : public PcppBackend {
 public:
  AmplifiedBackend(BackendPtr base, double base_delta, double tau);
  static std::uint64_t repetitions(double base_delta, double tau);

  std::string id() const override { return base_->id() + "+amplified"; }
  std::uint64_t proof_length(const PredicateSpec& spec) const override { return base_->proof_length(spec); }
  PcppProof prove(const PredicateSpec& spec, const BitVec& x) const override { return base_->prove(spec, x); }
  PcppProof prove_with_witness(const PredicateSpec& spec, const BitVec& x, std::uint64_t u) const override {
    return base_->prove_with_witness(spec, x, u);
  }
  bool verify(const PredicateSpec& spec, Oracle& x, Oracle& proof, double eps, double delta,
              Rng& rng) const override;
  std::uint64_t query_budget(const PredicateSpec& spec, double eps, double delta) const override;
  std::uint64_t reps() const { return reps_; }
  double base_delta() const { return base_delta_; }

 private:
  BackendPtr base_;
  double base_delta_;
  std::uint64_t reps_;
};

BackendPtr amplify(BackendPtr base, double base_delta, double tau);
BackendPtr make_backend(const std::string& id);

PcppProof backend_prove(const PcppBackend& backend, const PredicateSpec& spec, const BitVec& x);
// Verdict plus exact distinct-position counts on the two oracles.
VerdictReport backend_verify(const PcppBackend& backend, const PredicateSpec& spec, QueryOracle& x,
                             QueryOracle& proof, double eps, double delta, std::uint64_t seed);

// Hadamard proof of u, computed on demand.
class HadamardSource : public BitSource {
 public:
  HadamardSource(std::uint64_t u, unsigned num_vars, bool quadratic);
  std::size_t size() const override { return size_; }
  bool get(std::size_t i) const override;
  std::uint64_t get_bits(std::size_t offset, std::size_t count) const override;

 private:
  std::uint64_t u_;
  std::uint64_t uu_;
  unsigned n_;
  std::size_t linear_size_;
  std::size_t size_;
};

std::uint64_t tensor_square(std::uint64_t u, unsigned num_vars);

// ---------------------------------------------------------------------------
// Spiel-PCU: unveiling with the claimed value given as an oracle to Spiel(w).

enum class PcuLayout {
  // v || Spiel(w)^xi, xi = floor(m / 100k); requires m >= 100k.
  Standard,
  // v^xi || Spiel(w), xi = floor(100k / m); for short codewords.
  Balanced,
};

// v = sum over set bits of v_rows(i) of u, w_b = parity(w_rows[b] & u).
struct LinearParam {
  unsigned dim = 0;
  std::vector<std::uint64_t> v_rows;
  std::vector<std::uint64_t> w_rows;
};

struct PcuFamily {
  std::string name;
  std::size_t m = 0;
  std::size_t k = 0;
  std::function<bool(const BitVec& w, const BitVec& v)> member;
  std::uint64_t declared_size = 0;
  std::optional<LinearParam> linear;
};

class SpielPcu {
 public:
  SpielPcu(PcuFamily family, std::shared_ptr<const GoodCode> spiel, BackendPtr backend, PcuLayout layout);

  const PcuFamily& family() const { return family_; }
  const PredicateSpec& predicate() const { return predicate_; }
  const PcppBackend& backend() const { return *backend_; }
  PcuLayout layout() const { return layout_; }
  std::size_t xi() const { return xi_; }
  std::size_t input_length() const { return predicate_.arity; }
  std::uint64_t proof_length() const { return backend_->proof_length(predicate_); }

  // The C_eq input for (v, tau).
  BitVec assemble(const BitVec& v, const BitVec& tau) const;
  PcppProof prove(const BitVec& v, const BitVec& w) const;
  PcppProof prove_with_witness(const BitVec& v, const BitVec& w, std::uint64_t u) const;
  // Runs the backend on C_eq with detection radius eps / 3.
  bool verify(Oracle& v, Oracle& tau, Oracle& proof, double eps, double delta, Rng& rng) const;
  std::uint64_t query_budget(double eps, double delta) const {
    return backend_->query_budget(predicate_, eps / 3, delta);
  }

 private:
  void join(JoinedOracle& x, Oracle& v, Oracle& tau) const;

  PcuFamily family_;
  std::shared_ptr<const GoodCode> spiel_;
  BackendPtr backend_;
  PcuLayout layout_;
  std::size_t xi_ = 1;
  PredicateSpec predicate_;
};

SpielPcu make_spiel_pcu(PcuFamily family, std::shared_ptr<const GoodCode> spiel, BackendPtr backend,
                        PcuLayout layout = PcuLayout::Standard);

}  // namespace pcuss
