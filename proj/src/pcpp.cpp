#include "pcuss/pcpp.hpp"

#include <bit>
#include <cmath>

#include "pcuss/error.hpp"
#include "pcuss/gf2.hpp"

namespace pcuss {

bool ConstraintSystem::quadratic() const {
  for (const auto& c : constraints) {
    if (c.quad) return true;
  }
  return false;
}

bool ConstraintSystem::satisfied(std::uint64_t u) const {
  const std::uint64_t uu = tensor_square(u, num_vars);
  for (const auto& c : constraints) {
    if ((parity64(c.linear & u) ^ parity64(c.quad & uu) ^ static_cast<int>(c.constant)) != 0) return false;
  }
  return true;
}

BitVec ConstraintSystem::project(std::uint64_t u, std::size_t n) const {
  BitVec x(n);
  for (std::size_t i = 0; i < n; ++i) x.set(i, parity64(input_row(i) & u));
  return x;
}

std::uint64_t tensor_square(std::uint64_t u, unsigned num_vars) {
  if (num_vars * num_vars > 64) return 0;
  std::uint64_t uu = 0;
  for (unsigned i = 0; i < num_vars; ++i) {
    if (!((u >> i) & 1)) continue;
    for (unsigned j = 0; j < num_vars; ++j) {
      if ((u >> j) & 1) uu |= std::uint64_t{1} << (i * num_vars + j);
    }
  }
  return uu;
}

bool constraints_match(const PredicateSpec& spec) {
  if (!spec.constraints) return true;
  const auto& cs = *spec.constraints;
  if (spec.arity > 16 || cs.num_vars > 16) throw CapabilityError("exhaustive constraint check needs n, N <= 16");
  std::vector<std::uint8_t> reachable(std::size_t{1} << spec.arity, 0);
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << cs.num_vars); ++u) {
    if (cs.satisfied(u)) reachable[cs.project(u, spec.arity).get_bits(0, spec.arity)] = 1;
  }
  for (std::uint64_t x = 0; x < reachable.size(); ++x) {
    if (static_cast<bool>(reachable[x]) != spec.evaluate(BitVec::from_uint(x, spec.arity))) return false;
  }
  return true;
}

PcppProof PcppBackend::prove_with_witness(const PredicateSpec& spec, const BitVec& x, std::uint64_t) const {
  return prove(spec, x);
}

void PcppBackend::check_supported(double eps, double delta) const {
  if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1)) {
    throw CapabilityError(id() + " backend needs 0 < eps < 1 and 0 < delta < 1");
  }
}

PcppProof ExhaustiveBackend::prove(const PredicateSpec& spec, const BitVec& x) const {
  if (x.size() != spec.arity) throw InputError("prove: input length != predicate arity");
  if (!spec.evaluate(x)) throw PreconditionError("prove: input is rejected by the predicate");
  return {id(), std::make_shared<const VecSource>(BitVec())};
}

bool ExhaustiveBackend::verify(const PredicateSpec& spec, Oracle& x, Oracle&, double eps, double delta,
                               Rng&) const {
  check_supported(eps, delta);
  if (x.size() != spec.arity) throw InputError("verify: input length != predicate arity");
  return spec.evaluate(x.read(0, spec.arity));
}

// --- Hadamard -------------------------------------------------------------

HadamardSource::HadamardSource(std::uint64_t u, unsigned num_vars, bool quadratic)
    : u_(u), uu_(tensor_square(u, num_vars)), n_(num_vars) {
  linear_size_ = std::size_t{1} << num_vars;
  size_ = linear_size_ + (quadratic ? (std::size_t{1} << (num_vars * num_vars)) : 0);
}

bool HadamardSource::get(std::size_t i) const {
  if (i < linear_size_) return parity64(i & u_);
  return parity64((i - linear_size_) & uu_);
}

std::uint64_t HadamardSource::get_bits(std::size_t offset, std::size_t count) const {
  std::uint64_t out = 0;
  for (std::size_t j = 0; j < count; ++j) out |= static_cast<std::uint64_t>(get(offset + j)) << j;
  return out;
}

std::uint64_t HadamardBackend::formal_length(unsigned num_vars, bool quadratic) {
  if (num_vars >= 64 || (quadratic && num_vars * num_vars >= 64)) {
    throw CapabilityError("Hadamard proof length overflows 64 bits");
  }
  std::uint64_t len = std::uint64_t{1} << num_vars;
  if (quadratic) len += std::uint64_t{1} << (num_vars * num_vars);
  return len;
}

namespace {

const ConstraintSystem& need_system(const PredicateSpec& spec) {
  if (!spec.constraints) throw CapabilityError("Hadamard backend needs a constraint system for " + spec.name);
  const auto& cs = *spec.constraints;
  const unsigned cap = cs.quadratic() ? HadamardBackend::kMaxQuadraticVars : HadamardBackend::kMaxLinearVars;
  if (cs.num_vars > cap) {
    throw CapabilityError("Hadamard backend supports at most " + std::to_string(cap) + " witness bits, got " +
                          std::to_string(cs.num_vars));
  }
  return cs;
}

}  // namespace

std::uint64_t HadamardBackend::proof_length(const PredicateSpec& spec) const {
  const auto& cs = need_system(spec);
  return formal_length(cs.num_vars, cs.quadratic());
}

double HadamardBackend::round_rejection(bool quadratic, double eps) {
  // Linear: if f is d-far from linear, BLR rejects w.p. >= d; otherwise a
  // self-corrected read errs w.p. <= 2d, so a violated constraint is caught
  // w.p. >= 1/2 - 2d and a far input w.p. >= eps - 2d.
  // Quadratic: same with d < 1/64 for both tables; the tensor test catches an
  // inconsistent g w.p. >= 1/4 - 6d.
  return quadratic ? std::min(1.0 / 64, eps / 3) : std::min(1.0 / 6, eps / 3);
}

std::uint64_t HadamardBackend::rounds(bool quadratic, double eps, double delta) {
  const double rho = round_rejection(quadratic, eps);
  return static_cast<std::uint64_t>(std::floor(std::log(1 - delta) / std::log(1 - rho))) + 1;
}

std::uint64_t HadamardBackend::queries_per_round(const ConstraintSystem& cs) {
  if (cs.quadratic()) return 3 + 3 + 6 + 4 + 3;
  return 3 + (cs.constraints.empty() ? 0 : 2) + 3;
}

std::uint64_t HadamardBackend::query_budget(const PredicateSpec& spec, double eps, double delta) const {
  const auto& cs = need_system(spec);
  return rounds(cs.quadratic(), eps, delta) * queries_per_round(cs);
}

PcppProof HadamardBackend::prove(const PredicateSpec& spec, const BitVec& x) const {
  const auto& cs = need_system(spec);
  if (x.size() != spec.arity) throw InputError("prove: input length != predicate arity");
  if (!spec.evaluate(x)) throw PreconditionError("prove: input is rejected by the predicate");
  std::optional<std::uint64_t> u;
  if (!cs.quadratic()) {
    std::vector<std::uint64_t> rows;
    BitVec rhs;
    for (std::size_t i = 0; i < spec.arity; ++i) {
      rows.push_back(cs.input_row(i));
      rhs.push_back(x.get(i));
    }
    for (const auto& c : cs.constraints) {
      rows.push_back(c.linear);
      rhs.push_back(c.constant);
    }
    u = gf2::solve(rows, rhs);
  } else {
    for (std::uint64_t cand = 0; cand < (std::uint64_t{1} << cs.num_vars); ++cand) {
      if (cs.satisfied(cand) && cs.project(cand, spec.arity) == x) {
        u = cand;
        break;
      }
    }
  }
  if (!u) throw PreconditionError("prove: constraint system has no witness for the input");
  return {id(), std::make_shared<const HadamardSource>(*u, cs.num_vars, cs.quadratic())};
}

PcppProof HadamardBackend::prove_with_witness(const PredicateSpec& spec, const BitVec& x, std::uint64_t u) const {
  const auto& cs = need_system(spec);
  if (!cs.satisfied(u) || cs.project(u, spec.arity) != x) {
    throw PreconditionError("prove: witness does not generate the input");
  }
  return {id(), std::make_shared<const HadamardSource>(u, cs.num_vars, cs.quadratic())};
}

bool HadamardBackend::verify(const PredicateSpec& spec, Oracle& x, Oracle& proof, double eps, double delta,
                             Rng& rng) const {
  check_supported(eps, delta);
  const auto& cs = need_system(spec);
  const unsigned N = cs.num_vars;
  const bool quad = cs.quadratic();
  if (x.size() != spec.arity) throw InputError("verify: input length != predicate arity");
  if (proof.size() != formal_length(N, quad)) throw InputError("verify: proof length mismatch");
  const std::size_t lin = std::size_t{1} << N;
  const unsigned NN = N * N;

  auto f = [&](std::uint64_t a) { return proof.bit(a); };
  auto g = [&](std::uint64_t b) { return proof.bit(lin + b); };
  auto scf = [&](std::uint64_t a) {
    const std::uint64_t r = rng.bits(N);
    return f(a ^ r) != f(r);
  };
  auto scg = [&](std::uint64_t b) {
    const std::uint64_t r = rng.bits(NN);
    return g(b ^ r) != g(r);
  };

  const std::uint64_t R = rounds(quad, eps, delta);
  for (std::uint64_t round = 0; round < R; ++round) {
    const std::uint64_t a = rng.bits(N);
    const std::uint64_t b = rng.bits(N);
    if ((f(a) ^ f(b) ^ f(a ^ b)) != 0) return false;
    if (quad) {
      const std::uint64_t a2 = rng.bits(NN);
      const std::uint64_t b2 = rng.bits(NN);
      if ((g(a2) ^ g(b2) ^ g(a2 ^ b2)) != 0) return false;
      const std::uint64_t s = rng.bits(N);
      const std::uint64_t t = rng.bits(N);
      std::uint64_t st = 0;
      for (unsigned i = 0; i < N; ++i) {
        if ((s >> i) & 1) st |= t << (i * N);
      }
      const bool fs = scf(s);
      const bool ft = scf(t);
      if ((fs && ft) != scg(st)) return false;
    }
    if (!cs.constraints.empty()) {
      std::uint64_t lmask = 0;
      std::uint64_t qmask = 0;
      bool c = false;
      for (const auto& con : cs.constraints) {
        if (rng.coin()) {
          lmask ^= con.linear;
          qmask ^= con.quad;
          c ^= con.constant;
        }
      }
      bool val = scf(lmask) ^ c;
      if (quad) val ^= scg(qmask);
      if (val) return false;
    }
    const std::size_t i = rng.below(spec.arity);
    if (x.bit(i) != scf(cs.input_row(i))) return false;
  }
  return true;
}

// --- Amplification -----------------------------------------------------------

AmplifiedBackend::AmplifiedBackend(BackendPtr base, double base_delta, double tau)
    : base_(std::move(base)), base_delta_(base_delta), reps_(repetitions(base_delta, tau)) {}

std::uint64_t AmplifiedBackend::repetitions(double base_delta, double tau) {
  if (!(base_delta > 0 && base_delta < 1) || !(tau > 0 && tau <= 1)) {
    throw ParameterError("amplify needs 0 < delta < 1 and 0 < tau <= 1");
  }
  return static_cast<std::uint64_t>(std::ceil(2.0 * std::log(1.0 / tau) / base_delta));
}

bool AmplifiedBackend::verify(const PredicateSpec& spec, Oracle& x, Oracle& proof, double eps, double,
                              Rng& rng) const {
  const std::uint64_t runs = std::max<std::uint64_t>(reps_, 1);
  for (std::uint64_t r = 0; r < runs; ++r) {
    if (!base_->verify(spec, x, proof, eps, base_delta_, rng)) return false;
  }
  return true;
}

std::uint64_t AmplifiedBackend::query_budget(const PredicateSpec& spec, double eps, double) const {
  return std::max<std::uint64_t>(reps_, 1) * base_->query_budget(spec, eps, base_delta_);
}

BackendPtr amplify(BackendPtr base, double base_delta, double tau) {
  if (AmplifiedBackend::repetitions(base_delta, tau) == 0) return base;
  return std::make_shared<const AmplifiedBackend>(std::move(base), base_delta, tau);
}

BackendPtr make_backend(const std::string& id) {
  if (id == "exhaustive") return std::make_shared<const ExhaustiveBackend>();
  if (id == "hadamard") return std::make_shared<const HadamardBackend>();
  throw ParameterError("unknown backend '" + id + "'");
}

PcppProof backend_prove(const PcppBackend& backend, const PredicateSpec& spec, const BitVec& x) {
  return backend.prove(spec, x);
}

VerdictReport backend_verify(const PcppBackend& backend, const PredicateSpec& spec, QueryOracle& x,
                             QueryOracle& proof, double eps, double delta, std::uint64_t seed) {
  const std::size_t x0 = x.distinct();
  const std::size_t p0 = proof.distinct();
  Rng rng(seed);
  VerdictReport r;
  r.seed = seed;
  r.accept = backend.verify(spec, x, proof, eps, delta, rng);
  if (!r.accept) r.rejected_stage = backend.id();
  r.input_queries = x.distinct() - x0;
  r.proof_queries = proof.distinct() - p0;
  return r;
}

// --- Spiel-PCU ---------------------------------------------------------------

SpielPcu::SpielPcu(PcuFamily family, std::shared_ptr<const GoodCode> spiel, BackendPtr backend, PcuLayout layout)
    : family_(std::move(family)), spiel_(std::move(spiel)), backend_(std::move(backend)), layout_(layout) {
  const std::size_t m = family_.m;
  const std::size_t k = family_.k;
  if (spiel_->k() != k) throw ParameterError("Spiel code length does not match the family's k");
  const std::size_t vn = 100 * k;
  if (k == 0) {
    xi_ = 0;
  } else if (layout_ == PcuLayout::Standard) {
    if (m < vn) {
      throw ParameterError("Spiel-PCU needs m >= 100k (m = " + std::to_string(m) + ", k = " + std::to_string(k) +
                           ")");
    }
    xi_ = m / vn;
  } else {
    if (m == 0 || m > vn) throw ParameterError("balanced Spiel-PCU layout needs 0 < m <= 100k");
    xi_ = vn / m;
  }

  predicate_.name = "C_eq[" + family_.name + "]";
  const bool standard = layout_ == PcuLayout::Standard || k == 0;
  const std::size_t vcopies = standard ? 1 : xi_;
  const std::size_t tcopies = k == 0 ? 0 : (standard ? xi_ : 1);
  predicate_.arity = vcopies * m + tcopies * vn;
  predicate_.declared_size = family_.declared_size + predicate_.arity;

  auto fam = family_;
  auto code = spiel_;
  predicate_.evaluate = [fam, code, m, vn, vcopies, tcopies](const BitVec& x) {
    if (x.size() != vcopies * m + tcopies * vn) return false;
    const BitVec v = x.slice(0, m);
    for (std::size_t c = 1; c < vcopies; ++c) {
      if (x.slice(c * m, m) != v) return false;
    }
    const std::size_t tau_start = vcopies * m;
    BitVec w;
    if (tcopies > 0) {
      const BitVec tau = x.slice(tau_start, vn);
      for (std::size_t c = 1; c < tcopies; ++c) {
        if (x.slice(tau_start + c * vn, vn) != tau) return false;
      }
      if (!code->is_member(tau)) return false;
      w = code->decode(tau);
    }
    return fam.member(w, v);
  };

  if (family_.linear) {
    const LinearParam& lp = *family_.linear;
    if (lp.v_rows.size() != m || lp.w_rows.size() != k) throw ParameterError("linear parametrization shape mismatch");
    auto rows = std::make_shared<std::vector<std::uint64_t>>();
    rows->reserve(predicate_.arity);
    for (std::size_t c = 0; c < vcopies; ++c) rows->insert(rows->end(), lp.v_rows.begin(), lp.v_rows.end());
    if (tcopies > 0) {
      const auto cols = spiel_->column_masks();
      std::vector<std::uint64_t> tau_rows(vn, 0);
      for (std::size_t j = 0; j < vn; ++j) {
        for (std::uint64_t mask = cols[j]; mask; mask &= mask - 1) {
          tau_rows[j] ^= lp.w_rows[static_cast<std::size_t>(std::countr_zero(mask))];
        }
      }
      for (std::size_t c = 0; c < tcopies; ++c) rows->insert(rows->end(), tau_rows.begin(), tau_rows.end());
    }
    ConstraintSystem cs;
    cs.num_vars = lp.dim;
    cs.input_row = [rows](std::size_t i) { return (*rows)[i]; };
    predicate_.constraints = std::move(cs);
  }
}

void SpielPcu::join(JoinedOracle& x, Oracle& v, Oracle& tau) const {
  if (v.size() != family_.m) throw InputError("Spiel-PCU: codeword length mismatch");
  if (tau.size() != 100 * family_.k) throw InputError("Spiel-PCU: value length mismatch");
  const bool standard = layout_ == PcuLayout::Standard || family_.k == 0;
  if (standard) {
    x.append(v);
    for (std::size_t c = 0; c < xi_; ++c) x.append(tau);
  } else {
    for (std::size_t c = 0; c < xi_; ++c) x.append(v);
    x.append(tau);
  }
}

BitVec SpielPcu::assemble(const BitVec& v, const BitVec& tau) const {
  QueryOracle vo(v);
  QueryOracle to(tau);
  JoinedOracle x;
  join(x, vo, to);
  return x.read(0, x.size());
}

PcppProof SpielPcu::prove(const BitVec& v, const BitVec& w) const {
  return backend_->prove(predicate_, assemble(v, spiel_->encode(w)));
}

PcppProof SpielPcu::prove_with_witness(const BitVec& v, const BitVec& w, std::uint64_t u) const {
  return backend_->prove_with_witness(predicate_, assemble(v, spiel_->encode(w)), u);
}

bool SpielPcu::verify(Oracle& v, Oracle& tau, Oracle& proof, double eps, double delta, Rng& rng) const {
  JoinedOracle x;
  join(x, v, tau);
  return backend_->verify(predicate_, x, proof, eps / 3, delta, rng);
}

SpielPcu make_spiel_pcu(PcuFamily family, std::shared_ptr<const GoodCode> spiel, BackendPtr backend,
                        PcuLayout layout) {
  return SpielPcu(std::move(family), std::move(spiel), std::move(backend), layout);
}

}  // namespace pcuss
