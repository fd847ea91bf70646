#include "pcuss/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcuss/error.hpp"

namespace pcuss {

struct LevelParams::Impl {
  unsigned ell = 0;
  std::size_t k0 = 0;
  std::vector<LevelSpec> levels;  // levels[i - 1] is level i
  Constants constants;
  std::string backend;
  std::uint64_t seed = 0;
  bool arithmetic_only = false;
  bool require_ensemble_distance = true;
  std::vector<std::uint64_t> m;
  std::vector<std::uint64_t> z;
  std::vector<double> z_model;
  std::vector<std::string> flags;
  std::shared_ptr<const HardCodeSpec> base;
  std::shared_ptr<SpielFamily> spiel;
  std::shared_ptr<const SpielPcu> base_pcu;
  std::vector<std::shared_ptr<const SpielPcu>> l_pcus;  // index i - 1
};

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  if (p > std::numeric_limits<std::uint64_t>::max()) throw CapabilityError("length arithmetic exceeds 64 bits");
  return static_cast<std::uint64_t>(p);
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw CapabilityError("length arithmetic exceeds 64 bits");
  return a + b;
}

const LevelParams::Impl& need(const std::shared_ptr<const LevelParams::Impl>& p) {
  if (!p) throw PreconditionError("LevelParams used before derive_params");
  return *p;
}

// Input length of the Spiel-PCU language check at a level.
std::uint64_t l_input_length(std::uint64_t s_len, std::size_t k) {
  if (k == 0) return s_len;
  return s_len + (s_len / (100 * k)) * 100 * k;
}

std::uint64_t base_input_length(std::size_t k0) {
  const std::uint64_t m = 4 * k0;
  return m * ((100 * k0) / m) + 100 * k0;
}

}  // namespace

double model_pcpp_length(double s) {
  if (s <= 1) return s;
  const double l = std::ceil(std::log2(s));
  return s * l * l;
}

double iterated_log(double x, unsigned i) {
  for (unsigned j = 0; j < i; ++j) {
    if (x <= 0) throw DomainError("iterated logarithm of a non-positive value");
    x = std::log2(x);
  }
  return x;
}

std::uint64_t ceil_iterated_log(std::uint64_t x, unsigned i) {
  const double v = iterated_log(static_cast<double>(x), i);
  return static_cast<std::uint64_t>(std::ceil(v - 1e-9));
}

unsigned next_field_r(unsigned t, unsigned d) {
  double need_bits = d * std::log2(static_cast<double>(t));
  for (unsigned r = 0, tt = 2; r <= 2; ++r, tt *= 3) {
    if (need_bits <= tt + 1e-9) return r;
  }
  throw ParameterError("next field exceeds the supported family");
}

unsigned LevelParams::ell() const { return need(impl_).ell; }
std::size_t LevelParams::k(unsigned i) const {
  const auto& p = need(impl_);
  if (i == 0) return p.k0;
  return level(i).k;
}
const LevelSpec& LevelParams::level(unsigned i) const {
  const auto& p = need(impl_);
  if (i == 0 || i > p.ell) throw InputError("level index out of range");
  return p.levels[i - 1];
}
const Constants& LevelParams::constants() const { return need(impl_).constants; }
const std::string& LevelParams::backend_id() const { return need(impl_).backend; }
std::uint64_t LevelParams::seed() const { return need(impl_).seed; }
const std::vector<std::uint64_t>& LevelParams::m() const { return need(impl_).m; }
const std::vector<std::uint64_t>& LevelParams::z() const { return need(impl_).z; }
const std::vector<double>& LevelParams::z_model() const { return need(impl_).z_model; }
bool LevelParams::arithmetic_only() const { return need(impl_).arithmetic_only; }
bool LevelParams::relaxed() const { return !need(impl_).flags.empty(); }
const std::vector<std::string>& LevelParams::flags() const { return need(impl_).flags; }

std::shared_ptr<const HardCodeSpec> LevelParams::base_ptr() const {
  const auto& p = need(impl_);
  if (!p.base) throw CapabilityError("parameters were derived for arithmetic only");
  return p.base;
}
const HardCodeSpec& LevelParams::base() const { return *base_ptr(); }

std::shared_ptr<const GoodCode> LevelParams::spiel(std::size_t k) const { return need(impl_).spiel->get(k); }

const SpielPcu& LevelParams::base_pcu() const {
  const auto& p = need(impl_);
  if (!p.base_pcu) throw CapabilityError("parameters were derived for arithmetic only");
  return *p.base_pcu;
}

const SpielPcu& LevelParams::l_pcu(unsigned i) const {
  const auto& p = need(impl_);
  if (p.l_pcus.empty()) throw CapabilityError("parameters were derived for arithmetic only");
  if (i == 0 || i > p.ell) throw InputError("level index out of range");
  return *p.l_pcus[i - 1];
}

std::string LevelParams::describe() const {
  const auto& p = need(impl_);
  std::ostringstream os;
  os << "ell=" << p.ell << ";k0=" << p.k0 << ";c=" << p.constants.c << ";d=" << p.constants.d
     << ";c_ell=" << p.constants.c_ell << ";backend=" << p.backend << ";seed=" << p.seed
     << ";arith=" << p.arithmetic_only << ";ens=" << p.require_ensemble_distance;
  for (const auto& L : p.levels) os << ";L" << L.level << "=t" << L.t() << ",k" << L.k;
  if (p.base) {
    os << ";A=";
    for (std::uint64_t c : p.base->columns) os << std::hex << c << std::dec << ",";
  }
  return os.str();
}

LevelParams derive_params(const ParamsRequest& req) {
  auto p = std::make_shared<LevelParams::Impl>();
  p->ell = req.ell;
  p->constants = req.constants;
  p->backend = req.backend;
  p->seed = req.seed;
  p->arithmetic_only = req.arithmetic_only;
  p->require_ensemble_distance = req.require_ensemble_distance;
  if (req.backend != "exhaustive" && req.backend != "hadamard") {
    throw ParameterError("unknown backend '" + req.backend + "'");
  }
  if (req.constants.d == 0) throw ParameterError("constant d must be positive");

  // Field chain from the top level down to level 1.
  if (req.ell == 0) {
    p->k0 = req.k;
  } else {
    std::vector<LevelSpec> down;
    FieldParams F = FieldParams::from_t(req.t);
    std::size_t k = req.k;
    for (unsigned i = req.ell; i >= 1; --i) {
      LevelSpec L;
      L.level = i;
      L.field = F;
      L.k = k;
      if (k > F.size() / 2 + 1) {
        throw ParameterError("k = " + std::to_string(k) + " exceeds the capacity |F|/2 + 1 of " + F.name());
      }
      for (std::uint64_t x = 0; x < F.size(); ++x) (x < k ? L.H : L.outside).push_back(x);
      const std::uint64_t floor_size = std::max<std::uint64_t>(req.constants.c_ell, std::uint64_t{req.constants.c} * k);
      if (F.size() < floor_size) {
        p->flags.push_back("relaxed-regime: level " + std::to_string(i) + " has |F| = " + std::to_string(F.size()) +
                           " < max(c_ell, c*k) = " + std::to_string(floor_size));
      }
      down.push_back(L);
      k = F.t();
      if (i > 1) F = FieldParams::from_r(next_field_r(F.t(), req.constants.d));
    }
    p->k0 = k;
    p->levels.assign(down.rbegin(), down.rend());
  }
  if (p->k0 == 0) throw ParameterError("base code needs k >= 1");
  if (4 * p->k0 < 30) {
    p->flags.push_back("relaxed-regime: base length 4k = " + std::to_string(4 * p->k0) +
                       " < 30, so the 1/30 distance threshold only demands weight 1");
  }

  // Lengths.
  const bool hadamard = req.backend == "hadamard";
  p->m.push_back(4 * p->k0);
  p->z.push_back(hadamard ? HadamardBackend::formal_length(static_cast<unsigned>(3 * p->k0), false) : 0);
  p->z_model.push_back(model_pcpp_length(static_cast<double>(base_input_length(p->k0))));
  for (const auto& L : p->levels) {
    const std::uint64_t out = L.outside.size();
    p->m.push_back(checked_mul(out, p->m.back()));
    const std::uint64_t s_len = L.s_length();
    p->z.push_back(checked_add(s_len, checked_mul(out, p->z.back())));
    p->z_model.push_back(static_cast<double>(s_len) + static_cast<double>(out) * p->z_model.back() +
                         model_pcpp_length(static_cast<double>(l_input_length(s_len, L.k))));
  }

  p->spiel = std::make_shared<SpielFamily>(derive_seed(req.seed, 0x5b1e1));
  if (!req.arithmetic_only) {
    if (p->k0 > kMaxHardCodeK) {
      throw CapabilityError("base secret length k0 = " + std::to_string(p->k0) +
                            " is beyond certification; use arithmetic-only parameters");
    }
    if (p->k0 < 3) throw ParameterError("base code needs k0 >= 3");
    Rng rng(derive_seed(req.seed, 0xba5e));
    HardCodeOptions opts;
    opts.require_ensemble_distance = req.require_ensemble_distance;
    p->base = std::make_shared<const HardCodeSpec>(hardcode_generate(static_cast<unsigned>(p->k0), rng, opts));

    const HardCodeSpec& A = *p->base;
    PcuFamily fam;
    fam.name = "H_" + std::to_string(p->k0);
    fam.m = A.n();
    fam.k = A.k;
    auto base = p->base;
    fam.member = [base](const BitVec& w, const BitVec& v) { return base_membership(*base, w, v); };
    fam.declared_size = std::uint64_t{A.n()} * 3 * A.k;
    LinearParam lp;
    lp.dim = 3 * A.k;
    lp.v_rows = A.rows();
    for (unsigned b = 0; b < A.k; ++b) lp.w_rows.push_back(std::uint64_t{1} << b);
    fam.linear = lp;
    p->base_pcu = std::make_shared<const SpielPcu>(make_spiel_pcu(
        std::move(fam), p->spiel->get(p->k0), make_backend(req.backend), PcuLayout::Balanced));
  }
  LevelParams out;
  out.impl_ = p;

  if (!req.arithmetic_only) {
    auto exhaustive = make_backend("exhaustive");
    for (const auto& L : p->levels) {
      PcuFamily fam;
      fam.name = "L_" + std::to_string(L.level);
      fam.m = L.s_length();
      fam.k = L.k;
      const unsigned lvl = L.level;
      LevelParams view = out;
      fam.member = [view, lvl](const BitVec& w, const BitVec& S) { return language_L_check(view, lvl, S, w); };
      fam.declared_size = L.s_length();
      p->l_pcus.push_back(std::make_shared<const SpielPcu>(
          make_spiel_pcu(std::move(fam), p->spiel->get(L.k), exhaustive, PcuLayout::Standard)));
    }
  }
  return out;
}

// --- Encoding ----------------------------------------------------------------

namespace {

Witness encode_rec(const LevelParams& P, unsigned level, std::uint64_t secret, Rng& rng, BitVec& out) {
  Witness wt;
  wt.level = level;
  wt.secret = secret;
  if (level == 0) {
    const HardCodeSpec& A = P.base();
    const BaseEncoding e = base_encode(A, BitVec::from_uint(secret, A.k), rng);
    wt.u = e.u;
    out.append(e.bits);
    return wt;
  }
  const LevelSpec& L = P.level(level);
  const Poly g = poly_sample_constrained(L.field, L.H, BitVec::from_uint(secret, L.k), rng);
  wt.g = g.coeffs();
  wt.children.reserve(L.outside.size());
  for (std::uint64_t beta : L.outside) wt.children.push_back(encode_rec(P, level - 1, g.eval(beta), rng, out));
  return wt;
}

void bits_rec(const LevelParams& P, const Witness& wt, BitVec& out) {
  if (wt.level == 0) {
    out.append(BitVec::from_uint(P.base().apply(wt.u), P.base().n()));
    return;
  }
  for (const auto& c : wt.children) bits_rec(P, c, out);
}

bool consistent_rec(const LevelParams& P, const Witness& wt, const BitVec& bits, std::size_t offset) {
  if (wt.level == 0) {
    const HardCodeSpec& A = P.base();
    if ((wt.u & ((std::uint64_t{1} << A.k) - 1)) != wt.secret) return false;
    return base_membership(A, BitVec::from_uint(wt.secret, A.k), bits.slice(offset, A.n()));
  }
  const LevelSpec& L = P.level(wt.level);
  const Poly g(L.field, wt.g);
  if (!g.in_cf()) return false;
  for (std::size_t i = 0; i < L.k; ++i) {
    if (g.eval(L.H[i]) != ((wt.secret >> i) & 1)) return false;
  }
  const std::uint64_t block = P.m()[wt.level - 1];
  for (std::size_t j = 0; j < L.outside.size(); ++j) {
    if (wt.children[j].secret != g.eval(L.outside[j])) return false;
    if (!consistent_rec(P, wt.children[j], bits, offset + j * block)) return false;
  }
  return true;
}

}  // namespace

Encoding encode_level(const LevelParams& P, unsigned level, std::uint64_t secret, Rng& rng) {
  Encoding e;
  e.level = level;
  e.w = BitVec::from_uint(secret, P.k(level));
  auto wt = std::make_shared<Witness>(encode_rec(P, level, secret, rng, e.bits));
  e.witness = std::move(wt);
  return e;
}

Encoding pcuss_encode(const LevelParams& P, const BitVec& w, Rng& rng) {
  if (w.size() != P.k()) throw InputError("encode: |w| = " + std::to_string(w.size()) + " but k = " +
                                          std::to_string(P.k()));
  if (w.size() > 64) throw CapabilityError("encode: secrets above 64 bits are not supported");
  return encode_level(P, P.ell(), w.get_bits(0, w.size()), rng);
}

Encoding assemble_level(const LevelParams& P, unsigned level, std::uint64_t secret, std::vector<std::uint64_t> g,
                        std::vector<Witness> children) {
  if (level == 0) throw InputError("assemble_level needs level >= 1");
  auto wt = std::make_shared<Witness>();
  wt->level = level;
  wt->secret = secret;
  wt->g = std::move(g);
  wt->children = std::move(children);
  Encoding e;
  e.level = level;
  e.w = BitVec::from_uint(secret, P.k(level));
  bits_rec(P, *wt, e.bits);
  e.witness = std::move(wt);
  return e;
}

BitVec pcuss_value(const LevelParams& P, const BitVec& w) {
  if (w.size() != P.k()) throw InputError("value: |w| != k");
  return P.spiel(P.k())->encode(w);
}

bool witness_consistent(const LevelParams& P, const Encoding& e) {
  if (!e.witness) return false;
  if (e.bits.size() != P.m()[e.level]) return false;
  return consistent_rec(P, *e.witness, e.bits, 0);
}

// --- Proof strings -------------------------------------------------------------

bool ProofString::get(std::size_t i) const { return get_bits(i, 1) & 1; }

std::uint64_t ProofString::get_bits(std::size_t offset, std::size_t count) const {
  if (level_ == 0) return pcpp_.bits->get_bits(offset, count);
  std::uint64_t out = 0;
  std::size_t done = 0;
  const std::size_t s_len = s_v_.size();
  const std::size_t kids_end = s_len + children_.size() * child_size_;
  while (done < count) {
    const std::size_t pos = offset + done;
    std::size_t take;
    std::uint64_t part;
    if (pos < s_len) {
      take = std::min(count - done, s_len - pos);
      part = s_v_.get_bits(pos, take);
    } else if (pos < kids_end) {
      const std::size_t j = (pos - s_len) / child_size_;
      const std::size_t local = (pos - s_len) % child_size_;
      take = std::min(count - done, child_size_ - local);
      part = children_[j]->get_bits(local, take);
    } else {
      const std::size_t local = pos - kids_end;
      take = std::min(count - done, pcpp_.length() - local);
      part = pcpp_.bits->get_bits(local, take);
    }
    out |= part << done;
    done += take;
  }
  return out;
}

std::vector<Section> ProofString::sections() const {
  std::vector<Section> out;
  if (level_ == 0) {
    out.push_back({"base_pcu", 0, pcpp_.length()});
    return out;
  }
  out.push_back({"S_v", 0, s_v_.size()});
  for (std::size_t j = 0; j < children_.size(); ++j) {
    out.push_back({"sub_" + std::to_string(j), s_v_.size() + j * child_size_, child_size_});
  }
  out.push_back({"proof_L", s_v_.size() + children_.size() * child_size_, pcpp_.length()});
  return out;
}

ProofPtr build_proof_level(const LevelParams& P, unsigned level, const Witness& wt, const BitVec& bits) {
  auto pr = std::make_shared<ProofString>();
  pr->level_ = level;
  if (level == 0) {
    const HardCodeSpec& A = P.base();
    pr->pcpp_ = P.base_pcu().prove_with_witness(bits, BitVec::from_uint(wt.secret, A.k), wt.u);
    pr->size_ = pr->pcpp_.length();
    return pr;
  }
  const LevelSpec& L = P.level(level);
  if (wt.children.size() != L.outside.size()) throw PreconditionError("witness does not match the parameters");
  const auto code = P.spiel(L.t());
  const std::uint64_t block = P.m()[level - 1];
  for (std::size_t j = 0; j < L.outside.size(); ++j) {
    pr->s_v_.append(code->encode_uint(wt.children[j].secret));
    pr->children_.push_back(build_proof_level(P, level - 1, wt.children[j], bits.slice(j * block, block)));
  }
  pr->child_size_ = pr->children_.empty() ? 0 : pr->children_.front()->size();
  pr->pcpp_ = P.l_pcu(level).prove(pr->s_v_, BitVec::from_uint(wt.secret, L.k));
  pr->size_ = pr->s_v_.size() + pr->children_.size() * pr->child_size_ + pr->pcpp_.length();
  return pr;
}

ProofPtr pcuss_build_proof(const LevelParams& P, const Encoding& v) {
  if (!v.witness) throw PreconditionError("proof construction needs the encoding's witness");
  if (v.bits.size() != P.m()[v.level]) throw InputError("encoding length does not match the parameters");
  return build_proof_level(P, v.level, *v.witness, v.bits);
}

bool language_L_check(const LevelParams& P, unsigned level, const BitVec& S, const BitVec& w) {
  const LevelSpec& L = P.level(level);
  if (S.size() != L.s_length()) throw InputError("language check: |S| != 100 t |F \\ H|");
  if (w.size() != L.k) throw InputError("language check: |w| != k");
  const auto code = P.spiel(L.t());
  const std::size_t blk = 100 * L.t();
  std::vector<std::uint64_t> xs = L.H;
  std::vector<std::uint64_t> ys;
  ys.reserve(L.field.size());
  for (std::size_t i = 0; i < L.k; ++i) ys.push_back(w.get(i));
  xs.insert(xs.end(), L.outside.begin(), L.outside.end());
  for (std::size_t j = 0; j < L.outside.size(); ++j) {
    const BitVec block = S.slice(j * blk, blk);
    if (!code->is_member(block)) return false;
    ys.push_back(block.get_bits(0, L.t()));
  }
  return points_low_degree(L.field, xs, ys, L.field.size() / 2);
}

// --- Verifier ------------------------------------------------------------------

bool verify_level(const LevelParams& P, unsigned level, Oracle& v, Oracle& tau, Oracle& pi, double eps,
                  double delta, Rng& rng, std::string* stage) {
  if (v.size() != P.m()[level]) throw InputError("verify: codeword length mismatch");
  if (pi.size() != P.z()[level]) throw InputError("verify: proof length mismatch");
  if (level == 0) {
    const bool ok = P.base_pcu().verify(v, tau, pi, eps, delta, rng);
    if (!ok && stage) *stage = "base-pcu";
    return ok;
  }
  const LevelSpec& L = P.level(level);
  const std::uint64_t s_len = L.s_length();
  const std::uint64_t out = L.outside.size();
  const std::uint64_t child_z = P.z()[level - 1];
  const std::uint64_t child_m = P.m()[level - 1];
  const std::uint64_t l_off = s_len + out * child_z;

  // Step (a): the S_v section against the claimed value.
  {
    SubOracle S(pi, 0, s_len);
    SubOracle proof_l(pi, l_off, pi.size() - l_off);
    if (!P.l_pcu(level).verify(S, tau, proof_l, eps / 300, delta, rng)) {
      if (stage) *stage = "L-check@" + std::to_string(level);
      return false;
    }
  }
  // Step (b): random blocks against their S_v entries.
  const std::uint64_t iters = static_cast<std::uint64_t>(std::ceil(6.0 / eps - 1e-9));
  const std::uint64_t blk = 100ULL * L.t();
  for (std::uint64_t it = 0; it < iters; ++it) {
    const std::uint64_t j = rng.below(out);
    SubOracle vb(v, j * child_m, child_m);
    SubOracle tb(pi, j * blk, blk);
    SubOracle pb(pi, s_len + j * child_z, child_z);
    if (!verify_level(P, level - 1, vb, tb, pb, eps / 3, 2 * delta, rng, stage)) return false;
  }
  return true;
}

std::uint64_t amplification_runs(unsigned ell, double delta) {
  if (!(delta > 0 && delta < 1)) throw CapabilityError("verify needs 0 < delta < 1");
  const double raw = std::ldexp(1.0, -static_cast<int>(ell) - 1);
  if (delta <= raw) return 1;
  return static_cast<std::uint64_t>(std::ceil(std::log(1.0 / (1.0 - delta)) / raw - 1e-12));
}

VerdictReport pcuss_verify(const LevelParams& P, QueryOracle& v, QueryOracle& tau, QueryOracle& pi, double eps,
                           double delta, std::uint64_t seed, const VerifyOptions& opts) {
  if (!(eps > 0 && eps < 1)) throw CapabilityError("verify needs 0 < eps < 1");
  const unsigned ell = P.ell();
  const double raw = std::ldexp(1.0, -static_cast<int>(ell) - 1);
  if (delta > raw && !opts.allow_amplification) {
    throw CapabilityError("delta above 2^(-ell-1) needs the amplification wrapper");
  }
  const std::uint64_t runs = amplification_runs(ell, delta);
  const double run_delta = delta > raw ? raw : delta;

  const std::size_t v0 = v.distinct();
  const std::size_t t0 = tau.distinct();
  const std::size_t p0 = pi.distinct();
  Rng rng(seed);
  VerdictReport r;
  r.seed = seed;
  r.accept = true;
  for (std::uint64_t i = 0; i < runs && r.accept; ++i) {
    r.accept = verify_level(P, ell, v, tau, pi, eps, run_delta, rng, &r.rejected_stage);
  }
  r.input_queries = v.distinct() - v0;
  r.value_queries = tau.distinct() - t0;
  r.proof_queries = pi.distinct() - p0;
  return r;
}

namespace {

double predicted_level(const LevelParams& P, unsigned level, double eps, double delta) {
  if (level == 0) return static_cast<double>(P.base_pcu().query_budget(eps, delta));
  const double iters = std::ceil(6.0 / eps - 1e-9);
  return static_cast<double>(P.l_pcu(level).query_budget(eps / 300, delta)) +
         iters * predicted_level(P, level - 1, eps / 3, 2 * delta);
}

}  // namespace

double predicted_queries(const LevelParams& P, double eps, double delta) {
  const double raw = std::ldexp(1.0, -static_cast<int>(P.ell()) - 1);
  const std::uint64_t runs = amplification_runs(P.ell(), delta);
  return static_cast<double>(runs) * predicted_level(P, P.ell(), eps, delta > raw ? raw : delta);
}

}  // namespace pcuss
