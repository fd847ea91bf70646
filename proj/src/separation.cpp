#include "pcuss/separation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "pcuss/distributions.hpp"
#include "pcuss/error.hpp"
#include "pcuss/parallel.hpp"

namespace pcuss {

Fraction default_eps1(unsigned ell) { return Fraction(1, 5ULL << (2 * ell)); }

SeparationLayout separation_layout(const LevelParams& params) {
  SeparationLayout l;
  l.ell = params.ell();
  l.n = params.m()[l.ell];
  l.z = params.z()[l.ell];
  l.log_n = ceil_iterated_log(l.n, l.ell);
  if (l.z == 0) throw ParameterError("separation needs a nonempty proof region");
  const unsigned __int128 copies = static_cast<unsigned __int128>(l.z) * l.log_n;
  if (copies + l.z > static_cast<unsigned __int128>(UINT64_MAX)) throw CapabilityError("instance length overflows");
  l.s = static_cast<std::uint64_t>(copies / l.n);
  l.partial = static_cast<std::uint64_t>(copies % l.n);
  l.N = static_cast<std::uint64_t>(copies) + l.z;
  if (l.s == 0) throw ParameterError("proof region too short for one copy of y");
  return l;
}

SourcePtr separation_source(const SeparationLayout& layout, const BitVec& y, SourcePtr proof_region) {
  if (y.size() != layout.n) throw InputError("candidate length != n");
  if (proof_region->size() != layout.z) throw InputError("proof region length != z");
  auto ys = std::make_shared<VecSource>(y);
  std::vector<SourcePtr> parts(layout.s, ys);
  if (layout.partial) parts.push_back(std::make_shared<SliceSource>(ys, 0, layout.partial));
  parts.push_back(std::move(proof_region));
  return std::make_shared<ConcatSource>(std::move(parts));
}

SeparationInstance build_member(const LevelParams& params, Rng& rng) {
  if (params.k() != 0) throw ParameterError("separation instances use the k = 0 ensemble");
  SeparationInstance inst;
  inst.layout = separation_layout(params);
  const Encoding e = pcuss_encode(params, BitVec(), rng);
  inst.y = e.bits;
  inst.proof = pcuss_build_proof(params, e);
  inst.bits = separation_source(inst.layout, inst.y, inst.proof);
  return inst;
}

std::optional<bool> ReductionOracle::query(std::size_t i) {
  if (i >= layout_.N) throw InputError("query outside the instance");
  if (i < layout_.copies_length()) return y_.query(i % layout_.n);
  if (erased_) return std::nullopt;
  return false;
}

SeparationInstance tolerant_reduction(const BitVec& y, const LevelParams& params) {
  SeparationInstance inst;
  inst.layout = separation_layout(params);
  inst.y = y;
  inst.bits = separation_source(inst.layout, y, std::make_shared<ConstSource>(inst.layout.z, false));
  return inst;
}

SeparationInstance erasure_reduction(const BitVec& y, const LevelParams& params) {
  SeparationInstance inst;
  inst.layout = separation_layout(params);
  inst.y = y;
  inst.bits = separation_source(inst.layout, y, std::make_shared<ErasedSource>(inst.layout.z));
  inst.erased_proof = true;
  return inst;
}

std::uint64_t copy_probe_count(double eps) {
  if (!(eps > 0 && eps < 1)) throw ParameterError("tester needs 0 < eps < 1");
  return static_cast<std::uint64_t>(std::ceil(4.0 / eps - 1e-9));
}

void check_tester_guard(const SeparationLayout& layout, double eps) {
  if (!(static_cast<double>(layout.log_n) > 6.0 / eps)) {
    throw ParameterError("tester needs ceil(log^(ell) n) = " + std::to_string(layout.log_n) + " > 6/eps = " +
                         std::to_string(6.0 / eps));
  }
}

VerdictReport q_tester(Oracle& instance, double eps, const LevelParams& params, std::uint64_t seed,
                       const TesterOptions& opts) {
  const SeparationLayout lay = separation_layout(params);
  (void)copy_probe_count(eps);
  if (opts.enforce_guard) check_tester_guard(lay, eps);
  if (instance.size() != lay.N) throw InputError("instance length != N");

  QueryOracle x(instance);
  Rng rng(seed);
  VerdictReport r;
  r.seed = seed;
  r.accept = true;
  const std::uint64_t probes = copy_probe_count(eps);
  for (std::uint64_t p = 0; p < probes && r.accept; ++p) {
    const std::uint64_t i = rng.below(lay.s);
    const std::uint64_t j = rng.below(lay.n);
    if (x.bit(j) != x.bit(i * lay.n + j)) {
      r.accept = false;
      r.rejected_stage = "copy";
    }
  }
  std::size_t proof_reads = 0;
  if (r.accept) {
    SubOracle v(x, 0, lay.n);
    SubOracle pr(x, lay.proof_offset(), lay.z);
    QueryOracle qv(v), qp(pr), qt(BitVec{});
    const VerdictReport inner = pcuss_verify(params, qv, qt, qp, eps / 3, opts.pcu_delta, derive_seed(seed, 1));
    r.accept = inner.accept;
    r.rejected_stage = inner.rejected_stage;
    proof_reads = qp.distinct();
  }
  r.input_queries = x.distinct();
  r.proof_queries = proof_reads;
  return r;
}

namespace {

struct Trial {
  bool accept = false;
  std::uint64_t queries = 0;
  bool copy_stage = false;
};

FamilyResult summarize(std::string name, const std::vector<Trial>& trials) {
  FamilyResult f;
  f.name = std::move(name);
  f.trials = trials.size();
  double sum = 0;
  for (const Trial& t : trials) {
    f.accepted += t.accept;
    f.copy_stage_rejects += t.copy_stage;
    sum += static_cast<double>(t.queries);
    f.max_queries = std::max(f.max_queries, t.queries);
  }
  f.mean_queries = trials.empty() ? 0 : sum / static_cast<double>(trials.size());
  return f;
}

Trial run_tester(const SourcePtr& bits, double eps, const LevelParams& params, std::uint64_t seed,
                 const TesterOptions& opts) {
  QueryOracle o(bits);
  const VerdictReport r = q_tester(o, eps, params, seed, opts);
  return {r.accept, r.input_queries, r.rejected_stage == "copy"};
}

std::uint64_t proof_weight(const BitSource& src) {
  std::uint64_t w = 0;
  for (std::size_t off = 0; off < src.size(); off += 64) {
    w += static_cast<std::uint64_t>(std::popcount(src.get_bits(off, std::min<std::size_t>(64, src.size() - off))));
  }
  return w;
}

}  // namespace

SeparationReport run_separation_experiment(const SeparationConfig& cfg) {
  ParamsRequest req;
  req.ell = cfg.ell;
  req.t = cfg.t;
  req.k = 0;
  req.backend = cfg.backend;
  req.seed = cfg.seed;
  const LevelParams params = derive_params(req);
  const SeparationLayout lay = separation_layout(params);
  TesterOptions topts;
  topts.enforce_guard = cfg.enforce_guard;
  if (cfg.enforce_guard) check_tester_guard(lay, cfg.eps);

  SeparationReport rep;
  rep.layout = lay;
  rep.eps = cfg.eps;
  rep.eps1 = default_eps1(cfg.ell);
  rep.flags = params.flags();
  if (lay.partial) rep.flags.push_back("partial copy of " + std::to_string(lay.partial) + " bits excluded from probing");
  if (!cfg.enforce_guard) rep.flags.push_back("tester guard disabled");

  const std::uint64_t master = derive_seed(cfg.seed, 0x5e9);
  auto family = [&](const std::string& name, std::uint64_t trials, std::uint64_t tag, auto make) {
    std::vector<Trial> out(trials);
    parallel_for(trials, cfg.threads, [&](std::uint64_t i) {
      const std::uint64_t s = derive_seed(derive_seed(master, tag), i);
      Rng rng(s);
      const SourcePtr bits = make(rng);
      out[i] = run_tester(bits, cfg.eps, params, derive_seed(s, 7), topts);
    });
    rep.families.push_back(summarize(name, out));
  };

  family("member", cfg.trials, 1, [&](Rng& rng) { return build_member(params, rng).bits; });
  if (cfg.member_only) {
    rep.flags.push_back("member family only");
    return rep;
  }
  family("tolerant-dno", cfg.far_trials, 2,
         [&](Rng& rng) { return tolerant_reduction(sample_dno(params, rng), params).bits; });
  family("dno-first-copy", cfg.far_trials, 3, [&](Rng& rng) {
    const SeparationInstance m = build_member(params, rng);
    auto yn = std::make_shared<VecSource>(sample_dno(params, rng));
    auto ys = std::make_shared<VecSource>(m.y);
    std::vector<SourcePtr> parts{yn};
    for (std::uint64_t i = 1; i < lay.s; ++i) parts.push_back(ys);
    if (lay.partial) parts.push_back(std::make_shared<SliceSource>(ys, 0, lay.partial));
    parts.push_back(m.proof);
    return SourcePtr(std::make_shared<ConcatSource>(std::move(parts)));
  });
  family("dno-honest-proof", cfg.far_trials, 4, [&](Rng& rng) {
    const SeparationInstance m = build_member(params, rng);
    return separation_source(lay, sample_dno(params, rng), m.proof);
  });
  family("copies-random", cfg.far_trials, 5, [&](Rng& rng) {
    const SeparationInstance m = build_member(params, rng);
    auto ys = std::make_shared<VecSource>(m.y);
    auto noise = std::make_shared<RandomSource>(lay.copies_length() - lay.n, rng.next());
    std::vector<SourcePtr> parts{ys, noise, m.proof};
    return SourcePtr(std::make_shared<ConcatSource>(std::move(parts)));
  });

  // Reductions of one member y.
  Rng rng(derive_seed(master, 6));
  const SeparationInstance member = build_member(params, rng);
  rep.tolerant_bound = Fraction(1, lay.log_n + 1);
  if (lay.z <= (std::uint64_t{1} << 28)) {
    rep.tolerant_member_distance = Fraction(proof_weight(*member.proof), lay.N);
  } else {
    rep.tolerant_member_distance = lay.proof_fraction();
    rep.flags.push_back("proof weight not computed; distance bounded by z/N");
  }
  const SeparationInstance tol = tolerant_reduction(member.y, params);
  const SeparationInstance era = erasure_reduction(member.y, params);
  rep.erased_fraction = lay.proof_fraction();

  QueryOracle yq_t(member.y), yq_e(member.y);
  ReductionOracle red_t(yq_t, lay, false), red_e(yq_e, lay, true);
  QueryOracle outer_t(red_t), outer_e(red_e);
  rep.erasure_prefix_matches = true;
  for (std::uint64_t p = 0; p < cfg.probes; ++p) {
    std::uint64_t i = rng.below(lay.N);
    if (p < 4) i = std::array<std::uint64_t, 4>{0, lay.copies_length() - 1, lay.copies_length(), lay.N - 1}[p];
    const std::size_t bt = yq_t.total(), be = yq_e.total();
    const auto a = outer_t.query(i);
    const auto b = outer_e.query(i);
    rep.forwarding_max = std::max<std::uint64_t>(rep.forwarding_max, std::max(yq_t.total() - bt, yq_e.total() - be));
    const bool tail = i >= lay.copies_length();
    if (a != tol.bits->get(i) || tail != !b.has_value() || tail != era.bits->erased(i) || (b && *b != *a)) {
      rep.erasure_prefix_matches = false;
    }
    ++rep.forwarding_probes;
  }

  if (cfg.ell == 1) {
    Fraction lb(1, 1);
    for (int i = 0; i < 100; ++i) lb = std::min(lb, dno_distance_lower_bound(params, sample_dno_full(params, rng)));
    // Copies must all become some y' in E to enter Q.
    rep.far_instance_lower_bound = Fraction(lb.num * lay.s * lay.n, lb.den * lay.N);
  } else {
    rep.flags.push_back("far-instance distance bound computed at ell = 1 only");
  }
  return rep;
}

}  // namespace pcuss
