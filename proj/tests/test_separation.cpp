#include <algorithm>
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "pcuss/error.hpp"
#include "pcuss/separation.hpp"

using namespace pcuss;

namespace {

const LevelParams& sep_params() {
  static const LevelParams P = derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 0});
  return P;
}

VerdictReport test_source(const SourcePtr& bits, double eps, std::uint64_t seed, const TesterOptions& opts = {}) {
  QueryOracle o(bits);
  return q_tester(o, eps, sep_params(), seed, opts);
}

}  // namespace

TEST_CASE("separation layout") {
  const auto lay = separation_layout(sep_params());
  CHECK(lay.n == 64 * 24);
  CHECK(lay.z == 100 * 6 * 64);
  // ceil(log2(1536)) = 11.
  CHECK(lay.log_n == 11);
  CHECK(lay.copies_length() == lay.z * 11);
  CHECK(lay.s * lay.n + lay.partial == lay.copies_length());
  CHECK(lay.partial < lay.n);
  CHECK(lay.N == 12 * lay.z);
  CHECK(lay.proof_fraction() == Fraction(1, 12));
  CHECK(default_eps1(0) == Fraction(1, 5));
  CHECK(default_eps1(1) == Fraction(1, 20));
  CHECK(copy_probe_count(0.6) == 7);
  CHECK(copy_probe_count(0.5) == 8);
  CHECK_THROWS_AS(copy_probe_count(0), ParameterError);
  CHECK_THROWS_AS(copy_probe_count(1), ParameterError);
  CHECK_NOTHROW(check_tester_guard(lay, 0.6));
  CHECK_THROWS_AS(check_tester_guard(lay, 6.0 / 11), ParameterError);
  CHECK_THROWS_AS(separation_layout(derive_params(ParamsRequest{.ell = 0, .k = 4})), ParameterError);
}

TEST_CASE("member instances") {
  Rng rng(1);
  const auto inst = build_member(sep_params(), rng);
  const auto& lay = inst.layout;
  REQUIRE(inst.bits->size() == lay.N);
  for (std::uint64_t c = 0; c < lay.s; c += 37) REQUIRE(inst.bits->materialize().slice(c * lay.n, lay.n) == inst.y);
  const BitVec all = inst.bits->materialize();
  CHECK(all.slice(lay.proof_offset(), lay.z) == inst.proof->materialize());
  CHECK(all.slice(lay.s * lay.n, lay.partial) == inst.y.slice(0, lay.partial));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = test_source(inst.bits, 0.6, seed);
    REQUIRE(r.accept);
    // Copy probes read two positions each; every verifier run reads whole blocks of the first copy.
    const std::uint64_t blocks = amplification_runs(1, 2.0 / 3) * static_cast<std::uint64_t>(std::ceil(6 / 0.2));
    REQUIRE(r.input_queries <= 2 * 7 + r.proof_queries + 24 * std::min<std::uint64_t>(blocks, 64));
  }
  CHECK_THROWS_AS(build_member(derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 2}), rng), ParameterError);
}

TEST_CASE("tester rejects inconsistent copies") {
  Rng rng(2);
  const auto inst = build_member(sep_params(), rng);
  const auto& lay = inst.layout;
  BitVec other = inst.y;
  other.complement();
  auto ys = std::make_shared<VecSource>(inst.y);
  auto zs = std::make_shared<VecSource>(other);
  std::vector<SourcePtr> parts{ys};
  for (std::uint64_t i = 1; i < lay.s; ++i) parts.push_back(zs);
  if (lay.partial) parts.push_back(std::make_shared<SliceSource>(zs, 0, lay.partial));
  parts.push_back(inst.proof);
  const SourcePtr bad = std::make_shared<ConcatSource>(parts);
  int copy_rejects = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = test_source(bad, 0.6, seed);
    REQUIRE_FALSE(r.accept);
    copy_rejects += r.rejected_stage == "copy";
  }
  CHECK(copy_rejects == 50);
}

TEST_CASE("tester input checks") {
  Rng rng(3);
  const auto inst = build_member(sep_params(), rng);
  CHECK_THROWS_AS(test_source(inst.bits, 0.5, 1), ParameterError);
  CHECK_NOTHROW(test_source(inst.bits, 0.5, 1, TesterOptions{.enforce_guard = false}));
  QueryOracle shortened(BitVec(100));
  CHECK_THROWS_AS(q_tester(shortened, 0.6, sep_params(), 1), InputError);
  const auto& lay = inst.layout;
  CHECK_THROWS_AS(separation_source(lay, BitVec(5), inst.proof), InputError);
  CHECK_THROWS_AS(separation_source(lay, inst.y, std::make_shared<ConstSource>(3, false)), InputError);
}

TEST_CASE("reductions and forwarding") {
  Rng rng(4);
  const auto inst = build_member(sep_params(), rng);
  const auto& lay = inst.layout;
  const auto tol = tolerant_reduction(inst.y, sep_params());
  const auto era = erasure_reduction(inst.y, sep_params());
  CHECK(era.erased_proof);
  CHECK_FALSE(tol.erased_proof);
  const BitVec tb = tol.bits->materialize();
  CHECK(tb.slice(0, lay.copies_length()) == inst.bits->materialize().slice(0, lay.copies_length()));
  CHECK(tb.slice(lay.proof_offset(), lay.z).none());

  QueryOracle yt(inst.y), ye(inst.y);
  ReductionOracle rt(yt, lay, false), re(ye, lay, true);
  CHECK(rt.size() == lay.N);
  for (int p = 0; p < 20000; ++p) {
    const std::uint64_t i = p < 2 ? (p == 0 ? lay.copies_length() - 1 : lay.copies_length()) : rng.below(lay.N);
    const std::size_t bt = yt.total(), be = ye.total();
    const auto a = rt.query(i);
    const auto b = re.query(i);
    REQUIRE(yt.total() - bt <= 1);
    REQUIRE(ye.total() - be <= 1);
    REQUIRE(a.has_value());
    REQUIRE(*a == tb.get(i));
    const bool tail = i >= lay.copies_length();
    REQUIRE(b.has_value() == !tail);
    REQUIRE(era.bits->erased(i) == tail);
    if (!tail) REQUIRE(*b == inst.y.get(i % lay.n));
  }
  CHECK_THROWS_AS(rt.query(lay.N), InputError);
  // The zero proof region puts the member within z/N of the tolerant instance.
  CHECK(hamming_distance(tb, inst.bits->materialize()) <= lay.z);
}

TEST_CASE("separation experiment summary") {
  SeparationConfig cfg;
  cfg.trials = 8;
  cfg.far_trials = 4;
  cfg.probes = 500;
  cfg.threads = 2;
  const auto rep = run_separation_experiment(cfg);
  REQUIRE(rep.families.size() == 5);
  CHECK(rep.families[0].name == "member");
  CHECK(rep.families[0].accepted == 8);
  CHECK(rep.families[4].name == "copies-random");
  CHECK(rep.families[4].accepted == 0);
  CHECK(rep.erasure_prefix_matches);
  CHECK(rep.forwarding_max <= 1);
  CHECK(rep.forwarding_probes == 500);
  CHECK(rep.erased_fraction == Fraction(1, 12));
  CHECK(rep.tolerant_bound == Fraction(1, 12));
  CHECK(rep.tolerant_member_distance <= rep.tolerant_bound);
  CHECK(rep.eps1 == Fraction(1, 20));
  CHECK(rep.far_instance_lower_bound > Fraction(0, 1));
  const auto again = run_separation_experiment(cfg);
  CHECK(again.families[0].mean_queries == rep.families[0].mean_queries);
  CHECK(again.tolerant_member_distance == rep.tolerant_member_distance);
}
