#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pcuss/ensemble.hpp"
#include "pcuss/error.hpp"

using namespace pcuss;

namespace {

const LevelParams& level1(const std::string& backend = "exhaustive") {
  static const LevelParams ex = derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 2, .backend = "exhaustive"});
  static const LevelParams had = derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 2, .backend = "hadamard"});
  return backend == "hadamard" ? had : ex;
}

VerdictReport run_verify(const LevelParams& P, const BitVec& v, const BitVec& tau, SourcePtr proof, double eps,
                         double delta, std::uint64_t seed) {
  QueryOracle vo(v), to(tau), po(std::move(proof));
  return pcuss_verify(P, vo, to, po, eps, delta, seed);
}

}  // namespace

TEST_CASE("parameter derivation") {
  SUBCASE("level 0") {
    const auto P = derive_params(ParamsRequest{.ell = 0, .k = 4});
    CHECK(P.m() == std::vector<std::uint64_t>{16});
    CHECK(P.z() == std::vector<std::uint64_t>{0});
    CHECK(P.base().k == 4);
  }
  SUBCASE("level 1 at |F| = 64") {
    const auto& P = level1();
    CHECK(P.level(1).k == 2);
    CHECK(P.level(1).H == std::vector<std::uint64_t>{0, 1});
    CHECK(P.level(1).outside.size() == 62);
    CHECK(P.k(0) == 6);
    CHECK(P.m() == std::vector<std::uint64_t>{24, 62 * 24});
    CHECK(P.m()[1] == 1488);
    // S_v is 100 * 6 bits per outside element; the exhaustive base proof is empty.
    CHECK(P.z() == std::vector<std::uint64_t>{0, 100 * 6 * 62});
    CHECK(P.relaxed());
    const auto& H = level1("hadamard");
    CHECK(H.z()[0] == (std::uint64_t{1} << 18));
    CHECK(H.z()[1] == 37200 + 62 * (std::uint64_t{1} << 18));
  }
  SUBCASE("level 2 arithmetic") {
    const auto P = derive_params(ParamsRequest{.ell = 2, .t = 6, .k = 2, .arithmetic_only = true});
    CHECK(next_field_r(6, 2) == 1);
    CHECK(P.level(1).field.t() == 6);
    CHECK(P.level(1).k == 6);
    CHECK(P.level(1).outside.size() == 58);
    CHECK(P.m()[2] == 62ULL * 58 * 24);
    CHECK(P.m()[2] == 86304);
    const std::uint64_t z1 = 100ULL * 6 * 58;
    CHECK(P.z()[1] == z1);
    CHECK(P.z()[2] == 100ULL * 6 * 62 + 62 * z1);
    CHECK_THROWS_AS(P.base(), CapabilityError);
  }
  SUBCASE("next field") {
    // (log|F|)^d <= 2^(2*3^r): 6^2 = 36 <= 64, 18^2 = 324 > 64.
    CHECK(next_field_r(18, 2) == 2);
    CHECK(next_field_r(54, 2) == 2);
    CHECK(next_field_r(6, 3) == 2);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 34, .arithmetic_only = true}), ParameterError);
    CHECK_NOTHROW(derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 33, .arithmetic_only = true}));
    CHECK_THROWS_AS(derive_params(ParamsRequest{.ell = 1, .t = 18, .k = 2}), CapabilityError);
    CHECK_NOTHROW(derive_params(ParamsRequest{.ell = 1, .t = 18, .k = 2, .arithmetic_only = true}));
    CHECK_THROWS_AS(derive_params(ParamsRequest{.ell = 1, .t = 7, .k = 2}), ParameterError);
    CHECK_THROWS_AS(derive_params(ParamsRequest{.ell = 0, .k = 2}), ParameterError);
    CHECK_THROWS_AS(derive_params(ParamsRequest{.ell = 1, .backend = "pcp"}), ParameterError);
  }
  SUBCASE("iterated logarithms") {
    CHECK(iterated_log(1024, 0) == 1024);
    CHECK(iterated_log(1024, 1) == doctest::Approx(10));
    CHECK(iterated_log(65536, 2) == doctest::Approx(4));
    CHECK(ceil_iterated_log(1536, 1) == 11);
    CHECK(ceil_iterated_log(89088, 2) == 5);
    CHECK(model_pcpp_length(1024) == doctest::Approx(1024.0 * 100));
  }
}

TEST_CASE("encoding and witnesses") {
  const auto& P = level1();
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const BitVec w = rng.bitvec(2);
    const Encoding e = pcuss_encode(P, w, rng);
    REQUIRE(e.bits.size() == 1488);
    REQUIRE(witness_consistent(P, e));
    const Poly g(P.level(1).field, e.witness->g);
    REQUIRE(g.in_cf());
    REQUIRE(g.eval(0) == w.get(0));
    REQUIRE(g.eval(1) == w.get(1));
    for (std::size_t j = 0; j < 62; ++j) {
      REQUIRE(e.witness->children[j].secret == g.eval(P.level(1).outside[j]));
      REQUIRE(base_membership(P.base(), BitVec::from_uint(g.eval(P.level(1).outside[j]), 6), e.bits.slice(24 * j, 24)));
    }
    const Encoding again = assemble_level(P, 1, e.witness->secret, e.witness->g, e.witness->children);
    REQUIRE(again.bits == e.bits);
  }
  Encoding bad = pcuss_encode(P, BitVec(2), rng);
  bad.bits.flip(100);
  const bool still = witness_consistent(P, bad);
  CHECK_FALSE(still);
  CHECK_THROWS_AS(pcuss_encode(P, BitVec(3), rng), InputError);

  Rng a(5), b(5);
  CHECK(pcuss_encode(P, BitVec::from_string("10"), a).bits == pcuss_encode(P, BitVec::from_string("10"), b).bits);

  const auto P0 = derive_params(ParamsRequest{.ell = 0, .k = 4});
  const Encoding e0 = pcuss_encode(P0, BitVec::from_string("1011"), rng);
  CHECK(e0.bits.size() == 16);
  CHECK(base_membership(P0.base(), BitVec::from_string("1011"), e0.bits));
}

TEST_CASE("value strings") {
  const auto& P = level1();
  const BitVec w = BitVec::from_string("01");
  const BitVec tau = pcuss_value(P, w);
  CHECK(tau.size() == 200);
  CHECK(P.spiel(2)->decode(tau) == w);
  CHECK(spiel_membership(*P.spiel(2), tau));
  const auto P0k = derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 0});
  CHECK(pcuss_value(P0k, BitVec()).empty());
  CHECK(P0k.level(1).H.empty());
  CHECK(P0k.level(1).outside.size() == 64);
}

TEST_CASE("proof strings") {
  const auto& P = level1();
  Rng rng(2);
  const BitVec w = BitVec::from_string("11");
  const Encoding e = pcuss_encode(P, w, rng);
  const ProofPtr pr = pcuss_build_proof(P, e);
  CHECK(pr->size() == P.z()[1]);
  const auto secs = pr->sections();
  CHECK(secs.size() == 64);
  CHECK(secs.front().name == "S_v");
  CHECK(secs.front().length == 37200);
  CHECK(secs[1].name == "sub_0");
  CHECK(secs.back().name == "proof_L");
  CHECK(secs.back().offset + secs.back().length == pr->size());
  const auto code = P.spiel(6);
  for (std::size_t j = 0; j < 62; ++j) {
    const BitVec block = pr->s_v().slice(600 * j, 600);
    REQUIRE(block == code->encode_uint(e.witness->children[j].secret));
    REQUIRE(pr->materialize().slice(600 * j, 600) == block);
  }
  CHECK(language_L_check(P, 1, pr->s_v(), w));
  CHECK_FALSE(language_L_check(P, 1, pr->s_v(), BitVec::from_string("10")));
  BitVec broken = pr->s_v();
  broken.flip(600 * 7 + 300);
  CHECK_FALSE(language_L_check(P, 1, broken, w));
  BitVec swapped = pr->s_v();
  const BitVec other = code->encode_uint(e.witness->children[3].secret ^ 1);
  for (std::size_t i = 0; i < 600; ++i) swapped.set(600 * 3 + i, other.get(i));
  CHECK_FALSE(language_L_check(P, 1, swapped, w));
  CHECK_THROWS_AS(language_L_check(P, 1, BitVec(10), w), InputError);

  Encoding stripped = e;
  stripped.witness.reset();
  CHECK_THROWS_AS(pcuss_build_proof(P, stripped), PreconditionError);

  const auto& H = level1("hadamard");
  const Encoding eh = pcuss_encode(H, w, rng);
  const ProofPtr ph = pcuss_build_proof(H, eh);
  CHECK(ph->size() == H.z()[1]);
  CHECK(ph->child(0).size() == (1u << 18));
}

TEST_CASE("completeness over both backends") {
  for (const std::string backend : {"exhaustive", "hadamard"}) {
    const auto& P = level1(backend);
    Rng rng(3);
    for (int i = 0; i < 30; ++i) {
      const BitVec w = rng.bitvec(2);
      const Encoding e = pcuss_encode(P, w, rng);
      const ProofPtr pr = pcuss_build_proof(P, e);
      const auto r = run_verify(P, e.bits, pcuss_value(P, w), pr, 0.05, 0.25, rng.next());
      REQUIRE(r.accept);
      REQUIRE(r.rejected_stage.empty());
    }
  }
  const auto P0 = derive_params(ParamsRequest{.ell = 0, .k = 4, .backend = "hadamard"});
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const BitVec w = rng.bitvec(4);
    const Encoding e = pcuss_encode(P0, w, rng);
    REQUIRE(run_verify(P0, e.bits, pcuss_value(P0, w), pcuss_build_proof(P0, e), 0.05, 0.25, i).accept);
  }
}

TEST_CASE("rejections") {
  const auto& P = level1();
  Rng rng(5);
  const BitVec w = BitVec::from_string("10");
  const Encoding e = pcuss_encode(P, w, rng);
  const ProofPtr pr = pcuss_build_proof(P, e);
  const auto r = run_verify(P, e.bits, pcuss_value(P, BitVec::from_string("01")), pr, 0.05, 0.25, 1);
  CHECK_FALSE(r.accept);
  CHECK(r.rejected_stage == "L-check@1");
  BitVec v = e.bits;
  for (std::size_t i = 0; i < v.size(); i += 3) v.flip(i);
  const auto r2 = run_verify(P, v, pcuss_value(P, w), pr, 0.05, 0.25, 1);
  CHECK_FALSE(r2.accept);
  CHECK(r2.rejected_stage == "base-pcu");
}

TEST_CASE("verifier determinism and block discipline") {
  const auto& P = level1("hadamard");
  Rng rng(6);
  const BitVec w = BitVec::from_string("01");
  const Encoding e = pcuss_encode(P, w, rng);
  const ProofPtr pr = pcuss_build_proof(P, e);
  const BitVec tau = pcuss_value(P, w);
  const double eps = 0.5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    QueryOracle v1(e.bits), t1(tau), p1(pr);
    QueryOracle v2(e.bits), t2(tau), p2(pr);
    v1.enable_log();
    v2.enable_log();
    const auto a = pcuss_verify(P, v1, t1, p1, eps, 0.25, seed);
    const auto b = pcuss_verify(P, v2, t2, p2, eps, 0.25, seed);
    REQUIRE(a.accept == b.accept);
    REQUIRE(a.input_queries == b.input_queries);
    REQUIRE(a.proof_queries == b.proof_queries);
    REQUIRE(a.value_queries == b.value_queries);
    REQUIRE(v1.log() == v2.log());
    REQUIRE(a.input_queries == v1.distinct());
    std::set<std::size_t> blocks;
    for (auto i : v1.log()) blocks.insert(i / 24);
    REQUIRE(blocks.size() <= static_cast<std::size_t>(std::ceil(6 / eps)));
  }

  const auto& X = level1();
  const Encoding ex = pcuss_encode(X, w, rng);
  const ProofPtr px = pcuss_build_proof(X, ex);
  QueryOracle vo(ex.bits), to(tau), po(px);
  vo.enable_log();
  CHECK(pcuss_verify(X, vo, to, po, eps, 0.25, 9).accept);
  // The exhaustive base verifier reads whole blocks and nothing else.
  std::set<std::size_t> blocks;
  for (auto i : vo.log()) blocks.insert(i / 24);
  CHECK(vo.distinct() == 24 * blocks.size());
  CHECK(blocks.size() <= 12);
}

TEST_CASE("delta regimes") {
  const auto& P = level1();
  CHECK(amplification_runs(1, 0.25) == 1);
  CHECK(amplification_runs(1, 0.5) == static_cast<std::uint64_t>(std::ceil(std::log(2.0) / 0.25)));
  CHECK(amplification_runs(0, 0.5) == 1);
  Rng rng(7);
  const BitVec w = BitVec::from_string("00");
  const Encoding e = pcuss_encode(P, w, rng);
  const ProofPtr pr = pcuss_build_proof(P, e);
  QueryOracle vo(e.bits), to(pcuss_value(P, w)), po(pr);
  CHECK_THROWS_AS(pcuss_verify(P, vo, to, po, 0.1, 0.5, 1, VerifyOptions{false}), CapabilityError);
  CHECK(pcuss_verify(P, vo, to, po, 0.1, 0.5, 1).accept);
  CHECK_THROWS_AS(pcuss_verify(P, vo, to, po, 0.0, 0.25, 1), CapabilityError);
  CHECK(predicted_queries(P, 0.1, 0.25) > 0);
}

TEST_CASE("k = 0 ensemble") {
  const auto P = derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 0});
  CHECK(P.m()[1] == 64 * 24);
  Rng rng(8);
  const Encoding e = pcuss_encode(P, BitVec(), rng);
  CHECK(witness_consistent(P, e));
  const ProofPtr pr = pcuss_build_proof(P, e);
  CHECK(language_L_check(P, 1, pr->s_v(), BitVec()));
  for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(run_verify(P, e.bits, BitVec(), pr, 0.1, 0.25, seed).accept);
}
