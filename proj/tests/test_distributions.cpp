#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "pcuss/distributions.hpp"
#include "pcuss/error.hpp"

using namespace pcuss;

namespace {

const LevelParams& lvl1() {
  static const LevelParams P = derive_params(ParamsRequest{.ell = 1, .t = 6, .k = 2});
  return P;
}

// Bit i of A * u computed column by column.
unsigned code_bit(const HardCodeSpec& A, std::uint64_t u, std::size_t i) {
  unsigned b = 0;
  for (std::size_t j = 0; j < A.columns.size(); ++j)
    if ((u >> j) & 1) b ^= (A.columns[j] >> i) & 1;
  return b;
}

// Exact total variation between D_yes(w)|_Q and the uniform distribution.
Fraction exact_tv(const HardCodeSpec& A, std::uint64_t w, const std::vector<std::size_t>& Q) {
  std::map<std::uint64_t, std::uint64_t> counts;
  const std::uint64_t tails = std::uint64_t{1} << (2 * A.k);
  for (std::uint64_t t = 0; t < tails; ++t) {
    std::uint64_t pat = 0;
    for (std::size_t i = 0; i < Q.size(); ++i) pat |= std::uint64_t{code_bit(A, w | (t << A.k), Q[i])} << i;
    ++counts[pat];
  }
  const std::uint64_t cells = std::uint64_t{1} << Q.size();
  std::uint64_t num = (cells - counts.size()) * tails;
  for (const auto& [p, c] : counts) num += c * cells > tails ? c * cells - tails : tails - c * cells;
  return Fraction(num, 2 * tails * cells);
}

std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, std::size_t size) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < size; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(size);
  return all;
}

// Smallest set of positions whose tail rows sum to zero.
std::vector<std::size_t> dependent_positions(const HardCodeSpec& A) {
  const auto tail = A.tail_rows();
  const std::size_t n = tail.size();
  for (unsigned size = 1; size <= 6; ++size) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) != static_cast<int>(size)) continue;
      std::uint64_t acc = 0;
      for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1) acc ^= tail[i];
      if (acc == 0) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n; ++i)
          if ((mask >> i) & 1) out.push_back(i);
        return out;
      }
    }
  }
  return {};
}

}  // namespace

TEST_CASE("samplers") {
  Rng rng(1);
  const auto P0 = derive_params(ParamsRequest{.ell = 0, .k = 4});
  for (int i = 0; i < 50; ++i) {
    const BitVec w = rng.bitvec(4);
    const BitVec v = sample_dyes(P0, w, rng);
    REQUIRE(v.size() == 16);
    REQUIRE(base_membership(P0.base(), w, v));
    REQUIRE(sample_dno(P0, rng).size() == 16);
  }
  const auto& P = lvl1();
  for (int i = 0; i < 5; ++i) {
    const NoSample s = sample_dno_full(P, rng);
    REQUIRE(s.bits.size() == 1488);
    REQUIRE(s.lambda.size() == 62);
    for (std::size_t j = 0; j < 62; ++j) {
      REQUIRE(s.lambda[j] < 64);
      REQUIRE(base_membership(P.base(), BitVec::from_uint(s.lambda[j], 6), s.bits.slice(24 * j, 24)));
    }
  }
  // Block secrets of D_no are uniform over F.
  std::vector<std::uint64_t> hist(64, 0);
  for (int i = 0; i < 200; ++i)
    for (auto lam : sample_dno_full(P, rng).lambda) ++hist[lam];
  const double expect = 200.0 * 62 / 64;
  double chi = 0;
  for (auto h : hist) chi += (h - expect) * (h - expect) / expect;
  // 63 degrees of freedom; the 0.999 quantile is about 103.4.
  CHECK(chi < 103.4);
}

TEST_CASE("restricted equality at level 0 matches exact enumeration") {
  const auto P = derive_params(ParamsRequest{.ell = 0, .k = 3});
  const HardCodeSpec& A = P.base();
  Rng rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t size = 1 + rng.below(12);
    const auto Q = random_subset(rng, 12, size);
    const BitVec w = rng.bitvec(3);
    const Fraction oracle = exact_tv(A, w.get_bits(0, 3), Q);
    const auto rank = restricted_equality(P, w, Q);
    const auto enumr = restricted_equality(P, w, Q, {.method = RestrictionMethod::ExactEnumeration});
    REQUIRE(rank.method == RestrictionMethod::ExactRank);
    REQUIRE(rank.tv_estimate == oracle);
    REQUIRE(enumr.tv_estimate == oracle);
    REQUIRE((rank.verdict == Verdict::Indistinguishable) == (oracle.num == 0));
    REQUIRE(base_restricted_uniformity(A, w, Q) == (oracle.num == 0));
  }
  // Below the certified dual distance every restriction is uniform.
  const std::size_t below = static_cast<std::size_t>(A.dual_cert.num * A.n() / A.dual_cert.den);
  for (std::size_t size = 1; size < below; ++size) {
    const auto Q = random_subset(rng, 12, size);
    CHECK(restricted_equality(P, BitVec(3), Q).verdict == Verdict::Indistinguishable);
  }
  const auto dep = dependent_positions(A);
  REQUIRE_FALSE(dep.empty());
  const auto r = restricted_equality(P, BitVec::from_string("101"), dep);
  CHECK(r.verdict == Verdict::Distinguishable);
  CHECK(r.tv_estimate == Fraction(1, 2));
}

TEST_CASE("statistical restriction test") {
  const auto P = derive_params(ParamsRequest{.ell = 0, .k = 3});
  const auto dep = dependent_positions(P.base());
  const RestrictionOptions opts{.method = RestrictionMethod::Statistical, .samples = 100000, .seed = 3};
  const auto bad = restricted_equality(P, BitVec::from_string("110"), dep, opts);
  CHECK(bad.method == RestrictionMethod::Statistical);
  CHECK(bad.verdict == Verdict::Distinguishable);
  CHECK(std::abs(bad.tv_estimate.value() - 0.5) <= bad.threshold);
  const std::vector<std::size_t> one{dep.front()};
  const auto good = restricted_equality(P, BitVec::from_string("110"), one, opts);
  CHECK(good.verdict == Verdict::Indistinguishable);
  CHECK(statistical_threshold(10, 1000000) == doctest::Approx(3 * std::sqrt(1024.0 / 1e6)));
  CHECK_THROWS_AS(restricted_equality(P, BitVec(3), dep, {.method = RestrictionMethod::Statistical, .samples = 0}),
                  ParameterError);

  const auto& P1 = lvl1();
  Rng rng(4);
  const auto Q = random_subset(rng, 1488, 10);
  const auto r1 = restricted_equality(P1, BitVec::from_string("01"), Q,
                                      {.method = RestrictionMethod::Statistical, .samples = 200000, .seed = 5});
  CHECK(r1.verdict == Verdict::Indistinguishable);
  CHECK_THROWS_AS(restricted_equality(P1, BitVec::from_string("01"), random_subset(rng, 1488, 21),
                                      {.method = RestrictionMethod::Statistical}),
                  CapabilityError);
}

TEST_CASE("restricted equality at level 1") {
  const auto& P = lvl1();
  const BitVec w = BitVec::from_string("10");
  Rng rng(6);
  // One position in each of 31 blocks: no more blocks than free nodes.
  std::vector<std::size_t> Q;
  for (std::size_t j = 0; j < 31; ++j) Q.push_back(24 * (2 * j) + rng.below(24));
  CHECK(level1_exact_regime(P, Q));
  auto r = restricted_equality(P, w, Q);
  CHECK(r.method == RestrictionMethod::ExactRank);
  CHECK(r.verdict == Verdict::Indistinguishable);
  CHECK(r.tv_estimate == Fraction(0, 1));

  // A rank-deficient block plus 32 touched blocks leaves the exact regime.
  const auto dep = dependent_positions(P.base());
  REQUIRE_FALSE(dep.empty());
  std::vector<std::size_t> Q2(dep.begin(), dep.end());
  for (std::size_t j = 1; j <= 32; ++j) Q2.push_back(24 * j);
  std::string why;
  CHECK_FALSE(level1_exact_regime(P, Q2, &why));
  CHECK(why.find("block 0") != std::string::npos);
  CHECK_THROWS_AS(restricted_equality(P, w, Q2), CapabilityError);
  CHECK_THROWS_AS(restricted_equality(P, w, Q2, {.method = RestrictionMethod::ExactRank}), CapabilityError);
  CHECK_THROWS_AS(restricted_equality(P, w, Q2, {.method = RestrictionMethod::ExactEnumeration}), CapabilityError);

  // The same deficient block alone is covered by the free-node argument.
  CHECK(restricted_equality(P, w, dep).verdict == Verdict::Indistinguishable);
}

TEST_CASE("restriction input validation") {
  const auto& P = lvl1();
  CHECK_THROWS_AS(restricted_equality(P, BitVec(3), {0}), InputError);
  CHECK_THROWS_AS(restricted_equality(P, BitVec(2), {5, 5}), InputError);
  CHECK_THROWS_AS(restricted_equality(P, BitVec(2), {1488}), InputError);
  CHECK_THROWS_AS(level1_exact_regime(derive_params(ParamsRequest{.ell = 0, .k = 3}), {0}), PreconditionError);
  CHECK(to_string(RestrictionMethod::ExactRank) == "exact-rank");
  CHECK(to_string(Verdict::Indistinguishable) != to_string(Verdict::Distinguishable));
}

TEST_CASE("minimum distance between ensembles") {
  const auto P = derive_params(ParamsRequest{.ell = 0, .k = 3});
  const HardCodeSpec& A = P.base();
  for (std::uint64_t a = 0; a < 8; ++a) {
    for (std::uint64_t b = a + 1; b < 8; ++b) {
      const auto r = min_distance_check(P, BitVec::from_uint(a, 3), BitVec::from_uint(b, 3));
      // Linearity: the minimum is the lightest word of the coset of a ^ b.
      unsigned best = A.n();
      for (std::uint64_t t = 0; t < 64; ++t) {
        unsigned wt = 0;
        for (std::size_t i = 0; i < A.n(); ++i) wt += code_bit(A, (a ^ b) | (t << 3), i);
        best = std::min(best, wt);
      }
      REQUIRE(r.exact);
      REQUIRE(r.value == Fraction(best, A.n()));
      REQUIRE(r.value > Fraction(1, 10));
      REQUIRE(r.value >= A.ensemble_cert);
    }
  }
  const auto same = min_distance_check(P, BitVec::from_string("011"), BitVec::from_string("011"));
  CHECK(same.value == Fraction(0, 1));
  CHECK(same.exact);
  CHECK(same.prediction == doctest::Approx(0.25));
  CHECK_THROWS_AS(min_distance_check(P, BitVec(2), BitVec(3)), InputError);

  const auto& P1 = lvl1();
  const HardCodeSpec& B = P1.base();
  const std::uint64_t weight = B.ensemble_cert.num * B.n() / B.ensemble_cert.den;
  const auto r1 = min_distance_check(P1, BitVec::from_string("00"), BitVec::from_string("11"), 40, 7);
  CHECK_FALSE(r1.exact);
  CHECK(r1.samples == 40);
  CHECK(r1.prediction == doctest::Approx(1.0 / 16));
  // Distinct degree-32 polynomials agree on at most 32 of the 62 blocks.
  CHECK(r1.value >= Fraction(30 * weight, 1488));
}

TEST_CASE("distance of no-instances from every ensemble") {
  const auto P0 = derive_params(ParamsRequest{.ell = 0, .k = 4});
  const auto all = far_from_all_check(P0, 200, Fraction(0, 1), 8);
  CHECK(all.rate == 1.0);
  CHECK(all.exact);
  Rng rng(9);
  const Encoding e0 = pcuss_encode(P0, BitVec::from_string("0110"), rng);
  CHECK(base_distance_to_all(P0.base(), e0.bits) == Fraction(0, 1));
  BitVec flipped = e0.bits;
  flipped.flip(0);
  CHECK(base_distance_to_all(P0.base(), flipped) <= Fraction(1, 16));
  CHECK_THROWS_AS(base_distance_to_all(P0.base(), BitVec(15)), InputError);

  const auto& P = lvl1();
  const HardCodeSpec& B = P.base();
  const std::uint64_t weight = B.ensemble_cert.num * B.n() / B.ensemble_cert.den;
  // Random lambda is beyond the unique-decoding radius 14 of the degree-32 code.
  const Fraction floor(15 * weight, 1488);
  const auto far = far_from_all_check(P, 30, floor, 10);
  CHECK(far.rate == 1.0);
  CHECK(far.min_seen == floor);
  CHECK_FALSE(far.exact);

  // A yes-instance viewed as a no-sample has bound zero.
  const Encoding e = pcuss_encode(P, BitVec::from_string("11"), rng);
  NoSample honest;
  honest.bits = e.bits;
  for (const auto& c : e.witness->children) {
    honest.lambda.push_back(c.secret);
    honest.blocks.push_back(c);
  }
  CHECK(dno_distance_lower_bound(P, honest) == Fraction(0, 1));
  // Three corrupted secrets leave a nearby polynomial at three disagreements.
  for (std::size_t j : {4u, 20u, 50u}) honest.lambda[j] ^= 1;
  CHECK(dno_distance_lower_bound(P, honest) == Fraction(3 * weight, 1488));
  honest.lambda.pop_back();
  CHECK_THROWS_AS(dno_distance_lower_bound(P, honest), InputError);
  CHECK_THROWS_AS(dno_distance_lower_bound(P0, honest), CapabilityError);
  CHECK_THROWS_AS(
      far_from_all_check(derive_params(ParamsRequest{.ell = 2, .t = 6, .k = 2, .arithmetic_only = true}), 1,
                         Fraction(0, 1)),
      CapabilityError);
}
