#include <algorithm>
#include <cstdint>
#include <memory>
#include <vector>

#include "doctest.h"
#include "pcuss/error.hpp"
#include "pcuss/pcpp.hpp"

using namespace pcuss;

namespace {

// x_i = u_(i mod N); linear: u has even parity; quadratic: u0 u1 = u2.
PredicateSpec periodic_spec(std::size_t n, unsigned N, bool quadratic) {
  PredicateSpec s;
  s.name = quadratic ? "periodic-and" : "periodic-even";
  s.arity = n;
  s.declared_size = n;
  s.evaluate = [n, N, quadratic](const BitVec& x) {
    for (std::size_t i = N; i < n; ++i)
      if (x.get(i) != x.get(i % N)) return false;
    if (quadratic) return (x.get(0) && x.get(1)) == x.get(2);
    return parity64(x.get_bits(0, N)) == 0;
  };
  ConstraintSystem cs;
  cs.num_vars = N;
  cs.input_row = [N](std::size_t i) { return std::uint64_t{1} << (i % N); };
  if (quadratic) {
    cs.constraints.push_back({std::uint64_t{1} << 2, std::uint64_t{1} << (0 * N + 1), false});
  } else {
    cs.constraints.push_back({(std::uint64_t{1} << N) - 1, 0, false});
  }
  s.constraints = cs;
  return s;
}

// Nearest accepted input and its distance, by scanning witnesses.
std::pair<BitVec, std::size_t> nearest_member(const PredicateSpec& s, const BitVec& x) {
  const auto& cs = *s.constraints;
  BitVec best;
  std::size_t d = s.arity + 1;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << cs.num_vars); ++u) {
    if (!cs.satisfied(u)) continue;
    const BitVec y = cs.project(u, s.arity);
    if (hamming_distance(x, y) < d) {
      d = hamming_distance(x, y);
      best = y;
    }
  }
  return {best, d};
}

double rejection_rate(const PcppBackend& b, const PredicateSpec& s, const BitVec& x, SourcePtr proof, double eps,
                      double delta, int runs, std::uint64_t seed) {
  int rejected = 0;
  for (int r = 0; r < runs; ++r) {
    QueryOracle xo(x);
    QueryOracle po(proof);
    rejected += !backend_verify(b, s, xo, po, eps, delta, derive_seed(seed, r)).accept;
  }
  return double(rejected) / runs;
}

}  // namespace

TEST_CASE("query oracle bookkeeping") {
  const BitVec bits = BitVec::from_string("0110100111");
  QueryOracle o(bits);
  o.enable_log();
  CHECK(o.size() == 10);
  CHECK(o.bit(1));
  CHECK_FALSE(o.bit(0));
  CHECK(o.bit(1));
  CHECK(o.read(4, 4) == bits.slice(4, 4));
  CHECK(o.distinct() == 6);
  CHECK(o.total() == 7);
  CHECK(o.log() == std::vector<std::size_t>{1, 0, 4, 5, 6, 7});
  CHECK(o.touched(5));
  CHECK_FALSE(o.touched(9));
  CHECK_THROWS_AS(o.query(10), InputError);
  o.reset();
  CHECK(o.distinct() == 0);

  QueryOracle outer(o);
  SubOracle sub(outer, 2, 5);
  CHECK(sub.size() == 5);
  CHECK(sub.bit(0) == bits.get(2));
  CHECK(sub.read(1, 3) == bits.slice(3, 3));
  CHECK(outer.distinct() == 4);
  CHECK(o.distinct() == 4);
  CHECK_THROWS_AS(sub.query(5), InputError);

  QueryOracle a(BitVec::from_string("11"));
  QueryOracle b(BitVec::from_string("000"));
  JoinedOracle j;
  j.append(a);
  j.append(b, 1, 2);
  j.append(a);
  CHECK(j.size() == 6);
  CHECK(j.read(0, 6) == BitVec::from_string("110011"));
  CHECK(a.distinct() == 2);
  CHECK(b.distinct() == 2);

  QueryOracle erased(std::make_shared<const ErasedSource>(4));
  CHECK_FALSE(erased.query(2).has_value());
  CHECK_THROWS_AS(erased.read(0, 2), InputError);
  EmptyOracle empty;
  CHECK(empty.size() == 0);
  CHECK_THROWS_AS(empty.query(0), InputError);
}

TEST_CASE("bit sources") {
  const BitVec base = BitVec::from_string("1011001110");
  auto src = std::make_shared<const VecSource>(base);
  CHECK(SliceSource(src, 3, 4).materialize() == base.slice(3, 4));
  ConcatSource cat({src, std::make_shared<const ConstSource>(3, true), src});
  BitVec expect = base;
  expect.append(BitVec(3, true));
  expect.append(base);
  CHECK(cat.materialize() == expect);
  CHECK(cat.get_bits(8, 7) == expect.get_bits(8, 7));
  const RandomSource r(1000, 5);
  CHECK(r.materialize() == RandomSource(1000, 5).materialize());
  const std::size_t ones = r.materialize().popcount();
  CHECK(ones > 400);
  CHECK(ones < 600);
  const FlipSource f(src, 0.0, 1);
  CHECK(f.materialize() == base);
  CHECK(FlipSource(src, 1.0, 1).materialize() == (base ^ BitVec(10, true)));
}

TEST_CASE("constraint systems match their predicates") {
  CHECK(constraints_match(periodic_spec(16, 4, false)));
  CHECK(constraints_match(periodic_spec(9, 3, true)));
  auto bad = periodic_spec(9, 3, true);
  bad.evaluate = [](const BitVec&) { return true; };
  CHECK_FALSE(constraints_match(bad));
  CHECK(tensor_square(0b101, 3) == ((1u << 0) | (1u << 2) | (1u << 6) | (1u << 8)));
}

TEST_CASE("exhaustive backend") {
  const ExhaustiveBackend b;
  const auto s = periodic_spec(16, 4, false);
  const BitVec good = BitVec::from_string("1100110011001100");
  const auto proof = backend_prove(b, s, good);
  CHECK(proof.length() == 0);
  QueryOracle x(good);
  QueryOracle p(proof.bits);
  const auto r = backend_verify(b, s, x, p, 0.1, 0.5, 1);
  CHECK(r.accept);
  CHECK(r.input_queries == 16);
  CHECK(r.proof_queries == 0);
  BitVec bad = good;
  bad.flip(5);
  QueryOracle xb(bad);
  QueryOracle pb(proof.bits);
  CHECK_FALSE(backend_verify(b, s, xb, pb, 0.1, 0.5, 1).accept);
  CHECK_THROWS_AS(backend_prove(b, s, bad), PreconditionError);
  CHECK_THROWS_AS(backend_verify(b, s, x, p, 0.0, 0.5, 1), CapabilityError);
}

TEST_CASE("Hadamard backend: completeness and layout") {
  const HadamardBackend b;
  for (bool quad : {false, true}) {
    const auto s = quad ? periodic_spec(9, 3, true) : periodic_spec(16, 4, false);
    const unsigned N = s.constraints->num_vars;
    for (std::uint64_t u = 0; u < (1u << N); ++u) {
      if (!s.constraints->satisfied(u)) continue;
      const BitVec x = s.constraints->project(u, s.arity);
      const auto proof = backend_prove(b, s, x);
      const auto again = backend_prove(b, s, x);
      REQUIRE(proof.bits->materialize() == again.bits->materialize());
      REQUIRE(proof.length() == (quad ? (1u << N) + (1u << (N * N)) : (1u << N)));
      for (std::uint64_t a = 0; a < (1u << N); ++a) REQUIRE(proof.bits->get(a) == parity64(a & u));
      if (quad) {
        const std::uint64_t uu = tensor_square(u, N);
        for (std::uint64_t c = 0; c < (1u << (N * N)); c += 7) REQUIRE(proof.bits->get((1u << N) + c) == parity64(c & uu));
      }
      for (int r = 0; r < 50; ++r) {
        QueryOracle xo(x);
        QueryOracle po(proof.bits);
        const auto rep = backend_verify(b, s, xo, po, 0.2, 0.5, derive_seed(u, r));
        REQUIRE(rep.accept);
        REQUIRE(rep.input_queries + rep.proof_queries <= b.query_budget(s, 0.2, 0.5));
      }
    }
  }
  CHECK(HadamardBackend::formal_length(10, false) == 1024);
  CHECK(HadamardBackend::formal_length(3, true) == 8 + 512);
  auto big = periodic_spec(12, 6, true);
  CHECK_THROWS_AS(b.proof_length(big), CapabilityError);
  PredicateSpec none = periodic_spec(16, 4, false);
  none.constraints.reset();
  CHECK_THROWS_AS(b.proof_length(none), CapabilityError);
}

TEST_CASE("Hadamard backend: query count does not grow with the input") {
  const HadamardBackend b;
  const auto small = periodic_spec(16, 4, false);
  const auto large = periodic_spec(4096, 4, false);
  CHECK(b.query_budget(small, 0.1, 0.5) == b.query_budget(large, 0.1, 0.5));
  const ExhaustiveBackend e;
  CHECK(e.query_budget(large, 0.1, 0.5) == 4096);
}

TEST_CASE("Hadamard backend: soundness against fixed proof strategies") {
  const HadamardBackend b;
  const double eps = 0.2, delta = 0.5;
  for (bool quad : {false, true}) {
    const auto s = quad ? periodic_spec(9, 3, true) : periodic_spec(16, 4, false);
    const unsigned N = s.constraints->num_vars;
    const std::size_t len = b.proof_length(s);
    Rng rng(quad ? 2 : 1);
    int instances = 0;
    while (instances < 3) {
      const BitVec x = rng.bitvec(s.arity);
      const auto [near, d] = nearest_member(s, x);
      if (double(d) / s.arity <= eps) continue;
      ++instances;
      std::uint64_t u_near = 0;
      for (std::uint64_t u = 0; u < (1u << N); ++u)
        if (s.constraints->satisfied(u) && s.constraints->project(u, s.arity) == near) u_near = u;
      const std::vector<SourcePtr> proofs{
          std::make_shared<const ConstSource>(len, false),
          std::make_shared<const ConstSource>(len, true),
          std::make_shared<const RandomSource>(len, rng.next()),
          std::make_shared<const HadamardSource>(u_near, N, quad),
      };
      for (const auto& p : proofs) CHECK(rejection_rate(b, s, x, p, eps, delta, 2000, instances) > delta);
    }
  }
}

TEST_CASE("amplification") {
  auto base = make_backend("hadamard");
  CHECK(AmplifiedBackend::repetitions(0.25, 0.01) == 37);
  CHECK(amplify(base, 0.25, 1.0) == base);
  const auto amp = amplify(base, 0.25, 0.01);
  CHECK(amp->id() == "hadamard+amplified");
  const auto s = periodic_spec(16, 4, false);
  CHECK(amp->query_budget(s, 0.2, 0.25) == 37 * base->query_budget(s, 0.2, 0.25));

  const BitVec good = s.constraints->project(0b0011, 16);
  const auto proof = amp->prove(s, good);
  CHECK(rejection_rate(*amp, s, good, proof.bits, 0.2, 0.25, 200, 1) == 0.0);

  Rng rng(3);
  BitVec far;
  do {
    far = rng.bitvec(16);
  } while (nearest_member(s, far).second <= 4);
  const auto honest_near = std::make_shared<const HadamardSource>(0, 4, false);
  for (SourcePtr p : {SourcePtr(std::make_shared<const ConstSource>(16, false)), SourcePtr(honest_near),
                      SourcePtr(std::make_shared<const RandomSource>(16, 9))}) {
    const double rb = rejection_rate(*base, s, far, p, 0.2, 0.05, 1000, 2);
    const double ra = rejection_rate(*amp, s, far, p, 0.2, 0.05, 1000, 2);
    CHECK(ra >= rb);
    CHECK(ra > 0.99);
  }
  CHECK_THROWS_AS(amplify(base, 0.0, 0.5), ParameterError);
  CHECK_THROWS_AS(make_backend("dinur"), ParameterError);
}

TEST_CASE("Spiel-PCU over an exhaustive backend") {
  const auto code = std::make_shared<const GoodCode>(GoodCode::generate(6, 17));
  PcuFamily fam;
  fam.name = "prefix";
  fam.m = 1488;
  fam.k = 6;
  fam.declared_size = 1488;
  fam.member = [](const BitVec& w, const BitVec& v) {
    return v.slice(0, 6) == w && v.slice(6, v.size() - 6).none();
  };
  const auto pcu = make_spiel_pcu(fam, code, make_backend("exhaustive"));
  CHECK(pcu.xi() == 2);
  CHECK(pcu.input_length() == 1488 + 2 * 600);

  const BitVec w = BitVec::from_string("101100");
  BitVec v(1488);
  for (std::size_t i = 0; i < 6; ++i) v.set(i, w.get(i));
  const BitVec tau = code->encode(w);
  const BitVec x = pcu.assemble(v, tau);
  CHECK(x.slice(0, 1488) == v);
  CHECK(x.slice(1488, 600) == tau);
  CHECK(x.slice(2088, 600) == tau);
  const auto proof = pcu.prove(v, w);
  Rng rng(1);
  for (int r = 0; r < 20; ++r) {
    QueryOracle vo(v), to(tau), po(proof.bits);
    CHECK(pcu.verify(vo, to, po, 0.1, 0.5, rng));
  }
  BitVec bad_tau = tau;
  bad_tau.complement();
  QueryOracle vo(v), to(bad_tau), po(proof.bits);
  CHECK_FALSE(pcu.verify(vo, to, po, 0.1, 0.5, rng));
  BitVec other = w;
  other.flip(0);
  QueryOracle vo2(v), to2(code->encode(other)), po2(proof.bits);
  CHECK_FALSE(pcu.verify(vo2, to2, po2, 0.1, 0.5, rng));

  fam.m = 599;
  CHECK_THROWS_AS(make_spiel_pcu(fam, code, make_backend("exhaustive")), ParameterError);
}
