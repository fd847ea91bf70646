#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "doctest.h"
#include "pcuss/error.hpp"
#include "pcuss/poly.hpp"

using namespace pcuss;

namespace {

std::vector<std::uint64_t> random_coeffs(const FieldParams& F, std::size_t n, Rng& rng) {
  std::vector<std::uint64_t> c(n);
  for (auto& x : c) x = rng.below(F.size());
  return c;
}

// Sum of y_j * prod_{i != j} (X - x_i) / (x_j - x_i), expanded coefficient-wise.
std::vector<std::uint64_t> lagrange_oracle(const FieldParams& F, const std::vector<std::uint64_t>& xs,
                                           const std::vector<std::uint64_t>& ys) {
  const std::size_t n = xs.size();
  std::vector<std::uint64_t> out(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::uint64_t> basis{1};
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      std::vector<std::uint64_t> next(basis.size() + 1, 0);
      for (std::size_t a = 0; a < basis.size(); ++a) {
        next[a + 1] ^= basis[a];
        next[a] ^= F.mul(basis[a], xs[i]);
      }
      basis = next;
      den = F.mul(den, xs[j] ^ xs[i]);
    }
    const std::uint64_t scale = F.mul(ys[j], F.inv(den));
    for (std::size_t a = 0; a < basis.size(); ++a) out[a] ^= F.mul(basis[a], scale);
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

FunctionTable random_table(const FieldParams& F, Rng& rng) {
  FunctionTable t{F, std::vector<std::uint64_t>(F.size())};
  for (auto& v : t.values) v = rng.below(F.size());
  return t;
}

// Distance from a table to the nearest polynomial of degree <= 4 over GF(8),
// by scanning all 8^5 polynomials.
unsigned brute_nearest_gf8(const FieldParams& F, const std::vector<std::uint64_t>& table) {
  unsigned best = 8;
  for (std::uint64_t code = 0; code < (1u << 15); ++code) {
    std::vector<std::uint64_t> c(5);
    for (int i = 0; i < 5; ++i) c[i] = (code >> (3 * i)) & 7;
    const Poly g(F, c);
    unsigned d = 0;
    for (std::uint64_t x = 0; x < 8 && d < best; ++x) d += g.eval(x) != table[x];
    if (d < best) best = d;
  }
  return best;
}

}  // namespace

TEST_CASE("evaluation") {
  const auto F = FieldParams::from_t(6);
  Rng rng(1);
  const Poly c(F, {37});
  const Poly X(F, {0, 1});
  for (std::uint64_t b = 0; b < 64; ++b) {
    CHECK(c.eval(b) == 37);
    CHECK(X.eval(b) == b);
  }
  for (int i = 0; i < 200; ++i) {
    const Poly g(F, random_coeffs(F, 6, rng));
    const std::uint64_t beta = rng.below(64);
    CHECK(poly_eval(g, beta) == poly_eval_naive(g, beta));
  }
  CHECK(Poly(F, {1, 0, 0}).degree() == 0);
  CHECK(Poly(F).degree() == -1);
  CHECK_THROWS_AS(Poly(F, {64}), InputError);
  CHECK_THROWS_AS(X.eval(FieldParams::from_t(18).one()), ParameterError);
}

TEST_CASE("interpolation") {
  const auto F = FieldParams::from_t(6);
  Rng rng(2);
  SUBCASE("single point") {
    const Poly g = poly_interpolate(PointSet{F, {{9, 41}}});
    CHECK(g.coeffs() == std::vector<std::uint64_t>{41});
  }
  SUBCASE("cubic matches the Lagrange oracle") {
    const Poly cubic(F, {5, 0, 17, 33});
    const std::vector<std::uint64_t> xs{3, 8, 20, 61};
    std::vector<std::uint64_t> ys;
    for (auto x : xs) ys.push_back(cubic.eval(x));
    CHECK(lagrange_oracle(F, xs, ys) == cubic.coeffs());
    CHECK(poly_interpolate(F, xs, ys) == cubic);
  }
  SUBCASE("round trip up to degree 31") {
    for (const auto& G : {FieldParams::from_t(6), FieldParams::from_t(18)}) {
      for (std::size_t d = 0; d <= 31; ++d) {
        const Poly g(G, random_coeffs(G, d + 1, rng));
        std::vector<std::uint64_t> xs, ys;
        while (xs.size() < d + 1) {
          const std::uint64_t x = rng.below(G.size());
          if (std::find(xs.begin(), xs.end(), x) != xs.end()) continue;
          xs.push_back(x);
          ys.push_back(g.eval(x));
        }
        const Poly h = poly_interpolate(G, xs, ys);
        REQUIRE(h == g);
        REQUIRE(h.coeffs() == lagrange_oracle(G, xs, ys));
      }
    }
  }
  SUBCASE("uniqueness across point sets") {
    const Poly g(F, random_coeffs(F, 10, rng));
    std::vector<std::uint64_t> xa, ya, xb, yb;
    for (std::uint64_t x = 0; x < 10; ++x) {
      xa.push_back(x);
      ya.push_back(g.eval(x));
      xb.push_back(63 - x);
      yb.push_back(g.eval(63 - x));
    }
    CHECK(poly_interpolate(F, xa, ya).coeffs() == poly_interpolate(F, xb, yb).coeffs());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(poly_interpolate(F, {1, 1}, {2, 3}), InputError);
    CHECK_THROWS_AS(poly_interpolate(F, {1, 2}, {2}), InputError);
  }
}

TEST_CASE("constrained sampling") {
  const auto F = FieldParams::from_t(6);
  Rng rng(3);
  const std::vector<std::uint64_t> H{0, 1, 2, 3, 4, 5};
  const auto nodes = constrained_nodes(F, H);
  CHECK(nodes.size() == 33);
  CHECK(std::vector<std::uint64_t>(nodes.begin(), nodes.begin() + 6) == H);
  CHECK(nodes.back() == 32);
  for (int i = 0; i < 200; ++i) {
    const BitVec w = rng.bitvec(6);
    const Poly g = poly_sample_constrained(F, H, w, rng);
    REQUIRE(g.in_cf());
    for (std::size_t j = 0; j < H.size(); ++j) REQUIRE(g.eval(H[j]) == w.get(j));
    REQUIRE(poly_is_low_degree(tabulate(g)));
  }
  const Poly free = poly_sample_constrained(F, {}, BitVec(), rng);
  CHECK(free.in_cf());
  CHECK_THROWS_AS(constrained_nodes(F, std::vector<std::uint64_t>(34, 0)), ParameterError);
  CHECK_THROWS_AS(poly_sample_constrained(F, H, BitVec(5), rng), InputError);
}

TEST_CASE("constrained sampling marginals are uniform on a toy field") {
  const auto F = FieldParams::custom(3, 0b1011);
  Rng rng(4);
  const std::vector<std::uint64_t> H{0, 1};
  const BitVec w = BitVec::from_string("10");
  const std::uint64_t draws = 100000;
  for (const std::vector<std::uint64_t>& h : {H, std::vector<std::uint64_t>{}}) {
    const BitVec ww = h.empty() ? BitVec() : w;
    std::vector<std::uint64_t> counts(8, 0);
    for (std::uint64_t i = 0; i < draws; ++i) ++counts[poly_sample_constrained(F, h, ww, rng).eval(7)];
    const double p = 1.0 / 8, mean = draws * p, sigma = std::sqrt(draws * p * (1 - p));
    for (auto c : counts) CHECK(std::abs(double(c) - mean) <= 3 * sigma);
  }
}

TEST_CASE("low-degree membership") {
  const auto F = FieldParams::from_t(6);
  Rng rng(5);
  std::vector<std::uint64_t> mono(34, 0);
  mono[33] = 1;
  CHECK_FALSE(poly_is_low_degree(tabulate(Poly(F, mono))));
  mono[33] = 0;
  mono[32] = 1;
  CHECK(poly_is_low_degree(tabulate(Poly(F, mono))));
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) rejected += !poly_is_low_degree(random_table(F, rng));
  CHECK(rejected >= 990);
  CHECK_THROWS_AS(poly_is_low_degree(FunctionTable{F, std::vector<std::uint64_t>(63, 0)}), InputError);
}

TEST_CASE("function distance") {
  const auto F = FieldParams::from_t(6);
  Rng rng(6);
  const auto f = random_table(F, rng);
  CHECK(fn_distance(f, f) == Fraction(0, 1));
  auto g = f;
  for (auto& v : g.values) v ^= 1;
  CHECK(fn_distance(f, g) == Fraction(1, 1));
  g.values[0] ^= 1;
  CHECK(fn_distance(f, g) == Fraction(63, 64));
  CHECK_THROWS_AS(fn_distance(f, FunctionTable{FieldParams::from_t(18), {}}), InputError);
}

TEST_CASE("random tables over GF(8) against brute-force nearest codeword") {
  const auto F = FieldParams::custom(3, 0b1011);
  Rng rng(7);
  std::vector<std::uint64_t> xs(8);
  for (std::uint64_t x = 0; x < 8; ++x) xs[x] = x;
  std::map<unsigned, int> hist;
  const int draws = 300;
  for (int i = 0; i < draws; ++i) {
    const auto t = random_table(F, rng);
    const unsigned d = brute_nearest_gf8(F, t.values);
    ++hist[d];
    // Unique decoding radius of the [8, 5] code is 1.
    const auto dec = berlekamp_welch(F, xs, t.values, 5, 1);
    REQUIRE(dec.has_value() == (d <= 1));
    if (dec) REQUIRE(fn_distance(t, tabulate(*dec)) == Fraction(d, 8));
  }
  // Every table is within distance 3 of a degree-4 polynomial, and only a
  // small share reaches it.
  CHECK(hist.rbegin()->first <= 3);
  CHECK(hist[3] < draws / 10);
}

TEST_CASE("random tables over GF(64) are far from low degree") {
  const auto F = FieldParams::from_t(6);
  Rng rng(8);
  std::vector<std::uint64_t> xs(64);
  for (std::uint64_t x = 0; x < 64; ++x) xs[x] = x;
  // Failure of unique decoding at radius 15 certifies distance >= 16/64.
  int certified = 0;
  for (int i = 0; i < 1000; ++i) certified += !berlekamp_welch(F, xs, random_table(F, rng).values, 33, 15);
  CHECK(certified >= 990);

  // First moment: expected number of degree-<=32 polynomials within j
  // errors of a uniform table is 64^33 * sum_{i<=j} C(64,i) 63^i / 64^64.
  auto expected_within = [](int j) {
    double total = 0;
    for (int i = 0; i <= j; ++i) {
      const double lg = std::lgamma(65.0) - std::lgamma(i + 1.0) - std::lgamma(65.0 - i) + i * std::log(63.0) -
                        31 * std::log(64.0);
      total += std::exp(lg);
    }
    return total;
  };
  CHECK(expected_within(21) < 0.026);
  CHECK(expected_within(20) < 2e-4);
  CHECK(expected_within(15) < 1e-10);
}

TEST_CASE("Lagrange coefficients and Berlekamp-Welch") {
  const auto F = FieldParams::from_t(6);
  Rng rng(9);
  const Poly g(F, random_coeffs(F, 12, rng));
  std::vector<std::uint64_t> nodes;
  for (std::uint64_t x = 0; x < 12; ++x) nodes.push_back(3 * x + 1);
  for (std::uint64_t beta : {0ull, 5ull, 4ull, 63ull}) {
    const auto c = lagrange_coefficients(F, nodes, beta);
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) acc ^= F.mul(c[j], g.eval(nodes[j]));
    CHECK(acc == g.eval(beta));
  }
  std::vector<std::uint64_t> xs(64), ys(64);
  for (std::uint64_t x = 0; x < 64; ++x) {
    xs[x] = x;
    ys[x] = g.eval(x);
  }
  for (std::size_t e : {0u, 5u, 26u}) {
    auto noisy = ys;
    for (std::size_t i = 0; i < e; ++i) noisy[2 * i] ^= 1 + rng.below(63);
    const auto dec = berlekamp_welch(F, xs, noisy, 12, 26);
    REQUIRE(dec.has_value());
    CHECK(*dec == g);
  }
  CHECK_THROWS_AS(berlekamp_welch(F, xs, ys, 12, 27), ParameterError);
}
