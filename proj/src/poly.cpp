#include "pcuss/poly.hpp"

#include <algorithm>
#include <unordered_set>

#include "pcuss/error.hpp"

namespace pcuss {

namespace {

void check_distinct(const std::vector<std::uint64_t>& xs) {
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t x : xs) {
    if (!seen.insert(x).second) throw InputError("interpolation points must have distinct x-coordinates");
  }
}

// Solves M * x = rhs over the field; M is row-major with `cols` columns.
// Returns some solution or nullopt.
std::optional<std::vector<std::uint64_t>> solve_field(const FieldParams& F, std::vector<std::uint64_t> m,
                                                      std::vector<std::uint64_t> rhs, std::size_t cols) {
  const std::size_t rows = rhs.size();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap_ranges(m.begin() + static_cast<std::ptrdiff_t>(p * cols),
                       m.begin() + static_cast<std::ptrdiff_t>((p + 1) * cols),
                       m.begin() + static_cast<std::ptrdiff_t>(r * cols));
      std::swap(rhs[p], rhs[r]);
    }
    const std::uint64_t inv = F.inv(m[r * cols + c]);
    for (std::size_t j = c; j < cols; ++j) m[r * cols + j] = F.mul(m[r * cols + j], inv);
    rhs[r] = F.mul(rhs[r], inv);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const std::uint64_t f = m[i * cols + c];
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) m[i * cols + j] ^= F.mul(f, m[r * cols + j]);
      rhs[i] ^= F.mul(f, rhs[r]);
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (rhs[i] != 0) return std::nullopt;
  }
  std::vector<std::uint64_t> x(cols, 0);
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = rhs[i];
  return x;
}

// Quotient and remainder of a / b.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> divmod(const FieldParams& F,
                                                                        std::vector<std::uint64_t> a,
                                                                        const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> bb = b;
  while (!bb.empty() && bb.back() == 0) bb.pop_back();
  if (bb.empty()) throw DomainError("polynomial division by zero");
  while (!a.empty() && a.back() == 0) a.pop_back();
  if (a.size() < bb.size()) return {{}, a};
  std::vector<std::uint64_t> q(a.size() - bb.size() + 1, 0);
  const std::uint64_t lead_inv = F.inv(bb.back());
  for (std::size_t i = a.size(); i-- >= bb.size();) {
    const std::uint64_t c = F.mul(a[i], lead_inv);
    if (c == 0) continue;
    const std::size_t shift = i + 1 - bb.size();
    q[shift] = c;
    for (std::size_t j = 0; j < bb.size(); ++j) a[shift + j] ^= F.mul(c, bb[j]);
  }
  a.resize(bb.size() - 1);
  while (!a.empty() && a.back() == 0) a.pop_back();
  return {q, a};
}

}  // namespace

Poly::Poly(FieldParams field, std::vector<std::uint64_t> coeffs) : field_(field), coeffs_(std::move(coeffs)) {
  for (std::uint64_t c : coeffs_) {
    if (c >= field_.size()) throw InputError("polynomial coefficient outside the field");
  }
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

bool Poly::in_cf() const { return degree() <= static_cast<int>(field_.size() / 2); }

std::uint64_t Poly::eval(std::uint64_t beta) const {
  std::uint64_t acc = 0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) acc = field_.mul(acc, beta) ^ coeffs_[i];
  return acc;
}

FieldElem Poly::eval(const FieldElem& beta) const {
  if (!(beta.params() == field_)) throw ParameterError("evaluation point from a different field");
  return field_.elem(eval(beta.bits()));
}

std::uint64_t poly_eval(const Poly& g, std::uint64_t beta) { return g.eval(beta); }

std::uint64_t poly_eval_naive(const Poly& g, std::uint64_t beta) {
  const auto& F = g.field();
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < g.coeffs().size(); ++i) acc ^= F.mul(g.coeffs()[i], F.pow(beta, i));
  return acc;
}

Poly poly_interpolate(const FieldParams& F, const std::vector<std::uint64_t>& xs,
                      const std::vector<std::uint64_t>& ys) {
  if (xs.size() != ys.size()) throw InputError("interpolation needs one value per point");
  if (xs.size() > F.size()) throw InputError("more interpolation points than field elements");
  check_distinct(xs);
  const std::size_t r = xs.size();
  std::vector<std::uint64_t> d = ys;
  for (std::size_t j = 1; j < r; ++j) {
    for (std::size_t i = r - 1; i >= j; --i) {
      d[i] = F.mul(d[i] ^ d[i - 1], F.inv(xs[i] ^ xs[i - j]));
    }
  }
  // Nested multiplication of the Newton form into the monomial basis.
  std::vector<std::uint64_t> p;
  for (std::size_t j = r; j-- > 0;) {
    p.insert(p.begin(), 0);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) p[i] ^= F.mul(p[i + 1], xs[j]);
    p[0] ^= d[j];
  }
  return Poly(F, std::move(p));
}

Poly poly_interpolate(const PointSet& pts) {
  std::vector<std::uint64_t> xs;
  std::vector<std::uint64_t> ys;
  for (const auto& [x, y] : pts.points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return poly_interpolate(pts.field, xs, ys);
}

std::vector<std::uint64_t> constrained_nodes(const FieldParams& F, const std::vector<std::uint64_t>& H) {
  const std::uint64_t count = F.size() / 2 + 1;
  if (H.size() > count) throw ParameterError("|H| exceeds |F|/2 + 1");
  check_distinct(H);
  std::vector<std::uint64_t> nodes = H;
  std::unordered_set<std::uint64_t> in_h(H.begin(), H.end());
  for (std::uint64_t x = 0; nodes.size() < count; ++x) {
    if (!in_h.count(x)) nodes.push_back(x);
  }
  return nodes;
}

Poly poly_sample_constrained(const FieldParams& F, const std::vector<std::uint64_t>& H, const BitVec& w,
                             Rng& rng) {
  if (w.size() != H.size()) throw InputError("constraint bits must match |H|");
  const auto nodes = constrained_nodes(F, H);
  std::vector<std::uint64_t> ys(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) ys[i] = i < H.size() ? w.get(i) : rng.below(F.size());
  return poly_interpolate(F, nodes, ys);
}

bool points_low_degree(const FieldParams& F, const std::vector<std::uint64_t>& xs,
                       const std::vector<std::uint64_t>& ys, std::size_t bound) {
  if (xs.size() != ys.size()) throw InputError("one value per point required");
  if (xs.size() <= bound + 1) {
    check_distinct(xs);
    return true;
  }
  check_distinct(xs);
  const std::vector<std::uint64_t> hx(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(bound + 1));
  const std::vector<std::uint64_t> hy(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(bound + 1));
  const Poly g = poly_interpolate(F, hx, hy);
  for (std::size_t i = bound + 1; i < xs.size(); ++i) {
    if (g.eval(xs[i]) != ys[i]) return false;
  }
  return true;
}

bool poly_is_low_degree(const FunctionTable& table) {
  const auto& F = table.field;
  if (table.values.size() != F.size()) throw InputError("function table must list every field element");
  std::vector<std::uint64_t> xs(F.size());
  for (std::uint64_t i = 0; i < F.size(); ++i) xs[i] = i;
  return points_low_degree(F, xs, table.values, F.size() / 2);
}

Fraction fn_distance(const FunctionTable& f, const FunctionTable& g) {
  if (!(f.field == g.field) || f.values.size() != g.values.size()) {
    throw InputError("function tables over different domains");
  }
  if (f.values.empty()) return Fraction(0, 1);
  std::uint64_t diff = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) diff += f.values[i] != g.values[i];
  return Fraction(diff, f.values.size());
}

FunctionTable tabulate(const Poly& g) {
  FunctionTable t{g.field(), std::vector<std::uint64_t>(g.field().size())};
  for (std::uint64_t x = 0; x < g.field().size(); ++x) t.values[x] = g.eval(x);
  return t;
}

std::vector<std::uint64_t> lagrange_coefficients(const FieldParams& F, const std::vector<std::uint64_t>& nodes,
                                                 std::uint64_t beta) {
  const std::size_t n = nodes.size();
  std::vector<std::uint64_t> c(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (nodes[j] == beta) {
      c[j] = 1;
      return c;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t num = 1;
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      num = F.mul(num, beta ^ nodes[i]);
      den = F.mul(den, nodes[j] ^ nodes[i]);
    }
    c[j] = F.mul(num, F.inv(den));
  }
  return c;
}

std::optional<Poly> berlekamp_welch(const FieldParams& F, const std::vector<std::uint64_t>& xs,
                                    const std::vector<std::uint64_t>& ys, std::size_t dim, std::size_t errors) {
  const std::size_t n = xs.size();
  if (ys.size() != n) throw InputError("one value per point required");
  if (dim == 0 || 2 * errors + dim > n) throw ParameterError("error count beyond the unique decoding radius");
  check_distinct(xs);
  // Unknowns: E_0..E_{e-1} (E monic of degree e), Q_0..Q_{e+dim-1}.
  // Q(x_i) - y_i E(x_i) = y_i x_i^e.
  const std::size_t e = errors;
  const std::size_t cols = e + e + dim;
  std::vector<std::uint64_t> m(n * cols, 0);
  std::vector<std::uint64_t> rhs(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t pw = 1;
    for (std::size_t j = 0; j < e + dim; ++j) {
      if (j < e) m[i * cols + j] = F.mul(ys[i], pw);
      m[i * cols + e + j] = pw;
      if (j == e) rhs[i] = F.mul(ys[i], pw);
      pw = F.mul(pw, xs[i]);
    }
  }
  const auto sol = solve_field(F, std::move(m), std::move(rhs), cols);
  if (!sol) return std::nullopt;
  std::vector<std::uint64_t> E(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(e));
  E.push_back(1);
  std::vector<std::uint64_t> Q(sol->begin() + static_cast<std::ptrdiff_t>(e), sol->end());
  auto [quot, rem] = divmod(F, Q, E);
  if (!rem.empty()) return std::nullopt;
  Poly p(F, quot);
  if (p.degree() >= static_cast<int>(dim)) return std::nullopt;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i) bad += p.eval(xs[i]) != ys[i];
  if (bad > e) return std::nullopt;
  return p;
}

}  // namespace pcuss
