#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pcuss/bitvec.hpp"
#include "pcuss/field.hpp"
#include "pcuss/fraction.hpp"
#include "pcuss/rng.hpp"

namespace pcuss {

// Univariate polynomial; coeffs[i] is the coefficient of X^i. Trailing zero
// coefficients are stripped on construction.
class Poly {
 public:
  explicit Poly(FieldParams field, std::vector<std::uint64_t> coeffs = {});

  const FieldParams& field() const { return field_; }
  const std::vector<std::uint64_t>& coeffs() const { return coeffs_; }
  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  // Degree at most |F|/2.
  bool in_cf() const;

  std::uint64_t eval(std::uint64_t beta) const;
  FieldElem eval(const FieldElem& beta) const;

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.field_ == b.field_ && a.coeffs_ == b.coeffs_;
  }

 private:
  FieldParams field_;
  std::vector<std::uint64_t> coeffs_;
};

struct PointSet {
  FieldParams field;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> points;
};

// Full table of a function F -> F, indexed by the canonical order of F.
struct FunctionTable {
  FieldParams field;
  std::vector<std::uint64_t> values;
};

std::uint64_t poly_eval(const Poly& g, std::uint64_t beta);
std::uint64_t poly_eval_naive(const Poly& g, std::uint64_t beta);

// Newton divided differences, O(r^2) field operations.
Poly poly_interpolate(const FieldParams& field, const std::vector<std::uint64_t>& xs,
                      const std::vector<std::uint64_t>& ys);
Poly poly_interpolate(const PointSet& pts);

// Uniform g in C_F with g(H[i]) = w[i].
Poly poly_sample_constrained(const FieldParams& field, const std::vector<std::uint64_t>& H, const BitVec& w,
                             Rng& rng);

// The |F|/2 + 1 interpolation nodes used by poly_sample_constrained: H in
// order followed by the first non-H elements.
std::vector<std::uint64_t> constrained_nodes(const FieldParams& field, const std::vector<std::uint64_t>& H);

bool poly_is_low_degree(const FunctionTable& table);
// Do the points lie on a single polynomial of degree <= bound?
bool points_low_degree(const FieldParams& field, const std::vector<std::uint64_t>& xs,
                       const std::vector<std::uint64_t>& ys, std::size_t bound);

Fraction fn_distance(const FunctionTable& f, const FunctionTable& g);
FunctionTable tabulate(const Poly& g);

// Coefficients c_j with P(beta) = sum_j c_j * P(nodes[j]) for every P of
// degree below nodes.size().
std::vector<std::uint64_t> lagrange_coefficients(const FieldParams& field, const std::vector<std::uint64_t>& nodes,
                                                 std::uint64_t beta);

// Unique decoding of a Reed-Solomon word: a polynomial of degree < dim that
// disagrees with ys in at most `errors` positions, if one exists. Requires
// 2 * errors <= xs.size() - dim.
std::optional<Poly> berlekamp_welch(const FieldParams& field, const std::vector<std::uint64_t>& xs,
                                    const std::vector<std::uint64_t>& ys, std::size_t dim, std::size_t errors);

}  // namespace pcuss
