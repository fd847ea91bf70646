#include "pcuss/gf2.hpp"

#include <bit>
#include <limits>

#include "pcuss/error.hpp"

namespace pcuss::gf2 {

unsigned rank(std::vector<std::uint64_t> rows) {
  unsigned r = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::uint64_t p = rows[i];
    if (p == 0) continue;
    ++r;
    const std::uint64_t low = p & (~p + 1);
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (rows[j] & low) rows[j] ^= p;
    }
  }
  return r;
}

std::optional<std::uint64_t> solve(const std::vector<std::uint64_t>& rows, const BitVec& rhs) {
  if (rhs.size() != rows.size()) throw InputError("gf2::solve: right-hand side length mismatch");
  std::vector<std::uint64_t> a = rows;
  std::vector<std::uint8_t> b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) b[i] = rhs.get(i);

  std::vector<std::pair<std::uint64_t, std::size_t>> pivots;  // (pivot bit, row)
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const auto& [bit, pr] : pivots) {
      if (a[i] & bit) {
        a[i] ^= a[pr];
        b[i] ^= b[pr];
      }
    }
    if (a[i] == 0) {
      if (b[i]) return std::nullopt;
      continue;
    }
    const std::uint64_t bit = a[i] & (~a[i] + 1);
    for (auto& [pbit, pr] : pivots) {
      if (a[pr] & bit) {
        a[pr] ^= a[i];
        b[pr] ^= b[i];
      }
    }
    pivots.emplace_back(bit, i);
  }
  // Reduced form: each pivot row has its pivot and otherwise only free
  // columns. Setting free variables to zero gives a solution.
  std::uint64_t x = 0;
  for (const auto& [bit, pr] : pivots) {
    if (b[pr]) x |= bit;
  }
  return x;
}

std::vector<std::uint64_t> nullspace(const std::vector<std::uint64_t>& rows, unsigned ncols) {
  std::vector<std::uint64_t> a;
  std::vector<std::uint64_t> pivot_bits;
  for (std::uint64_t r : rows) {
    for (std::size_t p = 0; p < a.size(); ++p) {
      if (r & pivot_bits[p]) r ^= a[p];
    }
    if (r == 0) continue;
    const std::uint64_t bit = r & (~r + 1);
    for (auto& q : a) {
      if (q & bit) q ^= r;
    }
    a.push_back(r);
    pivot_bits.push_back(bit);
  }
  std::uint64_t pivot_mask = 0;
  for (std::uint64_t b : pivot_bits) pivot_mask |= b;

  std::vector<std::uint64_t> basis;
  for (unsigned j = 0; j < ncols; ++j) {
    const std::uint64_t fb = std::uint64_t{1} << j;
    if (pivot_mask & fb) continue;
    std::uint64_t v = fb;
    for (std::size_t p = 0; p < a.size(); ++p) {
      if (a[p] & fb) v |= pivot_bits[p];
    }
    basis.push_back(v);
  }
  return basis;
}

std::vector<std::uint64_t> transpose(const std::vector<std::uint64_t>& cols, unsigned nrows) {
  if (cols.size() > 64) throw CapabilityError("gf2::transpose supports at most 64 columns");
  std::vector<std::uint64_t> rows(nrows, 0);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (unsigned i = 0; i < nrows; ++i) {
      if ((cols[j] >> i) & 1) rows[i] |= std::uint64_t{1} << j;
    }
  }
  return rows;
}

SpanWeights span_weights(const std::vector<std::uint64_t>& gens, unsigned head) {
  const std::size_t d = gens.size();
  if (d > 40) throw CapabilityError("span enumeration limited to 40 generators");
  const std::uint64_t head_mask = head >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << head) - 1;
  unsigned best_all = std::numeric_limits<unsigned>::max();
  unsigned best_head = std::numeric_limits<unsigned>::max();
  std::uint64_t word = 0;
  std::uint64_t gray = 0;
  const std::uint64_t total = std::uint64_t{1} << d;
  for (std::uint64_t i = 1; i < total; ++i) {
    const unsigned j = static_cast<unsigned>(std::countr_zero(i));
    word ^= gens[j];
    gray ^= std::uint64_t{1} << j;
    const unsigned w = static_cast<unsigned>(std::popcount(word));
    if (w < best_all) best_all = w;
    if ((gray & head_mask) && w < best_head) best_head = w;
  }
  SpanWeights out;
  out.min_all = d == 0 ? 0 : best_all;
  out.min_head = (d == 0 || head == 0) ? 0 : best_head;
  return out;
}

}  // namespace pcuss::gf2
