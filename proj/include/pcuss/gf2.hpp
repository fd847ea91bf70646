#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pcuss/bitvec.hpp"

// Dense linear algebra over GF(2) for systems with at most 64 columns. A row
// is a mask whose bit j is the coefficient of unknown j.
namespace pcuss::gf2 {

unsigned rank(std::vector<std::uint64_t> rows);

// Some x with parity(rows[i] & x) == rhs[i] for every i, or nullopt.
std::optional<std::uint64_t> solve(const std::vector<std::uint64_t>& rows, const BitVec& rhs);

// Basis of { x in GF(2)^ncols : parity(row & x) == 0 for all rows }.
std::vector<std::uint64_t> nullspace(const std::vector<std::uint64_t>& rows, unsigned ncols);

// Column masks (each `nrows` bits) to row masks (each cols.size() bits).
std::vector<std::uint64_t> transpose(const std::vector<std::uint64_t>& cols, unsigned nrows);

struct SpanWeights {
  // Smallest weight of a nonzero combination of the generators. Zero when
  // the generators are dependent.
  unsigned min_all = 0;
  // Same, restricted to combinations using at least one of the first `head`
  // generators.
  unsigned min_head = 0;
};

// Gray-code enumeration of all 2^gens.size() combinations.
SpanWeights span_weights(const std::vector<std::uint64_t>& gens, unsigned head = 0);

inline unsigned min_weight_span(const std::vector<std::uint64_t>& gens) { return span_weights(gens).min_all; }

}  // namespace pcuss::gf2
