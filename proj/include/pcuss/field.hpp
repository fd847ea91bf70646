#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pcuss {

namespace detail {
struct FieldDesc;
}

class FieldElem;

// Handle to an interned description of GF(2^t). Copies are cheap and two
// handles compare equal iff they describe the same field.
class FieldParams {
 public:
  // GF(2^t) with t = 2 * 3^r and modulus x^t + x^(t/2) + 1.
  static FieldParams from_r(unsigned r);
  static FieldParams from_t(unsigned t);
  static FieldParams from_size(std::uint64_t size);
  // Arbitrary modulus of degree t (bit i = coefficient of x^i, bit t set).
  // Used for toy fields in tests; irreducibility is checked.
  static FieldParams custom(unsigned t, std::uint64_t modulus);

  unsigned t() const;
  // Negative for custom fields.
  int r() const;
  std::uint64_t size() const;
  std::uint64_t modulus() const;
  bool in_family() const { return r() >= 0; }
  std::string name() const;

  // Raw arithmetic on canonical representations (integers below size()).
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t inv(std::uint64_t a) const;
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t sqr(std::uint64_t a) const { return mul(a, a); }

  FieldElem elem(std::uint64_t bits) const;
  FieldElem zero() const;
  FieldElem one() const;

  const detail::FieldDesc* desc() const { return d_; }
  friend bool operator==(const FieldParams& a, const FieldParams& b) { return a.d_ == b.d_; }

 private:
  explicit FieldParams(const detail::FieldDesc* d) : d_(d) {}
  const detail::FieldDesc* d_;
};

class FieldElem {
 public:
  FieldElem(std::uint64_t bits, FieldParams params);

  std::uint64_t bits() const { return bits_; }
  const FieldParams& params() const { return params_; }
  bool is_zero() const { return bits_ == 0; }

  FieldElem inv() const;
  FieldElem pow(std::uint64_t e) const { return {params_.pow(bits_, e), params_}; }

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + b; }
  friend bool operator==(const FieldElem& a, const FieldElem& b) {
    return a.params_ == b.params_ && a.bits_ == b.bits_;
  }

 private:
  std::uint64_t bits_;
  FieldParams params_;
};

inline FieldElem fld_add(const FieldElem& a, const FieldElem& b) { return a + b; }
inline FieldElem fld_mul(const FieldElem& a, const FieldElem& b) { return a * b; }
inline FieldElem fld_inv(const FieldElem& a) { return a.inv(); }

// Carry-less product of two polynomials over GF(2) of degree below 64.
unsigned __int128 clmul(std::uint64_t a, std::uint64_t b);
// Remainder of a polynomial over GF(2) modulo `modulus`.
std::uint64_t gf2_poly_mod(unsigned __int128 a, std::uint64_t modulus);
// Brute-force factor search: no factor of degree 1..deg/2 divides `poly`.
bool gf2_poly_irreducible(std::uint64_t poly);

}  // namespace pcuss
