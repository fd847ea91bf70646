#include "pcuss/field.hpp"

#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "pcuss/error.hpp"

namespace pcuss {

namespace detail {

struct FieldDesc {
  unsigned t = 0;
  int r = -1;
  std::uint64_t modulus = 0;
  std::uint64_t size = 0;
  // log/exp tables for t <= 18; exp has 2 * (size - 1) entries so products
  // of logs need no reduction.
  std::vector<std::uint32_t> log;
  std::vector<std::uint32_t> exp;
};

}  // namespace detail

namespace {

constexpr unsigned kTableLimit = 18;

int poly_degree(unsigned __int128 a) {
  const std::uint64_t hi = static_cast<std::uint64_t>(a >> 64);
  if (hi) return 127 - std::countl_zero(hi);
  const std::uint64_t lo = static_cast<std::uint64_t>(a);
  return lo ? 63 - std::countl_zero(lo) : -1;
}

std::uint64_t slow_mul(const detail::FieldDesc& d, std::uint64_t a, std::uint64_t b) {
  return gf2_poly_mod(clmul(a, b), d.modulus);
}

std::uint64_t slow_pow(const detail::FieldDesc& d, std::uint64_t a, std::uint64_t e) {
  std::uint64_t result = 1;
  while (e) {
    if (e & 1) result = slow_mul(d, result, a);
    a = slow_mul(d, a, a);
    e >>= 1;
  }
  return result;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

void build_tables(detail::FieldDesc& d) {
  const std::uint64_t order = d.size - 1;
  const auto primes = prime_factors(order);
  std::uint64_t gen = 0;
  for (std::uint64_t g = 2; g < d.size; ++g) {
    bool primitive = true;
    for (std::uint64_t p : primes) {
      if (slow_pow(d, g, order / p) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      gen = g;
      break;
    }
  }
  if (order == 1) gen = 1;
  d.log.assign(d.size, 0);
  d.exp.assign(2 * order, 0);
  std::uint64_t x = 1;
  for (std::uint64_t i = 0; i < order; ++i) {
    d.exp[i] = static_cast<std::uint32_t>(x);
    d.exp[i + order] = static_cast<std::uint32_t>(x);
    d.log[x] = static_cast<std::uint32_t>(i);
    x = slow_mul(d, x, gen);
  }
}

const detail::FieldDesc* intern(unsigned t, std::uint64_t modulus, int r) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, std::uint64_t>, std::unique_ptr<detail::FieldDesc>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = registry[{t, modulus}];
  if (!slot) {
    auto d = std::make_unique<detail::FieldDesc>();
    d->t = t;
    d->r = r;
    d->modulus = modulus;
    d->size = std::uint64_t{1} << t;
    if (t <= kTableLimit) build_tables(*d);
    slot = std::move(d);
  }
  return slot.get();
}

}  // namespace

unsigned __int128 clmul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 acc = 0;
  const unsigned __int128 wide = a;
  while (b) {
    const int i = std::countr_zero(b);
    acc ^= wide << i;
    b &= b - 1;
  }
  return acc;
}

std::uint64_t gf2_poly_mod(unsigned __int128 a, std::uint64_t modulus) {
  const int dm = poly_degree(modulus);
  if (dm < 0) throw DomainError("reduction modulo the zero polynomial");
  for (int da = poly_degree(a); da >= dm; da = poly_degree(a)) {
    a ^= static_cast<unsigned __int128>(modulus) << (da - dm);
  }
  return static_cast<std::uint64_t>(a);
}

namespace {

std::uint64_t gf2_poly_gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t r = gf2_poly_mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

}  // namespace

// Ben-Or: no factor of degree i <= deg/2, tested via gcd(x^(2^i) - x, f).
bool gf2_poly_irreducible(std::uint64_t poly) {
  const int deg = poly_degree(poly);
  if (deg < 1) return false;
  if (deg == 1) return true;
  std::uint64_t x = 2;
  for (int i = 1; i <= deg / 2; ++i) {
    x = gf2_poly_mod(clmul(x, x), poly);
    if (gf2_poly_gcd(poly, x ^ 2) != 1) return false;
  }
  return true;
}

FieldParams FieldParams::from_r(unsigned r) {
  if (r > 3) throw ParameterError("field family supports r in {0, 1, 2, 3} (t up to 54)");
  unsigned t = 2;
  for (unsigned i = 0; i < r; ++i) t *= 3;
  const std::uint64_t modulus = (std::uint64_t{1} << t) | (std::uint64_t{1} << (t / 2)) | 1;
  return FieldParams(intern(t, modulus, static_cast<int>(r)));
}

FieldParams FieldParams::from_t(unsigned t) {
  for (unsigned r = 0, tt = 2; r <= 3; ++r, tt *= 3) {
    if (tt == t) return from_r(r);
  }
  throw ParameterError("t = " + std::to_string(t) + " is not of the form 2*3^r");
}

FieldParams FieldParams::from_size(std::uint64_t size) {
  if (size < 2 || (size & (size - 1)) != 0) {
    throw ParameterError("field size " + std::to_string(size) + " is not a power of two");
  }
  return from_t(static_cast<unsigned>(std::countr_zero(size)));
}

FieldParams FieldParams::custom(unsigned t, std::uint64_t modulus) {
  if (t == 0 || t > 20 || poly_degree(modulus) != static_cast<int>(t)) {
    throw ParameterError("custom field needs 1 <= t <= 20 and a modulus of degree t");
  }
  if (!gf2_poly_irreducible(modulus)) throw ParameterError("custom field modulus is reducible");
  return FieldParams(intern(t, modulus, -1));
}

unsigned FieldParams::t() const { return d_->t; }
int FieldParams::r() const { return d_->r; }
std::uint64_t FieldParams::size() const { return d_->size; }
std::uint64_t FieldParams::modulus() const { return d_->modulus; }

std::string FieldParams::name() const { return "GF(2^" + std::to_string(d_->t) + ")"; }

std::uint64_t FieldParams::mul(std::uint64_t a, std::uint64_t b) const {
  if (a == 0 || b == 0) return 0;
  if (!d_->log.empty()) return d_->exp[d_->log[a] + d_->log[b]];
  return slow_mul(*d_, a, b);
}

std::uint64_t FieldParams::inv(std::uint64_t a) const {
  if (a == 0) throw DomainError("inverse of zero");
  if (!d_->log.empty()) {
    const std::uint64_t order = d_->size - 1;
    return d_->exp[(order - d_->log[a]) % order];
  }
  return slow_pow(*d_, a, d_->size - 2);
}

std::uint64_t FieldParams::pow(std::uint64_t a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (!d_->log.empty()) {
    const std::uint64_t order = d_->size - 1;
    const unsigned __int128 l = static_cast<unsigned __int128>(d_->log[a]) * e;
    return d_->exp[static_cast<std::uint64_t>(l % order)];
  }
  return slow_pow(*d_, a, e);
}

FieldElem FieldParams::elem(std::uint64_t bits) const { return FieldElem(bits, *this); }
FieldElem FieldParams::zero() const { return FieldElem(0, *this); }
FieldElem FieldParams::one() const { return FieldElem(1, *this); }

FieldElem::FieldElem(std::uint64_t bits, FieldParams params) : bits_(bits), params_(params) {
  if (bits >= params.size()) throw InputError("field element has more than t bits");
}

FieldElem FieldElem::inv() const { return {params_.inv(bits_), params_}; }

FieldElem operator+(const FieldElem& a, const FieldElem& b) {
  if (!(a.params_ == b.params_)) throw ParameterError("field elements from different fields");
  return {a.bits_ ^ b.bits_, a.params_};
}

FieldElem operator*(const FieldElem& a, const FieldElem& b) {
  if (!(a.params_ == b.params_)) throw ParameterError("field elements from different fields");
  return {a.params_.mul(a.bits_, b.bits_), a.params_};
}

}  // namespace pcuss
