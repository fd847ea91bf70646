#include "pcuss/goodcode.hpp"

#include <algorithm>
#include <bit>

#include "pcuss/error.hpp"
#include "pcuss/gf2.hpp"
#include "pcuss/rng.hpp"

namespace pcuss {

namespace {

constexpr unsigned kMaxAttempts = 1000;
constexpr std::uint64_t kRsModulus = 0x11d;

FieldParams rs_field() { return FieldParams::custom(8, kRsModulus); }

unsigned inner_min_weight(const std::vector<BitVec>& rows) {
  unsigned best = ~0u;
  BitVec acc(rows.front().size());
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << rows.size()); ++i) {
    acc ^= rows[static_cast<std::size_t>(std::countr_zero(i))];
    best = std::min(best, static_cast<unsigned>(acc.popcount()));
  }
  return best;
}

}  // namespace

std::string to_string(CertMethod m) {
  return m == CertMethod::Enumeration ? "enumeration" : "concatenation-bound";
}

GoodCode GoodCode::generate(std::size_t k, std::uint64_t seed) {
  if (k > kMaxK) throw CapabilityError("good code supports k <= " + std::to_string(kMaxK));
  GoodCode code;
  code.k_ = k;
  code.seed_ = seed;
  if (k == 0) {
    code.certified_ = Fraction(1, 1);
    return code;
  }
  Rng rng(seed);
  // Required weight: 5% of the block length.
  const std::size_t need = 5 * k;
  if (k <= kEnumerationLimit) {
    code.method_ = CertMethod::Enumeration;
    for (unsigned attempt = 1; attempt <= kMaxAttempts; ++attempt) {
      code.rows_.clear();
      for (std::size_t i = 0; i < k; ++i) code.rows_.push_back(rng.bitvec(99 * k));
      code.attempts_ = attempt;
      code.build_cache();
      const Fraction d = code.exact_distance();
      if (d.num * 100 * k >= need * d.den) {
        code.certified_ = d;
        return code;
      }
    }
    throw GenerationError("good code: no certified code within the attempt limit");
  }

  code.method_ = CertMethod::ConcatenationBound;
  const std::size_t K = (k + 7) / 8;
  const std::size_t budget = 99 * k;
  code.inner_n_ = std::max<std::size_t>(16, (budget + 254) / 255);
  code.outer_n_ = std::min<std::size_t>(255, budget / code.inner_n_);
  if (code.outer_n_ < K) throw CapabilityError("good code: message too long for the outer code");
  const unsigned target = static_cast<unsigned>(std::max<std::size_t>(1, code.inner_n_ / 4));
  for (unsigned attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    code.inner_rows_.clear();
    for (int i = 0; i < 8; ++i) code.inner_rows_.push_back(rng.bitvec(code.inner_n_));
    code.attempts_ = attempt;
    const unsigned d = inner_min_weight(code.inner_rows_);
    if (d >= target) {
      code.inner_d_ = d;
      const std::uint64_t bound = static_cast<std::uint64_t>(code.outer_n_ - K + 1) * d;
      code.certified_ = Fraction(bound, 100 * k);
      if (bound < need) throw GenerationError("good code: concatenation bound below the required distance");
      return code;
    }
  }
  throw GenerationError("good code: no certified inner code within the attempt limit");
}

GoodCode GoodCode::from_parts(std::size_t k, std::uint64_t seed, CertMethod method, Fraction certified,
                              unsigned attempts, std::vector<BitVec> rows, std::size_t outer_n, std::size_t inner_n,
                              std::vector<BitVec> inner_rows, unsigned inner_d) {
  GoodCode code;
  code.k_ = k;
  code.seed_ = seed;
  code.method_ = method;
  code.certified_ = certified;
  code.attempts_ = attempts;
  code.rows_ = std::move(rows);
  code.outer_n_ = outer_n;
  code.inner_n_ = inner_n;
  code.inner_rows_ = std::move(inner_rows);
  code.inner_d_ = inner_d;
  if (method == CertMethod::Enumeration) {
    if (code.rows_.size() != k) throw CorruptionError("good code: parity row count mismatch");
    for (const auto& r : code.rows_) {
      if (r.size() != 99 * k) throw CorruptionError("good code: parity row length mismatch");
    }
    code.build_cache();
  }
  return code;
}

void GoodCode::build_cache() {
  table_.clear();
  if (method_ != CertMethod::Enumeration || k_ == 0) return;
  table_.resize(std::size_t{1} << k_);
  table_[0] = BitVec(n());
  BitVec parity(99 * k_);
  std::uint64_t gray = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << k_); ++i) {
    const unsigned j = static_cast<unsigned>(std::countr_zero(i));
    parity ^= rows_[j];
    gray ^= std::uint64_t{1} << j;
    BitVec cw = BitVec::from_uint(gray, k_);
    cw.append(parity);
    table_[gray] = std::move(cw);
  }
}

Fraction GoodCode::exact_distance() const {
  if (k_ == 0) return Fraction(1, 1);
  if (k_ > 20) throw CapabilityError("exact good-code distance needs k <= 20");
  std::size_t best = n();
  if (!table_.empty()) {
    for (std::size_t i = 1; i < table_.size(); ++i) best = std::min(best, table_[i].popcount());
  } else {
    for (std::uint64_t w = 1; w < (std::uint64_t{1} << k_); ++w) best = std::min(best, encode_uint(w).popcount());
  }
  return Fraction(best, n());
}

BitVec GoodCode::encode_concat(const BitVec& w) const {
  const FieldParams gf = rs_field();
  const std::size_t K = (k_ + 7) / 8;
  std::vector<std::uint64_t> msg(K, 0);
  for (std::size_t i = 0; i < k_; ++i) {
    if (w.get(i)) msg[i / 8] |= std::uint64_t{1} << (i % 8);
  }
  const Poly p(gf, msg);
  BitVec out = w;
  for (std::size_t x = 0; x < outer_n_; ++x) {
    const std::uint64_t sym = p.eval(x);
    BitVec block(inner_n_);
    for (int b = 0; b < 8; ++b) {
      if ((sym >> b) & 1) block ^= inner_rows_[static_cast<std::size_t>(b)];
    }
    out.append(block);
  }
  out.resize(n());
  return out;
}

BitVec GoodCode::encode(const BitVec& w) const {
  if (w.size() != k_) throw InputError("Spiel encode: message length " + std::to_string(w.size()) + " != k = " +
                                       std::to_string(k_));
  if (k_ == 0) return BitVec();
  if (!table_.empty()) return table_[w.get_bits(0, k_)];
  return encode_concat(w);
}

BitVec GoodCode::encode_uint(std::uint64_t w) const {
  if (k_ < 64 && (w >> k_) != 0) throw InputError("Spiel encode: message wider than k bits");
  if (!table_.empty()) return table_[w];
  return encode(BitVec::from_uint(w, k_));
}

BitVec GoodCode::decode(const BitVec& c) const {
  if (c.size() < k_) throw InputError("Spiel decode: word shorter than k");
  return c.slice(0, k_);
}

bool GoodCode::is_member(const BitVec& c) const {
  if (c.size() != n()) throw InputError("Spiel membership: word length must be 100k");
  if (k_ == 0) return true;
  if (!table_.empty()) return table_[c.get_bits(0, k_)] == c;
  return encode(decode(c)) == c;
}

std::vector<std::uint64_t> GoodCode::column_masks() const {
  if (k_ > 64) throw CapabilityError("column masks need k <= 64");
  std::vector<std::uint64_t> cols(n(), 0);
  for (std::size_t i = 0; i < k_; ++i) {
    const BitVec cw = encode_uint(std::uint64_t{1} << i);
    for (std::size_t j = 0; j < n(); ++j) {
      if (cw.get(j)) cols[j] |= std::uint64_t{1} << i;
    }
  }
  return cols;
}

bool GoodCode::same_code(const GoodCode& o) const {
  return k_ == o.k_ && seed_ == o.seed_ && method_ == o.method_ && certified_ == o.certified_ &&
         rows_ == o.rows_ && outer_n_ == o.outer_n_ && inner_n_ == o.inner_n_ && inner_rows_ == o.inner_rows_ &&
         inner_d_ == o.inner_d_;
}

BitVec spiel_encode(const GoodCode& code, const BitVec& w) { return code.encode(w); }
BitVec spiel_decode(const GoodCode& code, const BitVec& c) { return code.decode(c); }
bool spiel_membership(const GoodCode& code, const BitVec& c) { return code.is_member(c); }

BitVec spiel_of_function(const GoodCode& code, const FunctionTable& f) {
  if (f.values.size() != f.field.size()) throw InputError("Spiel of a function needs the full table");
  if (code.k() != f.field.t()) throw ParameterError("Spiel code length must equal t");
  BitVec out;
  for (std::uint64_t v : f.values) out.append(code.encode_uint(v));
  return out;
}

std::shared_ptr<const GoodCode> SpielFamily::get(std::size_t k) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = cache_[k];
  if (!slot) slot = std::make_shared<const GoodCode>(GoodCode::generate(k, derive_seed(master_, k)));
  return slot;
}

}  // namespace pcuss
