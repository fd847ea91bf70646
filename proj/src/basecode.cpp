#include "pcuss/basecode.hpp"

#include "pcuss/error.hpp"
#include "pcuss/gf2.hpp"

namespace pcuss {

namespace {

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

void fill_certificates(HardCodeSpec& spec, const CertificationReport& r) {
  spec.dist_cert = r.distance;
  spec.dual_cert = r.dual_distance;
  spec.ensemble_cert = r.ensemble_distance;
}

}  // namespace

std::vector<std::uint64_t> HardCodeSpec::rows() const { return gf2::transpose(columns, n()); }

std::vector<std::uint64_t> HardCodeSpec::tail_rows() const {
  const std::vector<std::uint64_t> tail(columns.begin() + k, columns.end());
  return gf2::transpose(tail, n());
}

std::uint64_t HardCodeSpec::apply(std::uint64_t u) const {
  std::uint64_t v = 0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if ((u >> j) & 1) v ^= columns[j];
  }
  return v;
}

CertificationReport certify_hardcode(const HardCodeSpec& spec) {
  const unsigned k = spec.k;
  if (k == 0) throw ParameterError("hard code needs k >= 1");
  if (k > kMaxHardCodeK) throw CapabilityError("hard-code certification by enumeration needs k <= 12");
  if (spec.columns.size() != 3 * k) throw InputError("hard code needs 3k columns");
  const unsigned n = 4 * k;
  CertificationReport r;
  r.k = k;
  r.rank = gf2::rank(spec.columns);

  const gf2::SpanWeights sw = gf2::span_weights(spec.columns, k);
  r.min_weight = sw.min_all;
  r.ensemble_min_weight = sw.min_head;

  // Dual of Span{v_(k+1)..v_3k}: vectors orthogonal to every tail column.
  const std::vector<std::uint64_t> tail(spec.columns.begin() + k, spec.columns.end());
  const auto dual_basis = gf2::nullspace(tail, n);
  r.dual_min_weight = dual_basis.empty() ? n + 1 : gf2::min_weight_span(dual_basis);
  if (r.dual_min_weight > n) r.dual_min_weight = n;

  r.distance = Fraction(r.min_weight, n);
  r.dual_distance = Fraction(r.dual_min_weight, n);
  r.ensemble_distance = Fraction(r.ensemble_min_weight, n);
  r.distance_ok = r.distance >= Fraction(1, 30);
  r.dual_ok = r.dual_distance >= Fraction(1, 10);
  r.ensemble_ok = r.ensemble_distance > Fraction(1, 10);
  r.vacuous = n < 30;
  return r;
}

HardCodeSpec hardcode_from_columns(unsigned k, std::vector<std::uint64_t> columns, std::uint64_t seed) {
  HardCodeSpec spec;
  spec.k = k;
  spec.columns = std::move(columns);
  spec.seed = seed;
  fill_certificates(spec, certify_hardcode(spec));
  return spec;
}

HardCodeSpec hardcode_generate(unsigned k, Rng& rng, const HardCodeOptions& opts) {
  if (k < 3) throw ParameterError("hard code generation needs k >= 3");
  if (k > kMaxHardCodeK) throw CapabilityError("hard code generation needs k <= 12");
  HardCodeSpec spec;
  spec.k = k;
  spec.seed = rng.seed();
  const std::uint64_t mask = low_mask(4 * k);
  for (unsigned attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    spec.columns.assign(3 * k, 0);
    for (auto& c : spec.columns) c = rng.next() & mask;
    spec.attempts = attempt;
    const CertificationReport r = certify_hardcode(spec);
    if (r.passed(opts.require_ensemble_distance)) {
      fill_certificates(spec, r);
      return spec;
    }
  }
  throw GenerationError("hard code: certification failed in all " + std::to_string(opts.max_attempts) +
                        " attempts at k = " + std::to_string(k));
}

BaseEncoding base_encode(const HardCodeSpec& spec, const BitVec& w, Rng& rng) {
  if (w.size() != spec.k) throw InputError("base encode: |w| != k");
  const std::uint64_t tail = rng.bits(2 * spec.k);
  BaseEncoding e;
  e.u = w.get_bits(0, spec.k) | (tail << spec.k);
  e.bits = BitVec::from_uint(spec.apply(e.u), spec.n());
  return e;
}

bool base_membership(const HardCodeSpec& spec, const BitVec& w, const BitVec& v) {
  if (w.size() != spec.k || v.size() != spec.n()) throw InputError("base membership: length mismatch");
  const std::uint64_t target = v.get_bits(0, spec.n()) ^ spec.apply(w.get_bits(0, spec.k));
  return gf2::solve(spec.tail_rows(), BitVec::from_uint(target, spec.n())).has_value();
}

bool base_restricted_uniformity(const HardCodeSpec& spec, const BitVec& w, const std::vector<std::size_t>& Q) {
  (void)w;  // The rank condition does not depend on the secret.
  const auto tail = spec.tail_rows();
  std::vector<std::uint64_t> sub;
  sub.reserve(Q.size());
  for (std::size_t q : Q) {
    if (q >= spec.n()) throw InputError("restriction index out of range");
    sub.push_back(tail[q]);
  }
  return gf2::rank(sub) == Q.size();
}

}  // namespace pcuss
