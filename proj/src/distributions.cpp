#include "pcuss/distributions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <thread>
#include <unordered_map>

#include "pcuss/error.hpp"
#include "pcuss/gf2.hpp"

namespace pcuss {

std::string to_string(RestrictionMethod m) {
  switch (m) {
    case RestrictionMethod::Auto: return "auto";
    case RestrictionMethod::ExactRank: return "exact-rank";
    case RestrictionMethod::ExactEnumeration: return "exact-enumeration";
    case RestrictionMethod::Statistical: return "statistical";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Indistinguishable: return "indistinguishable";
    case Verdict::Distinguishable: return "distinguishable";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

BitVec sample_dyes(const LevelParams& params, const BitVec& w, Rng& rng) {
  return pcuss_encode(params, w, rng).bits;
}

NoSample sample_dno_full(const LevelParams& params, Rng& rng) {
  NoSample s;
  const unsigned ell = params.ell();
  if (ell == 0) {
    s.bits = rng.bitvec(params.m()[0]);
    return s;
  }
  const LevelSpec& L = params.level(ell);
  s.lambda.reserve(L.outside.size());
  s.blocks.reserve(L.outside.size());
  for (std::size_t j = 0; j < L.outside.size(); ++j) {
    const std::uint64_t lam = rng.below(L.field.size());
    Encoding e = encode_level(params, ell - 1, lam, rng);
    s.lambda.push_back(lam);
    s.bits.append(e.bits);
    s.blocks.push_back(*e.witness);
  }
  return s;
}

BitVec sample_dno(const LevelParams& params, Rng& rng) { return sample_dno_full(params, rng).bits; }

double statistical_threshold(std::size_t q, std::uint64_t samples) {
  return 3.0 * std::sqrt(std::ldexp(1.0, static_cast<int>(q)) / static_cast<double>(samples));
}

namespace {

void check_query_set(const LevelParams& params, const std::vector<std::size_t>& Q) {
  const std::uint64_t m = params.m()[params.ell()];
  std::vector<std::size_t> s = Q;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InputError("query set has repeated positions");
  if (!s.empty() && s.back() >= m) throw InputError("query position outside the codeword");
}

// Touched blocks of a level-1 codeword: block index -> local positions.
std::map<std::size_t, std::vector<std::size_t>> split_blocks(const LevelParams& params,
                                                             const std::vector<std::size_t>& Q) {
  const std::uint64_t blk = params.m()[params.ell() - 1];
  std::map<std::size_t, std::vector<std::size_t>> out;
  for (std::size_t q : Q) out[q / blk].push_back(q % blk);
  return out;
}

// Draws v|_Q under D_yes(w) and D_no. Pattern bit i is v[Q[i]].
class RestrictedSampler {
 public:
  RestrictedSampler(const LevelParams& params, const BitVec& w, const std::vector<std::size_t>& Q)
      : params_(params), w_(w), Q_(Q) {
    ell_ = params.ell();
    if (ell_ > 1) return;
    rows_ = params.base().rows();
    k0_ = params.k(0);
    if (ell_ == 0) {
      secret_ = w.size() ? w.get_bits(0, w.size()) : 0;
      return;
    }
    const LevelSpec& L = params.level(1);
    nodes_ = constrained_nodes(L.field, L.H);
    for (const auto& [j, local] : split_blocks(params, Q)) {
      Block b;
      b.coeffs = lagrange_coefficients(L.field, nodes_, L.outside[j]);
      for (std::size_t p : local) b.rows.push_back(rows_[p]);
      for (std::size_t i = 0; i < Q.size(); ++i) {
        if (Q[i] / params.m()[0] == j) b.slots.push_back(static_cast<unsigned>(i));
      }
      blocks_.push_back(std::move(b));
    }
  }

  std::uint64_t yes(Rng& rng) {
    if (ell_ == 0) return base_pattern(rows_index_all(), secret_, rng);
    if (ell_ > 1) return extract(sample_dyes(params_, w_, rng));
    const LevelSpec& L = params_.level(1);
    std::vector<std::uint64_t> ys(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) ys[i] = i < L.k ? w_.get(i) : rng.below(L.field.size());
    std::uint64_t out = 0;
    for (const Block& b : blocks_) {
      std::uint64_t g = 0;
      for (std::size_t i = 0; i < ys.size(); ++i) g ^= L.field.mul(b.coeffs[i], ys[i]);
      out |= block_pattern(b, g, rng);
    }
    return out;
  }

  std::uint64_t no(Rng& rng) {
    if (ell_ == 0) return rng.bits(static_cast<unsigned>(Q_.size()));
    if (ell_ > 1) return extract(sample_dno(params_, rng));
    const LevelSpec& L = params_.level(1);
    std::uint64_t out = 0;
    for (const Block& b : blocks_) out |= block_pattern(b, rng.below(L.field.size()), rng);
    return out;
  }

 private:
  struct Block {
    std::vector<std::uint64_t> coeffs;
    std::vector<std::uint64_t> rows;
    std::vector<unsigned> slots;
  };

  const std::vector<std::uint64_t>& rows_index_all() {
    if (q_rows_.empty()) {
      for (std::size_t q : Q_) q_rows_.push_back(rows_[q]);
    }
    return q_rows_;
  }

  std::uint64_t base_pattern(const std::vector<std::uint64_t>& rows, std::uint64_t secret, Rng& rng) const {
    const std::uint64_t u = secret | (rng.bits(static_cast<unsigned>(2 * k0_)) << k0_);
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) out |= static_cast<std::uint64_t>(parity64(rows[i] & u)) << i;
    return out;
  }

  std::uint64_t block_pattern(const Block& b, std::uint64_t secret, Rng& rng) const {
    const std::uint64_t local = base_pattern(b.rows, secret, rng);
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < b.slots.size(); ++i) out |= ((local >> i) & 1) << b.slots[i];
    return out;
  }

  std::uint64_t extract(const BitVec& v) const {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < Q_.size(); ++i) out |= std::uint64_t{v.get(Q_[i])} << i;
    return out;
  }

  const LevelParams& params_;
  BitVec w_;
  std::vector<std::size_t> Q_;
  unsigned ell_ = 0;
  std::size_t k0_ = 0;
  std::uint64_t secret_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::uint64_t> q_rows_;
  std::vector<std::uint64_t> nodes_;
  std::vector<Block> blocks_;
};

RestrictionTestReport statistical(const LevelParams& params, const BitVec& w, const std::vector<std::size_t>& Q,
                                  const RestrictionOptions& opts) {
  if (Q.size() > 20) throw CapabilityError("statistical test needs |Q| <= 20");
  if (opts.samples == 0) throw ParameterError("statistical test needs at least one sample");
  constexpr unsigned kChunks = 16;
  const std::size_t cells = std::size_t{1} << Q.size();
  std::vector<std::vector<std::uint32_t>> yes(kChunks), no(kChunks);
  auto work = [&](unsigned c) {
    RestrictedSampler sampler(params, w, Q);
    Rng rng(derive_seed(opts.seed, c));
    yes[c].assign(cells, 0);
    no[c].assign(cells, 0);
    const std::uint64_t begin = opts.samples * c / kChunks;
    const std::uint64_t end = opts.samples * (c + 1) / kChunks;
    for (std::uint64_t i = begin; i < end; ++i) {
      ++yes[c][sampler.yes(rng)];
      ++no[c][sampler.no(rng)];
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, kChunks);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (unsigned c = t; c < kChunks; c += threads) work(c);
    });
  }
  for (auto& th : pool) th.join();

  std::uint64_t diff = 0;
  for (std::size_t x = 0; x < cells; ++x) {
    std::int64_t a = 0, b = 0;
    for (unsigned c = 0; c < kChunks; ++c) {
      a += yes[c][x];
      b += no[c][x];
    }
    diff += static_cast<std::uint64_t>(std::llabs(a - b));
  }
  RestrictionTestReport r;
  r.Q = Q;
  r.method = RestrictionMethod::Statistical;
  r.samples = opts.samples;
  r.tv_estimate = Fraction(diff, 2 * opts.samples);
  r.threshold = statistical_threshold(Q.size(), opts.samples);
  r.verdict = r.tv_estimate.value() <= r.threshold ? Verdict::Indistinguishable : Verdict::Distinguishable;
  return r;
}

RestrictionTestReport level0_rank(const LevelParams& params, const std::vector<std::size_t>& Q) {
  const HardCodeSpec& A = params.base();
  const auto tail = A.tail_rows();
  std::vector<std::uint64_t> sub;
  for (std::size_t q : Q) sub.push_back(tail[q]);
  const unsigned rk = gf2::rank(sub);
  if (Q.size() > 62) throw CapabilityError("exact rank test needs |Q| <= 62");
  RestrictionTestReport r;
  r.Q = Q;
  r.method = RestrictionMethod::ExactRank;
  // D_yes|_Q is uniform on a coset of dimension rk; D_no|_Q is uniform.
  const std::uint64_t all = std::uint64_t{1} << Q.size();
  r.tv_estimate = Fraction(all - (std::uint64_t{1} << rk), all);
  r.verdict = rk == Q.size() ? Verdict::Indistinguishable : Verdict::Distinguishable;
  r.detail = "rank " + std::to_string(rk) + " of " + std::to_string(Q.size());
  return r;
}

RestrictionTestReport level0_enumeration(const LevelParams& params, const BitVec& w,
                                         const std::vector<std::size_t>& Q) {
  const HardCodeSpec& A = params.base();
  const unsigned tail_bits = 2 * A.k;
  if (tail_bits > 24 || Q.size() > 24) throw CapabilityError("exact enumeration needs 2k <= 24 and |Q| <= 24");
  const auto rows = A.rows();
  const std::uint64_t secret = w.size() ? w.get_bits(0, w.size()) : 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << tail_bits); ++t) {
    const std::uint64_t u = secret | (t << A.k);
    std::uint64_t pat = 0;
    for (std::size_t i = 0; i < Q.size(); ++i) pat |= static_cast<std::uint64_t>(parity64(rows[Q[i]] & u)) << i;
    ++counts[pat];
  }
  const std::uint64_t cells = std::uint64_t{1} << Q.size();
  const std::uint64_t total = std::uint64_t{1} << tail_bits;
  // sum |c / total - 1 / cells| over all cells, scaled by total * cells.
  std::uint64_t num = (cells - counts.size()) * total;
  for (const auto& [pat, c] : counts) {
    const std::uint64_t a = c * cells;
    num += a > total ? a - total : total - a;
  }
  RestrictionTestReport r;
  r.Q = Q;
  r.method = RestrictionMethod::ExactEnumeration;
  r.tv_estimate = Fraction(num, 2 * total * cells);
  r.verdict = num == 0 ? Verdict::Indistinguishable : Verdict::Distinguishable;
  return r;
}

}  // namespace

bool level1_exact_regime(const LevelParams& params, const std::vector<std::size_t>& Q, std::string* why) {
  if (params.ell() != 1) throw PreconditionError("level-1 argument needs ell = 1");
  const LevelSpec& L = params.level(1);
  const auto blocks = split_blocks(params, Q);
  const std::size_t free_nodes = L.field.size() / 2 + 1 - L.k;
  if (blocks.size() <= free_nodes) {
    if (why) *why = std::to_string(blocks.size()) + " touched blocks <= " + std::to_string(free_nodes) + " free nodes";
    return true;
  }
  const BitVec zero(params.k(0));
  for (const auto& [j, local] : blocks) {
    if (!base_restricted_uniformity(params.base(), zero, local)) {
      if (why) *why = "block " + std::to_string(j) + " fails the rank test";
      return false;
    }
  }
  if (why) *why = "every touched block is rank-uniform";
  return true;
}

RestrictionTestReport restricted_equality(const LevelParams& params, const BitVec& w, const std::vector<std::size_t>& Q,
                                          const RestrictionOptions& opts) {
  if (w.size() != params.k()) throw InputError("restricted_equality: |w| != k");
  check_query_set(params, Q);
  const unsigned ell = params.ell();
  switch (opts.method) {
    case RestrictionMethod::Statistical:
      return statistical(params, w, Q, opts);
    case RestrictionMethod::ExactEnumeration:
      if (ell != 0) throw CapabilityError("exact enumeration is available at ell = 0 only");
      return level0_enumeration(params, w, Q);
    case RestrictionMethod::ExactRank:
    case RestrictionMethod::Auto:
      break;
  }
  if (ell == 0) return level0_rank(params, Q);
  if (ell == 1) {
    std::string why;
    if (level1_exact_regime(params, Q, &why)) {
      RestrictionTestReport r;
      r.Q = Q;
      r.method = RestrictionMethod::ExactRank;
      r.tv_estimate = Fraction(0, 1);
      r.verdict = Verdict::Indistinguishable;
      r.detail = why;
      return r;
    }
    if (opts.method == RestrictionMethod::ExactRank) throw CapabilityError("exact argument does not apply: " + why);
  } else if (opts.method == RestrictionMethod::ExactRank) {
    throw CapabilityError("exact rank test is available at ell <= 1 only");
  }
  return statistical(params, w, Q, opts);
}

namespace {

std::vector<std::uint64_t> base_codewords(const HardCodeSpec& A, std::uint64_t secret, bool all_secrets) {
  const unsigned free_bits = all_secrets ? 3 * A.k : 2 * A.k;
  std::vector<std::uint64_t> out;
  out.reserve(std::size_t{1} << free_bits);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << free_bits); ++x) {
    out.push_back(A.apply(all_secrets ? x : (secret | (x << A.k))));
  }
  return out;
}

}  // namespace

Fraction base_distance_to_all(const HardCodeSpec& spec, const BitVec& v) {
  if (v.size() != spec.n()) throw InputError("distance: length mismatch");
  if (spec.k > 6) throw CapabilityError("exhaustive distance needs k <= 6");
  const std::uint64_t x = v.get_bits(0, v.size());
  unsigned best = spec.n();
  for (std::uint64_t c : base_codewords(spec, 0, true)) best = std::min(best, unsigned(std::popcount(c ^ x)));
  return Fraction(best, spec.n());
}

DistanceReport min_distance_check(const LevelParams& params, const BitVec& w, const BitVec& w2, std::uint64_t samples,
                                  std::uint64_t seed) {
  if (w.size() != params.k() || w2.size() != params.k()) throw InputError("min_distance_check: |w| != k");
  const unsigned ell = params.ell();
  DistanceReport r;
  r.prediction = std::ldexp(1.0, -2 * static_cast<int>(ell + 1));
  const std::uint64_t m = params.m()[ell];
  if (w == w2) {
    r.value = Fraction(0, 1);
    r.exact = true;
    return r;
  }
  if (ell == 0 && params.k() <= 4) {
    const HardCodeSpec& A = params.base();
    const auto a = base_codewords(A, w.get_bits(0, w.size()), false);
    const auto b = base_codewords(A, w2.get_bits(0, w2.size()), false);
    unsigned best = A.n();
    for (std::uint64_t x : a) {
      for (std::uint64_t y : b) best = std::min(best, unsigned(std::popcount(x ^ y)));
    }
    r.value = Fraction(best, A.n());
    r.exact = true;
    r.samples = a.size() * b.size();
    return r;
  }
  Rng rng(seed);
  std::size_t best = m;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const BitVec x = sample_dyes(params, w, rng);
    const BitVec y = sample_dyes(params, w2, rng);
    best = std::min(best, hamming_distance(x, y));
  }
  r.value = Fraction(best, m);
  r.samples = samples;
  return r;
}

Fraction dno_distance_lower_bound(const LevelParams& params, const NoSample& sample) {
  if (params.ell() != 1) throw CapabilityError("distance lower bound supports ell = 1");
  const LevelSpec& L = params.level(1);
  if (sample.lambda.size() != L.outside.size()) throw InputError("sample does not match the parameters");
  const HardCodeSpec& A = params.base();
  const std::uint64_t weight = A.ensemble_cert.num * A.n() / A.ensemble_cert.den;
  const std::size_t dim = L.field.size() / 2 + 1;
  const std::size_t n_out = L.outside.size();
  if (n_out <= dim) return Fraction(0, 1);
  // Blocks where the nearest low-degree g differs from lambda carry codewords
  // of distinct secrets.
  const std::size_t radius = (n_out - dim) / 2;
  std::size_t disagree = radius + 1;
  if (auto p = berlekamp_welch(L.field, L.outside, sample.lambda, dim, radius)) {
    disagree = 0;
    for (std::size_t j = 0; j < n_out; ++j) disagree += p->eval(L.outside[j]) != sample.lambda[j];
  }
  return Fraction(disagree * weight, params.m()[1]);
}

FarReport far_from_all_check(const LevelParams& params, std::uint64_t trials, Fraction threshold, std::uint64_t seed) {
  const unsigned ell = params.ell();
  FarReport r;
  r.trials = trials;
  r.min_seen = Fraction(1, 1);
  Rng rng(seed);
  auto tally = [&](Fraction d) {
    if (d >= threshold) ++r.far;
    r.min_seen = std::min(r.min_seen, d);
  };
  if (ell == 0) {
    const HardCodeSpec& A = params.base();
    if (A.k > 6) throw CapabilityError("exhaustive distance needs k <= 6");
    r.exact = true;
    const auto code = base_codewords(A, 0, true);
    for (std::uint64_t i = 0; i < trials; ++i) {
      const std::uint64_t x = rng.bits(A.n());
      unsigned best = A.n();
      for (std::uint64_t c : code) best = std::min(best, unsigned(std::popcount(c ^ x)));
      tally(Fraction(best, A.n()));
    }
  } else if (ell == 1) {
    for (std::uint64_t i = 0; i < trials; ++i) tally(dno_distance_lower_bound(params, sample_dno_full(params, rng)));
  } else {
    throw CapabilityError("far_from_all_check supports ell <= 1");
  }
  r.rate = trials ? static_cast<double>(r.far) / static_cast<double>(trials) : 0;
  return r;
}

}  // namespace pcuss
