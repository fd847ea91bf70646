#include "pcuss/adversary.hpp"

#include "pcuss/error.hpp"

namespace pcuss {

const std::vector<ProofStrategy>& all_strategies() {
  static const std::vector<ProofStrategy> all{ProofStrategy::Zeros,         ProofStrategy::Ones,
                                              ProofStrategy::Random,        ProofStrategy::NearestHonest,
                                              ProofStrategy::Flip05,        ProofStrategy::Flip20,
                                              ProofStrategy::Flip50};
  return all;
}

std::string to_string(ProofStrategy s) {
  switch (s) {
    case ProofStrategy::Zeros: return "zeros";
    case ProofStrategy::Ones: return "ones";
    case ProofStrategy::Random: return "random";
    case ProofStrategy::NearestHonest: return "nearest-honest";
    case ProofStrategy::Flip05: return "nearest-honest-flip-0.05";
    case ProofStrategy::Flip20: return "nearest-honest-flip-0.2";
    case ProofStrategy::Flip50: return "nearest-honest-flip-0.5";
  }
  return "?";
}

double flip_rate(ProofStrategy s) {
  switch (s) {
    case ProofStrategy::Flip05: return 0.05;
    case ProofStrategy::Flip20: return 0.2;
    case ProofStrategy::Flip50: return 0.5;
    default: return 0;
  }
}

Encoding nearest_member(const LevelParams& params, const NoSample& sample, const BitVec& w, Rng& rng) {
  const unsigned ell = params.ell();
  if (ell == 0) throw CapabilityError("nearest member needs ell >= 1");
  const LevelSpec& L = params.level(ell);
  if (w.size() != L.k) throw InputError("nearest member: |w| != k");
  const std::vector<std::uint64_t> nodes = constrained_nodes(L.field, L.H);
  std::vector<std::uint64_t> ys;
  for (std::size_t i = 0; i < nodes.size(); ++i) ys.push_back(i < L.k ? w.get(i) : sample.lambda[i - L.k]);
  const Poly g = poly_interpolate(L.field, nodes, ys);
  std::vector<Witness> children;
  children.reserve(L.outside.size());
  for (std::size_t j = 0; j < L.outside.size(); ++j) {
    const std::uint64_t val = g.eval(L.outside[j]);
    if (val == sample.lambda[j]) {
      children.push_back(sample.blocks[j]);
    } else {
      children.push_back(*encode_level(params, ell - 1, val, rng).witness);
    }
  }
  return assemble_level(params, ell, w.size() ? w.get_bits(0, w.size()) : 0, g.coeffs(), std::move(children));
}

SoundnessInstance soundness_instance(const LevelParams& params, ProofStrategy strategy, Rng& rng) {
  SoundnessInstance inst;
  const NoSample no = sample_dno_full(params, rng);
  inst.v = no.bits;
  inst.w = rng.bitvec(params.k());
  inst.tau = pcuss_value(params, inst.w);
  const std::size_t z = params.z()[params.ell()];
  switch (strategy) {
    case ProofStrategy::Zeros:
      inst.proof = std::make_shared<ConstSource>(z, false);
      break;
    case ProofStrategy::Ones:
      inst.proof = std::make_shared<ConstSource>(z, true);
      break;
    case ProofStrategy::Random:
      inst.proof = std::make_shared<RandomSource>(z, rng.next());
      break;
    default: {
      const Encoding near = nearest_member(params, no, inst.w, rng);
      SourcePtr honest = pcuss_build_proof(params, near);
      const double eta = flip_rate(strategy);
      inst.proof = eta > 0 ? std::make_shared<FlipSource>(honest, eta, rng.next()) : honest;
    }
  }
  return inst;
}

}  // namespace pcuss
