#pragma once

#include <string>
#include <vector>

#include "pcuss/distributions.hpp"

namespace pcuss {

enum class ProofStrategy { Zeros, Ones, Random, NearestHonest, Flip05, Flip20, Flip50 };

const std::vector<ProofStrategy>& all_strategies();
std::string to_string(ProofStrategy s);
double flip_rate(ProofStrategy s);

struct SoundnessInstance {
  BitVec v;
  BitVec w;
  BitVec tau;
  SourcePtr proof;
};

// Honest encoding of w closest to a level-ell D_no sample: g is interpolated
// through w on H and lambda on the first free nodes; blocks where g agrees
// with lambda are kept.
Encoding nearest_member(const LevelParams& params, const NoSample& sample, const BitVec& w, Rng& rng);

// D_no input, uniformly random claimed value, and a proof chosen by the
// strategy.
SoundnessInstance soundness_instance(const LevelParams& params, ProofStrategy strategy, Rng& rng);

}  // namespace pcuss
