#include "pcuss/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>

#include "pcuss/adversary.hpp"
#include "pcuss/artifact.hpp"
#include "pcuss/distributions.hpp"
#include "pcuss/error.hpp"
#include "pcuss/parallel.hpp"
#include "pcuss/separation.hpp"

namespace pcuss {

namespace {

const std::set<std::string> kExperiments{"certify-base", "completeness",        "soundness",
                                         "indistinguishability", "lengths", "separation"};

json frac_json(const Fraction& f) { return f.to_string(); }

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

LevelParams level_params(const ExperimentConfig& c, unsigned ell, const std::string& backend, bool ensemble = true) {
  ParamsRequest req;
  req.ell = ell;
  req.t = c.t;
  req.k = ell == 0 ? c.t : c.k;
  req.backend = backend;
  req.seed = c.seeds.front();
  req.require_ensemble_distance = ensemble;
  return derive_params(req);
}

void fail(ExperimentResult& r, std::string what) {
  r.pass = false;
  r.failures.push_back(std::move(what));
}

// ---------------------------------------------------------------------------

ExperimentResult certify_base(const ExperimentConfig& c) {
  ExperimentResult res;
  std::vector<json> recs(c.seeds.size());
  parallel_for(c.seeds.size(), c.threads, [&](std::uint64_t i) {
    json r;
    r["seed"] = c.seeds[i];
    r["k"] = c.k;
    try {
      Rng rng(c.seeds[i]);
      HardCodeOptions opts;
      opts.require_ensemble_distance = c.require_ensemble_distance;
      const HardCodeSpec spec = hardcode_generate(static_cast<unsigned>(c.k), rng, opts);
      const CertificationReport rep = certify_hardcode(spec);
      r["success"] = true;
      r["attempts"] = spec.attempts;
      r["rank"] = rep.rank;
      r["min_weight"] = rep.min_weight;
      r["dual_min_weight"] = rep.dual_min_weight;
      r["ensemble_min_weight"] = rep.ensemble_min_weight;
      r["distance"] = frac_json(rep.distance);
      r["dual_distance"] = frac_json(rep.dual_distance);
      r["ensemble_distance"] = frac_json(rep.ensemble_distance);
      r["distance_ok"] = rep.distance_ok;
      r["dual_ok"] = rep.dual_ok;
      r["ensemble_ok"] = rep.ensemble_ok;
      r["vacuous"] = rep.vacuous;
      r["certified"] = rep.passed(c.require_ensemble_distance);
      r["content_hash"] = artifact::git_blob_hash(artifact::write_hardcode(spec));
    } catch (const GenerationError& e) {
      r["success"] = false;
      r["error"] = e.what();
    }
    recs[i] = std::move(r);
  });
  std::uint64_t ok = 0;
  for (const json& r : recs) {
    if (r["success"].get<bool>()) {
      ++ok;
      if (!r["certified"].get<bool>()) fail(res, "seed " + std::to_string(r["seed"].get<std::uint64_t>()) +
                                                     " produced an uncertified code");
    }
  }
  if (ok * 10 < 9 * c.seeds.size()) fail(res, "fewer than 9/10 seeds succeeded");
  res.report["summary"] = {{"seeds", c.seeds.size()}, {"successes", ok}};
  res.records = std::move(recs);
  return res;
}

// ---------------------------------------------------------------------------

ExperimentResult completeness(const ExperimentConfig& c) {
  ExperimentResult res;
  for (unsigned ell : c.levels) {
    for (std::size_t b = 0; b < c.backends.size(); ++b) {
      const LevelParams P = level_params(c, ell, c.backends[b]);
      const std::uint64_t master = derive_seed(c.seeds.front(), 64 * ell + b);
      std::vector<VerdictReport> out(c.trials);
      parallel_for(c.trials, c.threads, [&](std::uint64_t i) {
        Rng rng(derive_seed(master, i));
        const BitVec w = rng.bitvec(P.k());
        const Encoding e = pcuss_encode(P, w, rng);
        const ProofPtr proof = pcuss_build_proof(P, e);
        QueryOracle v(e.bits), tau(pcuss_value(P, w)), pi(std::static_pointer_cast<const BitSource>(proof));
        out[i] = pcuss_verify(P, v, tau, pi, c.eps, c.delta, rng.next());
      });
      std::uint64_t acc = 0, maxq = 0;
      double sum = 0;
      for (const VerdictReport& r : out) {
        acc += r.accept;
        const std::uint64_t q = r.input_queries + r.proof_queries + r.value_queries;
        maxq = std::max(maxq, q);
        sum += static_cast<double>(q);
      }
      json r;
      r["level"] = ell;
      r["backend"] = c.backends[b];
      r["trials"] = c.trials;
      r["accepted"] = acc;
      r["acceptance_rate"] = c.trials ? double(acc) / double(c.trials) : 0.0;
      r["mean_queries"] = c.trials ? sum / double(c.trials) : 0.0;
      r["max_queries"] = maxq;
      r["m"] = P.m()[ell];
      r["z"] = P.z()[ell];
      r["params_digest"] = artifact::params_digest(P);
      if (acc != c.trials) {
        fail(res, "level " + std::to_string(ell) + " " + c.backends[b] + ": " + std::to_string(c.trials - acc) +
                      " honest rejections");
      }
      res.records.push_back(std::move(r));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

ExperimentResult soundness(const ExperimentConfig& c) {
  ExperimentResult res;
  const unsigned ell = c.levels.front();
  const LevelParams P = level_params(c, ell, c.backends.front());
  const auto& strategies = all_strategies();
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    const std::uint64_t master = derive_seed(c.seeds.front(), 0x50 + s);
    std::vector<char> rejected(c.trials);
    parallel_for(c.trials, c.threads, [&](std::uint64_t i) {
      Rng rng(derive_seed(master, i));
      const SoundnessInstance inst = soundness_instance(P, strategies[s], rng);
      QueryOracle v(inst.v), tau(inst.tau), pi(inst.proof);
      rejected[i] = !pcuss_verify(P, v, tau, pi, c.eps, c.delta, rng.next()).accept;
    });
    const std::uint64_t rej = static_cast<std::uint64_t>(std::count(rejected.begin(), rejected.end(), 1));
    json r;
    r["strategy"] = to_string(strategies[s]);
    r["level"] = ell;
    r["trials"] = c.trials;
    r["rejected"] = rej;
    r["rejection_rate"] = c.trials ? double(rej) / double(c.trials) : 0.0;
    r["rejection_lower_99"] = wilson_lower_99(rej, c.trials);
    r["pass"] = r["rejection_lower_99"].get<double>() > 0.25;
    if (!r["pass"].get<bool>()) fail(res, "strategy " + to_string(strategies[s]) + " rejection bound <= 0.25");
    res.records.push_back(std::move(r));
  }
  res.report["params_digest"] = artifact::params_digest(P);
  return res;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> random_subset(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(count);
  return all;
}

json restriction_record(const std::string& kind, const RestrictionTestReport& r, std::size_t blocks) {
  json j;
  j["kind"] = kind;
  j["q_size"] = r.Q.size();
  j["blocks"] = blocks;
  j["method"] = to_string(r.method);
  j["tv"] = frac_json(r.tv_estimate);
  j["tv_value"] = r.tv_estimate.value();
  j["threshold"] = r.threshold;
  j["samples"] = r.samples;
  j["verdict"] = to_string(r.verdict);
  return j;
}

ExperimentResult indistinguishability(const ExperimentConfig& c) {
  ExperimentResult res;
  const unsigned ell = c.levels.front();
  if (ell == 0) {
    ParamsRequest req;
    req.ell = 0;
    req.k = c.k;
    req.seed = c.seeds.front();
    req.require_ensemble_distance = false;
    const LevelParams P = derive_params(req);
    const HardCodeSpec& A = P.base();
    const std::size_t bound = A.dual_cert.num * A.n() / A.dual_cert.den;
    std::uint64_t sets = 0, failures = 0;
    // All Q with |Q| < dual weight, by bitmask.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << A.n()); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) >= bound) continue;
      std::vector<std::size_t> Q;
      for (unsigned i = 0; i < A.n(); ++i) {
        if ((mask >> i) & 1) Q.push_back(i);
      }
      ++sets;
      for (std::uint64_t w = 0; w < (std::uint64_t{1} << A.k); ++w) {
        RestrictionOptions o;
        o.method = RestrictionMethod::ExactRank;
        const auto rank = restricted_equality(P, BitVec::from_uint(w, A.k), Q, o);
        o.method = RestrictionMethod::ExactEnumeration;
        const auto enumr = restricted_equality(P, BitVec::from_uint(w, A.k), Q, o);
        if (rank.verdict != Verdict::Indistinguishable || enumr.verdict != Verdict::Indistinguishable) ++failures;
      }
    }
    json r;
    r["level"] = 0;
    r["k"] = A.k;
    r["q_bound_exclusive"] = bound;
    r["q_sets"] = sets;
    r["secrets"] = std::uint64_t{1} << A.k;
    r["failures"] = failures;
    res.records.push_back(r);
    if (failures) fail(res, std::to_string(failures) + " level-0 restriction failures");
    res.report["params_digest"] = artifact::params_digest(P);
    return res;
  }
  if (ell != 1) throw CapabilityError("indistinguishability suite supports ell <= 1");
  const LevelParams P = level_params(c, 1, "exhaustive");
  const LevelSpec& L = P.level(1);
  const std::size_t blk = P.m()[0];
  const std::size_t nblocks = L.outside.size();
  const std::size_t free_nodes = L.field.size() / 2 + 1 - L.k;
  const HardCodeSpec& A = P.base();
  const std::size_t dual_w = A.dual_cert.num * A.n() / A.dual_cert.den;
  Rng rng(derive_seed(c.seeds.front(), 0x1d));
  const BitVec w = rng.bitvec(P.k());

  struct Case {
    std::string kind;
    std::vector<std::size_t> Q;
    std::size_t blocks;
  };
  std::vector<Case> exact;
  for (std::size_t nb : {std::size_t{1}, std::size_t{4}, std::size_t{8}, std::size_t{16}, free_nodes}) {
    for (unsigned d = 0; d < c.q_draws; ++d) {
      Case cs{"exact-few-blocks", {}, nb};
      for (std::size_t b : random_subset(nblocks, nb, rng)) {
        for (std::size_t p : random_subset(blk, 1 + rng.below(blk), rng)) cs.Q.push_back(b * blk + p);
      }
      exact.push_back(std::move(cs));
    }
  }
  for (unsigned d = 0; d < c.q_draws; ++d) {
    Case cs{"exact-rank-all-blocks", {}, nblocks};
    for (std::size_t b = 0; b < nblocks; ++b) {
      for (std::size_t p : random_subset(blk, 1 + rng.below(dual_w - 1), rng)) cs.Q.push_back(b * blk + p);
    }
    exact.push_back(std::move(cs));
  }
  {
    Case cs{"exact-full-block", {}, 1};
    const std::size_t b = rng.below(nblocks);
    for (std::size_t p = 0; p < blk; ++p) cs.Q.push_back(b * blk + p);
    exact.push_back(std::move(cs));
  }
  std::uint64_t exact_fail = 0;
  for (const Case& cs : exact) {
    RestrictionOptions o;
    o.method = RestrictionMethod::ExactRank;
    RestrictionTestReport r;
    try {
      r = restricted_equality(P, w, cs.Q, o);
    } catch (const CapabilityError& e) {
      r.Q = cs.Q;
      r.method = RestrictionMethod::ExactRank;
      r.verdict = Verdict::Distinguishable;
    }
    if (r.verdict != Verdict::Indistinguishable) ++exact_fail;
    res.records.push_back(restriction_record(cs.kind, r, cs.blocks));
  }
  if (exact_fail) fail(res, std::to_string(exact_fail) + " exact-regime failures");

  std::uint64_t stat_fail = 0;
  for (unsigned size : c.q_sizes) {
    for (unsigned d = 0; d < c.q_draws; ++d) {
      const std::vector<std::size_t> Q = random_subset(P.m()[1], size, rng);
      RestrictionOptions o;
      o.method = RestrictionMethod::Statistical;
      o.samples = c.samples;
      o.seed = rng.next();
      o.threads = c.threads;
      const RestrictionTestReport r = restricted_equality(P, w, Q, o);
      if (r.verdict != Verdict::Indistinguishable) ++stat_fail;
      std::set<std::size_t> blocks;
      for (std::size_t q : Q) blocks.insert(q / blk);
      res.records.push_back(restriction_record("statistical", r, blocks.size()));
    }
  }
  if (stat_fail) fail(res, std::to_string(stat_fail) + " statistical-regime failures");
  res.report["summary"] = {{"exact_cases", exact.size()},
                           {"exact_failures", exact_fail},
                           {"statistical_cases", c.q_sizes.size() * c.q_draws},
                           {"statistical_failures", stat_fail}};
  res.report["params_digest"] = artifact::params_digest(P);
  return res;
}

// ---------------------------------------------------------------------------

constexpr unsigned kLengthExponent = 3;

ExperimentResult lengths(const ExperimentConfig& c) {
  ExperimentResult res;
  double C = 0;
  for (unsigned ell : c.levels) {
    for (const std::string& backend : c.backends) {
      const LevelParams P = level_params(c, ell, backend);
      const LengthRow row = length_row(P, kLengthExponent);
      Rng rng(derive_seed(c.seeds.front(), ell));
      const Encoding e = pcuss_encode(P, rng.bitvec(P.k()), rng);
      const ProofPtr proof = pcuss_build_proof(P, e);
      json r;
      r["level"] = ell;
      r["backend"] = backend;
      r["t"] = c.t;
      r["m"] = row.m;
      r["z"] = row.z;
      r["measured_m"] = e.bits.size();
      r["measured_z"] = proof->size();
      r["z_over_m"] = double(row.z) / double(row.m);
      r["z_model"] = row.z_model;
      r["log_iter_m"] = row.log_m;
      r["model_ratio"] = row.ratio;
      r["match"] = e.bits.size() == row.m && proof->size() == row.z;
      r["flags"] = P.flags();
      if (!r["match"].get<bool>()) fail(res, "measured lengths differ at level " + std::to_string(ell));
      C = std::max(C, row.ratio);
      res.records.push_back(std::move(r));
    }
  }
  // The fit must carry over to a larger field at level 1.
  ParamsRequest big;
  big.ell = 1;
  big.t = 18;
  big.k = c.k;
  big.arithmetic_only = true;
  const LengthRow row = length_row(derive_params(big), kLengthExponent);
  const double bound = C * double(row.m) * std::pow(row.log_m, kLengthExponent);
  json fit;
  fit["C"] = C;
  fit["c"] = kLengthExponent;
  fit["check_t"] = 18;
  fit["check_level"] = 1;
  fit["check_m"] = row.m;
  fit["check_z_model"] = row.z_model;
  fit["check_bound"] = bound;
  fit["holds"] = row.z_model <= bound;
  if (!fit["holds"].get<bool>()) fail(res, "fitted length bound fails at |F| = 2^18");
  res.report["fit"] = fit;
  return res;
}

// ---------------------------------------------------------------------------

ExperimentResult separation(const ExperimentConfig& c) {
  ExperimentResult res;
  SeparationConfig sc;
  sc.ell = c.levels.front();
  sc.t = c.t;
  sc.backend = c.backends.front();
  sc.eps = c.eps;
  sc.trials = c.trials;
  sc.far_trials = c.far_trials;
  sc.probes = c.probes;
  sc.seed = c.seeds.front();
  sc.enforce_guard = c.enforce_guard;
  sc.threads = c.threads;
  const SeparationReport rep = run_separation_experiment(sc);
  for (const FamilyResult& f : rep.families) {
    json r;
    r["family"] = f.name;
    r["trials"] = f.trials;
    r["accepted"] = f.accepted;
    r["acceptance_rate"] = f.accept_rate();
    r["copy_stage_rejects"] = f.copy_stage_rejects;
    r["mean_queries"] = f.mean_queries;
    r["max_queries"] = f.max_queries;
    r["eps"] = rep.eps;
    r["n"] = rep.layout.n;
    if (f.name == "member") {
      if (f.accepted != f.trials) fail(res, "member instances rejected");
    } else if (3 * (f.trials - f.accepted) < 2 * f.trials) {
      fail(res, "family " + f.name + " rejected below 2/3");
    }
    res.records.push_back(std::move(r));
  }
  const SeparationLayout& l = rep.layout;
  json lay = {{"ell", l.ell}, {"n", l.n}, {"z", l.z}, {"log_iter_n", l.log_n}, {"s", l.s}, {"partial", l.partial},
              {"N", l.N}};
  json red;
  red["tolerant_member_distance"] = frac_json(rep.tolerant_member_distance);
  red["tolerant_bound"] = frac_json(rep.tolerant_bound);
  red["proof_fraction"] = frac_json(l.proof_fraction());
  red["erased_fraction"] = frac_json(rep.erased_fraction);
  red["inverse_s_plus_1"] = frac_json(Fraction(1, l.s + 1));
  red["forwarding_probes"] = rep.forwarding_probes;
  red["forwarding_max"] = rep.forwarding_max;
  red["erasure_prefix_matches"] = rep.erasure_prefix_matches;
  red["far_instance_lower_bound"] = frac_json(rep.far_instance_lower_bound);
  red["eps1"] = frac_json(rep.eps1);
  if (rep.tolerant_member_distance > rep.tolerant_bound || l.proof_fraction() != rep.tolerant_bound) {
    fail(res, "tolerant reduction distance exceeds 1/(L+1)");
  }
  if (rep.forwarding_max > 1) fail(res, "a reduction query forwarded more than one query");
  if (!rep.erasure_prefix_matches) fail(res, "erasure and tolerant reductions disagree");
  res.report["layout"] = lay;
  res.report["reductions"] = red;
  res.report["flags"] = rep.flags;
  return res;
}

}  // namespace

double wilson_lower_99(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return 0;
  const double z = 2.326347874;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double den = 1 + z * z / n;
  const double centre = p + z * z / (2 * n);
  const double margin = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return std::max(0.0, (centre - margin) / den);
}

LengthRow length_row(const LevelParams& params, unsigned c) {
  LengthRow r;
  r.ell = params.ell();
  r.t = r.ell ? params.level(r.ell).t() : 0;
  r.m = params.m()[r.ell];
  r.z = params.z()[r.ell];
  r.z_model = params.z_model()[r.ell];
  r.log_m = iterated_log(static_cast<double>(r.m), r.ell);
  r.ratio = r.z_model / (static_cast<double>(r.m) * std::pow(r.log_m, c));
  return r;
}

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known{"experiment", "levels",  "t",       "k",        "backends",
                                           "seeds",      "trials",  "far_trials", "eps",   "delta",
                                           "samples",    "probes",  "q_draws", "q_sizes",  "enforce_guard",
                                           "require_ensemble_distance", "threads", "json_out", "csv_out"};
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ParameterError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    take(j, "experiment", c.experiment);
    take(j, "levels", c.levels);
    take(j, "t", c.t);
    take(j, "k", c.k);
    take(j, "backends", c.backends);
    take(j, "seeds", c.seeds);
    take(j, "trials", c.trials);
    take(j, "far_trials", c.far_trials);
    take(j, "eps", c.eps);
    take(j, "delta", c.delta);
    take(j, "samples", c.samples);
    take(j, "probes", c.probes);
    take(j, "q_draws", c.q_draws);
    take(j, "q_sizes", c.q_sizes);
    take(j, "enforce_guard", c.enforce_guard);
    take(j, "require_ensemble_distance", c.require_ensemble_distance);
    take(j, "threads", c.threads);
    take(j, "json_out", c.json_out);
    take(j, "csv_out", c.csv_out);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad config value: ") + e.what());
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return {{"experiment", c.experiment},
          {"levels", c.levels},
          {"t", c.t},
          {"k", c.k},
          {"backends", c.backends},
          {"seeds", c.seeds},
          {"trials", c.trials},
          {"far_trials", c.far_trials},
          {"eps", c.eps},
          {"delta", c.delta},
          {"samples", c.samples},
          {"probes", c.probes},
          {"q_draws", c.q_draws},
          {"q_sizes", c.q_sizes},
          {"enforce_guard", c.enforce_guard},
          {"require_ensemble_distance", c.require_ensemble_distance}};
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  if (!kExperiments.count(c.experiment)) throw ParameterError("unknown experiment '" + c.experiment + "'");
  if (c.seeds.empty()) throw ParameterError("at least one seed is required");
  if (c.levels.empty()) throw ParameterError("at least one level is required");
  if (c.backends.empty()) throw ParameterError("at least one backend is required");
  for (const auto& b : c.backends) {
    if (b != "exhaustive" && b != "hadamard") throw ParameterError("unknown backend '" + b + "'");
  }
  ExperimentResult res;
  if (c.experiment == "certify-base") res = certify_base(c);
  if (c.experiment == "completeness") res = completeness(c);
  if (c.experiment == "soundness") res = soundness(c);
  if (c.experiment == "indistinguishability") res = indistinguishability(c);
  if (c.experiment == "lengths") res = lengths(c);
  if (c.experiment == "separation") res = separation(c);
  res.report["experiment"] = c.experiment;
  res.report["config"] = config_to_json(c);
  res.report["records"] = res.records;
  res.report["pass"] = res.pass;
  res.report["failures"] = res.failures;
  res.report["format_version"] = 1;
  return res;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

std::string records_csv(const std::vector<json>& records) {
  std::set<std::string> keys;
  for (const json& r : records) {
    for (const auto& [k, v] : r.items()) keys.insert(k);
  }
  auto cell = [](const json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    return s;
  };
  std::string out;
  bool first = true;
  for (const auto& k : keys) {
    out += (first ? "" : ",") + k;
    first = false;
  }
  out += "\n";
  for (const json& r : records) {
    first = true;
    for (const auto& k : keys) {
      out += first ? "" : ",";
      first = false;
      if (r.contains(k)) out += cell(r.at(k));
    }
    out += "\n";
  }
  return out;
}

void write_outputs(const ExperimentConfig& c, const ExperimentResult& r, double elapsed_seconds) {
  if (!c.json_out.empty()) {
    const std::string body = dump_report(r.report);
    artifact::write_file(c.json_out, body);
    json meta = {{"report", c.json_out},
                 {"report_hash", artifact::git_blob_hash(body)},
                 {"elapsed_seconds", elapsed_seconds},
                 {"finished_unix", static_cast<std::int64_t>(std::time(nullptr))}};
    artifact::write_file(c.json_out + ".meta.json", meta.dump(2) + "\n");
  }
  if (!c.csv_out.empty()) artifact::write_file(c.csv_out, records_csv(r.records));
}

}  // namespace pcuss
