#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pcuss/artifact.hpp"
#include "pcuss/basecode.hpp"
#include "pcuss/ensemble.hpp"
#include "pcuss/error.hpp"
#include "pcuss/experiment.hpp"

using namespace pcuss;

namespace {

enum Exit { kPass = 0, kCriterion = 1, kUsage = 2, kCapability = 3 };

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PCUSS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParameterError(std::string("PCUSS_SEED is not an integer: ") + env);
    }
  }
  return 1;
}

struct ParamOpts {
  unsigned ell = 1;
  unsigned t = 6;
  std::size_t k = 2;
  std::string backend = "exhaustive";

  void attach(CLI::App* app) {
    app->add_option("--ell", ell, "recursion level");
    app->add_option("--t", t, "bits per field element at the top level (6 or 18)");
    app->add_option("--k", k, "secret length");
    app->add_option("--backend", backend, "level-0 backend")->check(CLI::IsMember({"exhaustive", "hadamard"}));
  }
  LevelParams derive(std::uint64_t seed) const {
    ParamsRequest r;
    r.ell = ell;
    r.t = t;
    r.k = k;
    r.backend = backend;
    r.seed = seed;
    return derive_params(r);
  }
};

void check_digest(const LevelParams& P, const std::string& digest, const std::string& what) {
  if (digest != artifact::params_digest(P)) {
    throw InputError(what + " was produced under different parameters");
  }
}

json verdict_json(const VerdictReport& r) {
  return {{"accept", r.accept},
          {"input_queries", r.input_queries},
          {"proof_queries", r.proof_queries},
          {"value_queries", r.value_queries},
          {"seed", r.seed},
          {"rejected_stage", r.rejected_stage}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcuss: recursive secret-sharing code ensembles with checkable unveiling"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed_opt;
  app.add_option("--seed", seed_opt, "master seed (default: $PCUSS_SEED or 1)");

  // certify
  auto* certify = app.add_subcommand("certify", "generate and certify a base hard code");
  unsigned cert_k = 4;
  bool cert_ensemble = false;
  std::string cert_out;
  certify->add_option("--k", cert_k, "secret length (3..12)");
  certify->add_flag("--ensemble", cert_ensemble, "also require the ensemble distance bound");
  certify->add_option("--out", cert_out, "write the artifact here");

  // encode
  auto* encode = app.add_subcommand("encode", "sample an encoding of w");
  ParamOpts enc_p;
  std::string enc_w, enc_out;
  enc_p.attach(encode);
  encode->add_option("--w", enc_w, "secret as a bit string, bit 0 first")->required();
  encode->add_option("--out", enc_out, "encoding artifact")->required();

  // prove
  auto* prove = app.add_subcommand("prove", "build the unveiling proof of an encoding");
  ParamOpts prv_p;
  std::string prv_in, prv_out;
  prv_p.attach(prove);
  prove->add_option("--in", prv_in, "encoding artifact")->required();
  prove->add_option("--out", prv_out, "proof artifact")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "run the verifier on an encoding and proof");
  ParamOpts ver_p;
  std::string ver_in, ver_proof, ver_w;
  double ver_eps = 0.05, ver_delta = 0.25;
  ver_p.attach(verify);
  verify->add_option("--in", ver_in, "encoding artifact")->required();
  verify->add_option("--proof", ver_proof, "proof artifact")->required();
  verify->add_option("--w", ver_w, "claimed secret (default: the one stored in the encoding)");
  verify->add_option("--eps", ver_eps, "proximity parameter");
  verify->add_option("--delta", ver_delta, "error bound");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run an experiment from a config file and flags");
  std::string exp_config, exp_name, exp_json, exp_csv, exp_backend;
  std::optional<std::uint64_t> exp_trials, exp_samples;
  std::optional<double> exp_eps, exp_delta;
  std::optional<unsigned> exp_t, exp_threads;
  std::optional<std::size_t> exp_k;
  std::vector<unsigned> exp_levels;
  std::vector<std::uint64_t> exp_seeds;
  bool exp_no_guard = false;
  experiment->add_option("--config", exp_config, "JSON config file");
  experiment->add_option("--experiment", exp_name, "experiment name");
  experiment->add_option("--levels", exp_levels, "levels");
  experiment->add_option("--t", exp_t, "bits per field element");
  experiment->add_option("--k", exp_k, "secret length");
  experiment->add_option("--backend", exp_backend, "backend")->check(CLI::IsMember({"exhaustive", "hadamard"}));
  experiment->add_option("--seeds", exp_seeds, "seed list");
  experiment->add_option("--trials", exp_trials, "trials");
  experiment->add_option("--samples", exp_samples, "samples for statistical tests");
  experiment->add_option("--eps", exp_eps, "proximity parameter");
  experiment->add_option("--delta", exp_delta, "error bound");
  experiment->add_option("--threads", exp_threads, "worker threads (0 = all cores)");
  experiment->add_option("--json-out", exp_json, "report path");
  experiment->add_option("--csv-out", exp_csv, "CSV path");
  experiment->add_flag("--no-guard", exp_no_guard, "allow (eps, n) pairs that fail the tester precondition");

  // report
  auto* report = app.add_subcommand("report", "summarize a JSON report");
  std::string rep_in, rep_csv;
  report->add_option("--in", rep_in, "report path")->required();
  report->add_option("--csv", rep_csv, "write the CSV mirror here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  try {
    const std::uint64_t seed = seed_opt ? *seed_opt : default_seed();

    if (*certify) {
      Rng rng(seed);
      HardCodeOptions opts;
      opts.require_ensemble_distance = cert_ensemble;
      const HardCodeSpec spec = hardcode_generate(cert_k, rng, opts);
      const CertificationReport rep = certify_hardcode(spec);
      const std::string bytes = artifact::write_hardcode(spec);
      if (!cert_out.empty()) artifact::write_file(cert_out, bytes);
      json out = {{"k", spec.k},
                  {"seed", spec.seed},
                  {"attempts", spec.attempts},
                  {"distance", rep.distance.to_string()},
                  {"dual_distance", rep.dual_distance.to_string()},
                  {"ensemble_distance", rep.ensemble_distance.to_string()},
                  {"vacuous", rep.vacuous},
                  {"certified", rep.passed(cert_ensemble)},
                  {"content_hash", artifact::git_blob_hash(bytes)}};
      std::cout << out.dump(2) << "\n";
      return rep.passed(cert_ensemble) ? kPass : kCriterion;
    }

    if (*encode) {
      const LevelParams P = enc_p.derive(seed);
      Rng rng(derive_seed(seed, 0xe0c));
      const Encoding e = pcuss_encode(P, BitVec::from_string(enc_w), rng);
      const std::string bytes = artifact::write_encoding(P, e);
      artifact::write_file(enc_out, bytes);
      std::cout << json{{"m", e.bits.size()}, {"content_hash", artifact::git_blob_hash(bytes)}}.dump(2) << "\n";
      return kPass;
    }

    if (*prove) {
      const LevelParams P = prv_p.derive(seed);
      const auto enc = artifact::read_encoding(artifact::read_file(prv_in));
      check_digest(P, enc.params_digest, "encoding");
      const ProofPtr proof = pcuss_build_proof(P, enc.encoding);
      const std::string bytes = artifact::write_proof(artifact::make_proof_artifact(P, *proof));
      artifact::write_file(prv_out, bytes);
      std::cout << json{{"z", proof->size()}, {"content_hash", artifact::git_blob_hash(bytes)}}.dump(2) << "\n";
      return kPass;
    }

    if (*verify) {
      const LevelParams P = ver_p.derive(seed);
      const auto enc = artifact::read_encoding(artifact::read_file(ver_in));
      const auto prf = artifact::read_proof(artifact::read_file(ver_proof));
      check_digest(P, enc.params_digest, "encoding");
      check_digest(P, prf.params_digest, "proof");
      const BitVec w = ver_w.empty() ? enc.encoding.w : BitVec::from_string(ver_w);
      QueryOracle v(enc.encoding.bits), tau(pcuss_value(P, w)), pi(prf.bits);
      const VerdictReport r = pcuss_verify(P, v, tau, pi, ver_eps, ver_delta, derive_seed(seed, 0x7e1));
      std::cout << verdict_json(r).dump(2) << "\n";
      return r.accept ? kPass : kCriterion;
    }

    if (*experiment) {
      json cfg_json = json::object();
      if (!exp_config.empty()) {
        try {
          cfg_json = json::parse(artifact::read_file(exp_config));
        } catch (const json::parse_error& e) {
          throw ParameterError(std::string("config is not valid JSON: ") + e.what());
        }
      }
      ExperimentConfig cfg = config_from_json(cfg_json);
      if (!exp_name.empty()) cfg.experiment = exp_name;
      if (!exp_levels.empty()) cfg.levels = exp_levels;
      if (exp_t) cfg.t = *exp_t;
      if (exp_k) cfg.k = *exp_k;
      if (!exp_backend.empty()) cfg.backends = {exp_backend};
      if (!exp_seeds.empty()) cfg.seeds = exp_seeds;
      else if (!cfg_json.contains("seeds")) cfg.seeds = {seed};
      if (exp_trials) cfg.trials = *exp_trials;
      if (exp_samples) cfg.samples = *exp_samples;
      if (exp_eps) cfg.eps = *exp_eps;
      if (exp_delta) cfg.delta = *exp_delta;
      if (exp_threads) cfg.threads = *exp_threads;
      if (!exp_json.empty()) cfg.json_out = exp_json;
      if (!exp_csv.empty()) cfg.csv_out = exp_csv;
      if (exp_no_guard) cfg.enforce_guard = false;
      const auto t0 = std::chrono::steady_clock::now();
      const ExperimentResult res = run_experiment(cfg);
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_outputs(cfg, res, elapsed);
      if (cfg.json_out.empty()) std::cout << dump_report(res.report);
      for (const auto& f : res.failures) std::cerr << "criterion failure: " << f << "\n";
      return res.pass ? kPass : kCriterion;
    }

    if (*report) {
      json rep;
      try {
        rep = json::parse(artifact::read_file(rep_in));
      } catch (const json::parse_error& e) {
        throw InputError(std::string("report is not valid JSON: ") + e.what());
      }
      std::vector<json> records;
      if (rep.contains("records")) records = rep["records"].get<std::vector<json>>();
      if (!rep_csv.empty()) artifact::write_file(rep_csv, records_csv(records));
      std::cout << json{{"experiment", rep.value("experiment", "")},
                        {"pass", rep.value("pass", false)},
                        {"records", records.size()},
                        {"failures", rep.value("failures", json::array())}}
                       .dump(2)
                << "\n";
      return rep.value("pass", false) ? kPass : kCriterion;
    }
  } catch (const CapabilityError& e) {
    std::cerr << "capability: " << e.what() << "\n";
    return kCapability;
  } catch (const ParameterError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const CorruptionError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCriterion;
  }
  return kUsage;
}
