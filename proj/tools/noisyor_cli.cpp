// Copyright 2026 The noisyor Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisyor/exact.hpp"
#include "noisyor/io.hpp"
#include "noisyor/net.hpp"
#include "noisyor/qcircuit.hpp"
#include "noisyor/sampling.hpp"

namespace {

using noisyor::Evidence;
using noisyor::NoisyOrNet;
using ordered_json = nlohmann::ordered_json;

// Exit codes, one per error class (documented in --help and the README).
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidInput = 2,      // net validation, evidence resolution
  kCapExceeded = 3,
  kDegenerate = 4,
  kNoAcceptedSamples = 5,
  kZeroTotalWeight = 6,
  kFileError = 7,         // unreadable or malformed files
};

struct InferOptions {
  std::string net_path;
  std::string evidence_path;
  std::string method;
  std::uint64_t nsam = 100000;
  std::uint64_t seed = 0;
  int workers = 1;
  int full_table_cap = 16;
  int qubit_cap = 24;
};

struct CompareOptions {
  std::string net_path;
  std::string evidence_path;
  std::vector<std::string> methods;
  std::uint64_t nsam = 100000;
  std::uint64_t seed = 0;
  int workers = 1;
  int qubit_cap = 24;
};

struct MethodResult {
  double evidence_prob = 0.0;
  std::vector<double> marginals;
  noisyor::sampling::SampleReport sample;  // sampling methods only
  bool is_sampling = false;
  bool is_rejection = false;
  double wall_ms = 0.0;
};

NoisyOrNet load_valid_net(const std::string& path) {
  NoisyOrNet net = noisyor::io::load_net(path);
  net.ensure_valid();
  return net;
}

Evidence load_evidence_or_empty(const std::string& path, const NoisyOrNet& net) {
  if (path.empty()) return Evidence{};
  return noisyor::io::load_evidence(path, net);
}

MethodResult run_method(const std::string& method, const NoisyOrNet& net, const Evidence& ev,
                        const InferOptions& opt) {
  MethodResult r;
  const auto start = std::chrono::steady_clock::now();
  if (method == "brute" || method == "incl-excl") {
    noisyor::exact::ExactOptions eopt;
    eopt.full_table_cap = opt.full_table_cap;
    const auto rep = noisyor::exact::posterior_exact(
        net, ev,
        method == "brute" ? noisyor::exact::ExactMethod::Brute
                          : noisyor::exact::ExactMethod::InclExcl,
        eopt);
    r.evidence_prob = rep.evidence_prob;
    r.marginals = rep.marginals;
  } else {
    noisyor::sampling::SampleRun run;
    if (method == "reject") {
      run = noisyor::sampling::rejection_sample(net, ev, opt.nsam, opt.seed, opt.workers);
      r.is_rejection = true;
    } else if (method == "lw") {
      run = noisyor::sampling::lw_sample(net, ev, opt.nsam, opt.seed, opt.workers);
    } else if (method == "q-reject") {
      run = noisyor::qsim::quantum_rejection(net, ev, opt.nsam, opt.seed, opt.workers,
                                             opt.qubit_cap);
      r.is_rejection = true;
    } else if (method == "q-lw") {
      run = noisyor::qsim::quantum_lw(net, ev, opt.nsam, opt.seed, opt.workers, opt.qubit_cap);
    } else {
      throw std::invalid_argument("unknown method: " + method);
    }
    r.is_sampling = true;
    r.sample = run.report;
    r.evidence_prob = run.report.evidence_prob;
    r.marginals = run.report.marginals;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
  return r;
}

ordered_json report_json(const std::string& method, const NoisyOrNet& net,
                         const MethodResult& r, const InferOptions& opt) {
  ordered_json j;
  j["method"] = method;
  j["backend"] = !r.is_sampling ? "exact" : (method.starts_with("q-") ? "qcircuit" : "sampler");
  j["status"] = r.is_sampling ? to_string(r.sample.status) : "ok";
  if (r.is_sampling) {
    j["seed"] = opt.seed;
    j["nsam"] = opt.nsam;
  }
  j["evidence_prob"] = r.evidence_prob;
  if (r.is_sampling) j["evidence_prob_se"] = r.sample.evidence_prob_se;
  j["marginals"] = ordered_json::array();
  for (std::size_t k = 0; k < r.marginals.size(); ++k) {
    ordered_json m;
    m["disease"] = net.diseases[k].name;
    m["estimate"] = r.marginals[k];
    if (r.is_sampling) m["se"] = r.sample.marginal_se[k];
    j["marginals"].push_back(std::move(m));
  }
  if (r.is_sampling) {
    if (r.is_rejection)
      j["acceptance_rate"] = r.sample.acceptance_rate;
    else
      j["ess"] = r.sample.ess;
    j["n_drawn"] = r.sample.n_drawn;
    j["n_accepted"] = r.sample.n_accepted;
  }
  j["wall_time_ms"] = r.wall_ms;
  return j;
}

int cmd_validate(const std::string& net_path) {
  const NoisyOrNet net = noisyor::io::load_net(net_path);
  const auto violations = net.validate();
  for (const auto& v : violations) std::cout << to_string(v) << "\n";
  if (violations.empty()) {
    std::cout << "ok\n";
    return kOk;
  }
  return kInvalidInput;
}

int cmd_infer(const InferOptions& opt) {
  const NoisyOrNet net = load_valid_net(opt.net_path);
  const Evidence ev = load_evidence_or_empty(opt.evidence_path, net);
  const MethodResult r = run_method(opt.method, net, ev, opt);
  std::cout << report_json(opt.method, net, r, opt).dump(2) << "\n";
  if (r.is_sampling && r.sample.status == noisyor::sampling::SampleStatus::NoAcceptedSamples)
    return kNoAcceptedSamples;
  if (r.is_sampling && r.sample.status == noisyor::sampling::SampleStatus::ZeroTotalWeight)
    return kZeroTotalWeight;
  return kOk;
}

int cmd_compare(const CompareOptions& copt) {
  const NoisyOrNet net = load_valid_net(copt.net_path);
  const Evidence ev = load_evidence_or_empty(copt.evidence_path, net);

  // Exact reference: brute force when feasible, inclusion-exclusion otherwise.
  std::vector<double> exact_marginals;
  {
    noisyor::exact::ExactOptions eopt;
    const auto method = net.num_diseases() <= eopt.brute_cap
                            ? noisyor::exact::ExactMethod::Brute
                            : noisyor::exact::ExactMethod::InclExcl;
    exact_marginals = noisyor::exact::posterior_exact(net, ev, method, eopt).marginals;
  }

  InferOptions iopt;
  iopt.nsam = copt.nsam;
  iopt.seed = copt.seed;
  iopt.workers = copt.workers;
  iopt.qubit_cap = copt.qubit_cap;

  std::cout << "method,evidence_prob,tv_to_exact,wall_time_ms";
  for (const auto& d : net.diseases) std::cout << ",marginal:" << d.name;
  std::cout << "\n";
  for (const auto& method : copt.methods) {
    const MethodResult r = run_method(method, net, ev, iopt);
    double tv = 0.0;
    for (std::size_t j = 0; j < r.marginals.size() && j < exact_marginals.size(); ++j)
      tv = std::max(tv, std::abs(r.marginals[j] - exact_marginals[j]));
    std::cout << method << "," << r.evidence_prob << "," << tv << "," << r.wall_ms;
    for (std::size_t j = 0; j < exact_marginals.size(); ++j) {
      std::cout << ",";
      if (j < r.marginals.size()) std::cout << r.marginals[j];
    }
    std::cout << "\n";
  }
  return kOk;
}

int cmd_gen(const noisyor::io::GenOptions& gopt) {
  const NoisyOrNet net = noisyor::io::gen_net(gopt);
  std::cout << noisyor::io::serialize_net(net);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::cout.precision(17);

  CLI::App app{
      "noisyor: exact and sampling-based diagnosis on noisy-OR (QMR-style) Bayesian nets.\n"
      "Exit codes: 0 ok, 1 usage, 2 invalid net/evidence, 3 cap exceeded,\n"
      "4 degenerate parameters, 5 no accepted samples, 6 zero total weight, 7 file error."};
  app.require_subcommand(1);

  std::string validate_net_path;
  auto* validate = app.add_subcommand("validate", "Check a net file; print all violations");
  validate->add_option("--net", validate_net_path, "Net file (JSON)")->required();

  InferOptions iopt;
  auto* infer = app.add_subcommand("infer", "Compute posteriors with one backend");
  infer->add_option("--net", iopt.net_path, "Net file (JSON)")->required();
  infer->add_option("--evidence", iopt.evidence_path, "Evidence file (JSON); default: none");
  infer
      ->add_option("--method", iopt.method,
                   "One of: brute, incl-excl, reject, lw, q-reject, q-lw")
      ->required()
      ->check(CLI::IsMember({"brute", "incl-excl", "reject", "lw", "q-reject", "q-lw"}));
  infer->add_option("--nsam", iopt.nsam, "Samples to draw (sampling methods)")
      ->capture_default_str();
  infer->add_option("--seed", iopt.seed, "Master RNG seed")->capture_default_str();
  infer->add_option("--workers", iopt.workers, "Worker threads (does not change results)")
      ->capture_default_str();
  infer->add_option("--full-table-cap", iopt.full_table_cap,
                    "Max N_D for a full in-memory posterior table")
      ->capture_default_str();
  infer->add_option("--qubit-cap", iopt.qubit_cap, "Statevector simulator qubit cap")
      ->capture_default_str();

  CompareOptions copt;
  auto* compare = app.add_subcommand("compare", "Run several methods; CSV with TV vs exact");
  compare->add_option("--net", copt.net_path, "Net file (JSON)")->required();
  compare->add_option("--evidence", copt.evidence_path, "Evidence file (JSON); default: none");
  compare
      ->add_option("--methods", copt.methods,
                   "Methods to run (space-separated list)")
      ->required()
      ->check(CLI::IsMember({"brute", "incl-excl", "reject", "lw", "q-reject", "q-lw"}));
  compare->add_option("--nsam", copt.nsam, "Samples per sampling method")->capture_default_str();
  compare->add_option("--seed", copt.seed, "Master RNG seed")->capture_default_str();
  compare->add_option("--workers", copt.workers, "Worker threads")->capture_default_str();
  compare->add_option("--qubit-cap", copt.qubit_cap, "Statevector simulator qubit cap")
      ->capture_default_str();

  noisyor::io::GenOptions gopt;
  auto* gen = app.add_subcommand("gen", "Write a random net file to stdout");
  gen->add_option("--nd", gopt.nd, "Number of diseases")->capture_default_str();
  gen->add_option("--nf", gopt.nf, "Number of findings")->capture_default_str();
  gen->add_option("--density", gopt.density, "Edge probability per (finding, disease)")
      ->capture_default_str();
  gen->add_option("--prior-range", gopt.prior_range, "Disease prior range LO HI");
  gen->add_option("--q-range", gopt.q_range, "Edge activation range LO HI");
  gen->add_option("--leak-range", gopt.leak_range, "Finding leak range LO HI");
  gen->add_option("--seed", gopt.seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(validate_net_path);
    if (app.got_subcommand(infer)) return cmd_infer(iopt);
    if (app.got_subcommand(compare)) return cmd_compare(copt);
    if (app.got_subcommand(gen)) return cmd_gen(gopt);
  } catch (const noisyor::InvalidNetError& e) {
    for (const auto& v : e.violations()) std::cerr << to_string(v) << "\n";
    return kInvalidInput;
  } catch (const noisyor::EvidenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const noisyor::CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const noisyor::DegenerateParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const noisyor::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFileError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
