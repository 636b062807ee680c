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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "noisyor/net.hpp"
#include "noisyor/rng.hpp"

namespace noisyor::sampling {

/// Sampling work is always split over a fixed number of logical streams,
/// regardless of how many worker threads execute them. Stream s draws from
/// Rng(master_seed, s) and owns a private accumulator; accumulators merge in
/// stream order. Results are therefore bit-identical for any worker count.
inline constexpr int kNumStreams = 64;

/// The W(d) / W_tot tallies shared by all four sampling modes. The per-d
/// table is sparse, keyed by the drawn disease bitmask, and capped: past
/// `table_cap` distinct keys, new vectors stop being tabulated (nothing is
/// evicted) and only the marginal tallies keep growing.
struct Accumulator {
  std::unordered_map<std::uint64_t, double> w;
  std::size_t table_cap = std::size_t{1} << 16;
  bool table_complete = true;

  double w_tot = 0.0;
  double sum_w2 = 0.0;
  std::vector<double> per_disease_w;   // weight where d_j = 1
  std::vector<double> per_disease_w2;  // squared weight where d_j = 1
  std::uint64_t n_drawn = 0;
  std::uint64_t n_accepted = 0;  // samples that contributed weight

  Accumulator() = default;
  explicit Accumulator(int num_diseases, std::size_t cap = std::size_t{1} << 16)
      : table_cap(cap), per_disease_w(num_diseases, 0.0), per_disease_w2(num_diseases, 0.0) {}

  void add(DiseaseBits d, double weight) {
    ++n_accepted;
    w_tot += weight;
    sum_w2 += weight * weight;
    for (std::size_t j = 0; j < per_disease_w.size(); ++j) {
      if ((d >> j) & 1) {
        per_disease_w[j] += weight;
        per_disease_w2[j] += weight * weight;
      }
    }
    auto it = w.find(d);
    if (it != w.end()) {
      it->second += weight;
    } else if (w.size() < table_cap) {
      w.emplace(d, weight);
    } else {
      table_complete = false;
    }
  }

  /// Merge another accumulator in. Keys are folded in sorted order so the
  /// result (including which keys hit the table cap) is deterministic.
  void merge(const Accumulator& o) {
    n_drawn += o.n_drawn;
    n_accepted += o.n_accepted;
    w_tot += o.w_tot;
    sum_w2 += o.sum_w2;
    for (std::size_t j = 0; j < per_disease_w.size(); ++j) {
      per_disease_w[j] += o.per_disease_w[j];
      per_disease_w2[j] += o.per_disease_w2[j];
    }
    table_complete = table_complete && o.table_complete;
    std::vector<std::pair<std::uint64_t, double>> keys(o.w.begin(), o.w.end());
    std::sort(keys.begin(), keys.end());
    for (const auto& [d, weight] : keys) {
      auto it = w.find(d);
      if (it != w.end()) {
        it->second += weight;
      } else if (w.size() < table_cap) {
        w.emplace(d, weight);
      } else {
        table_complete = false;
      }
    }
  }
};

enum class SampleStatus { Ok, NoAcceptedSamples, ZeroTotalWeight };

inline const char* to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::NoAcceptedSamples: return "no_accepted_samples";
    case SampleStatus::ZeroTotalWeight: return "zero_total_weight";
  }
  return "unknown";
}

/// Estimated posterior plus convergence diagnostics. When no sample carried
/// weight the status records the diagnosis and the estimate fields are left
/// empty instead of NaN.
struct SampleReport {
  SampleStatus status = SampleStatus::Ok;
  double evidence_prob = 0.0;     // W_tot / N_drawn, an unbiased P_{I1,I0} estimate
  double evidence_prob_se = 0.0;
  std::vector<double> marginals;     // P(d_j=1 | evidence) estimates
  std::vector<double> marginal_se;   // delta-method standard errors
  std::vector<std::pair<std::uint64_t, double>> posterior;  // d -> W(d)/W_tot, mask-sorted
  bool posterior_complete = true;
  double acceptance_rate = 0.0;  // rejection modes
  double ess = 0.0;              // (sum w)^2 / sum w^2
  std::uint64_t n_drawn = 0;
  std::uint64_t n_accepted = 0;
};

struct SampleRun {
  Accumulator acc;
  SampleReport report;
};

/// One ancestral sample in the fixed topological order of the two-layer net:
/// diseases from their priors, then findings given the drawn diseases.
inline std::pair<DiseaseBits, FindingBits> draw_prior_sample(const NoisyOrNet& net, Rng& rng) {
  DiseaseBits d = 0;
  for (int j = 0; j < net.num_diseases(); ++j)
    if (rng.bernoulli(net.diseases[j].prior)) d |= DiseaseBits{1} << j;
  FindingBits f = 0;
  for (int i = 0; i < net.num_findings(); ++i)
    if (rng.bernoulli(net.prob_finding_given(i, d, 1))) f |= FindingBits{1} << i;
  return {d, f};
}

namespace detail {

// Splits n_sam over the logical streams, runs `body(stream_id, count, acc)`
// on `workers` threads, and merges per-stream accumulators in stream order.
template <typename Body>
Accumulator run_streams(int num_diseases, std::uint64_t n_sam, int workers,
                        std::size_t table_cap, Body&& body) {
  std::vector<Accumulator> per_stream;
  per_stream.reserve(kNumStreams);
  for (int s = 0; s < kNumStreams; ++s) per_stream.emplace_back(num_diseases, table_cap);

  auto count_for = [n_sam](int s) {
    return n_sam / kNumStreams + (static_cast<std::uint64_t>(s) < n_sam % kNumStreams ? 1 : 0);
  };

  workers = std::clamp(workers, 1, kNumStreams);
  if (workers == 1) {
    for (int s = 0; s < kNumStreams; ++s) body(s, count_for(s), per_stream[s]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (int s = t; s < kNumStreams; s += workers) body(s, count_for(s), per_stream[s]);
      });
    }
    for (auto& th : pool) th.join();
  }

  Accumulator total(num_diseases, table_cap);
  for (const auto& acc : per_stream) total.merge(acc);
  return total;
}

inline SampleReport make_report(const Accumulator& acc, bool rejection_mode) {
  SampleReport rep;
  rep.n_drawn = acc.n_drawn;
  rep.n_accepted = acc.n_accepted;
  rep.posterior_complete = acc.table_complete;
  rep.acceptance_rate =
      acc.n_drawn ? static_cast<double>(acc.n_accepted) / static_cast<double>(acc.n_drawn) : 0.0;

  if (acc.w_tot <= 0.0) {
    rep.status =
        rejection_mode ? SampleStatus::NoAcceptedSamples : SampleStatus::ZeroTotalWeight;
    return rep;
  }

  const double n = static_cast<double>(acc.n_drawn);
  rep.evidence_prob = acc.w_tot / n;
  // Standard error of the mean weight; reduces to the binomial formula for
  // the 0/1 weights of rejection sampling.
  if (acc.n_drawn > 1) {
    const double var = std::max(0.0, (acc.sum_w2 - n * rep.evidence_prob * rep.evidence_prob) /
                                         (n - 1.0));
    rep.evidence_prob_se = std::sqrt(var / n);
  }

  rep.ess = acc.w_tot * acc.w_tot / acc.sum_w2;

  const int nd = static_cast<int>(acc.per_disease_w.size());
  rep.marginals.resize(nd);
  rep.marginal_se.resize(nd);
  for (int j = 0; j < nd; ++j) {
    const double p = acc.per_disease_w[j] / acc.w_tot;
    rep.marginals[j] = p;
    // Delta method for the ratio estimator sum(w z)/sum(w) with z in {0,1}:
    // Var ~ sum w^2 (z - p)^2 / W_tot^2 = (S2z (1-2p) + p^2 S2) / W_tot^2.
    const double num = std::max(0.0, acc.per_disease_w2[j] * (1.0 - 2.0 * p) +
                                         p * p * acc.sum_w2);
    rep.marginal_se[j] = std::sqrt(num) / acc.w_tot;
  }

  rep.posterior.assign(acc.w.begin(), acc.w.end());
  std::sort(rep.posterior.begin(), rep.posterior.end());
  for (auto& [d, weight] : rep.posterior) weight /= acc.w_tot;
  return rep;
}

}  // namespace detail

/// Rejection sampling: draw full prior samples, keep those whose findings
/// match the evidence exactly, each with weight 1.
inline SampleRun rejection_sample(const NoisyOrNet& net, const Evidence& ev,
                                  std::uint64_t n_sam, std::uint64_t seed, int workers = 1,
                                  std::size_t table_cap = std::size_t{1} << 16) {
  require_bitmask_capacity(net);
  ev.check(net.num_findings());
  const FindingBits i0m = ev.i0_mask();
  const FindingBits i1m = ev.i1_mask();
  Accumulator acc = detail::run_streams(
      net.num_diseases(), n_sam, workers, table_cap,
      [&](int stream, std::uint64_t count, Accumulator& a) {
        Rng rng(seed, static_cast<std::uint64_t>(stream));
        for (std::uint64_t k = 0; k < count; ++k) {
          const auto [d, f] = draw_prior_sample(net, rng);
          ++a.n_drawn;
          if ((f & i0m) == 0 && (f & i1m) == i1m) a.add(d, 1.0);
        }
      });
  SampleRun run{std::move(acc), {}};
  run.report = detail::make_report(run.acc, /*rejection_mode=*/true);
  return run;
}

/// Likelihood-weighted sampling: diseases from priors, unknown findings
/// sampled, evidence findings clamped; each sample weighs L_evi(d).
inline SampleRun lw_sample(const NoisyOrNet& net, const Evidence& ev, std::uint64_t n_sam,
                           std::uint64_t seed, int workers = 1,
                           std::size_t table_cap = std::size_t{1} << 16) {
  require_bitmask_capacity(net);
  ev.check(net.num_findings());
  const FindingBits evidence_mask = ev.i0_mask() | ev.i1_mask();
  Accumulator acc = detail::run_streams(
      net.num_diseases(), n_sam, workers, table_cap,
      [&](int stream, std::uint64_t count, Accumulator& a) {
        Rng rng(seed, static_cast<std::uint64_t>(stream));
        for (std::uint64_t k = 0; k < count; ++k) {
          DiseaseBits d = 0;
          for (int j = 0; j < net.num_diseases(); ++j)
            if (rng.bernoulli(net.diseases[j].prior)) d |= DiseaseBits{1} << j;
          // Unknown findings are still sampled (they are part of the
          // ancestral draw and keep streams aligned with rejection
          // sampling); only d feeds the weight and the tallies.
          for (int i = 0; i < net.num_findings(); ++i) {
            if ((evidence_mask >> i) & 1) continue;  // clamped
            rng.bernoulli(net.prob_finding_given(i, d, 1));
          }
          ++a.n_drawn;
          const double L = net.evidence_likelihood(ev, d);
          if (L > 0.0) a.add(d, L);
        }
      });
  SampleRun run{std::move(acc), {}};
  run.report = detail::make_report(run.acc, /*rejection_mode=*/false);
  return run;
}

}  // namespace noisyor::sampling
