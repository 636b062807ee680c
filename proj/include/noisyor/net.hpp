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
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "noisyor/errors.hpp"

namespace noisyor {

/// Disease assignments and finding assignments are packed one bit per node,
/// bit j for disease j / finding i. Inference engines therefore handle nets
/// with up to 64 diseases and 64 findings; the data model itself is unbounded.
using DiseaseBits = std::uint64_t;
using FindingBits = std::uint64_t;

inline constexpr int kMaxBitNodes = 64;

struct Disease {
  std::string name;
  double prior = 0.0;  // P(d_j = 1)
};

struct Edge {
  int disease = -1;  // index into NoisyOrNet::diseases; -1 = unresolved name
  double q = 0.0;    // activation probability q_ij
};

struct Finding {
  std::string name;
  double leak = 0.0;  // q_i0, the always-on pseudo-parent's activation
  std::vector<Edge> parents;
};

/// The observed finding pattern: indices in `i0` were seen negative, `i1`
/// positive, everything else is unknown. Kept sorted and duplicate-free.
struct Evidence {
  std::vector<int> i0;
  std::vector<int> i1;

  static Evidence make(std::vector<int> negative, std::vector<int> positive) {
    Evidence ev{std::move(negative), std::move(positive)};
    ev.canonicalize();
    return ev;
  }

  void canonicalize() {
    auto fix = [](std::vector<int>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    fix(i0);
    fix(i1);
  }

  bool empty() const { return i0.empty() && i1.empty(); }

  /// Throws EvidenceError unless indices are in range and i0, i1 disjoint.
  void check(int num_findings) const {
    for (int i : i0)
      if (i < 0 || i >= num_findings)
        throw EvidenceError("negative finding index " + std::to_string(i) + " out of range");
    for (int i : i1)
      if (i < 0 || i >= num_findings)
        throw EvidenceError("positive finding index " + std::to_string(i) + " out of range");
    std::vector<int> both;
    std::set_intersection(i0.begin(), i0.end(), i1.begin(), i1.end(), std::back_inserter(both));
    if (!both.empty())
      throw EvidenceError("finding index " + std::to_string(both.front()) +
                          " listed as both positive and negative");
  }

  FindingBits i0_mask() const { return mask_of(i0); }
  FindingBits i1_mask() const { return mask_of(i1); }

 private:
  static FindingBits mask_of(const std::vector<int>& v) {
    FindingBits m = 0;
    for (int i : v) m |= FindingBits{1} << i;
    return m;
  }
};

/// Exponential reparameterization of a net:
///   e^{-alpha_j} = P(d_j = 0),  e^{-alpha_j - beta_j} = P(d_j = 1),
///   theta = -ln(1 - q) >= 0 per edge, and per-finding leak theta.
/// Derived on demand from the stored q/prior values; never serialized.
struct LogParams {
  std::vector<double> alpha;  // per disease
  std::vector<double> beta;   // per disease
  double alpha_total = 0.0;
  std::vector<double> leak_theta;                             // theta_{i0} per finding
  std::vector<std::vector<std::pair<int, double>>> edge_theta;  // per finding: (disease, theta_ij)
};

/// Two-layer noisy-OR net: diseases with priors on top, findings below,
/// each finding the noisy OR of its parent diseases plus an optional leak.
/// Immutable after validate(); every operation here is a pure function, so
/// a validated net may be shared freely across threads.
struct NoisyOrNet {
  std::vector<Disease> diseases;
  std::vector<Finding> findings;

  int num_diseases() const { return static_cast<int>(diseases.size()); }
  int num_findings() const { return static_cast<int>(findings.size()); }

  /// Checks every structural invariant and returns the complete list of
  /// violations (empty means the net is valid). N_D >= 1 is implied by
  /// BadParentIndex for any finding and by callers requiring diseases.
  std::vector<Violation> validate() const {
    std::vector<Violation> out;
    std::unordered_set<std::string> names;
    for (int j = 0; j < num_diseases(); ++j) {
      const auto& d = diseases[j];
      if (!(d.prior >= 0.0 && d.prior <= 1.0))
        out.push_back({ViolationKind::PriorOutOfRange, d.name});
      if (!names.insert(d.name).second)
        out.push_back({ViolationKind::DuplicateName, d.name});
    }
    names.clear();
    for (int i = 0; i < num_findings(); ++i) {
      const auto& f = findings[i];
      if (!names.insert(f.name).second)
        out.push_back({ViolationKind::DuplicateName, f.name});
      if (!(f.leak >= 0.0 && f.leak < 1.0))
        out.push_back({ViolationKind::QOutOfRange, f.name + " leak"});
      std::set<int> seen;
      for (const auto& e : f.parents) {
        if (e.disease < 0 || e.disease >= num_diseases()) {
          out.push_back({ViolationKind::BadParentIndex, f.name});
        } else if (!seen.insert(e.disease).second) {
          out.push_back({ViolationKind::DuplicateEdge,
                         f.name + " <- " + diseases[e.disease].name});
        }
        if (!(e.q >= 0.0 && e.q <= 1.0))
          out.push_back({ViolationKind::QOutOfRange, f.name});
      }
    }
    return out;
  }

  /// Throws InvalidNetError carrying all violations.
  void ensure_valid() const {
    auto v = validate();
    if (!v.empty()) throw InvalidNetError(std::move(v));
  }

  /// P(f_i = f | d). Uses the theta log form when every activation
  /// probability of the finding is < 1, the direct product otherwise.
  double prob_finding_given(int i, DiseaseBits d, int f) const {
    const Finding& fi = findings[i];
    bool log_ok = fi.leak < 1.0;
    for (const auto& e : fi.parents) log_ok = log_ok && e.q < 1.0;
    double p0;
    if (log_ok) {
      double theta_sum = -std::log1p(-fi.leak);
      for (const auto& e : fi.parents)
        if ((d >> e.disease) & 1) theta_sum += -std::log1p(-e.q);
      p0 = std::exp(-theta_sum);
    } else {
      p0 = 1.0 - fi.leak;
      for (const auto& e : fi.parents)
        if ((d >> e.disease) & 1) p0 *= 1.0 - e.q;
    }
    return f == 0 ? p0 : 1.0 - p0;
  }

  /// Prior probability of the full disease vector.
  double prior_prob(DiseaseBits d) const {
    double p = 1.0;
    for (int j = 0; j < num_diseases(); ++j)
      p *= ((d >> j) & 1) ? diseases[j].prior : 1.0 - diseases[j].prior;
    return p;
  }

  /// Joint probability of a full (d, f) assignment. Findings are
  /// conditionally independent given d, so this is the prior times the
  /// per-finding factors; it sums to 1 over all assignments.
  double joint_prob(DiseaseBits d, FindingBits f) const {
    double p = prior_prob(d);
    for (int i = 0; i < num_findings(); ++i)
      p *= prob_finding_given(i, d, static_cast<int>((f >> i) & 1));
    return p;
  }

  /// L_evi(d): the probability of the observed finding pattern given d,
  /// i.e. Pi_0 * Pi_1. This is the likelihood-weighting sample weight and
  /// the per-term factor of the brute-force evidence sum.
  double evidence_likelihood(const Evidence& ev, DiseaseBits d) const {
    double L = 1.0;
    for (int i : ev.i0) L *= prob_finding_given(i, d, 0);
    for (int i : ev.i1) L *= prob_finding_given(i, d, 1);
    return L;
  }
};

/// Throws CapExceededError when d/f bitmask state cannot represent the net.
inline void require_bitmask_capacity(const NoisyOrNet& net) {
  if (net.num_diseases() > kMaxBitNodes || net.num_findings() > kMaxBitNodes)
    throw CapExceededError("net exceeds " + std::to_string(kMaxBitNodes) +
                           " diseases or findings supported by the engines");
}

/// Derives the exponential parameterization. Requires every prior strictly
/// inside (0,1) and every q_ij < 1; otherwise some exponent is infinite and
/// the inclusion-exclusion backend would silently produce +-inf, so this
/// throws DegenerateParameterError listing every offending parameter.
inline LogParams log_params(const NoisyOrNet& net) {
  std::string bad;
  auto complain = [&bad](const std::string& what) {
    if (!bad.empty()) bad += ", ";
    bad += what;
  };

  LogParams lp;
  lp.alpha.reserve(net.diseases.size());
  lp.beta.reserve(net.diseases.size());
  for (const auto& d : net.diseases) {
    if (!(d.prior > 0.0 && d.prior < 1.0)) {
      complain("prior of " + d.name);
      lp.alpha.push_back(0);
      lp.beta.push_back(0);
      continue;
    }
    const double alpha = -std::log1p(-d.prior);
    lp.alpha.push_back(alpha);
    lp.beta.push_back(-std::log(d.prior) - alpha);
  }
  lp.leak_theta.reserve(net.findings.size());
  lp.edge_theta.reserve(net.findings.size());
  for (const auto& f : net.findings) {
    if (!(f.leak < 1.0)) {
      complain("leak of " + f.name);
      lp.leak_theta.push_back(0.0);
    } else {
      lp.leak_theta.push_back(-std::log1p(-f.leak));
    }
    auto& row = lp.edge_theta.emplace_back();
    row.reserve(f.parents.size());
    for (const auto& e : f.parents) {
      if (!(e.q < 1.0)) {
        complain("q of " + f.name);
        row.emplace_back(e.disease, 0.0);
      } else {
        row.emplace_back(e.disease, -std::log1p(-e.q));
      }
    }
  }
  if (!bad.empty()) throw DegenerateParameterError("degenerate parameters: " + bad);
  for (double a : lp.alpha) lp.alpha_total += a;
  return lp;
}

}  // namespace noisyor
