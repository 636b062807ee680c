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

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noisyor/net.hpp"

namespace noisyor::exact {

struct ExactOptions {
  int brute_cap = 24;       // max N_D enumerated by the brute-force backend
  int i1_cap = 26;          // max |I1| enumerated by inclusion-exclusion
  int full_table_cap = 16;  // max N_D for which a full posterior table is built
};

enum class ExactMethod { Brute, InclExcl };

inline const char* to_string(ExactMethod m) {
  return m == ExactMethod::Brute ? "brute" : "incl_excl";
}

/// Exact posterior over diseases given evidence.
struct PosteriorReport {
  double evidence_prob = 0.0;      // P_{I1,I0}
  std::vector<double> posterior;   // P[d | evidence] indexed by disease bitmask;
                                   // empty when N_D exceeds full_table_cap
  std::vector<double> marginals;   // P(d_j = 1 | evidence); empty iff evidence_prob == 0
  ExactMethod method = ExactMethod::Brute;
};

/// A real-valued function on the subsets of `base_set`, sharing one fixed
/// negative-evidence set. values[mask] is the entry whose subset contains
/// base_set[b] exactly when bit b of mask is set; a complete table has
/// 2^|base_set| entries.
struct SubsetTable {
  std::vector<int> base_set;   // ordered finding indices (I1)
  std::vector<int> fixed_i0;   // the I0 all entries share
  std::vector<double> values;  // indexed by bitmask over base_set

  bool complete() const {
    return base_set.size() < 64 && values.size() == (std::size_t{1} << base_set.size());
  }
};

/// The full matrix of P_{S1,S0} = P[(f)_{S1}=1, (f)_{S0}=0] over all
/// S1 in 2^{I1}, S0 in 2^{I0}. Entry (s1, s0) lives at s1 * 2^|i0| + s0;
/// the top-left entry is P_{empty,empty} = 1 and the bottom-right is
/// P_{I1,I0}, which every other entry dominates.
struct SubsetMatrix {
  std::vector<int> i1;
  std::vector<int> i0;
  std::vector<double> values;

  double at(std::uint64_t s1, std::uint64_t s0) const {
    return values[(s1 << i0.size()) | s0];
  }
};

namespace detail {

// t(phi) = (1 + e^{-phi}) / 2, the per-disease factor of a T term.
inline double t_of(double phi) { return 0.5 * (1.0 + std::exp(-phi)); }

// Shared Gray-code scan over subsets S of I1. Each step flips one finding
// in/out of S, updating the phi accumulator in O(|pa|), so the whole scan
// is O(2^{|I1|} * N_D). `visit(mask, parity, term, phi)` sees
// term = T_{S,I0} for the current subset.
template <typename Visit>
void scan_subsets(const NoisyOrNet& net, const LogParams& lp, const Evidence& ev,
                  int i1_cap, Visit&& visit) {
  const int nd = net.num_diseases();
  const int m = static_cast<int>(ev.i1.size());
  if (m > i1_cap)
    throw CapExceededError("|I1| = " + std::to_string(m) + " exceeds cap " +
                           std::to_string(i1_cap));

  std::vector<double> phi = lp.beta;  // phi_j(I0 u S)
  double leak_sum = 0.0;              // sum of theta_{i0} over I0 u S
  for (int i : ev.i0) {
    leak_sum += lp.leak_theta[i];
    for (const auto& [j, th] : lp.edge_theta[i]) phi[j] += th;
  }

  const double pow2_nd = std::ldexp(1.0, nd);
  std::uint64_t mask = 0;
  int parity = 0;
  for (std::uint64_t k = 0;; ++k) {
    double t_prod = 1.0;
    for (int j = 0; j < nd; ++j) t_prod *= t_of(phi[j]);
    const double term = std::exp(-lp.alpha_total - leak_sum) * pow2_nd * t_prod;
    visit(mask, parity, term, std::span<const double>(phi));

    if (k + 1 == (std::uint64_t{1} << m)) break;
    const int b = std::countr_zero(k + 1);
    const int i = ev.i1[b];
    const double sign = ((mask >> b) & 1) ? -1.0 : 1.0;
    mask ^= std::uint64_t{1} << b;
    parity ^= 1;
    leak_sum += sign * lp.leak_theta[i];
    for (const auto& [j, th] : lp.edge_theta[i]) phi[j] += sign * th;
  }
}

}  // namespace detail

/// P_{I1,I0} by direct summation over all 2^{N_D} disease vectors.
/// The independent oracle for every other backend.
inline double evidence_prob_brute(const NoisyOrNet& net, const Evidence& ev,
                                  int brute_cap = ExactOptions{}.brute_cap) {
  require_bitmask_capacity(net);
  ev.check(net.num_findings());
  const int nd = net.num_diseases();
  if (nd > brute_cap)
    throw CapExceededError("N_D = " + std::to_string(nd) + " exceeds brute-force cap " +
                           std::to_string(brute_cap));
  double total = 0.0;
  for (DiseaseBits d = 0; d < (DiseaseBits{1} << nd); ++d)
    total += net.prior_prob(d) * net.evidence_likelihood(ev, d);
  return total;
}

/// P_{I1,I0} as the alternating sum over subsets of I1,
///   sum_{S subset I1} (-1)^{|S|} T_{S,I0},
/// with T computed from the exponential parameterization. Runs in
/// O(2^{|I1|} * N_D) independent of |I0| and N_D's exponential.
/// Even and odd |S| contributions are accumulated separately and
/// subtracted once to limit cancellation.
inline double evidence_prob_incl_excl(const NoisyOrNet& net, const Evidence& ev,
                                      int i1_cap = ExactOptions{}.i1_cap) {
  require_bitmask_capacity(net);
  ev.check(net.num_findings());
  const LogParams lp = log_params(net);
  double even = 0.0, odd = 0.0;
  detail::scan_subsets(net, lp, ev, i1_cap,
                       [&](std::uint64_t, int parity, double term, std::span<const double>) {
                         (parity ? odd : even) += term;
                       });
  return even - odd;
}

/// Test utility for the product-to-sum identity: returns
///   lhs  = prod_x (1 - e^{-f(x)})
///   rhs  = sum_{S subset Omega} (-1)^{|S|} e^{-sum_{x in S} f(x)}
/// which agree exactly in real arithmetic.
inline std::pair<double, double> product_to_sum_check(std::span<const double> f_values) {
  const int n = static_cast<int>(f_values.size());
  if (n > 20) throw CapExceededError("product_to_sum_check limited to 20 values");
  double lhs = 1.0;
  for (double f : f_values) lhs *= 1.0 - std::exp(-f);
  double even = 0.0, odd = 0.0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    double sum = 0.0;
    for (int b = 0; b < n; ++b)
      if ((s >> b) & 1) sum += f_values[b];
    (std::popcount(s) & 1 ? odd : even) += std::exp(-sum);
  }
  return {lhs, even - odd};
}

/// T_{S,I0} for every S subset of I1, from the inclusion-exclusion machinery.
inline SubsetTable t_table(const NoisyOrNet& net, const Evidence& ev,
                           int i1_cap = ExactOptions{}.i1_cap) {
  require_bitmask_capacity(net);
  ev.check(net.num_findings());
  const LogParams lp = log_params(net);
  SubsetTable out;
  out.base_set = ev.i1;
  out.fixed_i0 = ev.i0;
  out.values.assign(std::size_t{1} << ev.i1.size(), 0.0);
  detail::scan_subsets(net, lp, ev, i1_cap,
                       [&](std::uint64_t mask, int, double term, std::span<const double>) {
                         out.values[mask] = term;
                       });
  return out;
}

namespace detail {

// The signed subset-sum transform out[S'] = sum_{S subset S'} (-1)^{|S|} in[S],
// an involution: applying it twice returns the input.
inline SubsetTable mobius_apply(const SubsetTable& in) {
  if (!in.complete())
    throw IncompleteTableError("subset table does not cover all 2^|base_set| subsets");
  SubsetTable out = in;
  auto& v = out.values;
  for (std::uint64_t s = 0; s < v.size(); ++s)
    if (std::popcount(s) & 1) v[s] = -v[s];
  const int n = static_cast<int>(in.base_set.size());
  for (int b = 0; b < n; ++b)
    for (std::uint64_t s = 0; s < v.size(); ++s)
      if ((s >> b) & 1) v[s] += v[s ^ (std::uint64_t{1} << b)];
  return out;
}

}  // namespace detail

/// P table from a T table: P_{S',I0} = sum_{S subset S'} (-1)^{|S|} T_{S,I0}.
inline SubsetTable mobius_forward(const SubsetTable& t) { return detail::mobius_apply(t); }

/// T table from a P table; the same alternating transform (it is an involution).
inline SubsetTable mobius_inverse(const SubsetTable& p) { return detail::mobius_apply(p); }

/// The full Fig-style matrix P_{S1,S0} over all subset pairs, built one
/// fixed-S0 column at a time through the T machinery.
inline SubsetMatrix subset_probability_matrix(const NoisyOrNet& net, const Evidence& ev,
                                              int i1_cap = ExactOptions{}.i1_cap) {
  if (ev.i0.size() >= 26) throw CapExceededError("|I0| too large for a full subset matrix");
  SubsetMatrix m;
  m.i1 = ev.i1;
  m.i0 = ev.i0;
  const std::size_t n1 = std::size_t{1} << ev.i1.size();
  const std::size_t n0 = std::size_t{1} << ev.i0.size();
  m.values.assign(n1 * n0, 0.0);
  for (std::uint64_t s0 = 0; s0 < n0; ++s0) {
    Evidence sub;
    sub.i1 = ev.i1;
    for (std::size_t b = 0; b < ev.i0.size(); ++b)
      if ((s0 >> b) & 1) sub.i0.push_back(ev.i0[b]);
    const SubsetTable p = mobius_forward(t_table(net, sub, i1_cap));
    for (std::uint64_t s1 = 0; s1 < n1; ++s1) m.values[(s1 << ev.i0.size()) | s0] = p.values[s1];
  }
  return m;
}

/// Exact posterior report. The full posterior table is built only when
/// N_D <= full_table_cap; marginals are always computed. Marginals come from
/// clamping d_j = 1: under the chosen method that is either a restricted
/// enumeration (brute) or the factor e^{-phi_j} / (1 + e^{-phi_j}) replacing
/// disease j's t factor in every subset term (inclusion-exclusion).
inline PosteriorReport posterior_exact(const NoisyOrNet& net, const Evidence& ev,
                                       ExactMethod method, ExactOptions opts = {}) {
  require_bitmask_capacity(net);
  ev.check(net.num_findings());
  const int nd = net.num_diseases();
  PosteriorReport rep;
  rep.method = method;

  std::vector<double> marginal_num(nd, 0.0);
  if (method == ExactMethod::Brute) {
    if (nd > opts.brute_cap)
      throw CapExceededError("N_D = " + std::to_string(nd) + " exceeds brute-force cap " +
                             std::to_string(opts.brute_cap));
    const bool want_table = nd <= opts.full_table_cap;
    if (want_table) rep.posterior.assign(std::size_t{1} << nd, 0.0);
    for (DiseaseBits d = 0; d < (DiseaseBits{1} << nd); ++d) {
      const double term = net.prior_prob(d) * net.evidence_likelihood(ev, d);
      rep.evidence_prob += term;
      for (int j = 0; j < nd; ++j)
        if ((d >> j) & 1) marginal_num[j] += term;
      if (want_table) rep.posterior[d] = term;
    }
  } else {
    const LogParams lp = log_params(net);
    double even = 0.0, odd = 0.0;
    std::vector<double> even_j(nd, 0.0), odd_j(nd, 0.0);
    detail::scan_subsets(net, lp, ev, opts.i1_cap,
                         [&](std::uint64_t, int parity, double term, std::span<const double> phi) {
                           (parity ? odd : even) += term;
                           auto& bucket = parity ? odd_j : even_j;
                           for (int j = 0; j < nd; ++j) {
                             // term * P(d_j=1 contribution)/t(phi_j): logistic(-phi_j)
                             bucket[j] += term / (1.0 + std::exp(phi[j]));
                           }
                         });
    rep.evidence_prob = even - odd;
    for (int j = 0; j < nd; ++j) marginal_num[j] = even_j[j] - odd_j[j];
    if (nd <= opts.full_table_cap) {
      rep.posterior.assign(std::size_t{1} << nd, 0.0);
      for (DiseaseBits d = 0; d < (DiseaseBits{1} << nd); ++d)
        rep.posterior[d] = net.prior_prob(d) * net.evidence_likelihood(ev, d);
    }
  }

  if (rep.evidence_prob > 0.0) {
    rep.marginals.resize(nd);
    for (int j = 0; j < nd; ++j) rep.marginals[j] = marginal_num[j] / rep.evidence_prob;
    for (auto& p : rep.posterior) p /= rep.evidence_prob;
  } else {
    // Conditioning on a zero-probability pattern: no posterior exists.
    rep.posterior.clear();
  }
  return rep;
}

}  // namespace noisyor::exact
