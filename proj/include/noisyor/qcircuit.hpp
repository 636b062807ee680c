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

#include <complex>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "noisyor/net.hpp"
#include "noisyor/rng.hpp"
#include "noisyor/sampling.hpp"

namespace noisyor::qsim {

using cx = std::complex<double>;

/// Small dense complex matrix, row-major.
struct CMatrix {
  std::size_t dim = 0;
  std::vector<cx> a;

  explicit CMatrix(std::size_t d) : dim(d), a(d * d, cx{0.0, 0.0}) {}

  cx& at(std::size_t r, std::size_t c) { return a[r * dim + c]; }
  const cx& at(std::size_t r, std::size_t c) const { return a[r * dim + c]; }

  static CMatrix identity(std::size_t d) {
    CMatrix m(d);
    for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

enum class GateKind {
  PrepareDisease,  // U_j: |0> -> sqrt(1-p)|0> + sqrt(p)|1> on a disease wire
  EmbedEdge,       // A_ij: two-qubit embedding of P(d'_j | d_j) on (ancilla, disease)
  PrepareLeak,     // leak edge: |1> -> sqrt(1-q)|0> + sqrt(q)|1> on the leak ancilla
  OrCombine,       // A_OR: i X on the finding wire iff any control ancilla is 1
};

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::PrepareDisease: return "prepare_disease";
    case GateKind::EmbedEdge: return "embed_edge";
    case GateKind::PrepareLeak: return "prepare_leak";
    case GateKind::OrCombine: return "or_combine";
  }
  return "unknown";
}

struct Gate {
  GateKind kind;
  int target = -1;            // wire written: ancilla (embed), disease (prepare), finding (or)
  int disease = -1;           // EmbedEdge only: the disease wire
  std::vector<int> controls;  // OrCombine only: parent (and leak) ancillas
  double param = 0.0;         // prior p_j or activation q
};

/// Wire assignment for a net's circuit. One ancilla per edge carries the
/// d'_j copy consumed by its finding; leaky findings get one extra
/// always-on ancilla edge. Total qubits = N_D + edges (incl. leaks) + N_F.
struct QubitLayout {
  int n_qubits = 0;
  std::vector<int> disease_qubits;                // per disease (the td_j outputs)
  std::vector<std::vector<int>> edge_ancillas;    // [finding][parent slot]
  std::vector<int> leak_ancillas;                 // per finding, -1 when leak == 0
  std::vector<int> finding_qubits;                // tau_i per finding
  std::vector<std::uint8_t> initial;              // initial bit per qubit
};

struct Circuit {
  QubitLayout layout;
  std::vector<Gate> gates;
};

/// Builds the q-embedding circuit: every disease prepared by U_j, one A
/// gate per edge writing that edge's ancilla, then one OR gate per finding
/// controlled on its ancillas.
inline Circuit build_circuit(const NoisyOrNet& net, int qubit_cap = 24) {
  require_bitmask_capacity(net);
  const int nd = net.num_diseases();
  const int nf = net.num_findings();

  int total = nd + nf;
  for (const auto& f : net.findings)
    total += static_cast<int>(f.parents.size()) + (f.leak > 0.0 ? 1 : 0);
  if (total > qubit_cap)
    throw CapExceededError("circuit needs " + std::to_string(total) + " qubits, cap is " +
                           std::to_string(qubit_cap));

  Circuit c;
  auto& L = c.layout;
  L.n_qubits = total;
  L.initial.assign(total, 0);

  int q = 0;
  L.disease_qubits.resize(nd);
  for (int j = 0; j < nd; ++j) L.disease_qubits[j] = q++;
  L.edge_ancillas.resize(nf);
  L.leak_ancillas.assign(nf, -1);
  L.finding_qubits.resize(nf);
  for (int i = 0; i < nf; ++i) {
    const auto& f = net.findings[i];
    for (std::size_t s = 0; s < f.parents.size(); ++s) L.edge_ancillas[i].push_back(q++);
    if (f.leak > 0.0) {
      L.leak_ancillas[i] = q;
      L.initial[q] = 1;  // the always-on source
      ++q;
    }
    L.finding_qubits[i] = q++;
  }

  for (int j = 0; j < nd; ++j)
    c.gates.push_back({GateKind::PrepareDisease, L.disease_qubits[j], -1, {},
                       net.diseases[j].prior});
  for (int i = 0; i < nf; ++i) {
    const auto& f = net.findings[i];
    for (std::size_t s = 0; s < f.parents.size(); ++s)
      c.gates.push_back({GateKind::EmbedEdge, L.edge_ancillas[i][s],
                         L.disease_qubits[f.parents[s].disease], {}, f.parents[s].q});
    if (f.leak > 0.0)
      c.gates.push_back({GateKind::PrepareLeak, L.leak_ancillas[i], -1, {}, f.leak});
  }
  for (int i = 0; i < nf; ++i) {
    Gate g{GateKind::OrCombine, L.finding_qubits[i], -1, L.edge_ancillas[i], 0.0};
    if (L.leak_ancillas[i] >= 0) g.controls.push_back(L.leak_ancillas[i]);
    c.gates.push_back(std::move(g));
  }
  return c;
}

/// The likelihood-weighting modification of the circuit: evidence finding
/// qubits are initialized to their observed values, and every gate that
/// could change an evidence qubit's state (exactly the OR gates targeting
/// it; finding qubits are never controls) is removed. All edge embeddings
/// remain, so disease wires still carry the prior.
inline Circuit build_lw_circuit(const NoisyOrNet& net, const Evidence& ev,
                                int qubit_cap = 24) {
  ev.check(net.num_findings());
  Circuit c = build_circuit(net, qubit_cap);
  for (int i : ev.i1) c.layout.initial[c.layout.finding_qubits[i]] = 1;

  const FindingBits evidence_mask = ev.i0_mask() | ev.i1_mask();
  std::vector<int> finding_of(c.layout.n_qubits, -1);
  for (int i = 0; i < net.num_findings(); ++i) finding_of[c.layout.finding_qubits[i]] = i;

  std::vector<Gate> kept;
  kept.reserve(c.gates.size());
  for (auto& g : c.gates) {
    const int fi = g.target >= 0 ? finding_of[g.target] : -1;
    if (fi >= 0 && ((evidence_mask >> fi) & 1)) continue;
    kept.push_back(std::move(g));
  }
  c.gates = std::move(kept);
  return c;
}

/// The dense unitary of a gate, for inspection and tests. Basis index bit
/// order: the target wire is the most significant bit, followed by the
/// controls in listed order (matching the row labels (f, te_1, te_2) of
/// the two-parent OR matrix).
inline CMatrix gate_matrix(const Gate& g) {
  switch (g.kind) {
    case GateKind::PrepareDisease: {
      const double s = std::sqrt(g.param), c = std::sqrt(1.0 - g.param);
      CMatrix m(2);
      m.at(0, 0) = c;
      m.at(0, 1) = -s;
      m.at(1, 0) = s;
      m.at(1, 1) = c;
      return m;
    }
    case GateKind::PrepareLeak: {
      const double s = std::sqrt(g.param), c = std::sqrt(1.0 - g.param);
      CMatrix m(2);
      m.at(0, 0) = s;
      m.at(0, 1) = c;
      m.at(1, 0) = -c;
      m.at(1, 1) = s;
      return m;
    }
    case GateKind::EmbedEdge: {
      // Rows and columns indexed (ancilla << 1) | disease.
      const double s = std::sqrt(g.param), c = std::sqrt(1.0 - g.param);
      CMatrix m(4);
      m.at(0, 0) = 1.0;
      m.at(1, 1) = c;
      m.at(1, 3) = -s;
      m.at(2, 2) = 1.0;
      m.at(3, 1) = s;
      m.at(3, 3) = c;
      return m;
    }
    case GateKind::OrCombine: {
      const std::size_t k = g.controls.size();
      CMatrix m(std::size_t{2} << k);
      for (std::size_t col = 0; col < m.dim; ++col) {
        const std::size_t ctrl = col & ((std::size_t{1} << k) - 1);
        const std::size_t tb = col >> k;
        if (ctrl == 0)
          m.at(col, col) = 1.0;
        else
          m.at(((tb ^ 1) << k) | ctrl, col) = cx{0.0, 1.0};
      }
      return m;
    }
  }
  return CMatrix::identity(1);
}

/// Dense amplitude vector over 2^n basis states. Qubit 0 is the most
/// significant bit of the basis index (the paper's top wire).
class StateVector {
 public:
  StateVector(int n_qubits, std::span<const std::uint8_t> initial)
      : n_(n_qubits), amp_(std::size_t{1} << n_qubits, cx{0.0, 0.0}) {
    std::size_t idx = 0;
    for (int q = 0; q < n_qubits; ++q)
      if (initial[q]) idx |= bit(q);
    amp_[idx] = 1.0;
  }

  int n_qubits() const { return n_; }
  const std::vector<cx>& amplitudes() const { return amp_; }

  std::size_t bit(int qubit) const { return std::size_t{1} << (n_ - 1 - qubit); }

  void apply(const Gate& g) {
    switch (g.kind) {
      case GateKind::PrepareDisease:
      case GateKind::PrepareLeak:
        apply_1q(gate_matrix(g), g.target);
        break;
      case GateKind::EmbedEdge:
        apply_2q(gate_matrix(g), g.target, g.disease);
        break;
      case GateKind::OrCombine:
        apply_or(g.target, g.controls);
        break;
    }
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return s;
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amp_.size());
    for (std::size_t i = 0; i < amp_.size(); ++i) p[i] = std::norm(amp_[i]);
    return p;
  }

  /// Marginal probability that `qubit` reads `value`.
  double bit_probability(int qubit, int value) const {
    const std::size_t m = bit(qubit);
    double p = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if (((i & m) != 0) == (value != 0)) p += std::norm(amp_[i]);
    return p;
  }

 private:
  void apply_1q(const CMatrix& m, int qubit) {
    const std::size_t t = bit(qubit);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & t) continue;
      const cx a0 = amp_[i], a1 = amp_[i | t];
      amp_[i] = m.at(0, 0) * a0 + m.at(0, 1) * a1;
      amp_[i | t] = m.at(1, 0) * a0 + m.at(1, 1) * a1;
    }
  }

  // hi is the wire mapped to the high bit of the 4x4 matrix index.
  void apply_2q(const CMatrix& m, int hi, int lo) {
    const std::size_t mh = bit(hi), ml = bit(lo);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & (mh | ml)) continue;
      const cx a[4] = {amp_[i], amp_[i | ml], amp_[i | mh], amp_[i | mh | ml]};
      for (std::size_t r = 0; r < 4; ++r) {
        cx v{0.0, 0.0};
        for (std::size_t c = 0; c < 4; ++c) v += m.at(r, c) * a[c];
        amp_[i | (r & 2 ? mh : 0) | (r & 1 ? ml : 0)] = v;
      }
    }
  }

  // A_OR: wherever the OR of the control bits is 1, flip the target bit
  // and multiply by i; identity elsewhere.
  void apply_or(int target, const std::vector<int>& controls) {
    const std::size_t t = bit(target);
    std::size_t any = 0;
    for (int c : controls) any |= bit(c);
    const cx phase{0.0, 1.0};
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & t) continue;
      if ((i & any) == 0) continue;
      const cx a0 = amp_[i];
      amp_[i] = phase * amp_[i | t];
      amp_[i | t] = phase * a0;
    }
  }

  int n_;
  std::vector<cx> amp_;
};

/// Applies the gate list in temporal order to the initial product state.
inline StateVector simulate(const Circuit& c) {
  StateVector sv(c.layout.n_qubits, c.layout.initial);
  for (const auto& g : c.gates) sv.apply(g);
  return sv;
}

/// Walker/Vose alias table for O(1) draws from a discrete distribution.
/// Construction and sampling are fully deterministic.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) : prob_(weights.size()), alias_(weights.size()) {
    const std::size_t n = weights.size();
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

    std::vector<std::uint64_t> small, large;
    for (std::size_t i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
      const std::uint64_t s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint64_t i : large) prob_[i] = 1.0;
    for (std::uint64_t i : small) prob_[i] = 1.0;  // numerical leftovers
  }

  std::uint64_t sample(Rng& rng) const {
    const std::uint64_t col = rng.next_below(prob_.size());
    return rng.next_double() < prob_[col] ? col : alias_[col];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint64_t> alias_;
};

/// Born-rule measurement: n i.i.d. basis-state draws from |amplitude|^2.
/// One statevector is sampled repeatedly; outcomes are distributionally
/// identical to rerunning the circuit per shot.
inline std::vector<std::uint64_t> measure_samples(const StateVector& sv, std::uint64_t n_sam,
                                                  Rng& rng) {
  const AliasTable table{std::span<const double>(sv.probabilities())};
  std::vector<std::uint64_t> out(n_sam);
  for (auto& s : out) s = table.sample(rng);
  return out;
}

/// Reads the disease and finding bits out of a measured basis index.
/// Samples are always reported disease-bits-then-finding-bits, independent
/// of the internal wire order.
inline std::pair<DiseaseBits, FindingBits> extract_sample(const QubitLayout& L,
                                                          std::uint64_t basis_index) {
  DiseaseBits d = 0;
  for (std::size_t j = 0; j < L.disease_qubits.size(); ++j)
    if (basis_index & (std::uint64_t{1} << (L.n_qubits - 1 - L.disease_qubits[j])))
      d |= DiseaseBits{1} << j;
  FindingBits f = 0;
  for (std::size_t i = 0; i < L.finding_qubits.size(); ++i)
    if (basis_index & (std::uint64_t{1} << (L.n_qubits - 1 - L.finding_qubits[i])))
      f |= FindingBits{1} << i;
  return {d, f};
}

/// Marginal distribution over (d, f) after summing |amp|^2 over every
/// ancilla wire; indexed (d << N_F) | f. By the embedding construction this
/// equals the classical joint.
inline std::vector<double> embedded_joint(const StateVector& sv, const QubitLayout& L) {
  const int nf = static_cast<int>(L.finding_qubits.size());
  std::vector<double> out(std::size_t{1} << (L.disease_qubits.size() + nf), 0.0);
  const auto& amp = sv.amplitudes();
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double p = std::norm(amp[i]);
    if (p == 0.0) continue;
    const auto [d, f] = extract_sample(L, i);
    out[(d << nf) | f] += p;
  }
  return out;
}

/// One gate per line, stable field order; for inspection and dumps.
inline std::string circuit_to_text(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.layout.n_qubits << "\n";
  os << "initial ";
  for (int q = 0; q < c.layout.n_qubits; ++q) os << int(c.layout.initial[q]);
  os << "\n";
  for (const auto& g : c.gates) {
    os << to_string(g.kind) << " target=" << g.target;
    if (g.kind == GateKind::EmbedEdge) os << " disease=" << g.disease;
    if (g.kind == GateKind::OrCombine) {
      os << " controls=";
      for (std::size_t i = 0; i < g.controls.size(); ++i)
        os << (i ? "," : "") << g.controls[i];
    }
    if (g.kind != GateKind::OrCombine) os << " param=" << g.param;
    os << "\n";
  }
  return os.str();
}

/// Rejection sampling with circuit-measurement draws in place of classical
/// ancestral sampling; tallies and report match the classical sampler.
inline sampling::SampleRun quantum_rejection(const NoisyOrNet& net, const Evidence& ev,
                                             std::uint64_t n_sam, std::uint64_t seed,
                                             int workers = 1, int qubit_cap = 24,
                                             std::size_t table_cap = std::size_t{1} << 16) {
  ev.check(net.num_findings());
  const Circuit c = build_circuit(net, qubit_cap);
  const StateVector sv = simulate(c);
  const AliasTable table{std::span<const double>(sv.probabilities())};
  const FindingBits i0m = ev.i0_mask();
  const FindingBits i1m = ev.i1_mask();

  sampling::Accumulator acc = sampling::detail::run_streams(
      net.num_diseases(), n_sam, workers, table_cap,
      [&](int stream, std::uint64_t count, sampling::Accumulator& a) {
        Rng rng(seed, static_cast<std::uint64_t>(stream));
        for (std::uint64_t k = 0; k < count; ++k) {
          const auto [d, f] = extract_sample(c.layout, table.sample(rng));
          ++a.n_drawn;
          if ((f & i0m) == 0 && (f & i1m) == i1m) a.add(d, 1.0);
        }
      });
  sampling::SampleRun run{std::move(acc), {}};
  run.report = sampling::detail::make_report(run.acc, /*rejection_mode=*/true);
  return run;
}

/// Likelihood weighting with draws from the evidence-modified circuit.
/// Evidence qubits read back their clamped values with probability 1; the
/// weight L_evi(d) is computed classically from the net.
inline sampling::SampleRun quantum_lw(const NoisyOrNet& net, const Evidence& ev,
                                      std::uint64_t n_sam, std::uint64_t seed, int workers = 1,
                                      int qubit_cap = 24,
                                      std::size_t table_cap = std::size_t{1} << 16) {
  ev.check(net.num_findings());
  const Circuit c = build_lw_circuit(net, ev, qubit_cap);
  const StateVector sv = simulate(c);
  const AliasTable table{std::span<const double>(sv.probabilities())};

  sampling::Accumulator acc = sampling::detail::run_streams(
      net.num_diseases(), n_sam, workers, table_cap,
      [&](int stream, std::uint64_t count, sampling::Accumulator& a) {
        Rng rng(seed, static_cast<std::uint64_t>(stream));
        for (std::uint64_t k = 0; k < count; ++k) {
          const auto [d, f] = extract_sample(c.layout, table.sample(rng));
          (void)f;  // unknown findings ride along; only d feeds the weight
          ++a.n_drawn;
          const double L = net.evidence_likelihood(ev, d);
          if (L > 0.0) a.add(d, L);
        }
      });
  sampling::SampleRun run{std::move(acc), {}};
  run.report = sampling::detail::make_report(run.acc, /*rejection_mode=*/false);
  return run;
}

}  // namespace noisyor::qsim
