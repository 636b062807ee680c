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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "noisyor/exact.hpp"
#include "test_util.hpp"

using namespace noisyor;
using namespace noisyor::exact;
using testutil::random_evidence;
using testutil::random_net;

namespace {

NoisyOrNet tiny_net() {
  NoisyOrNet net;
  net.diseases = {{"d0", 0.5}};
  net.findings = {{"f0", 0.0, {{0, 0.4}}}};
  return net;
}

}  // namespace

TEST_CASE("brute force: no evidence has probability one") {
  Rng rng(100);
  const auto net = random_net(rng);
  CHECK(evidence_prob_brute(net, Evidence{}) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("brute force on the single-disease net") {
  // Enumerating d in {0,1}: 0.5 * 0 + 0.5 * 0.4.
  CHECK(evidence_prob_brute(tiny_net(), Evidence::make({}, {0})) ==
        Catch::Approx(0.2).margin(1e-15));
}

TEST_CASE("brute force enforces its configurable disease cap") {
  NoisyOrNet big;
  for (int j = 0; j < 30; ++j) big.diseases.push_back({"d" + std::to_string(j), 0.1});
  CHECK_THROWS_AS(evidence_prob_brute(big, Evidence{}), CapExceededError);

  NoisyOrNet small;
  for (int j = 0; j < 5; ++j) small.diseases.push_back({"d" + std::to_string(j), 0.1});
  CHECK_THROWS_AS(evidence_prob_brute(small, Evidence{}, 3), CapExceededError);
  CHECK(evidence_prob_brute(small, Evidence{}, 5) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("inclusion-exclusion matches brute force on the examples") {
  const auto net = tiny_net();
  CHECK(evidence_prob_incl_excl(net, Evidence::make({}, {0})) ==
        Catch::Approx(0.2).margin(1e-12));

  // Empty I1: a single T term, P[(f)_{I0} = 0].
  const Evidence neg = Evidence::make({0}, {});
  CHECK(evidence_prob_incl_excl(net, neg) ==
        Catch::Approx(evidence_prob_brute(net, neg)).margin(1e-12));

  // Complement rule: P(f_i = 1) = 1 - P(f_i = 0).
  CHECK(evidence_prob_incl_excl(net, Evidence::make({}, {0})) ==
        Catch::Approx(1.0 - evidence_prob_incl_excl(net, neg)).margin(1e-12));
}

TEST_CASE("backends agree on random nets") {
  Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    testutil::RandomNetOptions opt;
    opt.max_nd = 10;
    opt.max_nf = 6;
    opt.leak_hi = trial % 3 ? 0.0 : 0.3;
    const auto net = random_net(rng, opt);
    const auto ev = random_evidence(rng, net, 4, 4);
    const double pb = evidence_prob_brute(net, ev);
    const double pie = evidence_prob_incl_excl(net, ev);
    CHECK(std::abs(pb - pie) <= 1e-10 * (1.0 + pb));
  }
}

TEST_CASE("inclusion-exclusion refuses degenerate parameters") {
  NoisyOrNet net;
  net.diseases = {{"d0", 1.0}};
  net.findings = {{"f0", 0.0, {{0, 0.4}}}};
  CHECK_THROWS_AS(evidence_prob_incl_excl(net, Evidence::make({}, {0})),
                  DegenerateParameterError);
  CHECK_NOTHROW(evidence_prob_brute(net, Evidence::make({}, {0})));
}

TEST_CASE("product-to-sum identity") {
  const auto [lhs0, rhs0] = product_to_sum_check({});
  CHECK(lhs0 == 1.0);
  CHECK(rhs0 == 1.0);

  const std::vector<double> one{0.7};
  const auto [lhs1, rhs1] = product_to_sum_check(one);
  CHECK(lhs1 == Catch::Approx(1.0 - std::exp(-0.7)).margin(1e-15));
  CHECK(rhs1 == Catch::Approx(lhs1).margin(1e-15));

  Rng rng(102);
  std::vector<double> f(10);
  for (auto& x : f) x = 0.05 + 4.0 * rng.next_double();
  const auto [lhs, rhs] = product_to_sum_check(f);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
}

TEST_CASE("Mobius transform on a singleton base set") {
  SubsetTable t;
  t.base_set = {4};
  t.values = {2.5, 0.75};  // T(empty) = a, T({4}) = b
  const auto p = mobius_forward(t);
  CHECK(p.values[0] == 2.5);
  CHECK(p.values[1] == Catch::Approx(2.5 - 0.75).margin(1e-15));
}

TEST_CASE("Mobius transform is an involution") {
  Rng rng(103);
  SubsetTable t;
  t.base_set = {0, 1, 2, 3, 4, 5};
  t.values.resize(64);
  for (auto& v : t.values) v = 2.0 * rng.next_double() - 1.0;
  const auto back = mobius_inverse(mobius_forward(t));
  for (std::size_t s = 0; s < t.values.size(); ++s)
    CHECK(back.values[s] == Catch::Approx(t.values[s]).margin(1e-12));
}

TEST_CASE("Mobius transform rejects incomplete tables") {
  SubsetTable t;
  t.base_set = {0, 1};
  t.values = {1.0, 2.0, 3.0};  // missing one subset
  CHECK_THROWS_AS(mobius_forward(t), IncompleteTableError);
}

TEST_CASE("P table from the T machinery matches per-subset brute force") {
  Rng rng(104);
  for (int trial = 0; trial < 5; ++trial) {
    testutil::RandomNetOptions opt;
    opt.max_nd = 6;
    opt.leak_hi = 0.2;
    const auto net = random_net(rng, opt);
    Evidence ev = random_evidence(rng, net, 4, 2);
    const auto p = mobius_forward(t_table(net, ev));
    for (std::uint64_t mask = 0; mask < p.values.size(); ++mask) {
      Evidence sub;
      sub.i0 = ev.i0;
      for (std::size_t b = 0; b < ev.i1.size(); ++b)
        if ((mask >> b) & 1) sub.i1.push_back(ev.i1[b]);
      CHECK(p.values[mask] ==
            Catch::Approx(evidence_prob_brute(net, sub)).margin(1e-10));
    }
  }
}

TEST_CASE("subset matrix starts at one and dominates the full-evidence entry") {
  Rng rng(105);
  for (int trial = 0; trial < 5; ++trial) {
    const auto net = random_net(rng);
    const auto ev = random_evidence(rng, net, 3, 3);
    const auto m = subset_probability_matrix(net, ev);
    CHECK(m.at(0, 0) == Catch::Approx(1.0).margin(1e-12));
    const double bottom_right =
        m.at((std::uint64_t{1} << ev.i1.size()) - 1, (std::uint64_t{1} << ev.i0.size()) - 1);
    for (double v : m.values) CHECK(v >= bottom_right - 1e-12);
  }
}

TEST_CASE("posterior with no evidence returns the priors") {
  Rng rng(106);
  const auto net = random_net(rng);
  for (auto method : {ExactMethod::Brute, ExactMethod::InclExcl}) {
    const auto rep = posterior_exact(net, Evidence{}, method);
    CHECK(rep.evidence_prob == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rep.marginals.size() == net.diseases.size());
    for (int j = 0; j < net.num_diseases(); ++j)
      CHECK(rep.marginals[j] == Catch::Approx(net.diseases[j].prior).margin(1e-12));
  }
}

TEST_CASE("posterior on the forced single-disease net") {
  // Leak 0 and f observed positive force d = 1: 0.2 / 0.2.
  const auto net = tiny_net();
  const Evidence ev = Evidence::make({}, {0});
  for (auto method : {ExactMethod::Brute, ExactMethod::InclExcl}) {
    const auto rep = posterior_exact(net, ev, method);
    CHECK(rep.evidence_prob == Catch::Approx(0.2).margin(1e-12));
    CHECK(rep.marginals[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rep.posterior.size() == 2);
    CHECK(rep.posterior[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(rep.posterior[1] == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("posterior reports agree across backends entrywise") {
  Rng rng(107);
  for (int trial = 0; trial < 8; ++trial) {
    testutil::RandomNetOptions opt;
    opt.max_nd = 8;
    opt.leak_hi = trial % 2 ? 0.25 : 0.0;
    const auto net = random_net(rng, opt);
    const auto ev = random_evidence(rng, net, 3, 3);
    const auto rb = posterior_exact(net, ev, ExactMethod::Brute);
    const auto ri = posterior_exact(net, ev, ExactMethod::InclExcl);
    CHECK(std::abs(rb.evidence_prob - ri.evidence_prob) <= 1e-10 * (1.0 + rb.evidence_prob));
    REQUIRE(rb.marginals.size() == ri.marginals.size());
    for (std::size_t j = 0; j < rb.marginals.size(); ++j)
      CHECK(rb.marginals[j] == Catch::Approx(ri.marginals[j]).margin(1e-10));
    REQUIRE(rb.posterior.size() == ri.posterior.size());
    for (std::size_t d = 0; d < rb.posterior.size(); ++d)
      CHECK(rb.posterior[d] == Catch::Approx(ri.posterior[d]).margin(1e-10));
  }
}

TEST_CASE("posterior table is normalized and consistent with marginals") {
  Rng rng(108);
  for (int trial = 0; trial < 6; ++trial) {
    const auto net = random_net(rng);
    const auto ev = random_evidence(rng, net, 3, 3);
    const auto rep = posterior_exact(net, ev, ExactMethod::Brute);
    REQUIRE(!rep.posterior.empty());
    double total = 0.0;
    std::vector<double> from_table(net.num_diseases(), 0.0);
    for (DiseaseBits d = 0; d < rep.posterior.size(); ++d) {
      total += rep.posterior[d];
      for (int j = 0; j < net.num_diseases(); ++j)
        if ((d >> j) & 1) from_table[j] += rep.posterior[d];
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-10));
    for (int j = 0; j < net.num_diseases(); ++j)
      CHECK(from_table[j] == Catch::Approx(rep.marginals[j]).margin(1e-10));
  }
}

TEST_CASE("posterior table is skipped above the cap") {
  Rng rng(109);
  testutil::RandomNetOptions opt;
  opt.max_nd = 6;
  auto net = random_net(rng, opt);
  ExactOptions eopt;
  eopt.full_table_cap = net.num_diseases() - 1;
  const auto rep = posterior_exact(net, Evidence{}, ExactMethod::Brute, eopt);
  CHECK(rep.posterior.empty());
  CHECK(!rep.marginals.empty());
}

TEST_CASE("impossible evidence yields a zero probability and no posterior") {
  NoisyOrNet net;
  net.diseases = {{"d0", 0.5}};
  net.findings = {{"f0", 0.0, {{0, 0.0}}}};  // f0 can never fire
  const Evidence ev = Evidence::make({}, {0});
  for (auto method : {ExactMethod::Brute, ExactMethod::InclExcl}) {
    const auto rep = posterior_exact(net, ev, method);
    CHECK(rep.evidence_prob == 0.0);
    CHECK(rep.marginals.empty());
    CHECK(rep.posterior.empty());
  }
}
