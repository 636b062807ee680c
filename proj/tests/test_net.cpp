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

#include "noisyor/net.hpp"
#include "test_util.hpp"

using namespace noisyor;
using testutil::random_net;

TEST_CASE("validate accepts a minimal net") {
  NoisyOrNet net;
  net.diseases = {{"d0", 0.5}};
  REQUIRE(net.validate().empty());
}

TEST_CASE("validate reports a prior out of range") {
  NoisyOrNet net;
  net.diseases = {{"d0", 1.3}};
  const auto v = net.validate();
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::PriorOutOfRange);
  CHECK(v[0].where == "d0");
}

TEST_CASE("validate reports duplicate edges") {
  NoisyOrNet net;
  net.diseases = {{"d0", 0.5}};
  net.findings = {{"f0", 0.0, {{0, 0.3}, {0, 0.4}}}};
  const auto v = net.validate();
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::DuplicateEdge);
}

TEST_CASE("validate collects every violation") {
  NoisyOrNet net;
  net.diseases = {{"dup", 0.5}, {"dup", -0.1}};
  net.findings = {{"f0", 1.0, {{7, 0.3}, {0, 1.5}}}};
  const auto v = net.validate();
  std::vector<ViolationKind> kinds;
  for (const auto& x : v) kinds.push_back(x.kind);
  CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::DuplicateName) == 1);
  CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::PriorOutOfRange) == 1);
  CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::BadParentIndex) == 1);
  CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::QOutOfRange) == 2);  // leak + q
  CHECK_THROWS_AS(net.ensure_valid(), InvalidNetError);
}

TEST_CASE("prob_finding_given matches the closed noisy-OR forms") {
  NoisyOrNet net;
  net.diseases = {{"d0", 0.5}};
  net.findings = {{"f0", 0.0, {{0, 0.3}}}};
  CHECK(net.prob_finding_given(0, 0b1, 1) == Catch::Approx(0.3).margin(1e-15));

  NoisyOrNet net2;
  net2.diseases = {{"d0", 0.5}, {"d1", 0.5}};
  net2.findings = {{"f0", 0.0, {{0, 0.5}, {1, 0.5}}}};
  CHECK(net2.prob_finding_given(0, 0b11, 0) == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("prob_finding_given applies the leak as an always-on parent") {
  NoisyOrNet net;
  net.diseases = {{"d0", 0.5}, {"d1", 0.5}};
  net.findings = {{"f0", 0.1, {{0, 0.2}, {1, 0.7}}}};
  const double got = net.prob_finding_given(0, 0b01, 0);
  CHECK(got == Catch::Approx(0.9 * 0.8).margin(1e-12));
  CHECK(got == Catch::Approx(testutil::dprime_oracle(net, 0, 0b01, 0)).margin(1e-12));
}

TEST_CASE("prob_finding_given equals the explicit d'-node enumeration") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    testutil::RandomNetOptions opt;
    opt.max_nd = 3;
    opt.max_nf = 3;
    opt.leak_hi = trial % 2 ? 0.4 : 0.0;
    const auto net = random_net(rng, opt);
    for (DiseaseBits d = 0; d < (DiseaseBits{1} << net.num_diseases()); ++d) {
      for (int i = 0; i < net.num_findings(); ++i) {
        for (int f = 0; f <= 1; ++f) {
          CHECK(net.prob_finding_given(i, d, f) ==
                Catch::Approx(testutil::dprime_oracle(net, i, d, f)).margin(1e-12));
        }
      }
    }
  }
}

TEST_CASE("log and linear evaluations agree") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    testutil::RandomNetOptions opt;
    opt.leak_hi = 0.3;
    const auto net = random_net(rng, opt);
    for (int rep = 0; rep < 16; ++rep) {
      const DiseaseBits d = rng.next_u64() & ((DiseaseBits{1} << net.num_diseases()) - 1);
      for (int i = 0; i < net.num_findings(); ++i) {
        double direct = 1.0 - net.findings[i].leak;
        for (const auto& e : net.findings[i].parents)
          if ((d >> e.disease) & 1) direct *= 1.0 - e.q;
        CHECK(net.prob_finding_given(i, d, 0) == Catch::Approx(direct).margin(1e-12));
      }
    }
  }
}

TEST_CASE("turning a disease on never raises P(f=0)") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = random_net(rng);
    for (DiseaseBits d = 0; d < (DiseaseBits{1} << net.num_diseases()); ++d) {
      for (int j = 0; j < net.num_diseases(); ++j) {
        if ((d >> j) & 1) continue;
        for (int i = 0; i < net.num_findings(); ++i) {
          CHECK(net.prob_finding_given(i, d | (DiseaseBits{1} << j), 0) <=
                net.prob_finding_given(i, d, 0) + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("joint_prob handles edge nets") {
  NoisyOrNet prior_only;
  prior_only.diseases = {{"d0", 0.25}};
  CHECK(prior_only.joint_prob(0b1, 0) == Catch::Approx(0.25).margin(1e-15));

  NoisyOrNet deterministic;
  deterministic.diseases = {{"d0", 0.5}};
  deterministic.findings = {{"f0", 0.0, {{0, 1.0}}}};
  CHECK(deterministic.joint_prob(0b1, 0b1) == Catch::Approx(0.5).margin(1e-15));
  CHECK(deterministic.joint_prob(0b1, 0b0) == 0.0);
}

TEST_CASE("joint_prob is normalized") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    testutil::RandomNetOptions opt;
    opt.max_nd = 6;
    opt.max_nf = 6;
    opt.leak_hi = 0.3;
    const auto net = random_net(rng, opt);
    if (net.num_diseases() + net.num_findings() > 14) continue;
    double total = 0.0;
    for (DiseaseBits d = 0; d < (DiseaseBits{1} << net.num_diseases()); ++d)
      for (FindingBits f = 0; f < (FindingBits{1} << net.num_findings()); ++f)
        total += net.joint_prob(d, f);
    CHECK(total == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("log_params solves the defining equations") {
  NoisyOrNet net;
  net.diseases = {{"d0", 0.5}};
  net.findings = {{"f0", 0.0, {{0, 0.0}}}};
  auto lp = log_params(net);
  CHECK(lp.alpha[0] == Catch::Approx(std::log(2.0)).margin(1e-15));
  CHECK(lp.beta[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(lp.edge_theta[0][0].second == 0.0);  // q = 0 has no influence

  NoisyOrNet net2;
  net2.diseases = {{"d0", 0.2}};
  net2.findings = {{"f0", 0.0, {{0, 0.75}}}};
  auto lp2 = log_params(net2);
  CHECK(lp2.alpha[0] == Catch::Approx(-std::log(0.8)).margin(1e-12));
  CHECK(lp2.beta[0] == Catch::Approx(std::log(4.0)).margin(1e-12));
  CHECK(lp2.edge_theta[0][0].second == Catch::Approx(std::log(4.0)).margin(1e-12));
  CHECK(std::exp(-lp2.alpha[0]) == Catch::Approx(0.8).margin(1e-12));
  CHECK(std::exp(-lp2.alpha[0] - lp2.beta[0]) == Catch::Approx(0.2).margin(1e-12));
  CHECK(std::exp(-lp2.edge_theta[0][0].second) == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("log_params rejects degenerate parameters") {
  NoisyOrNet p0;
  p0.diseases = {{"d0", 0.0}};
  CHECK_THROWS_AS(log_params(p0), DegenerateParameterError);

  NoisyOrNet p1;
  p1.diseases = {{"d0", 1.0}};
  CHECK_THROWS_AS(log_params(p1), DegenerateParameterError);

  NoisyOrNet q1;
  q1.diseases = {{"d0", 0.5}};
  q1.findings = {{"f0", 0.0, {{0, 1.0}}}};
  CHECK_THROWS_AS(log_params(q1), DegenerateParameterError);
}

TEST_CASE("evidence is canonicalized and checked") {
  Evidence ev = Evidence::make({3, 1, 3}, {0, 2});
  CHECK(ev.i0 == std::vector<int>{1, 3});
  CHECK(ev.i1 == std::vector<int>{0, 2});
  CHECK(ev.i0_mask() == 0b1010u);
  CHECK(ev.i1_mask() == 0b0101u);
  CHECK_NOTHROW(ev.check(4));
  CHECK_THROWS_AS(ev.check(3), EvidenceError);
  CHECK_THROWS_AS(Evidence::make({1}, {1}).check(2), EvidenceError);
}
