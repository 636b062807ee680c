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

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "noisyor/net.hpp"
#include "noisyor/rng.hpp"

namespace noisyor::io {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Canonical JSON form of a net. Field order is fixed; a zero leak is
/// omitted. parse(serialize(parse(x))) == parse(x) for every valid file.
inline ordered_json net_to_json(const NoisyOrNet& net) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["diseases"] = ordered_json::array();
  for (const auto& d : net.diseases) j["diseases"].push_back({{"name", d.name}, {"prior", d.prior}});
  j["findings"] = ordered_json::array();
  for (const auto& f : net.findings) {
    ordered_json jf;
    jf["name"] = f.name;
    if (f.leak != 0.0) jf["leak"] = f.leak;
    jf["parents"] = ordered_json::array();
    for (const auto& e : f.parents) {
      const std::string parent_name =
          e.disease >= 0 && e.disease < net.num_diseases() ? net.diseases[e.disease].name : "?";
      jf["parents"].push_back({{"disease", parent_name}, {"q", e.q}});
    }
    j["findings"].push_back(std::move(jf));
  }
  return j;
}

/// Parses a net file. Structural problems (missing fields, wrong types,
/// unsupported schema) raise ParseError. Semantic problems are left for
/// validate(): an unknown parent name becomes an unresolved edge that
/// validate() reports as BadParentIndex.
inline NoisyOrNet net_from_json(const ordered_json& j) {
  try {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
      throw ParseError("net file: missing or unsupported schema_version");
    NoisyOrNet net;
    std::unordered_map<std::string, int> disease_index;
    for (const auto& jd : j.at("diseases")) {
      Disease d;
      d.name = jd.at("name").get<std::string>();
      d.prior = jd.at("prior").get<double>();
      disease_index.emplace(d.name, net.num_diseases());
      net.diseases.push_back(std::move(d));
    }
    for (const auto& jf : j.at("findings")) {
      Finding f;
      f.name = jf.at("name").get<std::string>();
      f.leak = jf.value("leak", 0.0);
      for (const auto& je : jf.contains("parents") ? jf.at("parents") : ordered_json::array()) {
        Edge e;
        const auto it = disease_index.find(je.at("disease").get<std::string>());
        e.disease = it == disease_index.end() ? -1 : it->second;
        e.q = je.at("q").get<double>();
        f.parents.push_back(e);
      }
      net.findings.push_back(std::move(f));
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("net file: ") + e.what());
  }
}

inline std::string serialize_net(const NoisyOrNet& net) { return net_to_json(net).dump(2) + "\n"; }

inline ordered_json evidence_to_json(const Evidence& ev, const NoisyOrNet& net) {
  ordered_json j;
  j["positive"] = ordered_json::array();
  for (int i : ev.i1) j["positive"].push_back(net.findings[i].name);
  j["negative"] = ordered_json::array();
  for (int i : ev.i0) j["negative"].push_back(net.findings[i].name);
  return j;
}

/// Resolves finding names against the net. Unknown names and overlapping
/// positive/negative sets raise EvidenceError.
inline Evidence evidence_from_json(const ordered_json& j, const NoisyOrNet& net) {
  std::unordered_map<std::string, int> finding_index;
  for (int i = 0; i < net.num_findings(); ++i) finding_index.emplace(net.findings[i].name, i);
  auto resolve = [&](const ordered_json& names, const char* what) {
    std::vector<int> out;
    for (const auto& jn : names) {
      const auto name = jn.get<std::string>();
      const auto it = finding_index.find(name);
      if (it == finding_index.end())
        throw EvidenceError(std::string(what) + " finding '" + name + "' not in net");
      out.push_back(it->second);
    }
    return out;
  };
  try {
    Evidence ev = Evidence::make(
        j.contains("negative") ? resolve(j.at("negative"), "negative") : std::vector<int>{},
        j.contains("positive") ? resolve(j.at("positive"), "positive") : std::vector<int>{});
    ev.check(net.num_findings());
    return ev;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("evidence file: ") + e.what());
  }
}

inline ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read file: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline NoisyOrNet load_net(const std::string& path) { return net_from_json(read_json_file(path)); }

inline Evidence load_evidence(const std::string& path, const NoisyOrNet& net) {
  return evidence_from_json(read_json_file(path), net);
}

/// Random-net generation, the synthetic stand-in for a real knowledge base.
struct GenOptions {
  int nd = 2;
  int nf = 3;
  double density = 1.0;  // per-(finding, disease) edge probability
  std::pair<double, double> prior_range{0.05, 0.5};
  std::pair<double, double> q_range{0.1, 0.9};
  std::pair<double, double> leak_range{0.0, 0.0};
  std::uint64_t seed = 0;
};

/// Deterministic in `seed`. Every finding is guaranteed at least one parent.
inline NoisyOrNet gen_net(const GenOptions& opt) {
  if (opt.nd < 1 || opt.nf < 0) throw std::invalid_argument("gen: need nd >= 1, nf >= 0");
  if (!(opt.density > 0.0 && opt.density <= 1.0))
    throw std::invalid_argument("gen: density must be in (0, 1]");
  auto check_range = [](std::pair<double, double> r, double lo, double hi, const char* what) {
    if (!(r.first <= r.second && r.first >= lo && r.second <= hi))
      throw std::invalid_argument(std::string("gen: bad ") + what + " range");
  };
  check_range(opt.prior_range, 1e-12, 1.0 - 1e-12, "prior");
  check_range(opt.q_range, 1e-12, 1.0 - 1e-12, "q");
  check_range(opt.leak_range, 0.0, 1.0 - 1e-12, "leak");

  Rng rng(opt.seed);
  auto uniform = [&rng](std::pair<double, double> r) {
    return r.first == r.second ? r.first : r.first + rng.next_double() * (r.second - r.first);
  };

  NoisyOrNet net;
  for (int j = 0; j < opt.nd; ++j)
    net.diseases.push_back({"d" + std::to_string(j), uniform(opt.prior_range)});
  for (int i = 0; i < opt.nf; ++i) {
    Finding f;
    f.name = "f" + std::to_string(i);
    f.leak = uniform(opt.leak_range);
    for (int j = 0; j < opt.nd; ++j)
      if (rng.bernoulli(opt.density)) f.parents.push_back({j, uniform(opt.q_range)});
    if (f.parents.empty())
      f.parents.push_back({static_cast<int>(rng.next_below(opt.nd)), uniform(opt.q_range)});
    net.findings.push_back(std::move(f));
  }
  return net;
}

}  // namespace noisyor::io
