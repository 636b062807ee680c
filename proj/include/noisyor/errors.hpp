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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace noisyor {

/// Structural problems reported by NoisyOrNet::validate().
enum class ViolationKind {
  PriorOutOfRange,
  QOutOfRange,
  DuplicateName,
  BadParentIndex,
  DuplicateEdge,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::PriorOutOfRange: return "PriorOutOfRange";
    case ViolationKind::QOutOfRange: return "QOutOfRange";
    case ViolationKind::DuplicateName: return "DuplicateName";
    case ViolationKind::BadParentIndex: return "BadParentIndex";
    case ViolationKind::DuplicateEdge: return "DuplicateEdge";
  }
  return "UnknownViolation";
}

struct Violation {
  ViolationKind kind;
  std::string where;
};

inline std::string to_string(const Violation& v) {
  return std::string(to_string(v.kind)) + " " + v.where;
}

/// Thrown when an operation requires a valid net but validate() fails.
class InvalidNetError : public std::runtime_error {
 public:
  explicit InvalidNetError(std::vector<Violation> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<Violation>& vs) {
    std::string msg = "invalid net:";
    for (const auto& v : vs) msg += " [" + to_string(v) + "]";
    return msg;
  }

  std::vector<Violation> violations_;
};

/// A problem-size cap (disease count, |I1|, qubit count) was exceeded.
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A prior of exactly 0 or 1, or an activation probability of exactly 1,
/// has no finite exponential parameterization.
class DegenerateParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A subset-function table does not cover every subset of its base set.
class IncompleteTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed net or evidence file content.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evidence that does not resolve against the net (unknown names,
/// overlapping positive/negative sets, indices out of range).
class EvidenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace noisyor
