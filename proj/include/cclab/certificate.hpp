// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cclab {

inline constexpr double kBoundTol = 1e-8;
inline constexpr double kIdentityTol = 1e-9;

// One certified relation. For an inequality achieved <= bound, slack is
// bound - achieved. For an identity achieved == target, slack is
// -|achieved - target|. ok iff slack >= -tol.
struct Check {
  std::string name;
  double achieved = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double tol = 0.0;
  bool identity = false;
  bool ok = false;
};

struct TheoremCertificate {
  int theorem = 0;
  std::size_t d = 0;
  std::map<std::string, double> quantities;
  std::vector<Check> checks;
  double tol = kBoundTol;
  bool ok = false;
  std::optional<std::uint64_t> seed;

  void bound(const std::string& name, double achieved, double limit, std::optional<double> t = std::nullopt) {
    Check c{name, achieved, limit, limit - achieved, t.value_or(tol), false, false};
    c.ok = c.slack >= -c.tol;
    checks.push_back(c);
  }

  void identity(const std::string& name, double achieved, double target, double t = kIdentityTol) {
    Check c{name, achieved, target, -std::abs(achieved - target), t, true, false};
    c.ok = c.slack >= -c.tol;
    checks.push_back(c);
  }

  // Marks `name` as the headline inequality and fills bound/slack/ok.
  void finalize(const std::string& headline) {
    ok = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) {
      if (!c.identity) worst = std::min(worst, c.slack);
      if (c.name == headline) {
        quantities["achieved"] = c.achieved;
        quantities["bound"] = c.bound;
        quantities["slack"] = c.slack;
      }
    }
    quantities["worst_slack"] = worst;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  double worst_slack() const { return quantities.at("worst_slack"); }
};

}  // namespace cclab
