//
// Copyright 2026 The stablepac Authors
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
//

// Key-value text format for concept classes and example distributions:
//
//   # comments start with '#'
//   domain_size = 8
//   class = thresholds            # or: full | explicit
//   member = +-+-+-+-             # repeated, only for class = explicit
//   marginal = uniform            # or a space-separated probability vector
//   target = 3                    # member index; optional
//
// Sample files are CSV with columns point,label (labels +1/-1).

#pragma once

#include <fstream>
#include <sstream>

#include "stablepac/core.hpp"

namespace stablepac {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClassSpec {
  ConceptClass cls;
  std::vector<double> marginal;
  std::optional<int> target;

  RealizableDistribution distribution() const {
    if (!target)
      throw ConfigError("this operation needs a target index in the class file");
    if (*target < 0 || *target >= cls.size())
      throw ConfigError("target index outside the class");
    return RealizableDistribution(cls.member(*target), marginal);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline ClassSpec parse_class_spec(std::istream& in) {
  int domain_size = -1;
  std::string kind;
  std::vector<std::string> member_rows;
  std::string marginal_text = "uniform";
  std::optional<int> target;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "domain_size")
      domain_size = std::stoi(value);
    else if (key == "class")
      kind = value;
    else if (key == "member")
      member_rows.push_back(value);
    else if (key == "marginal")
      marginal_text = value;
    else if (key == "target")
      target = std::stoi(value);
    else
      throw ConfigError("unknown key '" + key + "' in class file");
  }
  if (domain_size < 1) throw ConfigError("class file must set domain_size >= 1");
  if (kind.empty()) throw ConfigError("class file must set class = thresholds|full|explicit");

  std::optional<ConceptClass> cls;
  if (kind == "thresholds") {
    cls = make_thresholds(domain_size);
  } else if (kind == "full") {
    cls = make_full_class(domain_size);
  } else if (kind == "explicit") {
    if (member_rows.empty())
      throw ConfigError("explicit class needs at least one member = row");
    std::vector<Hypothesis> members;
    for (const std::string& row : member_rows) {
      auto h = Hypothesis::from_fingerprint(row);
      if (!h || h->domain_size() != domain_size)
        throw ConfigError("bad member row '" + row + "'");
      members.push_back(std::move(*h));
    }
    cls = ConceptClass(domain_size, std::move(members));
  } else {
    throw ConfigError("unknown class kind '" + kind + "'");
  }

  std::vector<double> marginal;
  if (marginal_text == "uniform") {
    marginal.assign(static_cast<size_t>(domain_size), 1.0 / domain_size);
  } else {
    std::istringstream ms(marginal_text);
    double p = 0.0;
    while (ms >> p) marginal.push_back(p);
    if (static_cast<int>(marginal.size()) != domain_size)
      throw ConfigError("marginal must list one probability per domain point");
  }
  return ClassSpec{std::move(*cls), std::move(marginal), target};
}

inline ClassSpec load_class_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open class file '" + path + "'");
  return parse_class_spec(in);
}

inline Sample parse_sample_csv(std::istream& in) {
  Sample s;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line_no == 1 && line.find("point") != std::string::npos) continue;  // header
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("sample line " + std::to_string(line_no) + ": expected point,label");
    const int point = std::stoi(line.substr(0, comma));
    const int label = std::stoi(line.substr(comma + 1));
    if (label != 1 && label != -1)
      throw ConfigError("sample labels must be +1 or -1");
    s.push_back(LabeledExample{point, static_cast<Label>(label)});
  }
  return s;
}

inline Sample load_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sample file '" + path + "'");
  return parse_sample_csv(in);
}

}  // namespace stablepac
