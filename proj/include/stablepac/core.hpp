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

// Finite domains, +/-1 hypotheses, concept classes, labeled samples and
// realizable distributions. Everything here is an immutable value type; all
// losses are computed exactly.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stablepac/rng.hpp"

namespace stablepac {

// Thrown when a runtime correctness assertion fails (the CLI maps this to
// exit code 2, as opposed to usage/config errors which exit with 1).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Label = int8_t;  // +1 or -1
inline constexpr Label kPlus = +1;
inline constexpr Label kMinus = -1;

inline Label label_from_sign(bool positive) { return positive ? kPlus : kMinus; }

struct LabeledExample {
  int32_t point = 0;
  Label label = kPlus;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// A total +/-1 labeling of a finite domain {0, ..., domain_size-1}.
class Hypothesis {
 public:
  explicit Hypothesis(std::vector<Label> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("hypothesis over empty domain");
    for (Label v : labels_) {
      if (v != kPlus && v != kMinus)
        throw std::invalid_argument("hypothesis labels must be +1 or -1");
    }
  }

  static Hypothesis constant(int domain_size, Label value) {
    return Hypothesis(std::vector<Label>(static_cast<size_t>(domain_size), value));
  }

  int domain_size() const { return static_cast<int>(labels_.size()); }
  Label operator()(int x) const { return labels_[static_cast<size_t>(x)]; }
  const std::vector<Label>& labels() const { return labels_; }

  // Compact textual form, e.g. "+-++". Used as the exact-equality key
  // wherever hypothesis repetitions are counted.
  std::string fingerprint() const {
    std::string out(labels_.size(), '+');
    for (size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == kMinus) out[i] = '-';
    return out;
  }

  static std::optional<Hypothesis> from_fingerprint(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::vector<Label> labels;
    labels.reserve(s.size());
    for (char c : s) {
      if (c == '+')
        labels.push_back(kPlus);
      else if (c == '-')
        labels.push_back(kMinus);
      else
        return std::nullopt;
    }
    return Hypothesis(std::move(labels));
  }

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;

 private:
  std::vector<Label> labels_;
};

// A finite set of distinct hypotheses over one shared domain. May be empty
// (restrictions produce empty classes), in which case the domain size is kept
// explicitly.
class ConceptClass {
 public:
  ConceptClass(int domain_size, std::vector<Hypothesis> members)
      : domain_size_(domain_size), members_(std::move(members)) {
    if (domain_size_ < 1) throw std::invalid_argument("domain size must be >= 1");
    std::set<std::string> seen;
    for (const Hypothesis& h : members_) {
      if (h.domain_size() != domain_size_)
        throw std::invalid_argument("class members must share one domain");
      if (!seen.insert(h.fingerprint()).second)
        throw std::invalid_argument("duplicate member in concept class");
    }
  }

  int domain_size() const { return domain_size_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  const Hypothesis& member(int i) const { return members_[static_cast<size_t>(i)]; }
  const std::vector<Hypothesis>& members() const { return members_; }

 private:
  int domain_size_;
  std::vector<Hypothesis> members_;
};

// Threshold functions t_1, ..., t_s over a domain of size s:
// t_i(j) = +1 iff i <= j with 1-based indices, i.e. member m (0-based) is +1
// exactly on points {m, ..., s-1}.
inline ConceptClass make_thresholds(int domain_size) {
  if (domain_size < 1) throw std::invalid_argument("domain size must be >= 1");
  std::vector<Hypothesis> members;
  members.reserve(static_cast<size_t>(domain_size));
  for (int m = 0; m < domain_size; ++m) {
    std::vector<Label> labels(static_cast<size_t>(domain_size), kMinus);
    for (int j = m; j < domain_size; ++j) labels[static_cast<size_t>(j)] = kPlus;
    members.emplace_back(std::move(labels));
  }
  return ConceptClass(domain_size, std::move(members));
}

// All 2^domain_size labelings.
inline ConceptClass make_full_class(int domain_size) {
  if (domain_size < 1 || domain_size > 20)
    throw std::invalid_argument("full class supported for domain sizes 1..20");
  std::vector<Hypothesis> members;
  members.reserve(size_t{1} << domain_size);
  for (uint32_t bits = 0; bits < (uint32_t{1} << domain_size); ++bits) {
    std::vector<Label> labels(static_cast<size_t>(domain_size), kMinus);
    for (int j = 0; j < domain_size; ++j)
      if (bits & (uint32_t{1} << j)) labels[static_cast<size_t>(j)] = kPlus;
    members.emplace_back(std::move(labels));
  }
  return ConceptClass(domain_size, std::move(members));
}

// { h in H : h(x) = b }.
inline ConceptClass restrict_class(const ConceptClass& cls, int x, Label b) {
  if (x < 0 || x >= cls.domain_size())
    throw std::invalid_argument("restriction point outside the class domain");
  std::vector<Hypothesis> kept;
  for (const Hypothesis& h : cls.members())
    if (h(x) == b) kept.push_back(h);
  return ConceptClass(cls.domain_size(), std::move(kept));
}

// An ordered sequence of labeled examples; tournament positions are flagged.
struct Sample {
  std::vector<LabeledExample> examples;
  std::vector<uint8_t> tournament_flags;

  int size() const { return static_cast<int>(examples.size()); }
  bool empty() const { return examples.empty(); }

  void clear() {
    examples.clear();
    tournament_flags.clear();
  }

  void push_back(LabeledExample ex, bool tournament = false) {
    examples.push_back(ex);
    tournament_flags.push_back(tournament ? 1 : 0);
  }

  // Appends t (order preserved: "this" first, then t).
  void append(const Sample& t) {
    examples.insert(examples.end(), t.examples.begin(), t.examples.end());
    tournament_flags.insert(tournament_flags.end(), t.tournament_flags.begin(),
                            t.tournament_flags.end());
  }

  void append_plain(const std::vector<LabeledExample>& exs) {
    examples.insert(examples.end(), exs.begin(), exs.end());
    tournament_flags.insert(tournament_flags.end(), exs.size(), 0);
  }

  int tournament_count() const {
    int c = 0;
    for (uint8_t f : tournament_flags) c += f;
    return c;
  }

  friend bool operator==(const Sample&, const Sample&) = default;
};

inline Sample concat(const Sample& s, const Sample& t) {
  Sample out = s;
  out.append(t);
  return out;
}

// Fraction of disagreements of h on S. Empty samples are rejected.
inline double empirical_loss(const Hypothesis& h, const Sample& s) {
  if (s.empty()) throw std::invalid_argument("empirical loss of an empty sample");
  int64_t bad = 0;
  for (const LabeledExample& ex : s.examples)
    if (h(ex.point) != ex.label) ++bad;
  return static_cast<double>(bad) / static_cast<double>(s.size());
}

// A target concept together with a marginal over the domain; examples are
// always (x, target(x)), so the target has zero population loss by
// construction.
class RealizableDistribution {
 public:
  RealizableDistribution(Hypothesis target, std::vector<double> marginal)
      : target_(std::move(target)), marginal_(std::move(marginal)) {
    if (static_cast<int>(marginal_.size()) != target_.domain_size())
      throw std::invalid_argument("marginal length must equal the domain size");
    double sum = 0.0;
    for (double p : marginal_) {
      if (!(p >= 0.0)) throw std::invalid_argument("marginal probabilities must be >= 0");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("marginal must sum to 1 within 1e-12");
    for (double& p : marginal_) p /= sum;  // renormalize text round-off
    cdf_.resize(marginal_.size());
    double acc = 0.0;
    for (size_t i = 0; i < marginal_.size(); ++i) {
      acc += marginal_[i];
      cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
  }

  static RealizableDistribution uniform(Hypothesis target) {
    const int n = target.domain_size();
    return RealizableDistribution(
        std::move(target), std::vector<double>(static_cast<size_t>(n), 1.0 / n));
  }

  const Hypothesis& target() const { return target_; }
  const std::vector<double>& marginal() const { return marginal_; }

  int draw_point(Rng& rng) const {
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<size_t>(
        static_cast<size_t>(it - cdf_.begin()), cdf_.size() - 1));
  }

  LabeledExample draw(Rng& rng) const {
    const int x = draw_point(rng);
    return LabeledExample{x, target_(x)};
  }

 private:
  Hypothesis target_;
  std::vector<double> marginal_;
  std::vector<double> cdf_;
};

// Exact sum of marginal mass over the disagreement region (never sampled).
inline double population_loss(const Hypothesis& h, const RealizableDistribution& d) {
  if (h.domain_size() != d.target().domain_size())
    throw std::invalid_argument("hypothesis and distribution domains differ");
  double loss = 0.0;
  for (int x = 0; x < h.domain_size(); ++x)
    if (h(x) != d.target()(x)) loss += d.marginal()[static_cast<size_t>(x)];
  return loss;
}

// n i.i.d. examples (x, target(x)); tournament flags all false.
inline Sample draw_examples(const RealizableDistribution& d, int64_t n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("negative sample size");
  Sample s;
  s.examples.reserve(static_cast<size_t>(n));
  s.tournament_flags.assign(static_cast<size_t>(n), 0);
  for (int64_t i = 0; i < n; ++i) s.examples.push_back(d.draw(rng));
  return s;
}

}  // namespace stablepac
