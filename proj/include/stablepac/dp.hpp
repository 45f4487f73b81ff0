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

// Concrete (epsilon, delta)-DP primitives: a stability-based histogram with
// Laplace-noised counts and a release threshold, the exponential-mechanism
// selection learner, and exact closed-form privacy audits for both.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "stablepac/core.hpp"

namespace stablepac {

struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;  // 0 means pure DP

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(delta >= 0.0) || delta >= 1.0)
      throw std::invalid_argument("delta must lie in [0, 1)");
  }
};

struct HistogramOutput {
  std::vector<std::string> released;          // distinct items, sorted
  std::map<std::string, double> estimates;    // defined exactly on released
};

// Release threshold on noisy counts: t = 1 + (2/eps) * ln(1/delta). An item
// occurring once is then released with probability exactly delta/2.
inline double hist_release_threshold(const PrivacyParams& priv) {
  priv.validate();
  if (priv.delta == 0.0)
    throw std::invalid_argument("the stable histogram requires delta > 0");
  return 1.0 + (2.0 / priv.epsilon) * std::log(1.0 / priv.delta);
}

// Per distinct item with count c >= 1: noisy count c + Lap(2/eps); release
// iff the noisy count exceeds the threshold; estimate = noisy count / k
// clamped to [0,1]. Items are noised in sorted order so replays are
// bit-identical.
inline HistogramOutput stable_histogram_from_counts(
    const std::map<std::string, int64_t>& counts, int64_t k,
    const PrivacyParams& priv, Rng& rng) {
  if (k < 1) throw std::invalid_argument("histogram input must be nonempty");
  const double t = hist_release_threshold(priv);
  const double scale = 2.0 / priv.epsilon;
  HistogramOutput out;
  for (const auto& [item, count] : counts) {
    if (count < 1) throw std::invalid_argument("histogram counts must be >= 1");
    const double noisy = static_cast<double>(count) + rng.next_laplace(scale);
    if (noisy > t) {
      out.released.push_back(item);
      out.estimates[item] =
          std::clamp(noisy / static_cast<double>(k), 0.0, 1.0);
    }
  }
  return out;
}

inline HistogramOutput stable_histogram(const std::vector<std::string>& items,
                                        const PrivacyParams& priv, Rng& rng) {
  if (items.empty()) throw std::invalid_argument("histogram input must be nonempty");
  std::map<std::string, int64_t> counts;
  for (const std::string& item : items) ++counts[item];
  return stable_histogram_from_counts(counts, static_cast<int64_t>(items.size()),
                                      priv, rng);
}

// Sufficient condition for the histogram contract: with probability >= 1-beta
// every item of frequency >= eta is released with estimate error <= eta.
// Union bound over at most 1/eta heavy items; per item, release fails only if
// the noise drops below -(eta*k - t) and the estimate errs only if |noise|
// exceeds eta*k.
inline bool hist_accuracy_check(double k, double eta, double beta,
                                const PrivacyParams& priv) {
  if (!(k >= 1.0) || !(eta > 0.0) || eta > 1.0 || !(beta > 0.0) || beta >= 1.0)
    throw std::invalid_argument("hist_accuracy_check parameter out of range");
  const double t = hist_release_threshold(priv);
  const double margin = eta * k - t;
  if (margin <= 0.0) return false;
  const double miss = 0.5 * std::exp(-priv.epsilon * margin / 2.0);
  const double err = std::exp(-priv.epsilon * eta * k / 2.0);
  return (miss + err) / eta <= beta;
}

// Exact release probability Pr[c + Lap(2/eps) > t] for an item of count c;
// items with count <= 0 are never in the histogram.
inline double hist_release_probability(int64_t count, const PrivacyParams& priv) {
  if (count <= 0) return 0.0;
  const double t = hist_release_threshold(priv);
  const double z = t - static_cast<double>(count);
  const double b = 2.0 / priv.epsilon;
  return z >= 0.0 ? 0.5 * std::exp(-z / b) : 1.0 - 0.5 * std::exp(z / b);
}

struct HistReleaseAudit {
  double p_below = 0.0;   // release probability at count c-1 (0 if c == 0)
  double p_center = 0.0;  // at count c
  double p_above = 0.0;   // at count c+1
  bool dp_ok = false;     // both neighbor pairs satisfy p <= e^eps p' + delta
};

// Closed-form per-item audit of the release event for neighboring counts.
inline HistReleaseAudit audit_hist_release_dp(int64_t count, int64_t k,
                                              const PrivacyParams& priv) {
  if (count < 0 || count > k)
    throw std::invalid_argument("count must lie in [0, k]");
  HistReleaseAudit a;
  a.p_center = hist_release_probability(count, priv);
  a.p_above = hist_release_probability(count + 1, priv);
  a.p_below = count >= 1 ? hist_release_probability(count - 1, priv) : 0.0;
  const double e = std::exp(priv.epsilon);
  auto pair_ok = [&](double p, double q) {
    return p <= e * q + priv.delta + 1e-15 && q <= e * p + priv.delta + 1e-15;
  };
  a.dp_ok = pair_ok(a.p_center, a.p_above) &&
            (count == 0 || pair_ok(a.p_center, a.p_below));
  return a;
}

struct EmDistribution {
  std::vector<Hypothesis> support;
  std::vector<double> probabilities;
};

// Selection probabilities proportional to exp(-eps * n * loss_S(h) / 2);
// n * loss_S(h) is the exact disagreement count, and the maximal score is
// subtracted before exponentiating.
inline EmDistribution em_exact_distribution(const std::vector<Hypothesis>& hs,
                                            const Sample& s, double epsilon) {
  if (hs.empty()) throw std::invalid_argument("empty hypothesis list");
  if (s.empty()) throw std::invalid_argument("empty sample");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  std::vector<double> score(hs.size());
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < hs.size(); ++i) {
    int64_t disagreements = 0;
    for (const LabeledExample& ex : s.examples)
      if (hs[i](ex.point) != ex.label) ++disagreements;
    score[i] = -epsilon * static_cast<double>(disagreements) / 2.0;
    best = std::max(best, score[i]);
  }
  double z = 0.0;
  for (double& v : score) {
    v = std::exp(v - best);
    z += v;
  }
  EmDistribution out;
  out.support = hs;
  out.probabilities.resize(hs.size());
  for (size_t i = 0; i < hs.size(); ++i) out.probabilities[i] = score[i] / z;
  return out;
}

// One draw from the exponential-mechanism distribution (inverse CDF).
inline Hypothesis generic_learner(const std::vector<Hypothesis>& hs,
                                  const Sample& s, double epsilon, Rng& rng) {
  const EmDistribution dist = em_exact_distribution(hs, s, epsilon);
  const double u = rng.next_unit();
  double acc = 0.0;
  for (size_t i = 0; i < dist.support.size(); ++i) {
    acc += dist.probabilities[i];
    if (u < acc) return dist.support[i];
  }
  return dist.support.back();
}

inline void require_neighbors(const Sample& s, const Sample& t) {
  if (s.size() != t.size())
    throw std::invalid_argument("neighboring samples must have equal length");
  int diff = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s.examples[static_cast<size_t>(i)] != t.examples[static_cast<size_t>(i)])
      ++diff;
  if (diff != 1)
    throw std::invalid_argument(
        "neighboring samples must differ in exactly one position");
}

// Exact worst-case |ln(p_S(h) / p_S'(h))| over the common support.
inline double audit_em_dp(const std::vector<Hypothesis>& hs, const Sample& s,
                          const Sample& s_neighbor, double epsilon) {
  require_neighbors(s, s_neighbor);
  const EmDistribution p = em_exact_distribution(hs, s, epsilon);
  const EmDistribution q = em_exact_distribution(hs, s_neighbor, epsilon);
  double worst = 0.0;
  for (size_t i = 0; i < hs.size(); ++i)
    worst = std::max(worst,
                     std::fabs(std::log(p.probabilities[i] / q.probabilities[i])));
  return worst;
}

// Worst-case selection audit over randomly generated hypothesis lists and
// neighboring sample pairs.
inline double audit_em_dp_random(double epsilon, int64_t pairs, int max_class,
                                 int max_sample, uint64_t seed) {
  double worst = 0.0;
  Rng rng(seed);
  for (int64_t p = 0; p < pairs; ++p) {
    const int domain = 2 + static_cast<int>(rng.next_below(4));
    const int distinct = std::min(max_class, domain < 30 ? 1 << domain : max_class);
    const int count =
        1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(distinct)));
    std::vector<Hypothesis> hs;
    std::set<std::string> seen;
    while (static_cast<int>(hs.size()) < count) {
      std::vector<Label> labels(static_cast<size_t>(domain));
      for (Label& l : labels) l = rng.next_coin() ? kPlus : kMinus;
      Hypothesis h(std::move(labels));
      if (seen.insert(h.fingerprint()).second) hs.push_back(std::move(h));
    }
    const int n =
        1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(max_sample)));
    Sample s;
    for (int i = 0; i < n; ++i)
      s.push_back(LabeledExample{static_cast<int>(rng.next_below(domain)),
                                 rng.next_coin() ? kPlus : kMinus});
    Sample neighbor = s;
    const auto pos = static_cast<size_t>(rng.next_below(static_cast<uint64_t>(n)));
    for (;;) {
      const LabeledExample ex{static_cast<int>(rng.next_below(domain)),
                              rng.next_coin() ? kPlus : kMinus};
      if (ex != s.examples[pos]) {
        neighbor.examples[pos] = ex;
        break;
      }
    }
    worst = std::max(worst, audit_em_dp(hs, s, neighbor, epsilon));
  }
  return worst;
}

}  // namespace stablepac
