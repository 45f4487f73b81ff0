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

// Small statistics helpers for the experiment harness: exact binomial tails
// (log-space), Clopper-Pearson confidence bounds and Hoeffding slack.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stablepac {

// log Pr[Bin(n, p) = k].
inline double log_binomial_pmf(int64_t n, int64_t k, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  return std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1) +
         kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

// Pr[Bin(n, p) >= k], summed in shifted log space.
inline double binomial_upper_tail(int64_t n, int64_t k, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(static_cast<size_t>(n - k + 1));
  for (int64_t i = k; i <= n; ++i) {
    const double l = log_binomial_pmf(n, i, p);
    logs.push_back(l);
    max_log = std::max(max_log, l);
  }
  if (!std::isfinite(max_log)) return 0.0;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  return std::min(1.0, std::exp(max_log) * acc);
}

// One-sided Clopper-Pearson lower bound: the largest p0 such that
// Pr[Bin(n, p0) >= successes] <= 1 - confidence, found by bisection.
inline double binomial_lower_bound(int64_t successes, int64_t trials,
                                   double confidence) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw std::invalid_argument("invalid binomial counts");
  if (!(confidence > 0.0) || confidence >= 1.0)
    throw std::invalid_argument("confidence must lie in (0, 1)");
  if (successes == 0) return 0.0;
  const double alpha = 1.0 - confidence;
  double lo = 0.0, hi = static_cast<double>(successes) / trials;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_upper_tail(trials, successes, mid) <= alpha)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// One-sided Clopper-Pearson upper bound.
inline double binomial_upper_bound(int64_t successes, int64_t trials,
                                   double confidence) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw std::invalid_argument("invalid binomial counts");
  if (successes == trials) return 1.0;
  const double alpha = 1.0 - confidence;
  double lo = static_cast<double>(successes) / trials, hi = 1.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    // Pr[Bin(n, mid) <= successes] = 1 - Pr[>= successes+1]
    if (1.0 - binomial_upper_tail(trials, successes + 1, mid) <= alpha)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Two-sided Hoeffding half-width at the given confidence.
inline double hoeffding_radius(int64_t n, double confidence) {
  if (n < 1) throw std::invalid_argument("need at least one observation");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

struct MeanStats {
  int64_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double standard_error = 0.0;
};

inline MeanStats summarize(const std::vector<double>& values) {
  MeanStats s;
  s.count = static_cast<int64_t>(values.size());
  if (s.count == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.count - 1));
    s.standard_error = s.stddev / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

}  // namespace stablepac
