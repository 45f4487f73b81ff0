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

// The composite private learner: run the globally-stable learner on k
// independent batches, release the frequent outputs through the stable
// histogram at (eps/2, delta), prune weak estimates, then select from the
// surviving short list with the exponential mechanism at eps/2 on a fresh
// sample. Parameters compose so the whole pipeline is (eps, delta)-DP.

#pragma once

#include <map>

#include "stablepac/dp.hpp"
#include "stablepac/parallel.hpp"
#include "stablepac/tournament.hpp"

namespace stablepac {

namespace detail {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

}  // namespace detail

// Log-space form of hist_accuracy_check, usable when eta or k overflow a
// double (log2_eta is log2 of the frequency threshold, negative).
inline bool hist_accuracy_check_log2(double log2_k, double log2_eta, double beta,
                                     const PrivacyParams& priv) {
  const double t = hist_release_threshold(priv);
  const double log2_etak = log2_k + log2_eta;
  if (!(log2_etak > std::log2(t))) return false;
  const double ln_etak = log2_etak * std::log(2.0);
  const double etak =
      ln_etak > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(ln_etak);
  const double l_miss = std::log(0.5) - priv.epsilon * (etak - t) / 2.0;
  const double l_err = -priv.epsilon * etak / 2.0;
  const double l_total = -log2_eta * std::log(2.0) + detail::log_add(l_miss, l_err);
  return l_total <= std::log(beta);
}

// Full parameter table of the composite learner for target accuracy
// (alpha, beta) and privacy (epsilon, delta):
//   eta      stability guarantee of the batch learner, invoked at alpha/2
//   m        per-batch sample size (N + n of the batch learner)
//   k        number of batches: the smallest power of two that passes the
//            histogram accuracy condition at (eta/8, beta/3) under
//            (epsilon/2, delta) and satisfies k >= 16 ln(3/beta) / eta
//   n_prime  selection sample size: the smallest integer with
//            (2/eta) e^{-eps (alpha/2) n'/12} <= beta/6 and
//            n' >= (96/alpha) ln(24/(eta beta))
//   total_n  k * m + n_prime
struct PrivateLearnerParams {
  int d = 0;
  double alpha = 0.0, beta = 0.0;
  PrivacyParams priv;
  double eta = 0.0;  // 0 if it underflows a double (astronomical d)
  StabilityParams batch;  // derived at (d, alpha/2)
  BigInt k;
  int64_t n_prime = 0;
  BigInt total_n;
  PrivacyParams hist_budget, em_budget;

  int64_t runtime_k() const {
    if (k > std::numeric_limits<int64_t>::max())
      throw std::invalid_argument("k is too large to execute at desk scale");
    return static_cast<int64_t>(k);
  }
};

inline PrivateLearnerParams private_learner_params(int d, double alpha,
                                                   double beta, double epsilon,
                                                   double delta) {
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(beta > 0.0) || beta >= 1.0)
    throw std::invalid_argument("beta must lie in (0, 1)");
  PrivacyParams priv{epsilon, delta};
  priv.validate();
  if (delta == 0.0)
    throw std::invalid_argument("the composite learner requires delta > 0");

  PrivateLearnerParams p;
  p.d = d;
  p.alpha = alpha;
  p.beta = beta;
  p.priv = priv;
  p.batch = stability_params(d, alpha / 2.0);
  p.eta = p.batch.eta_guarantee();
  p.hist_budget = PrivacyParams{epsilon / 2.0, delta};
  p.em_budget = PrivacyParams{epsilon / 2.0, 0.0};

  const double ln2 = std::log(2.0);
  const double log2_inv_eta = p.batch.log_inv_eta() / ln2;
  const double log2_eta8 = -log2_inv_eta - 3.0;  // log2(eta / 8)

  // k >= 16 ln(3/beta) / eta, rounded up to a power of two.
  const double min_log2_k =
      std::log2(16.0 * std::log(3.0 / beta)) + log2_inv_eta;
  int64_t j = std::max<int64_t>(0, static_cast<int64_t>(std::ceil(min_log2_k)));
  while (!hist_accuracy_check_log2(static_cast<double>(j), log2_eta8, beta / 3.0,
                                   p.hist_budget)) {
    ++j;
    if (j > 4096) throw std::invalid_argument("histogram batch count diverged");
  }
  p.k = BigInt(1) << static_cast<unsigned>(j);

  const double ln_inv_eta = p.batch.log_inv_eta();
  const double l1 = std::log(12.0 / beta) + ln_inv_eta;  // ln(12/(eta beta))
  const double l2 = std::log(24.0 / beta) + ln_inv_eta;  // ln(24/(eta beta))
  const double n1 = 24.0 / (epsilon * alpha) * l1;
  const double n2 = 96.0 / alpha * l2;
  const double n_prime = std::ceil(std::max(n1, n2));
  if (!(n_prime < 9.0e18))
    throw std::invalid_argument("n' is too large to represent");
  p.n_prime = static_cast<int64_t>(n_prime);
  p.total_n = p.k * p.batch.m + p.n_prime;

  if (p.hist_budget.epsilon + p.em_budget.epsilon != epsilon ||
      p.hist_budget.delta + p.em_budget.delta != delta)
    throw InvariantViolation("privacy sub-budgets do not compose to (eps, delta)");
  return p;
}

struct LearnResult {
  Hypothesis hypothesis;
  bool failed_empty_list = false;  // pruned list empty; fixed default returned
  int64_t released_list_size = 0;
  int64_t pruned_list_size = 0;
  int64_t sampler_fail_count = 0;  // batches whose tournament sampler hit the cap
  std::map<std::string, int64_t> batch_digest;  // fingerprint -> count
};

namespace detail {

// Stream tags for the non-batch randomness; batch i uses stream(seed, i).
inline constexpr uint64_t kHistStreamTag = 0x8000000000000001ULL;
inline constexpr uint64_t kSelectStreamTag = 0x8000000000000002ULL;

}  // namespace detail

// Executes the three pipeline steps. Batches run concurrently when threads
// > 1 (one derived stream per batch, merged deterministically).
template <class Source = DistributionSource>
inline LearnResult private_learn_from(const ConceptClass& cls,
                                      const RealizableDistribution& dist,
                                      Source source,
                                      const PrivateLearnerParams& p,
                                      uint64_t seed, int threads = 1) {
  const int64_t k = p.runtime_k();

  struct ChunkAccum {
    std::map<std::string, int64_t> digest;
    int64_t fails = 0;
  };
  std::vector<ChunkAccum> chunks(static_cast<size_t>(std::max(1, threads)));
  parallel_chunks(k, threads, [&](int chunk, int64_t first, int64_t last) {
    SoaEngine engine(cls);
    if (engine.class_ldim() != p.d)
      throw std::invalid_argument("parameters derived for a different class dimension");
    StableLearner<Source> learner(engine, p.batch, source);
    ChunkAccum& acc = chunks[static_cast<size_t>(chunk)];
    for (int64_t i = first; i < last; ++i) {
      Rng rng = Rng::stream(seed, static_cast<uint64_t>(i));
      const StableLearnerResult r = learner.run(rng);
      ++acc.digest[r.hypothesis.fingerprint()];
      acc.fails += r.sampler_failed ? 1 : 0;
    }
  });

  LearnResult out{Hypothesis::constant(cls.domain_size(), kPlus), false, 0, 0, 0, {}};
  for (const ChunkAccum& acc : chunks) {
    out.sampler_fail_count += acc.fails;
    for (const auto& [fp, c] : acc.digest) out.batch_digest[fp] += c;
  }

  Rng hist_rng = Rng::stream(seed, detail::kHistStreamTag);
  const HistogramOutput hist =
      stable_histogram_from_counts(out.batch_digest, k, p.hist_budget, hist_rng);
  out.released_list_size = static_cast<int64_t>(hist.released.size());

  // Keep only estimates >= 3 eta / 4; the survivors form the selection list.
  std::vector<Hypothesis> pruned;
  for (const std::string& fp : hist.released) {
    if (hist.estimates.at(fp) < 0.75 * p.eta) continue;
    auto h = Hypothesis::from_fingerprint(fp);
    pruned.push_back(std::move(*h));
  }
  out.pruned_list_size = static_cast<int64_t>(pruned.size());

  Rng select_rng = Rng::stream(seed, detail::kSelectStreamTag);
  const Sample fresh = draw_examples(dist, p.n_prime, select_rng);
  if (pruned.empty()) {
    out.failed_empty_list = true;  // data-independent fallback
    return out;
  }
  out.hypothesis = generic_learner(pruned, fresh, p.em_budget.epsilon, select_rng);
  return out;
}

inline LearnResult private_learn(const ConceptClass& cls,
                                 const RealizableDistribution& dist,
                                 const PrivateLearnerParams& p, uint64_t seed,
                                 int threads = 1) {
  return private_learn_from(cls, dist, DistributionSource{&dist}, p, seed, threads);
}

}  // namespace stablepac
