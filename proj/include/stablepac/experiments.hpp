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

// Seeded Monte-Carlo campaigns over the learner stack. Every experiment is a
// pure function of (config, seed): runs get counter-derived streams and are
// aggregated in run order, so results do not depend on the thread count.
// Structural guarantees (tournament examples force mistakes, suffix
// consistency, mistake bounds, list-size bounds) are asserted on every run
// and fail loudly.

#pragma once

#include "stablepac/pipeline.hpp"
#include "stablepac/reports.hpp"

namespace stablepac {

// ---------------------------------------------------------------------------
// Stability of the batch learner

struct StabilityConfig {
  ConceptClass cls;
  RealizableDistribution dist;
  double alpha = 0.5;
  int64_t runs = 1000;
  uint64_t seed = 1;
  int threads = 1;
};

struct StabilityOutcome {
  StabilityReport report;
  std::vector<StabilityRunRow> rows;
};

inline StabilityOutcome run_stability_experiment(const StabilityConfig& cfg) {
  if (cfg.runs < 1) throw ConfigError("stability experiment needs runs >= 1");
  const int d = ldim(cfg.cls);
  const StabilityParams params = stability_params(d, cfg.alpha);
  const int64_t aux_n = params.runtime_n();

  std::vector<StabilityRunRow> rows(static_cast<size_t>(cfg.runs));
  parallel_chunks(cfg.runs, cfg.threads, [&](int, int64_t first, int64_t last) {
    SoaEngine engine(cfg.cls);
    StableLearner<DistributionSource> learner(engine, params,
                                              DistributionSource{&cfg.dist});
    std::map<std::string, double> loss_cache;
    for (int64_t i = first; i < last; ++i) {
      Rng rng = Rng::stream(cfg.seed, static_cast<uint64_t>(i));
      const StableLearnerResult r = learner.run(rng);
      const std::string fp = r.hypothesis.fingerprint();
      auto it = loss_cache.find(fp);
      if (it == loss_cache.end())
        it = loss_cache.emplace(fp, population_loss(r.hypothesis, cfg.dist)).first;
      rows[static_cast<size_t>(i)] =
          StabilityRunRow{i, r.level, r.sampler_failed, r.draws_used, fp, it->second};
    }
  });

  StabilityReport rep;
  rep.seed = cfg.seed;
  rep.runs = cfg.runs;
  rep.alpha = cfg.alpha;
  rep.d = d;
  rep.aux_n = params.n.str();
  rep.draw_cap = params.N.str();
  rep.budget = params.m.str();
  rep.freq_threshold_text = params.freq_threshold_text();
  rep.eta_guarantee_text = params.eta_guarantee_text();
  rep.freq_threshold = params.freq_threshold();
  rep.eta_guarantee = params.eta_guarantee();

  std::map<std::string, double> losses;
  for (const StabilityRunRow& r : rows) {
    if (r.failed) {
      ++rep.fail_count;
      continue;
    }
    ++rep.counts[r.hypothesis_fingerprint];
    losses[r.hypothesis_fingerprint] = r.population_loss;
  }
  rep.fail_rate = static_cast<double>(rep.fail_count) / static_cast<double>(cfg.runs);

  for (const auto& [fp, count] : rep.counts) {
    const double freq = static_cast<double>(count) / static_cast<double>(cfg.runs);
    rep.frequencies[fp] = freq;
    if (freq > rep.max_frequency) {
      rep.max_frequency = freq;
      rep.max_frequency_fingerprint = fp;
    }
    if (freq < rep.eta_guarantee) continue;
    FrequentHypothesis f;
    f.fingerprint = fp;
    f.count = count;
    f.frequency = freq;
    f.frequency_lower = binomial_lower_bound(count, cfg.runs, 0.99);
    f.population_loss = losses[fp];
    f.loss_bound = std::log(1.0 / freq) / static_cast<double>(aux_n);
    f.loss_bound_lower = f.frequency_lower > 0.0
                             ? std::log(1.0 / f.frequency_lower) /
                                   static_cast<double>(aux_n)
                             : std::numeric_limits<double>::infinity();
    rep.frequent.push_back(std::move(f));

    // Frequent outputs generalize: certified frequency at or above the
    // per-level threshold forces loss <= 2^(d+2)/n.
    const FrequentHypothesis& fh = rep.frequent.back();
    if (fh.frequency_lower >= rep.freq_threshold &&
        fh.population_loss > static_cast<double>(params.exp_threshold) /
                                     static_cast<double>(aux_n) +
                                 1e-12)
      throw InvariantViolation(
          "a frequent hypothesis exceeds the generalization bound");
  }

  // Stability implies generalization, checked on the most frequent output:
  // loss <= ln(1/freq_lower) / n.
  if (!rep.max_frequency_fingerprint.empty()) {
    const int64_t c = rep.counts[rep.max_frequency_fingerprint];
    const double p_low = binomial_lower_bound(c, cfg.runs, 0.99);
    if (p_low > 0.0 &&
        losses[rep.max_frequency_fingerprint] >
            std::log(1.0 / p_low) / static_cast<double>(aux_n) + 1e-12)
      throw InvariantViolation(
          "most frequent hypothesis violates the stability-generalization bound");
  }
  return StabilityOutcome{std::move(rep), std::move(rows)};
}

// ---------------------------------------------------------------------------
// Mistake-bound histograms

struct MistakeConfig {
  ConceptClass cls;
  std::vector<double> marginal;  // shared marginal over the domain
  std::optional<int> target;     // fixed target index; random per run if unset
  int64_t runs = 1000;
  int64_t sample_length = 50;
  uint64_t seed = 1;
  int threads = 1;
};

inline MistakeReport run_mistake_experiment(const MistakeConfig& cfg) {
  if (cfg.runs < 1) throw ConfigError("mistake experiment needs runs >= 1");
  if (cfg.sample_length < 0) throw ConfigError("negative sample length");
  if (cfg.target && (*cfg.target < 0 || *cfg.target >= cfg.cls.size()))
    throw ConfigError("target index outside the class");
  const int d = ldim(cfg.cls);

  std::vector<int> mistakes(static_cast<size_t>(cfg.runs));
  parallel_chunks(cfg.runs, cfg.threads, [&](int, int64_t first, int64_t last) {
    SoaEngine engine(cfg.cls);
    for (int64_t i = first; i < last; ++i) {
      Rng rng = Rng::stream(cfg.seed, static_cast<uint64_t>(i));
      const int target_index =
          cfg.target ? *cfg.target
                     : static_cast<int>(rng.next_below(
                           static_cast<uint64_t>(cfg.cls.size())));
      const RealizableDistribution dist(cfg.cls.member(target_index), cfg.marginal);
      const Sample s = draw_examples(dist, cfg.sample_length, rng);
      mistakes[static_cast<size_t>(i)] = soa_run(engine, s).mistake_count;
    }
  });

  MistakeReport rep;
  rep.seed = cfg.seed;
  rep.runs = cfg.runs;
  rep.sample_length = cfg.sample_length;
  rep.d = d;
  rep.random_target = !cfg.target.has_value();
  rep.histogram.assign(static_cast<size_t>(d) + 1, 0);
  for (int m : mistakes) {
    if (m > d)
      throw InvariantViolation("mistake count exceeded the class dimension");
    rep.max_mistakes = std::max(rep.max_mistakes, m);
    ++rep.histogram[static_cast<size_t>(m)];
  }
  rep.probabilities.resize(rep.histogram.size());
  for (size_t i = 0; i < rep.histogram.size(); ++i)
    rep.probabilities[i] =
        static_cast<double>(rep.histogram[i]) / static_cast<double>(cfg.runs);
  return rep;
}

// ---------------------------------------------------------------------------
// Tournament-sampler draw accounting

struct DrawsRunRow {
  int64_t run_id = 0;
  bool failed = false;
  int64_t draws_used = 0;
  int64_t rejections = 0;
};

struct DrawsConfig {
  ConceptClass cls;
  RealizableDistribution dist;
  int level = 1;
  double alpha = 0.5;
  // When set, overrides the derived (n, N) with reduced test caps.
  std::optional<std::pair<int64_t, int64_t>> custom_caps;
  int64_t runs = 1000;
  uint64_t seed = 1;
  int threads = 1;
};

struct DrawsOutcome {
  DrawsReport report;
  std::vector<DrawsRunRow> rows;
};

inline DrawsOutcome run_draws_experiment(const DrawsConfig& cfg) {
  if (cfg.runs < 1) throw ConfigError("draws experiment needs runs >= 1");
  const int d = ldim(cfg.cls);
  if (cfg.level < 0 || cfg.level > d)
    throw ConfigError("tournament level must lie in [0, ldim]");
  const StabilityParams params =
      cfg.custom_caps
          ? stability_params_with_caps(d, cfg.custom_caps->first,
                                       cfg.custom_caps->second)
          : stability_params(d, cfg.alpha);
  const int64_t aux_n = params.runtime_n();
  const int64_t cap = params.runtime_N();

  std::vector<DrawsRunRow> rows(static_cast<size_t>(cfg.runs));
  parallel_chunks(cfg.runs, cfg.threads, [&](int, int64_t first, int64_t last) {
    SoaEngine engine(cfg.cls);
    TournamentSampler<DistributionSource> sampler(
        engine, DistributionSource{&cfg.dist}, aux_n, cap);
    Sample concat;
    for (int64_t i = first; i < last; ++i) {
      Rng rng = Rng::stream(cfg.seed, static_cast<uint64_t>(i));
      const TournamentSampleResult r = sampler.sample(cfg.level, rng);
      rows[static_cast<size_t>(i)] =
          DrawsRunRow{i, r.failed(), r.draws_used, r.total_rejections()};
      if (r.draws_used > cap)
        throw InvariantViolation("draw accounting exceeded the cap");
      if (!r.failed()) {
        if (r.outcome->size() != cfg.level * (aux_n + 1) ||
            r.outcome->tournament_count() != cfg.level)
          throw InvariantViolation("tournament sample has the wrong shape");
        concat = *r.outcome;
        const int t_start = concat.size();
        for (int64_t t = 0; t < aux_n; ++t) concat.push_back(cfg.dist.draw(rng));
        verify_tournament_invariants(concat, t_start, soa_run(engine, concat));
      }
    }
  });

  DrawsReport rep;
  rep.seed = cfg.seed;
  rep.runs = cfg.runs;
  rep.level = cfg.level;
  rep.d = d;
  rep.aux_n = params.n.str();
  rep.draw_cap = params.N.str();
  rep.expected_draw_bound =
      std::pow(4.0, cfg.level + 1) * static_cast<double>(aux_n);
  std::vector<double> success_draws;
  std::vector<double> rejections;
  for (const DrawsRunRow& r : rows) {
    rep.max_draws = std::max(rep.max_draws, r.draws_used);
    rep.max_rejections = std::max(rep.max_rejections, r.rejections);
    rejections.push_back(static_cast<double>(r.rejections));
    if (r.failed)
      ++rep.fails;
    else {
      ++rep.successes;
      success_draws.push_back(static_cast<double>(r.draws_used));
    }
  }
  const MeanStats draw_stats = summarize(success_draws);
  rep.mean_draws = draw_stats.mean;
  rep.stddev_draws = draw_stats.stddev;
  rep.se_draws = draw_stats.standard_error;
  rep.mean_rejections = summarize(rejections).mean;
  rep.mean_within_bound =
      rep.successes > 0 &&
      rep.mean_draws <= rep.expected_draw_bound + 3.0 * rep.se_draws;
  return DrawsOutcome{std::move(rep), std::move(rows)};
}

// ---------------------------------------------------------------------------
// End-to-end private learning

struct E2EConfig {
  ConceptClass cls;
  RealizableDistribution dist;
  double alpha = 0.5, beta = 0.2, epsilon = 1.0, delta = 1e-6;
  int64_t trials = 10;
  uint64_t seed = 1;
  int threads = 1;
  bool force = false;  // required to run d >= 2 (astronomical batch counts)
};

struct E2EOutcome {
  E2EReport report;
};

inline E2EOutcome run_e2e_experiment(const E2EConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("e2e experiment needs trials >= 1");
  const int d = ldim(cfg.cls);
  if (d >= 2 && !cfg.force)
    throw ConfigError(
        "d >= 2 requires --force: the batch count is astronomically large");
  const PrivateLearnerParams params =
      private_learner_params(d, cfg.alpha, cfg.beta, cfg.epsilon, cfg.delta);
  const int64_t pruned_bound =
      static_cast<int64_t>(std::floor(2.0 / params.eta)) + 1;

  std::vector<E2ETrialRow> rows(static_cast<size_t>(cfg.trials));
  parallel_chunks(cfg.trials, cfg.threads, [&](int, int64_t first, int64_t last) {
    for (int64_t t = first; t < last; ++t) {
      const uint64_t trial_seed = stream_seed(cfg.seed, static_cast<uint64_t>(t));
      const LearnResult r = private_learn(cfg.cls, cfg.dist, params, trial_seed);
      if (r.pruned_list_size > pruned_bound)
        throw InvariantViolation("pruned list exceeds 2/eta + 1");
      E2ETrialRow row;
      row.trial = t;
      row.hypothesis_fingerprint = r.hypothesis.fingerprint();
      row.population_loss = population_loss(r.hypothesis, cfg.dist);
      row.success = row.population_loss <= cfg.alpha;
      row.failed_empty_list = r.failed_empty_list;
      row.released_list_size = r.released_list_size;
      row.pruned_list_size = r.pruned_list_size;
      row.sampler_fail_count = r.sampler_fail_count;
      rows[static_cast<size_t>(t)] = std::move(row);
    }
  });

  E2EReport rep;
  rep.seed = cfg.seed;
  rep.trials = cfg.trials;
  rep.alpha = cfg.alpha;
  rep.beta = cfg.beta;
  rep.epsilon = cfg.epsilon;
  rep.delta = cfg.delta;
  rep.d = d;
  rep.eta = params.eta;
  rep.batch_size = params.batch.m.str();
  rep.batch_count = params.k.str();
  rep.total_samples = params.total_n.str();
  rep.n_prime = params.n_prime;
  rep.hist_epsilon = params.hist_budget.epsilon;
  rep.hist_delta = params.hist_budget.delta;
  rep.em_epsilon = params.em_budget.epsilon;
  rep.em_delta = params.em_budget.delta;
  for (const E2ETrialRow& row : rows) {
    rep.successes += row.success ? 1 : 0;
    rep.max_pruned_list = std::max(rep.max_pruned_list, row.pruned_list_size);
    rep.empty_list_trials += row.failed_empty_list ? 1 : 0;
  }
  rep.success_fraction =
      static_cast<double>(rep.successes) / static_cast<double>(cfg.trials);
  rep.success_fraction_lower =
      binomial_lower_bound(rep.successes, cfg.trials, 0.99);
  rep.trials_detail = std::move(rows);
  return E2EOutcome{std::move(rep)};
}

}  // namespace stablepac
