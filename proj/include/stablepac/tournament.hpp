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

// The Monte-Carlo tournament sampler and the globally-stable learner built
// on it. A level-k sample is produced by a recursive contest: two candidate
// transcripts are drawn, their SOA outputs compared, and on disagreement a
// coin-labeled example at a disagreement point is appended to the transcript
// whose output the coin contradicts. A global draw counter caps the total
// number of examples taken from the data distribution.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stablepac/soa.hpp"

namespace stablepac {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

// Exact ceil(value / alpha) for a dyadic double alpha in (0, 1].
inline BigInt exact_ceil_div(const BigInt& value, double alpha) {
  int ex = 0;
  const double f = std::frexp(alpha, &ex);  // alpha = f * 2^ex, f in [0.5, 1)
  const auto mantissa = static_cast<int64_t>(std::ldexp(f, 53));
  const int shift = 53 - ex;  // alpha <= 1 implies ex <= 1; shift >= 52
  return ((value << shift) + mantissa - 1) / mantissa;
}

}  // namespace detail

// All learner constants derived exactly from (d, alpha):
//   E = 2^(d+2)                    per-level output-frequency threshold exponent
//   n = ceil(E / alpha)            auxiliary sample size
//   N = 2^(E+1) * 4^(d+1) * n      cap on examples drawn per tournament sample
//   m = N + n                      total budget of one learner invocation
//   frequency threshold 2^-E, guaranteed stability eta = 2^-(E+1) / (d+1)
struct StabilityParams {
  int d = 0;
  double alpha = 0.0;  // 0 for custom test caps
  int64_t exp_threshold = 0;  // E
  BigInt n, N, m;

  // Doubles underflow to 0 past d = 7; the _text forms stay exact.
  double freq_threshold() const {
    return std::ldexp(1.0, -static_cast<int>(std::min<int64_t>(exp_threshold, 1 << 20)));
  }
  double eta_guarantee() const {
    return std::ldexp(1.0, -static_cast<int>(std::min<int64_t>(exp_threshold + 1, 1 << 20))) /
           (d + 1);
  }
  // ln(1/eta), stable even where eta underflows a double.
  double log_inv_eta() const {
    return (static_cast<double>(exp_threshold) + 1.0) * std::log(2.0) +
           std::log(static_cast<double>(d + 1));
  }

  std::string freq_threshold_text() const {
    return "2^-" + std::to_string(exp_threshold);
  }
  std::string eta_guarantee_text() const {
    return "2^-" + std::to_string(exp_threshold + 1) + "/" + std::to_string(d + 1);
  }

  int64_t runtime_n() const { return to_runtime(n, "n"); }
  int64_t runtime_N() const { return to_runtime(N, "N"); }

 private:
  static int64_t to_runtime(const BigInt& v, const char* name) {
    if (v > std::numeric_limits<int64_t>::max())
      throw std::invalid_argument(std::string("parameter ") + name +
                                  " is too large to execute at desk scale");
    return static_cast<int64_t>(v);
  }
};

inline StabilityParams stability_params(int d, double alpha) {
  if (d < 0) throw std::invalid_argument("Littlestone dimension must be >= 0");
  if (d > 24)
    throw std::invalid_argument(
        "d > 24: exact parameters exceed any printable size");
  if (!(alpha > 0.0) || alpha > 0.5)
    throw std::invalid_argument("alpha must lie in (0, 1/2]");
  StabilityParams p;
  p.d = d;
  p.alpha = alpha;
  p.exp_threshold = int64_t{1} << (d + 2);
  p.n = detail::exact_ceil_div(BigInt(p.exp_threshold), alpha);
  p.N = p.n << static_cast<unsigned>(p.exp_threshold + 1 + 2 * (d + 1));
  p.m = p.N + p.n;
  return p;
}

// Reduced-cap parameters for structural tests: same thresholds, custom n/N.
inline StabilityParams stability_params_with_caps(int d, int64_t n, int64_t cap) {
  if (d < 0 || n < 1 || cap < n)
    throw std::invalid_argument("invalid custom stability caps");
  StabilityParams p;
  p.d = d;
  p.alpha = 0.0;
  p.exp_threshold = int64_t{1} << (d + 2);
  p.n = n;
  p.N = cap;
  p.m = p.N + p.n;
  return p;
}

struct TournamentSampleResult {
  std::optional<Sample> outcome;  // nullopt = Fail (draw cap breached)
  int64_t draws_used = 0;
  std::vector<int64_t> rejection_rounds;  // restarts per level, index = level

  bool failed() const { return !outcome.has_value(); }
  int64_t total_rejections() const {
    int64_t t = 0;
    for (int64_t r : rejection_rounds) t += r;
    return t;
  }
};

struct DistributionSource {
  const RealizableDistribution* dist;
  LabeledExample draw(Rng& rng) const { return dist->draw(rng); }
};

// Samples the level-k tournament distribution. One instance per worker; the
// scratch transcripts are reused across calls.
template <class Source = DistributionSource>
class TournamentSampler {
 public:
  TournamentSampler(const SoaEngine& engine, Source source, int64_t aux_n,
                    int64_t cap)
      : engine_(&engine),
        source_(source),
        aux_n_(aux_n),
        cap_(cap),
        st0_(engine),
        st1_(engine) {
    if (aux_n_ < 1 || cap_ < 0) throw std::invalid_argument("invalid sampler caps");
  }

  TournamentSampleResult sample(int level, Rng& rng) {
    if (level < 0) throw std::invalid_argument("negative tournament level");
    draws_ = 0;
    rejections_.assign(static_cast<size_t>(level) + 1, 0);
    if (scratch_.size() < static_cast<size_t>(level)) scratch_.resize(level);
    Sample out;
    const bool ok = sample_level(level, rng, out);
    TournamentSampleResult res;
    res.draws_used = draws_;
    res.rejection_rounds = rejections_;
    if (ok) res.outcome = std::move(out);
    return res;
  }

  int64_t aux_n() const { return aux_n_; }
  int64_t cap() const { return cap_; }
  Source& source() { return source_; }

 private:
  struct LevelScratch {
    Sample s0, s1;
    std::vector<LabeledExample> t0, t1;
  };

  // False when the draw cap is hit: a draw requested at count == cap fails,
  // so draws_used never exceeds the cap.
  bool draw_block(Rng& rng, std::vector<LabeledExample>& out) {
    out.clear();
    for (int64_t i = 0; i < aux_n_; ++i) {
      if (draws_ == cap_) return false;
      out.push_back(source_.draw(rng));
      ++draws_;
    }
    return true;
  }

  void feed(SoaState& st, const Sample& s, const std::vector<LabeledExample>& t) {
    st.reset(*engine_);
    for (const LabeledExample& ex : s.examples) st.update(ex.point, ex.label);
    for (const LabeledExample& ex : t) st.update(ex.point, ex.label);
  }

  bool sample_level(int k, Rng& rng, Sample& out) {
    out.clear();
    if (k == 0) return true;
    LevelScratch& ls = scratch_[static_cast<size_t>(k) - 1];
    for (;;) {
      if (!sample_level(k - 1, rng, ls.s0)) return false;
      if (!draw_block(rng, ls.t0)) return false;
      if (!sample_level(k - 1, rng, ls.s1)) return false;
      if (!draw_block(rng, ls.t1)) return false;
      feed(st0_, ls.s0, ls.t0);
      feed(st1_, ls.s1, ls.t1);
      if (st0_.same_predictor(st1_)) {
        ++rejections_[static_cast<size_t>(k)];
        continue;
      }
      const Label* f0 = st0_.labels_view();
      const Label* f1 = st1_.labels_view();
      int x = 0;
      while (f0[x] == f1[x]) ++x;  // smallest disagreement point
      const Label y = rng.next_coin() ? kPlus : kMinus;
      const bool first_loses = f0[x] != y;
      out = first_loses ? ls.s0 : ls.s1;
      out.append_plain(first_loses ? ls.t0 : ls.t1);
      out.push_back(LabeledExample{x, y}, /*tournament=*/true);
      return true;
    }
  }

  const SoaEngine* engine_;
  Source source_;
  int64_t aux_n_;
  int64_t cap_;
  int64_t draws_ = 0;
  std::vector<int64_t> rejections_;
  std::vector<LevelScratch> scratch_;
  SoaState st0_, st1_;
};

struct StableLearnerResult {
  Hypothesis hypothesis;
  int level = 0;  // the uniformly drawn tournament depth in {0, ..., d}
  int64_t draws_used = 0;
  bool sampler_failed = false;
};

// Checks, for a transcript whose suffix starting at t_start is the fresh
// auxiliary block: every tournament-flagged position was a mistake, and the
// final hypothesis is consistent with the suffix. Throws on violation.
inline void verify_tournament_invariants(const Sample& s, int t_start,
                                         const SoaRunResult& run) {
  size_t mi = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (!s.tournament_flags[static_cast<size_t>(i)]) continue;
    while (mi < run.mistake_positions.size() && run.mistake_positions[mi] < i) ++mi;
    if (mi == run.mistake_positions.size() || run.mistake_positions[mi] != i)
      throw InvariantViolation("tournament example did not force a mistake");
  }
  for (int i = t_start; i < s.size(); ++i) {
    const LabeledExample& ex = s.examples[static_cast<size_t>(i)];
    if (run.final_hypothesis(ex.point) != ex.label)
      throw InvariantViolation("output hypothesis inconsistent with the fresh suffix");
  }
}

// The globally-stable learner: draw a level uniformly from {0..d}, sample a
// tournament transcript, append a fresh auxiliary block and run the SOA over
// the concatenation. On sampler failure the transcript is empty and the run
// is flagged.
template <class Source = DistributionSource>
class StableLearner {
 public:
  StableLearner(const SoaEngine& engine, const StabilityParams& params,
                Source source)
      : engine_(&engine),
        d_(params.d),
        aux_n_(params.runtime_n()),
        sampler_(engine, std::move(source), params.runtime_n(), params.runtime_N()) {
    if (engine.class_ldim() != params.d)
      throw std::invalid_argument(
          "stability parameters were derived for a different Littlestone dimension");
  }

  StableLearnerResult run(Rng& rng) {
    const int level = static_cast<int>(rng.next_below(static_cast<uint64_t>(d_) + 1));
    TournamentSampleResult s = sampler_.sample(level, rng);
    concat_ = s.outcome ? std::move(*s.outcome) : Sample{};
    const int t_start = concat_.size();
    for (int64_t i = 0; i < aux_n_; ++i)
      concat_.push_back(sampler_.source().draw(rng));
    const SoaRunResult run = soa_run(*engine_, concat_);
    verify_tournament_invariants(concat_, t_start, run);
    if (!s.failed() && run.mistake_count < level)
      throw InvariantViolation("fewer mistakes than tournament examples");
    return StableLearnerResult{run.final_hypothesis, level,
                               s.draws_used + aux_n_, s.failed()};
  }

  const Sample& last_transcript() const { return concat_; }

 private:
  const SoaEngine* engine_;
  int d_;
  int64_t aux_n_;
  TournamentSampler<Source> sampler_;
  Sample concat_;
};

inline StableLearnerResult globally_stable_learn(const SoaEngine& engine,
                                                 const StabilityParams& params,
                                                 const RealizableDistribution& dist,
                                                 Rng& rng) {
  StableLearner<DistributionSource> learner(engine, params,
                                            DistributionSource{&dist});
  return learner.run(rng);
}

}  // namespace stablepac
