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

#include <catch2/catch_amalgamated.hpp>

#include "stablepac/pipeline.hpp"

using namespace stablepac;

TEST_CASE("composite parameters at d=1", "[pipeline]") {
  const PrivateLearnerParams p = private_learner_params(1, 0.5, 0.2, 1.0, 1e-6);
  REQUIRE(p.eta == 1.0 / 1024.0);
  REQUIRE(p.batch.n == 32);       // batch learner runs at alpha/2
  REQUIRE(p.batch.N == 262144);
  REQUIRE(p.batch.m == 262176);
  REQUIRE(p.k == 1048576);        // 2^20
  REQUIRE(p.n_prime == 2251);
  REQUIRE(p.total_n == p.k * p.batch.m + p.n_prime);
  REQUIRE(p.total_n.str() == "274911463627");
  REQUIRE(p.hist_budget.epsilon == 0.5);
  REQUIRE(p.hist_budget.delta == 1e-6);
  REQUIRE(p.em_budget.epsilon == 0.5);
  REQUIRE(p.em_budget.delta == 0.0);
  REQUIRE(p.hist_budget.epsilon + p.em_budget.epsilon == 1.0);
  REQUIRE(p.hist_budget.delta + p.em_budget.delta == 1e-6);
}

TEST_CASE("composite parameters at d=0", "[pipeline]") {
  const PrivateLearnerParams p = private_learner_params(0, 0.5, 0.2, 1.0, 1e-6);
  REQUIRE(p.eta == 1.0 / 32.0);
  REQUIRE(p.batch.n == 16);
  REQUIRE(p.batch.N == 2048);
  REQUIRE(p.batch.m == 2064);
  REQUIRE(p.k == 32768);  // 2^15
  REQUIRE(p.n_prime == 1585);
  REQUIRE(p.total_n.str() == "67634737");
}

TEST_CASE("batch count passes its own accuracy condition", "[pipeline]") {
  const PrivateLearnerParams p = private_learner_params(1, 0.5, 0.2, 1.0, 1e-6);
  const double log2_eta8 = std::log2(p.eta / 8.0);
  const double log2_k = std::log2(static_cast<double>(p.runtime_k()));
  REQUIRE(hist_accuracy_check_log2(log2_k, log2_eta8, 0.2 / 3.0, p.hist_budget));
  // half the batch count must fail (k is minimal among powers of two) unless
  // the floor k >= 16 ln(3/beta)/eta already binds
  const bool half_passes =
      hist_accuracy_check_log2(log2_k - 1.0, log2_eta8, 0.2 / 3.0, p.hist_budget);
  const bool floor_binds =
      std::exp2(log2_k - 1.0) < 16.0 * std::log(3.0 / 0.2) / p.eta;
  REQUIRE((!half_passes || floor_binds));
}

TEST_CASE("selection sample size satisfies both displayed conditions", "[pipeline]") {
  const PrivateLearnerParams p = private_learner_params(1, 0.5, 0.2, 1.0, 1e-6);
  const double n = static_cast<double>(p.n_prime);
  REQUIRE((2.0 / p.eta) * std::exp(-1.0 * (0.5 / 2.0) * n / 12.0) <= 0.2 / 6.0);
  REQUIRE(n >= (96.0 / 0.5) * std::log(24.0 / (p.eta * 0.2)));
  REQUIRE(((2.0 / p.eta) * std::exp(-1.0 * (0.5 / 2.0) * (n - 1) / 12.0) > 0.2 / 6.0 ||
           n - 1 < (96.0 / 0.5) * std::log(24.0 / (p.eta * 0.2))));
}

TEST_CASE("shrinking beta never shrinks the parameters", "[pipeline]") {
  const PrivateLearnerParams loose = private_learner_params(1, 0.5, 0.2, 1.0, 1e-6);
  const PrivateLearnerParams tight = private_learner_params(1, 0.5, 0.02, 1.0, 1e-6);
  REQUIRE(tight.k >= loose.k);
  REQUIRE(tight.n_prime >= loose.n_prime);
}

TEST_CASE("parameter ranges are enforced", "[pipeline]") {
  REQUIRE_THROWS_AS(private_learner_params(1, 0.0, 0.2, 1.0, 1e-6),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(private_learner_params(1, 0.5, 1.0, 1.0, 1e-6),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(private_learner_params(1, 0.5, 0.2, -1.0, 1e-6),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(private_learner_params(1, 0.5, 0.2, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("the composite learner is exact on a singleton class", "[pipeline]") {
  const ConceptClass singleton(3, {make_thresholds(3).member(1)});
  const RealizableDistribution dist =
      RealizableDistribution::uniform(singleton.member(0));
  const PrivateLearnerParams p = private_learner_params(0, 0.5, 0.2, 1.0, 1e-6);
  const LearnResult r = private_learn(singleton, dist, p, 17);
  REQUIRE(r.hypothesis == singleton.member(0));
  REQUIRE_FALSE(r.failed_empty_list);
  REQUIRE(r.released_list_size == 1);
  REQUIRE(r.pruned_list_size == 1);
  REQUIRE(r.batch_digest.at(singleton.member(0).fingerprint()) == p.runtime_k());
}

TEST_CASE("the composite learner replays bit-identically", "[pipeline]") {
  const ConceptClass c2 = make_thresholds(2);
  const RealizableDistribution dist(c2.member(1), {1.0 / 32, 31.0 / 32});
  const PrivateLearnerParams p = private_learner_params(1, 0.5, 0.2, 1.0, 1e-6);
  const LearnResult a = private_learn(c2, dist, p, 12345);
  const LearnResult b = private_learn(c2, dist, p, 12345);
  REQUIRE(a.hypothesis == b.hypothesis);
  REQUIRE(a.batch_digest == b.batch_digest);
  REQUIRE(a.released_list_size == b.released_list_size);
  REQUIRE(a.pruned_list_size == b.pruned_list_size);
  REQUIRE(a.sampler_fail_count == b.sampler_fail_count);

  const int64_t pruned_bound = static_cast<int64_t>(std::floor(2.0 / p.eta)) + 1;
  REQUIRE(a.pruned_list_size <= pruned_bound);
}

namespace {

// Draws from the wrapped distribution but replaces the content of one draw,
// leaving the stream state untouched.
struct SwapOneSource {
  const RealizableDistribution* dist;
  int64_t swap_index = -1;
  LabeledExample replacement;
  int64_t counter = 0;

  LabeledExample draw(Rng& rng) {
    const LabeledExample ex = dist->draw(rng);
    return counter++ == swap_index ? replacement : ex;
  }
};

}  // namespace

TEST_CASE("changing one example in one batch changes at most that batch",
          "[pipeline]") {
  const ConceptClass c2 = make_thresholds(2);
  const RealizableDistribution dist(c2.member(1), {1.0 / 16, 15.0 / 16});
  const StabilityParams params = stability_params(1, 0.25);
  SoaEngine engine(c2);
  const uint64_t seed = 777;
  const int64_t batches = 64;

  std::vector<std::string> baseline;
  for (int64_t i = 0; i < batches; ++i) {
    StableLearner<DistributionSource> learner(engine, params,
                                              DistributionSource{&dist});
    Rng rng = Rng::stream(seed, static_cast<uint64_t>(i));
    baseline.push_back(learner.run(rng).hypothesis.fingerprint());
  }

  const int64_t swapped_batch = 9;
  for (int64_t target = 0; target < 4; ++target) {
    int changed = 0;
    for (int64_t i = 0; i < batches; ++i) {
      Rng rng = Rng::stream(seed, static_cast<uint64_t>(i));
      std::string fp;
      if (i == swapped_batch) {
        StableLearner<SwapOneSource> learner(
            engine, params, SwapOneSource{&dist, target, {0, kMinus}, 0});
        fp = learner.run(rng).hypothesis.fingerprint();
      } else {
        StableLearner<DistributionSource> learner(engine, params,
                                                  DistributionSource{&dist});
        fp = learner.run(rng).hypothesis.fingerprint();
      }
      if (fp != baseline[static_cast<size_t>(i)]) {
        ++changed;
        REQUIRE(i == swapped_batch);
      }
    }
    REQUIRE(changed <= 1);
  }
}

TEST_CASE("threaded batch execution matches the serial result", "[pipeline]") {
  const ConceptClass c2 = make_thresholds(2);
  const RealizableDistribution dist(c2.member(1), {1.0 / 32, 31.0 / 32});
  PrivateLearnerParams p = private_learner_params(1, 0.5, 0.2, 1.0, 1e-6);
  p.k = 512;  // shrink the batch count for the comparison
  const LearnResult serial = private_learn(c2, dist, p, 5, 1);
  const LearnResult threaded = private_learn(c2, dist, p, 5, 4);
  REQUIRE(serial.hypothesis == threaded.hypothesis);
  REQUIRE(serial.batch_digest == threaded.batch_digest);
}
