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

#include "stablepac/soa.hpp"

using namespace stablepac;

namespace {

// Adversary walking a maximal shattered tree: while the surviving class has
// positive dimension, query a point whose two restrictions both keep
// dimension ldim-1 and answer against the prediction. Every answer is a
// forced mistake and stays realizable, so exactly ldim mistakes accumulate
// and the survivor is unique.
struct AdversaryResult {
  int mistakes = 0;
  Hypothesis target;
  Sample sequence;
};

AdversaryResult run_adversary(const ConceptClass& cls) {
  SoaEngine engine(cls);
  SoaState state(engine);
  ConceptClass alive = cls;
  Sample seq;
  int mistakes = 0;
  for (;;) {
    const int r = ldim(alive);
    if (r < 1) break;
    int chosen = -1;
    for (int x = 0; x < cls.domain_size(); ++x) {
      const int lp = ldim(restrict_class(alive, x, kPlus));
      const int lm = ldim(restrict_class(alive, x, kMinus));
      if (std::min(lp, lm) == r - 1) {
        chosen = x;
        break;
      }
    }
    REQUIRE(chosen >= 0);
    const Label anti = static_cast<Label>(-state.predict(chosen));
    alive = restrict_class(alive, chosen, anti);
    seq.push_back({chosen, anti});
    state.update(chosen, anti);
    ++mistakes;
  }
  REQUIRE(alive.size() == 1);
  const Hypothesis target = alive.member(0);
  for (int x = 0; x < cls.domain_size(); ++x) {
    seq.push_back({x, target(x)});
    state.update(x, target(x));
  }
  return AdversaryResult{mistakes, target, std::move(seq)};
}

Sample random_realizable(const ConceptClass& cls, Rng& rng, int max_len) {
  const Hypothesis& target =
      cls.member(static_cast<int>(rng.next_below(cls.size())));
  Sample s;
  const int len = static_cast<int>(rng.next_below(max_len + 1));
  for (int i = 0; i < len; ++i) {
    const int x = static_cast<int>(rng.next_below(cls.domain_size()));
    s.push_back({x, target(x)});
  }
  return s;
}

}  // namespace

TEST_CASE("initial state", "[soa]") {
  const ConceptClass c8 = make_thresholds(8);
  SoaEngine engine(c8);
  SoaState state(engine);
  REQUIRE(state.version_space() == engine.context().full_mask());
  REQUIRE(state.realizable());

  const ConceptClass singleton(8, {c8.member(4)});
  SoaEngine single_engine(singleton);
  SoaState single_state(single_engine);
  for (int x = 0; x < 8; ++x) REQUIRE(single_state.predict(x) == c8.member(4)(x));

  REQUIRE_THROWS_AS(SoaEngine(ConceptClass(3, {})), std::invalid_argument);
}

TEST_CASE("initial predictor is the argmax rule", "[soa]") {
  const ConceptClass c2 = make_thresholds(2);
  SoaEngine engine(c2);
  SoaState state(engine);
  for (int x = 0; x < 2; ++x) {
    const int lp = ldim(restrict_class(c2, x, kPlus));
    const int lm = ldim(restrict_class(c2, x, kMinus));
    const Label expected = lp >= lm ? kPlus : kMinus;  // ties to +1
    REQUIRE(state.predict(x) == expected);
  }
}

TEST_CASE("prediction is deterministic and patches take precedence", "[soa]") {
  const ConceptClass c1 = make_thresholds(1);  // single all-plus hypothesis
  SoaEngine engine(c1);
  SoaState state(engine);
  REQUIRE(state.predict(0) == kPlus);
  REQUIRE(state.predict(0) == kPlus);
  state.update(0, kMinus);  // unrealizable: only +1 at 0 is realizable
  REQUIRE_FALSE(state.realizable());
  REQUIRE(state.predict(0) == kMinus);
}

TEST_CASE("updates keep the target alive", "[soa]") {
  const ConceptClass c8 = make_thresholds(8);
  SoaEngine engine(c8);
  SoaState state(engine);
  Rng rng(4);
  const Hypothesis& target = c8.member(3);
  for (int i = 0; i < 60; ++i) {
    const int x = static_cast<int>(rng.next_below(8));
    state.update(x, target(x));
    REQUIRE(state.realizable());
    bool target_alive = false;
    for (int m = 0; m < 8; ++m)
      if (state.version_space() & (uint64_t{1} << m))
        target_alive = target_alive || c8.member(m) == target;
    REQUIRE(target_alive);
  }
}

TEST_CASE("contradictory example flips to patched mode", "[soa]") {
  const ConceptClass c1 = make_thresholds(1);
  SoaEngine engine(c1);
  SoaState state(engine);
  state.update(0, kPlus);
  REQUIRE(state.realizable());
  state.update(0, kMinus);
  REQUIRE_FALSE(state.realizable());
  REQUIRE(state.predict(0) == kMinus);
}

TEST_CASE("patched updates are local", "[soa]") {
  const ConceptClass c4 = make_thresholds(4);
  SoaEngine engine(c4);
  SoaState state(engine);
  // drive into an unrealizable prefix
  state.update(2, kPlus);
  state.update(2, kMinus);
  REQUIRE_FALSE(state.realizable());
  std::vector<Label> before;
  for (int x = 0; x < 4; ++x) before.push_back(state.predict(x));
  state.update(1, static_cast<Label>(-state.predict(1)));
  int changed = 0;
  for (int x = 0; x < 4; ++x)
    if (state.predict(x) != before[static_cast<size_t>(x)]) ++changed;
  REQUIRE(changed == 1);
  REQUIRE(state.patched_points().back() == 1);
}

TEST_CASE("empty run returns the initial predictor", "[soa]") {
  const ConceptClass c4 = make_thresholds(4);
  SoaEngine engine(c4);
  const SoaRunResult r = soa_run(engine, Sample{});
  REQUIRE(r.mistake_count == 0);
  REQUIRE(r.mistake_positions.empty());
  REQUIRE(r.final_hypothesis == SoaState(engine).hypothesis());
}

TEST_CASE("mistake bound over random realizable sequences", "[soa]") {
  const std::vector<ConceptClass> classes = {make_thresholds(4), make_thresholds(8),
                                             make_full_class(3)};
  Rng rng(99);
  for (const ConceptClass& cls : classes) {
    SoaEngine engine(cls);
    const int d = engine.class_ldim();
    for (int rep = 0; rep < 2000; ++rep) {
      const Sample s = random_realizable(cls, rng, 50);
      const SoaRunResult r = soa_run(engine, s);
      REQUIRE(r.mistake_count <= d);
      REQUIRE(static_cast<size_t>(r.mistake_count) == r.mistake_positions.size());
      // final hypothesis consistent with the whole input sequence
      for (const auto& ex : s.examples)
        REQUIRE(r.final_hypothesis(ex.point) == ex.label);
    }
  }
}

TEST_CASE("an adversary forces exactly ldim mistakes", "[soa]") {
  const ConceptClass c8 = make_thresholds(8);
  const AdversaryResult adv = run_adversary(c8);
  REQUIRE(adv.mistakes == 3);

  SoaEngine engine(c8);
  const SoaRunResult r = soa_run(engine, adv.sequence);
  REQUIRE(r.mistake_count == 3);
  REQUIRE(r.final_hypothesis == adv.target);
  for (const auto& ex : adv.sequence.examples)
    REQUIRE(adv.target(ex.point) == ex.label);
}

TEST_CASE("suffix consistency for arbitrary prefixes", "[soa]") {
  const ConceptClass c4 = make_thresholds(4);
  SoaEngine engine(c4);
  Rng rng(31);
  for (int rep = 0; rep < 500; ++rep) {
    Sample s;
    const int prefix_len = static_cast<int>(rng.next_below(12));
    for (int i = 0; i < prefix_len; ++i)  // arbitrary labels: often unrealizable
      s.push_back({static_cast<int>(rng.next_below(4)),
                   rng.next_coin() ? kPlus : kMinus});
    const int t_start = s.size();
    const Hypothesis& target = c4.member(static_cast<int>(rng.next_below(4)));
    const int suffix_len = 1 + static_cast<int>(rng.next_below(10));
    for (int i = 0; i < suffix_len; ++i) {
      const int x = static_cast<int>(rng.next_below(4));
      s.push_back({x, target(x)});
    }
    const SoaRunResult r = soa_run(engine, s);
    for (int i = t_start; i < s.size(); ++i) {
      const auto& ex = s.examples[static_cast<size_t>(i)];
      REQUIRE(r.final_hypothesis(ex.point) == ex.label);
    }
  }
}
