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

// The Standard Optimal Algorithm in the mistake-bound model, extended to
// non-realizable sequences: while the observed prefix stays realizable the
// predictor is the argmax-Ldim rule over the version space; from the first
// unrealizable example on, each update patches the maintained predictor at
// exactly the updated point.

#pragma once

#include <cstring>
#include <memory>
#include <unordered_map>
#include <vector>

#include "stablepac/littlestone.hpp"

namespace stablepac {

// Owns the class context plus a cache of argmax predictors per version
// space. One engine per worker; states are cheap values bound to an engine.
class SoaEngine {
 public:
  explicit SoaEngine(ConceptClass cls) : ctx_(std::move(cls)) {
    if (ctx_.concept_class().empty())
      throw std::invalid_argument("SOA requires a nonempty concept class");
  }

  const ClassContext& context() const { return ctx_; }
  int domain_size() const { return ctx_.domain_size(); }
  int class_ldim() const { return ctx_.ldim_subset(ctx_.full_mask()); }

  // h(x) = argmax over b of Ldim({h in V : h(x) = b}), ties to +1.
  const std::vector<Label>& predictor_for(uint64_t version_space) const {
    auto it = predictors_.find(version_space);
    if (it != predictors_.end()) return *it->second;
    auto pred = std::make_unique<std::vector<Label>>(
        static_cast<size_t>(ctx_.domain_size()), kPlus);
    for (int x = 0; x < ctx_.domain_size(); ++x) {
      const uint64_t pos = ctx_.restrict_mask(version_space, x, kPlus);
      const int lp = ctx_.ldim_subset(pos);
      const int lm = ctx_.ldim_subset(version_space & ~pos);
      (*pred)[static_cast<size_t>(x)] = lp >= lm ? kPlus : kMinus;
    }
    return *predictors_.emplace(version_space, std::move(pred)).first->second;
  }

 private:
  ClassContext ctx_;
  mutable std::unordered_map<uint64_t, std::unique_ptr<std::vector<Label>>>
      predictors_;
};

class SoaState {
 public:
  explicit SoaState(const SoaEngine& engine) { reset(engine); }

  void reset(const SoaEngine& engine) {
    engine_ = &engine;
    version_space_ = engine.context().full_mask();
    base_ = &engine.predictor_for(version_space_);
    realizable_ = true;
    patched_.clear();
    patched_points_.clear();
  }

  Label predict(int x) const {
    return realizable_ ? (*base_)[static_cast<size_t>(x)]
                       : patched_[static_cast<size_t>(x)];
  }

  void update(int x, Label y) {
    if (realizable_) {
      const uint64_t next = engine_->context().restrict_mask(version_space_, x, y);
      if (next != 0) {
        if (next != version_space_) {
          version_space_ = next;
          base_ = &engine_->predictor_for(next);
        }
        return;
      }
      realizable_ = false;
      patched_ = *base_;
    }
    patched_[static_cast<size_t>(x)] = y;
    patched_points_.push_back(x);
  }

  bool realizable() const { return realizable_; }
  uint64_t version_space() const { return version_space_; }
  const std::vector<int>& patched_points() const { return patched_points_; }

  const Label* labels_view() const {
    return realizable_ ? base_->data() : patched_.data();
  }

  bool same_predictor(const SoaState& other) const {
    if (realizable_ && other.realizable_ && base_ == other.base_) return true;
    return std::memcmp(labels_view(), other.labels_view(),
                       static_cast<size_t>(engine_->domain_size())) == 0;
  }

  Hypothesis hypothesis() const {
    const Label* v = labels_view();
    return Hypothesis(std::vector<Label>(v, v + engine_->domain_size()));
  }

 private:
  const SoaEngine* engine_ = nullptr;
  uint64_t version_space_ = 0;
  const std::vector<Label>* base_ = nullptr;
  bool realizable_ = true;
  std::vector<Label> patched_;
  std::vector<int> patched_points_;
};

inline SoaState soa_init(const SoaEngine& engine) { return SoaState(engine); }

struct SoaRunResult {
  Hypothesis final_hypothesis;
  int mistake_count = 0;
  std::vector<int> mistake_positions;
};

// Processes S in order (predict, reveal, update) and returns the final
// predictor together with mistake accounting.
inline SoaRunResult soa_run(const SoaEngine& engine, const Sample& s) {
  SoaState state(engine);
  std::vector<int> mistakes;
  for (int i = 0; i < s.size(); ++i) {
    const LabeledExample& ex = s.examples[static_cast<size_t>(i)];
    if (state.predict(ex.point) != ex.label) mistakes.push_back(i);
    state.update(ex.point, ex.label);
  }
  return SoaRunResult{state.hypothesis(), static_cast<int>(mistakes.size()),
                      std::move(mistakes)};
}

}  // namespace stablepac
