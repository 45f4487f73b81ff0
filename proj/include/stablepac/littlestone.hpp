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

// Exact Littlestone dimension plus a brute-force shattered-mistake-tree
// search used as an independent oracle in tests. The dimension is computed
// by the restriction recursion, memoized on bitsets of member indices; the
// tree search never touches that memo.

#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "stablepac/core.hpp"

namespace stablepac {

// Precomputed restriction masks and the Ldim memo for one ambient class.
// Subclasses are canonical bitsets of member indices; at most 64 members.
class ClassContext {
 public:
  explicit ClassContext(ConceptClass cls) : cls_(std::move(cls)) {
    if (cls_.size() > 64)
      throw std::invalid_argument(
          "concept classes with more than 64 members are not supported");
    full_ = cls_.size() == 64 ? ~uint64_t{0} : (uint64_t{1} << cls_.size()) - 1;
    pos_mask_.assign(static_cast<size_t>(cls_.domain_size()), 0);
    for (int i = 0; i < cls_.size(); ++i)
      for (int x = 0; x < cls_.domain_size(); ++x)
        if (cls_.member(i)(x) == kPlus)
          pos_mask_[static_cast<size_t>(x)] |= uint64_t{1} << i;
  }

  const ConceptClass& concept_class() const { return cls_; }
  int domain_size() const { return cls_.domain_size(); }
  uint64_t full_mask() const { return full_; }

  uint64_t restrict_mask(uint64_t subset, int x, Label b) const {
    const uint64_t pos = pos_mask_[static_cast<size_t>(x)];
    return subset & (b == kPlus ? pos : full_ & ~pos);
  }

  // Ldim of the subclass selected by `subset`; -1 for the empty class.
  int ldim_subset(uint64_t subset) const {
    if (subset == 0) return -1;
    if ((subset & (subset - 1)) == 0) return 0;
    if (auto it = memo_.find(subset); it != memo_.end()) return it->second;
    int best = 0;
    for (int x = 0; x < cls_.domain_size(); ++x) {
      const uint64_t pos = restrict_mask(subset, x, kPlus);
      if (pos == 0 || pos == subset) continue;
      const uint64_t neg = subset & ~pos;
      const int l = 1 + std::min(ldim_subset(pos), ldim_subset(neg));
      if (l > best) best = l;
    }
    memo_.emplace(subset, best);
    return best;
  }

  ConceptClass subclass(uint64_t subset) const {
    std::vector<Hypothesis> members;
    for (int i = 0; i < cls_.size(); ++i)
      if (subset & (uint64_t{1} << i)) members.push_back(cls_.member(i));
    return ConceptClass(cls_.domain_size(), std::move(members));
  }

 private:
  ConceptClass cls_;
  uint64_t full_ = 0;
  std::vector<uint64_t> pos_mask_;
  mutable std::unordered_map<uint64_t, int> memo_;
};

inline int ldim(const ConceptClass& cls) {
  if (cls.empty()) return -1;
  ClassContext ctx(cls);
  return ctx.ldim_subset(ctx.full_mask());
}

// A complete binary tree of the given depth with domain points at internal
// nodes, in heap layout: nodes[0] is the root, node i has children 2i+1
// (the -1 child) and 2i+2 (the +1 child). Depth 0 is the empty tree.
struct MistakeTree {
  int depth = 0;
  std::vector<int> nodes;  // size 2^depth - 1

  std::string to_text() const {
    std::ostringstream out;
    if (depth == 0) {
      out << "(empty tree)\n";
      return out.str();
    }
    print(out, 0, 0);
    return out.str();
  }

 private:
  void print(std::ostringstream& out, size_t i, int indent) const {
    if (i >= nodes.size()) return;
    out << std::string(static_cast<size_t>(indent) * 2, ' ') << "x=" << nodes[i]
        << "\n";
    print(out, 2 * i + 1, indent + 1);
    print(out, 2 * i + 2, indent + 1);
  }
};

// True iff every root-to-leaf path of T decodes to an example sequence
// realized by some member (label +1 when the path takes the +1 child).
inline bool verify_shattered(const ConceptClass& cls, const MistakeTree& tree) {
  if (tree.depth == 0) return true;
  for (int x : tree.nodes)
    if (x < 0 || x >= cls.domain_size())
      throw std::invalid_argument("tree point outside the class domain");
  ClassContext ctx(cls);
  const uint32_t leaves = uint32_t{1} << tree.depth;
  for (uint32_t leaf = 0; leaf < leaves; ++leaf) {
    uint64_t alive = ctx.full_mask();
    size_t node = 0;
    for (int level = 0; level < tree.depth; ++level) {
      const bool right = (leaf >> (tree.depth - 1 - level)) & 1;
      alive = ctx.restrict_mask(alive, tree.nodes[node], right ? kPlus : kMinus);
      if (alive == 0) return false;
      node = 2 * node + (right ? 2 : 1);
    }
  }
  return true;
}

namespace detail {

struct TreeNode {
  int point = 0;
  std::unique_ptr<TreeNode> lo, hi;
};

// Depth-first exhaustive search, pruned only by the counting bound that a
// shattered depth-r tree needs at least 2^r distinct members. Deliberately
// independent of the memoized Ldim recursion.
inline std::unique_ptr<TreeNode> search_tree(const ClassContext& ctx,
                                             uint64_t alive, int depth) {
  if (std::popcount(alive) < (int64_t{1} << depth)) return nullptr;
  if (depth == 0) return std::make_unique<TreeNode>();
  for (int x = 0; x < ctx.domain_size(); ++x) {
    const uint64_t pos = ctx.restrict_mask(alive, x, kPlus);
    const uint64_t neg = alive & ~pos;
    auto lo = search_tree(ctx, neg, depth - 1);
    if (!lo) continue;
    auto hi = search_tree(ctx, pos, depth - 1);
    if (!hi) continue;
    auto node = std::make_unique<TreeNode>();
    node->point = x;
    node->lo = std::move(lo);
    node->hi = std::move(hi);
    return node;
  }
  return nullptr;
}

inline void flatten(const TreeNode& node, int depth, size_t index,
                    std::vector<int>& out) {
  if (depth == 0) return;
  out[index] = node.point;
  flatten(*node.lo, depth - 1, 2 * index + 1, out);
  flatten(*node.hi, depth - 1, 2 * index + 2, out);
}

}  // namespace detail

// A shattered tree of exactly `depth` if one exists, else nullopt.
inline std::optional<MistakeTree> find_shattered_tree(const ConceptClass& cls,
                                                      int depth) {
  if (depth < 1) throw std::invalid_argument("tree search needs depth >= 1");
  if (cls.empty()) return std::nullopt;
  ClassContext ctx(cls);
  auto root = detail::search_tree(ctx, ctx.full_mask(), depth);
  if (!root) return std::nullopt;
  MistakeTree tree;
  tree.depth = depth;
  tree.nodes.assign((size_t{1} << depth) - 1, 0);
  detail::flatten(*root, depth, 0, tree.nodes);
  return tree;
}

// Oracle view of the dimension: the largest depth admitting a shattered tree
// (0 for nonempty classes with none, -1 for the empty class).
inline int ldim_by_tree_search(const ConceptClass& cls) {
  if (cls.empty()) return -1;
  int best = 0;
  for (int depth = 1; (int64_t{1} << depth) <= cls.size(); ++depth)
    if (find_shattered_tree(cls, depth)) best = depth;
  return best;
}

}  // namespace stablepac
