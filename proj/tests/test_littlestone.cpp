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

#include "stablepac/littlestone.hpp"

using namespace stablepac;

namespace {

ConceptClass random_class(Rng& rng, int max_members, int max_domain) {
  const int domain = 1 + static_cast<int>(rng.next_below(max_domain));
  const int want = 1 + static_cast<int>(rng.next_below(max_members));
  std::vector<Hypothesis> members;
  std::set<std::string> seen;
  int guard = 0;
  while (static_cast<int>(members.size()) < want && ++guard < 1000) {
    std::vector<Label> labels(static_cast<size_t>(domain));
    for (Label& l : labels) l = rng.next_coin() ? kPlus : kMinus;
    Hypothesis h(std::move(labels));
    if (seen.insert(h.fingerprint()).second) members.push_back(std::move(h));
  }
  return ConceptClass(domain, std::move(members));
}

}  // namespace

TEST_CASE("dimension of basic classes", "[littlestone]") {
  REQUIRE(ldim(ConceptClass(3, {})) == -1);
  REQUIRE(ldim(ConceptClass(3, {Hypothesis::constant(3, kPlus)})) == 0);
  REQUIRE(ldim(make_thresholds(8)) == 3);
  REQUIRE(ldim(make_thresholds(4)) == 2);
  REQUIRE(ldim(make_full_class(2)) == 2);
  for (int j = 1; j <= 4; ++j) REQUIRE(ldim(make_thresholds(1 << j)) == j);
}

TEST_CASE("shattered tree search", "[littlestone]") {
  const ConceptClass c8 = make_thresholds(8);
  const auto depth3 = find_shattered_tree(c8, 3);
  REQUIRE(depth3.has_value());
  REQUIRE(verify_shattered(c8, *depth3));
  REQUIRE_FALSE(find_shattered_tree(c8, 4).has_value());

  const ConceptClass singleton(8, {c8.member(0)});
  REQUIRE_FALSE(find_shattered_tree(singleton, 1).has_value());
}

TEST_CASE("verifying trees", "[littlestone]") {
  const ConceptClass c8 = make_thresholds(8);

  // a depth-0 tree is vacuously shattered
  REQUIRE(verify_shattered(c8, MistakeTree{}));
  REQUIRE(verify_shattered(ConceptClass(8, {c8.member(2)}), MistakeTree{}));

  // the classic halving tree over eight thresholds: answering +1 at point x
  // keeps the members that are +1 there (small indices), so the +1 child
  // queries the lower half
  MistakeTree halving;
  halving.depth = 3;
  halving.nodes = {3, 5, 1, 6, 4, 2, 0};
  REQUIRE(verify_shattered(c8, halving));
  REQUIRE_FALSE(verify_shattered(ConceptClass(8, {c8.member(0)}), halving));

  MistakeTree outside;
  outside.depth = 1;
  outside.nodes = {12};
  REQUIRE_THROWS_AS(verify_shattered(c8, outside), std::invalid_argument);
}

TEST_CASE("tree-search oracle agrees with the recursion", "[littlestone]") {
  // all subclasses of thresholds(4)
  const ConceptClass c4 = make_thresholds(4);
  for (uint32_t bits = 0; bits < 16; ++bits) {
    std::vector<Hypothesis> members;
    for (int i = 0; i < 4; ++i)
      if (bits & (1u << i)) members.push_back(c4.member(i));
    const ConceptClass sub(4, std::move(members));
    REQUIRE(ldim(sub) == ldim_by_tree_search(sub));
  }

  Rng rng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const ConceptClass cls = random_class(rng, 12, 5);
    REQUIRE(ldim(cls) == ldim_by_tree_search(cls));
  }
}

TEST_CASE("dimension properties", "[littlestone]") {
  Rng rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    const ConceptClass cls = random_class(rng, 12, 5);
    const int d = ldim(cls);

    // log bound
    REQUIRE(d <= static_cast<int>(std::floor(std::log2(cls.size()))));

    // no point splits the class into two branches of full dimension
    for (int x = 0; x < cls.domain_size(); ++x) {
      const int dp = ldim(restrict_class(cls, x, kPlus));
      const int dm = ldim(restrict_class(cls, x, kMinus));
      REQUIRE_FALSE((dp == d && dm == d));
      REQUIRE(dp <= d);
      REQUIRE(dm <= d);
    }

    // monotone under taking subclasses
    std::vector<Hypothesis> some;
    for (int i = 0; i < cls.size(); ++i)
      if (rng.next_coin()) some.push_back(cls.member(i));
    REQUIRE(ldim(ConceptClass(cls.domain_size(), std::move(some))) <= d);
  }
}

TEST_CASE("oversized classes are rejected", "[littlestone]") {
  REQUIRE_THROWS_AS(ldim(make_full_class(7)), std::invalid_argument);
}
