// Copyright 2026 The glagent Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <limits>

#include "glagent/error.hpp"
#include "glagent/rng.hpp"
#include "glagent/search/search.hpp"

namespace glagent::search {

namespace {

using U64 = std::uint64_t;
constexpr U64 kMax = std::numeric_limits<U64>::max();

U64 sat_mul(U64 a, U64 b) {
  if (a == 0 || b == 0) return 0;
  return a > kMax / b ? kMax : a * b;
}

bool zero_allowed(const SearchSpace& s) {
  const auto& sel = s.ops(modules::kSelection);
  return std::find(sel.begin(), sel.end(), "ZERO") != sel.end();
}

// Gate patterns for block i (0-based): nonempty subsets of {0..i} by ascending
// bitmask, or only the full set when ZERO is not a candidate.
std::vector<std::vector<int>> gate_patterns(int i, bool zero) {
  std::vector<std::vector<int>> out;
  const unsigned full = (1u << (i + 1)) - 1u;
  for (unsigned mask = zero ? 1u : full; mask <= full; ++mask) {
    std::vector<int> inputs;
    for (int k = 0; k <= i; ++k)
      if (mask & (1u << k)) inputs.push_back(k);
    out.push_back(std::move(inputs));
  }
  return out;
}

U64 per_agg_count(int i, bool zero, std::size_t num_fuse) {
  U64 n = 0;
  for (const auto& p : gate_patterns(i, zero)) n += p.size() == 1 ? 1 : num_fuse;
  return n;
}

std::vector<U64> radices(const SearchSpace& s) {
  using namespace modules;
  std::vector<U64> r;
  if (s.instance == Instance::LinkProfcf) {
    r = {s.ops(kMessage).size(),     s.ops(kAggregation).size(),   s.layer_counts.size(),
         s.ops(kLayerComb).size(),   s.component_counts.size(),    s.ops(kComponentComb).size(),
         s.ops(kInteraction).size()};
    return r;
  }
  const bool zero = zero_allowed(s);
  const std::size_t aggs = s.ops(kAggregation).size();
  const std::size_t fuses = s.ops(kFusion).size();
  for (int i = 0; i < s.num_blocks; ++i) r.push_back(sat_mul(aggs, per_agg_count(i, zero, fuses)));
  if (s.instance == Instance::GraphLrgnn) r.push_back(s.ops(kReadout).size());
  return r;
}

void check_space(const SearchSpace& s) {
  if (s.instance != Instance::LinkProfcf) {
    if (s.num_blocks < 1 || s.num_blocks > 4)
      throw Error(ErrorCode::InvalidParameter, "num_blocks must lie in [1, 4]");
    const auto& sel = s.ops(modules::kSelection);
    if (std::find(sel.begin(), sel.end(), "IDENTITY") == sel.end())
      throw Error(ErrorCode::InvalidParameter, "Selection candidates must include IDENTITY");
  }
}

}  // namespace

U64 count_genotypes(const SearchSpace& space) {
  check_space(space);
  U64 n = 1;
  for (U64 r : radices(space)) n = sat_mul(n, r);
  return n;
}

Genotype genotype_at(const SearchSpace& space, U64 index) {
  using namespace modules;
  check_space(space);
  const auto r = radices(space);
  std::vector<U64> digit(r.size());
  for (std::size_t k = r.size(); k-- > 0;) {
    digit[k] = index % r[k];
    index /= r[k];
  }
  if (index != 0) throw Error(ErrorCode::InvalidParameter, "genotype index beyond the space");
  Genotype g;
  g.instance = space.instance;
  if (space.instance == Instance::LinkProfcf) {
    g.link.message = space.ops(kMessage)[digit[0]];
    g.link.aggregation = space.ops(kAggregation)[digit[1]];
    g.link.num_layers = space.layer_counts[digit[2]];
    g.link.layer_comb = space.ops(kLayerComb)[digit[3]];
    g.link.num_components = space.component_counts[digit[4]];
    g.link.comp_comb = space.ops(kComponentComb)[digit[5]];
    g.link.interaction = space.ops(kInteraction)[digit[6]];
    return g;
  }
  const bool zero = zero_allowed(space);
  const auto& aggs = space.ops(kAggregation);
  const auto& fuses = space.ops(kFusion);
  for (int i = 0; i < space.num_blocks; ++i) {
    const U64 per_agg = per_agg_count(i, zero, fuses.size());
    BlockGene b;
    b.agg = aggs[digit[static_cast<std::size_t>(i)] / per_agg];
    U64 rem = digit[static_cast<std::size_t>(i)] % per_agg;
    for (auto& pattern : gate_patterns(i, zero)) {
      const U64 width = pattern.size() == 1 ? 1 : fuses.size();
      if (rem < width) {
        b.fuse = pattern.size() == 1 ? "sum" : fuses[rem];
        b.inputs = std::move(pattern);
        break;
      }
      rem -= width;
    }
    g.blocks.push_back(std::move(b));
  }
  if (space.instance == Instance::GraphLrgnn) g.readout = space.ops(kReadout)[digit.back()];
  return g;
}

std::vector<Genotype> enumerate_genotypes(const SearchSpace& space, U64 limit) {
  const U64 n = count_genotypes(space);
  if (n > limit)
    throw Error(ErrorCode::SpaceTooLarge,
                "space has " + (n == kMax ? std::string("more than 2^64") : std::to_string(n)) +
                    " genotypes, limit " + std::to_string(limit));
  std::vector<Genotype> out;
  out.reserve(static_cast<std::size_t>(n));
  for (U64 i = 0; i < n; ++i) out.push_back(genotype_at(space, i));
  return out;
}

U64 trial_seed(U64 base_seed, const Genotype& g) { return mix_seed(base_seed, fnv1a64(g.to_string())); }

}  // namespace glagent::search
