#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "ftrs/geometry.hpp"

namespace ftrs::test {

struct OracleCost {
  int tier = 0;
  double gap = 0, dist = 0;
  bool operator<(const OracleCost& o) const {
    if (tier != o.tier) return tier < o.tier;
    if (gap != o.gap) return gap < o.gap;
    return dist < o.dist;
  }
  bool operator==(const OracleCost&) const = default;
};

// Location rule written out from its definition.
inline std::optional<OracleCost> rule(const Box& k, const Box& c) {
  const double kcy = k.y + k.h / 2, ccy = c.y + c.h / 2;
  const double dist = std::sqrt((c.x + c.w / 2 - k.x - k.w / 2) * (c.x + c.w / 2 - k.x - k.w / 2) +
                                (ccy - kcy) * (ccy - kcy));
  if (std::abs(ccy - kcy) <= 0.6 * k.h && c.x > k.x) return OracleCost{1, std::max(0.0, c.x - (k.x + k.w)), dist};
  const bool overlaps = std::min(c.x + c.w, k.x + k.w) > std::max(c.x, k.x);
  if (c.y - (k.y + k.h) > 0 && overlaps) return OracleCost{2, c.y - (k.y + k.h), dist};
  return std::nullopt;
}

inline bool before(const Box& a, const Box& b) { return a.y < b.y || (a.y == b.y && a.x < b.x); }

// Brute force over every injective partial assignment. Keys and candidates
// are visited in reading order with "no candidate" last, and only a strictly
// cheaper assignment replaces the incumbent, which fixes the tie-break.
inline std::pair<std::vector<std::optional<std::size_t>>, OracleCost> brute_force(const std::vector<Box>& keys,
                                                                            const std::vector<Box>& cands) {
  std::vector<std::size_t> ko(keys.size()), co(cands.size());
  std::iota(ko.begin(), ko.end(), 0);
  std::iota(co.begin(), co.end(), 0);
  std::stable_sort(ko.begin(), ko.end(), [&](auto a, auto b) { return before(keys[a], keys[b]); });
  std::stable_sort(co.begin(), co.end(), [&](auto a, auto b) { return before(cands[a], cands[b]); });
  std::vector<std::optional<std::size_t>> cur(keys.size()), best;
  std::optional<OracleCost> best_cost;
  std::vector<bool> used(cands.size(), false);
  std::function<void(std::size_t, OracleCost)> go = [&](std::size_t i, OracleCost acc) {
    if (i == ko.size()) {
      if (!best_cost || acc < *best_cost) best_cost = acc, best = cur;
      return;
    }
    for (std::size_t c : co) {
      if (used[c]) continue;
      const auto s = rule(keys[ko[i]], cands[c]);
      if (!s) continue;
      used[c] = true;
      cur[ko[i]] = c;
      go(i + 1, {acc.tier + s->tier, acc.gap + s->gap, acc.dist + s->dist});
      used[c] = false;
    }
    cur[ko[i]] = std::nullopt;
    go(i + 1, {acc.tier + 3, acc.gap, acc.dist});
  };
  go(0, {});
  return {best, *best_cost};
}

inline Box random_box(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pos(0, 20), size(1, 6);
  return {pos(rng) * 10.0, pos(rng) * 10.0, size(rng) * 20.0, 20.0};
}

}  // namespace ftrs::test
