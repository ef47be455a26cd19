#include "ftrs/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "ftrs/text.hpp"

namespace ftrs {

std::u32string normalize_separators(std::u32string_view line, std::vector<std::size_t>* index_map) {
  std::vector<bool> drop(line.size(), false);
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (!text::is_separator(line[i])) continue;
    drop[i] = true;
    for (std::size_t l = i; l > 0 && (text::is_space(line[l - 1]) || text::is_separator(line[l - 1])); --l)
      drop[l - 1] = true;
    for (std::size_t r = i + 1; r < line.size() && (text::is_space(line[r]) || text::is_separator(line[r])); ++r)
      drop[r] = true;
  }
  std::u32string out;
  if (index_map) index_map->clear();
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (drop[i]) continue;
    out.push_back(line[i]);
    if (index_map) index_map->push_back(i);
  }
  return out;
}

std::string normalize_separators(std::string_view line) {
  return text::encode(normalize_separators(text::decode(line)));
}

std::optional<KeywordMatch> fuzzy_match_keyword(std::u32string_view line, std::u32string_view keyword) {
  if (keyword.empty()) return std::nullopt;
  std::vector<std::size_t> map;
  const std::u32string norm = normalize_separators(line, &map);
  const std::size_t n = norm.size(), L = keyword.size();
  const std::size_t tolerance = keyword_tolerance(L);
  const std::size_t min_len = std::max<std::size_t>(1, L - 1), max_len = L + 1;

  std::optional<KeywordMatch> best;
  std::size_t best_start = 0, best_len = 0;
  // dp[j] = distance(keyword[0..i), norm[start..start+j)) for j <= max_len.
  std::vector<std::size_t> dp(max_len + 1), prev(max_len + 1);
  for (std::size_t start = 0; start + min_len <= n; ++start) {
    const std::size_t cols = std::min(max_len, n - start);
    std::iota(prev.begin(), prev.begin() + cols + 1, std::size_t{0});
    for (std::size_t i = 1; i <= L; ++i) {
      dp[0] = i;
      for (std::size_t j = 1; j <= cols; ++j) {
        const std::size_t sub = prev[j - 1] + (keyword[i - 1] == norm[start + j - 1] ? 0 : 1);
        dp[j] = std::min({sub, prev[j] + 1, dp[j - 1] + 1});
      }
      std::swap(dp, prev);
    }
    for (std::size_t len = min_len; len <= cols; ++len) {
      const std::size_t d = prev[len];
      if (d <= tolerance && (!best || d < best->edit_distance)) {
        best = KeywordMatch{0, 0, d};
        best_start = start;
        best_len = len;
      }
    }
    if (best && best->edit_distance == 0) break;
  }
  if (!best) return std::nullopt;
  best->start = map[best_start];
  best->end = map[best_start + best_len - 1] + 1;
  return best;
}

std::optional<KeywordMatch> fuzzy_match_keyword(std::string_view line, std::string_view keyword) {
  return fuzzy_match_keyword(text::decode(line), text::decode(keyword));
}

std::optional<PairScore> score_pair(const Box& key, const Box& cand) {
  const double distance = std::hypot(cand.cx() - key.cx(), cand.cy() - key.cy());
  if (std::fabs(cand.cy() - key.cy()) <= 0.6 * key.h && cand.x > key.x)
    return PairScore{1, std::max(0.0, cand.x - key.right()), distance};
  const double below = cand.y - key.bottom();
  const double overlap = std::min(cand.right(), key.right()) - std::max(cand.x, key.x);
  if (below > 0 && overlap > 0) return PairScore{2, below, distance};
  return std::nullopt;
}

bool reading_order_less(const Box& a, const Box& b) {
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

namespace {

class Scanner {
 public:
  Scanner(const StructureInput& in, StructureResult& out) : in_(in), out_(out) {
    for (const auto& kw : in.keyword_list) keywords_.push_back(text::decode(kw));
    consumed_.assign(keywords_.size(), false);
    for (const auto& r : in.input_list) lines_.push_back(text::decode(r.text));
  }

  void run() {
    for (std::size_t i = 0; i < lines_.size(); ++i)
      if (!process({i, 0, lines_[i].size()})) out_.unmatched_lines.push_back(i);
  }

 private:
  std::u32string_view view(const Span& s) const {
    return std::u32string_view(lines_[s.region]).substr(s.start, s.end - s.start);
  }

  // Proportional sub-box by code-point count.
  Box sub_box(const Span& s) const {
    const Box& b = in_.input_list[s.region].bbox;
    const double n = std::max<std::size_t>(1, lines_[s.region].size());
    return {b.x + b.w * s.start / n, b.y, b.w * (s.end - s.start) / n, b.h};
  }

  Span trimmed(const Span& s) const {
    Span t = s;
    const auto& line = lines_[s.region];
    auto skip = [](char32_t c) { return text::is_space(c) || text::is_separator(c); };
    while (t.start < t.end && skip(line[t.start])) ++t.start;
    while (t.end > t.start && skip(line[t.end - 1])) --t.end;
    return t;
  }

  bool holds_other_keyword(const Span& s, std::size_t except) const {
    for (std::size_t k = 0; k < keywords_.size(); ++k)
      if (k != except && !consumed_[k] && fuzzy_match_keyword(view(s), keywords_[k])) return true;
    return false;
  }

  void push_key(std::size_t k, const Span& span) {
    consumed_[k] = true;
    out_.keyword_spans.push_back(span);
    out_.position_list.push_back({PendingItem::Kind::KeyAwaitingValue, in_.keyword_list[k], sub_box(span), span});
  }

  // A remainder that may hold keywords of its own; otherwise a value fragment.
  void process_fragment(const Span& s) {
    const Span t = trimmed(s);
    if (t.start == t.end || process(t)) return;
    out_.value_spans.push_back(t);
    out_.position_list.push_back({PendingItem::Kind::ValueFragment, text::encode(view(t)), sub_box(t), t});
  }

  // Returns false when no unconsumed keyword matches inside `seg`.
  bool process(const Span& seg) {
    for (std::size_t k = 0; k < keywords_.size(); ++k) {
      if (consumed_[k]) continue;
      const auto m = fuzzy_match_keyword(view(seg), keywords_[k]);
      if (!m) continue;
      const Span key{seg.region, seg.start + m->start, seg.start + m->end};
      const Span left{seg.region, seg.start, key.start};
      const Span right{seg.region, key.end, seg.end};
      const Span left_t = trimmed(left), right_t = trimmed(right);
      if (left_t.start < left_t.end) {
        process_fragment(left);
        process({seg.region, key.start, seg.end});
      } else if (right_t.start < right_t.end) {
        if (holds_other_keyword(right, k)) {
          push_key(k, key);
          process_fragment(right);
        } else {
          consumed_[k] = true;
          out_.keyword_spans.push_back(key);
          out_.value_spans.push_back(right_t);
          out_.result_map[in_.keyword_list[k]] = {text::encode(view(right_t)), sub_box(right_t)};
        }
      } else {
        push_key(k, key);
      }
      return true;
    }
    return false;
  }

  const StructureInput& in_;
  StructureResult& out_;
  std::vector<std::u32string> keywords_;
  std::vector<std::u32string> lines_;
  std::vector<bool> consumed_;
};

struct Cost {
  int tier = 0;
  double gap = 0.0;
  double distance = 0.0;

  Cost operator+(const Cost& o) const { return {tier + o.tier, gap + o.gap, distance + o.distance}; }
  bool operator<(const Cost& o) const {
    if (tier != o.tier) return tier < o.tier;
    if (gap != o.gap) return gap < o.gap;
    return distance < o.distance;
  }
};

constexpr Cost kUnpaired{3, 0.0, 0.0};
constexpr std::size_t kNodeBudget = 2'000'000;

class AssignmentSearch {
 public:
  AssignmentSearch(std::vector<std::vector<std::pair<std::size_t, Cost>>> options, std::size_t n_candidates)
      : options_(std::move(options)), used_(n_candidates, false) {
    const std::size_t k = options_.size();
    remaining_min_tier_.assign(k + 1, 0);
    for (std::size_t i = k; i-- > 0;) {
      int best = kUnpaired.tier;
      for (const auto& [c, cost] : options_[i]) best = std::min(best, cost.tier);
      remaining_min_tier_[i] = remaining_min_tier_[i + 1] + best;
    }
    current_.assign(k, npos);
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  bool run() {
    dfs(0, Cost{});
    return nodes_ <= kNodeBudget;
  }

  const std::vector<std::size_t>& best() const { return best_; }

 private:
  void dfs(std::size_t i, Cost partial) {
    if (++nodes_ > kNodeBudget) return;
    if (have_best_ && partial.tier + remaining_min_tier_[i] > best_cost_.tier) return;
    if (i == options_.size()) {
      if (!have_best_ || partial < best_cost_) {
        have_best_ = true;
        best_cost_ = partial;
        best_ = current_;
      }
      return;
    }
    for (const auto& [c, cost] : options_[i]) {
      if (used_[c]) continue;
      used_[c] = true;
      current_[i] = c;
      dfs(i + 1, partial + cost);
      used_[c] = false;
    }
    current_[i] = npos;
    dfs(i + 1, partial + kUnpaired);
  }

  std::vector<std::vector<std::pair<std::size_t, Cost>>> options_;
  std::vector<bool> used_;
  std::vector<int> remaining_min_tier_;
  std::vector<std::size_t> current_, best_;
  Cost best_cost_;
  bool have_best_ = false;
  std::size_t nodes_ = 0;
};

}  // namespace

StructureResult scan_keywords(const StructureInput& in) {
  StructureResult out;
  if (in.ticket_type != TicketType::III) return out;
  Scanner(in, out).run();
  return out;
}

Resolution resolve_positions(std::span<const PendingItem> items, std::span<const Candidate> candidates) {
  std::vector<std::size_t> keys;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].kind == PendingItem::Kind::KeyAwaitingValue) keys.push_back(i);
  std::stable_sort(keys.begin(), keys.end(),
                   [&](std::size_t a, std::size_t b) { return reading_order_less(items[a].bbox, items[b].bbox); });
  std::vector<std::size_t> cands(candidates.size());
  std::iota(cands.begin(), cands.end(), std::size_t{0});
  std::stable_sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
    return reading_order_less(candidates[a].bbox, candidates[b].bbox);
  });

  std::vector<std::vector<std::pair<std::size_t, Cost>>> options(keys.size());
  for (std::size_t k = 0; k < keys.size(); ++k)
    for (std::size_t c : cands)
      if (auto s = score_pair(items[keys[k]].bbox, candidates[c].bbox))
        options[k].push_back({c, Cost{s->tier, s->gap, s->distance}});

  Resolution res;
  AssignmentSearch search(options, candidates.size());
  std::vector<std::size_t> choice;
  if (search.run()) {
    choice = search.best();
  } else {
    // Greedy in reading order, best-scored free candidate per key.
    res.approximate = true;
    std::vector<bool> used(candidates.size(), false);
    choice.assign(keys.size(), AssignmentSearch::npos);
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const std::pair<std::size_t, Cost>* pick = nullptr;
      for (const auto& opt : options[k])
        if (!used[opt.first] && (!pick || opt.second < pick->second)) pick = &opt;
      if (pick) {
        used[pick->first] = true;
        choice[k] = pick->first;
      }
    }
  }
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const PendingItem& key = items[keys[k]];
    if (choice[k] == AssignmentSearch::npos) {
      res.unresolved.push_back(key.text);
    } else {
      const Candidate& c = candidates[choice[k]];
      res.pairs.push_back({key.text, c.text, c.bbox, choice[k]});
    }
  }
  return res;
}

StructureResult structure_fields(const StructureInput& in) {
  StructureResult scan = scan_keywords(in);
  if (scan.position_list.empty()) return scan;

  std::vector<PendingItem> keys;
  std::vector<Candidate> candidates;
  std::vector<std::size_t> fragment_of;  // candidate index -> position_list index, npos for lines
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < scan.position_list.size(); ++i) {
    const PendingItem& item = scan.position_list[i];
    if (item.kind == PendingItem::Kind::KeyAwaitingValue) {
      keys.push_back(item);
    } else {
      candidates.push_back({item.text, item.bbox});
      fragment_of.push_back(i);
    }
  }
  for (std::size_t line : scan.unmatched_lines) {
    const TextRegion& r = in.input_list[line];
    candidates.push_back({text::encode(text::trim_separators(text::decode(r.text))), r.bbox});
    fragment_of.push_back(npos);
  }

  const Resolution res = resolve_positions(keys, candidates);
  std::set<std::size_t> claimed_items;
  for (const ResolvedPair& p : res.pairs) {
    scan.result_map[p.keyword] = {p.value, p.bbox};
    if (fragment_of[p.candidate] != npos) claimed_items.insert(fragment_of[p.candidate]);
  }
  scan.unresolved = res.unresolved;
  std::vector<PendingItem> remaining;
  for (std::size_t i = 0; i < scan.position_list.size(); ++i) {
    const PendingItem& item = scan.position_list[i];
    if (item.kind == PendingItem::Kind::ValueFragment && !claimed_items.count(i)) remaining.push_back(item);
  }
  scan.position_list = std::move(remaining);
  return scan;
}

}  // namespace ftrs
