#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftrs/types.hpp"

namespace ftrs {

/// Offsets are code-point positions in the original (un-normalized) line.
struct KeywordMatch {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t edit_distance = 0;

  friend bool operator==(const KeywordMatch&, const KeywordMatch&) = default;
};

/// Edit distance a keyword of `length` code points may carry and still match.
constexpr std::size_t keyword_tolerance(std::size_t length) { return length / 4; }

/// Removes ':' / U+FF1A and the whitespace touching them. When `index_map` is
/// given it receives, for every kept code point, its position in `line`.
std::u32string normalize_separators(std::u32string_view line, std::vector<std::size_t>* index_map = nullptr);
std::string normalize_separators(std::string_view line);

std::optional<KeywordMatch> fuzzy_match_keyword(std::u32string_view line, std::u32string_view keyword);
std::optional<KeywordMatch> fuzzy_match_keyword(std::string_view line, std::string_view keyword);

struct StructureInput {
  std::vector<TextRegion> input_list;
  std::vector<std::string> keyword_list;
  TicketType ticket_type = TicketType::III;
};

/// A code-point range of one input line.
struct Span {
  std::size_t region = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

struct PendingItem {
  enum class Kind { KeyAwaitingValue, ValueFragment };
  Kind kind = Kind::ValueFragment;
  std::string text;  // the keyword for keys, the fragment text otherwise
  Box bbox;
  Span span;
};

struct FieldValue {
  std::string value;
  Box bbox;
};

struct StructureResult {
  std::map<std::string, FieldValue> result_map;
  std::vector<PendingItem> position_list;
  std::vector<std::string> unresolved;
  // Input lines in which no keyword matched; they are value candidates.
  std::vector<std::size_t> unmatched_lines;
  // Attribution of every consumed character, for auditing the scan.
  std::vector<Span> keyword_spans;
  std::vector<Span> value_spans;
};

struct Candidate {
  std::string text;
  Box bbox;
};

struct ResolvedPair {
  std::string keyword;
  std::string value;
  Box bbox;
  std::size_t candidate = 0;
};

struct Resolution {
  std::vector<ResolvedPair> pairs;
  std::vector<std::string> unresolved;
  // True when the exact search hit its node budget and fell back to greedy.
  bool approximate = false;
};

/// Location score of a key/candidate pair: tier 1 (same row, to the right),
/// tier 2 (below, overlapping columns); nullopt when neither applies.
struct PairScore {
  int tier = 0;
  double gap = 0.0;
  double distance = 0.0;
};
std::optional<PairScore> score_pair(const Box& key, const Box& candidate);

/// Top-to-bottom, then left-to-right.
bool reading_order_less(const Box& a, const Box& b);

/// Keyword scan over the recognized lines. Keys whose value is not on their
/// own line stay in position_list for resolve_positions.
StructureResult scan_keywords(const StructureInput& in);

/// Pairs waiting keys with candidates, minimising the summed
/// (tier, gap, centre distance) over keys; unpaired keys count as tier 3.
Resolution resolve_positions(std::span<const PendingItem> keys, std::span<const Candidate> candidates);

/// Scan plus resolution. Resolved keys move into result_map, the rest into
/// unresolved; position_list keeps only value fragments nobody claimed.
StructureResult structure_fields(const StructureInput& in);

}  // namespace ftrs
