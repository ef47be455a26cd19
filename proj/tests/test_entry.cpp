#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "ftrs/config.hpp"
#include "ftrs/entry.hpp"
#include "ftrs/error.hpp"

using namespace ftrs;

namespace {

class FixedEntry final : public EntryClassifier {
 public:
  FixedEntry(std::string s, double c) : s_(std::move(s)), c_(c) {}
  std::pair<std::string, double> predict(const std::string&) const override { return {s_, c_}; }

 private:
  std::string s_;
  double c_;
};

using Fields = std::map<std::string, std::string>;

}  // namespace

TEST_CASE("rule baseline") {
  const PipelineConfig cfg = default_config();
  const auto hit = classify_entry(Fields{{"Goods", "printer paper A4"}}, "VAT ticket", cfg.entry_rules, cfg);
  CHECK(hit.subject == "office expenses");
  CHECK(hit.confidence == 1.0);
  CHECK_FALSE(hit.needs_audit);

  const auto miss = classify_entry(Fields{{"Goods", "quantum flux capacitor"}}, "lottery stub", cfg.entry_rules, cfg);
  CHECK(miss.subject == "others");
  CHECK(miss.confidence == 0.0);
  CHECK(miss.needs_audit);

  CHECK_THROWS_AS(classify_entry(Fields{}, "VAT ticket", cfg.entry_rules, cfg), Error);
}

TEST_CASE("pluggable classifier gates on tau_entry") {
  const PipelineConfig cfg = default_config();
  const Fields f{{"Goods", "x"}};
  const auto low = classify_entry(f, "VAT ticket", FixedEntry("travel expenses", 0.80), cfg);
  CHECK(low.needs_audit);
  CHECK(low.subject == "travel expenses");
  const auto ok = classify_entry(f, "VAT ticket", FixedEntry("travel expenses", 0.90), cfg);
  CHECK_FALSE(ok.needs_audit);
  const auto alien = classify_entry(f, "VAT ticket", FixedEntry("astrology", 1.0), cfg);
  CHECK(alien.subject == "others");
  CHECK(alien.needs_audit);
}

TEST_CASE("entry text follows the configured field order") {
  PipelineConfig cfg = default_config();
  const Fields f{{"Amount", "9.00"}, {"Zeta", "z"}, {"Goods", "pens"}, {"Alpha", "a"}};
  CHECK(entry_text(f, "VAT ticket", cfg) == "pens | 9.00 | a | z | VAT ticket");
  cfg.entry_field_order = {"Amount", "Amount"};
  CHECK(entry_text(f, "VAT ticket", cfg) == "9.00 | a | pens | z | VAT ticket");
}

TEST_CASE("category is part of the matched text") {
  const PipelineConfig cfg = default_config();
  const auto d = classify_entry(Fields{{"Amount", "12.00"}}, "taxi ticket", cfg.entry_rules, cfg);
  CHECK(d.subject == "travel expenses");
}

TEST_CASE("overlapping patterns resolve to the earlier rule") {
  const PipelineConfig cfg = default_config();
  const std::vector<EntryRule> rules = {{"paper", "printing expenses"}, {"printer paper", "office expenses"}};
  const Fields f{{"Goods", "printer paper"}};
  CHECK(classify_entry(f, "VAT ticket", rules, cfg).subject == "printing expenses");
  const std::vector<EntryRule> swapped = {rules[1], rules[0]};
  CHECK(classify_entry(f, "VAT ticket", swapped, cfg).subject == "office expenses");
}

TEST_CASE("permuting disjoint rules does not change outcomes") {
  const PipelineConfig cfg = default_config();
  // Patterns made of distinct tokens that never overlap within one detail.
  std::vector<EntryRule> rules;
  for (int i = 0; i < 20; ++i) rules.push_back({"<" + std::to_string(i) + ">", cfg.subjects[i % 34]});
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int pick = static_cast<int>(rng() % 25);
    const Fields f{{"Goods", "item <" + std::to_string(pick) + "> x"}};
    const auto base = classify_entry(f, "VAT ticket", rules, cfg);
    auto perm = rules;
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto other = classify_entry(f, "VAT ticket", perm, cfg);
    CHECK(base.subject == other.subject);
    CHECK(base.needs_audit == other.needs_audit);
    CHECK(base.needs_audit == (pick >= 20));
  }
}

TEST_CASE("closed codomain") {
  const PipelineConfig cfg = default_config();
  std::set<std::string> allowed(cfg.subjects.begin(), cfg.subjects.end());
  allowed.insert("others");
  std::mt19937_64 rng(8);
  const char* words[] = {"printer", "paper", "Salary", "hotel", "accommodation", "train ticket", "zzz", "Service fee"};
  for (int t = 0; t < 500; ++t) {
    std::string detail;
    for (int k = 0; k < 3; ++k) detail += std::string(words[rng() % 8]) + " ";
    const auto d = classify_entry(Fields{{"Goods", detail}}, "VAT ticket", cfg.entry_rules, cfg);
    CHECK(allowed.count(d.subject) == 1);
    const auto c = classify_entry(Fields{{"Goods", detail}}, "VAT ticket",
                                  FixedEntry(t % 2 ? cfg.subjects[t % 34] : detail, 0.95), cfg);
    CHECK(allowed.count(c.subject) == 1);
  }
}
