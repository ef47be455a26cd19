#include <random>
#include <vector>

#include "doctest.h"
#include "ftrs/classify.hpp"
#include "ftrs/error.hpp"
#include "support.hpp"

using namespace ftrs;

namespace {

class FixedClassifier final : public TicketClassifier {
 public:
  FixedClassifier(std::string c, double conf) : p_{std::move(c), conf} {}
  CategoryPrediction predict(const RawTicketImage&) const override { return p_; }
  std::set<std::string> known_categories() const override { return {p_.category}; }

 private:
  CategoryPrediction p_;
};

TextRegion line(const std::string& text) { return {{0, 0, 100, 20}, text, 1.0, RegionKind::FreeText, "", false}; }

}  // namespace

TEST_CASE("confidence gate") {
  const PipelineConfig cfg = default_config();
  const RawTicketImage img;
  auto gate = [&](const std::string& c, double conf) { return classify_ticket(img, FixedClassifier(c, conf), cfg); };

  const auto hi = gate("VAT ticket", 0.99);
  CHECK(hi.gate == Gate::Accepted);
  CHECK(hi.prediction.category == "VAT ticket");
  CHECK(gate("VAT ticket", 0.98).gate == Gate::Accepted);

  const auto lo = gate("VAT ticket", 0.97);
  CHECK(lo.gate == Gate::NeedsAudit);
  CHECK(lo.prediction.confidence == 0.97);
  CHECK_FALSE(lo.unfamiliar);

  const auto odd = gate("lottery stub", 1.0);
  CHECK(odd.gate == Gate::NeedsAudit);
  CHECK(odd.unfamiliar);
}

TEST_CASE("gate monotonicity in tau_class") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RawTicketImage img;
  for (int t = 0; t < 2000; ++t) {
    PipelineConfig lo = default_config(), hi = lo;
    lo.tau_class = std::max(1e-6, u(rng));
    hi.tau_class = lo.tau_class + (1.0 - lo.tau_class) * u(rng);
    const FixedClassifier c(t % 7 ? "toll ticket" : "lottery stub", u(rng));
    if (classify_ticket(img, c, lo).gate == Gate::NeedsAudit) CHECK(classify_ticket(img, c, hi).gate == Gate::NeedsAudit);
  }
}

TEST_CASE("fixture classifier") {
  const auto img = test::make_fixture("taxi ticket", 2, 0, 0.5);
  const auto p = FixtureTicketClassifier().predict(img);
  CHECK(p.category == "taxi ticket");
  CHECK(p.confidence == 0.5);
  CHECK_THROWS_AS(FixtureTicketClassifier({"VAT ticket"}).predict(img), Error);
  CHECK_THROWS_AS(FixtureTicketClassifier().predict(RawTicketImage{}), Error);
  const FixtureTicketClassifier bounded({"taxi ticket", "VAT ticket"});
  CHECK(bounded.known_categories().count(bounded.predict(img).category));
}

TEST_CASE("keyword cross-validation") {
  const PipelineConfig cfg = default_config();
  const std::vector<TextRegion> vat = {line("Total 12.00"), line("VAT Invoice")};
  CHECK(cross_validate_keywords("VAT ticket", vat, cfg) == KeywordCheck::Consistent);

  const std::vector<TextRegion> train = {line("Railway Ticket"), line("Amount:3.00")};
  CHECK(cross_validate_keywords("quota ticket", train, cfg) == KeywordCheck::Mismatch);

  const std::vector<TextRegion> none = {line("hello"), line("Amount:3.00")};
  CHECK(cross_validate_keywords("quota ticket", none, cfg) == KeywordCheck::Inconclusive);
  CHECK(cross_validate_keywords("quota ticket", std::vector<TextRegion>{}, cfg) == KeywordCheck::Inconclusive);

  // Own title wins over a foreign one.
  const std::vector<TextRegion> both = {line("Railway Ticket"), line("Quota Voucher")};
  CHECK(cross_validate_keywords("quota ticket", both, cfg) == KeywordCheck::Consistent);

  // One recognition error in a 14-character title is tolerated.
  CHECK(cross_validate_keywords("train ticket", std::vector{line("Railway Tickat")}, cfg) == KeywordCheck::Consistent);

  CHECK(to_string(KeywordCheck::Mismatch) == "mismatch");
}

TEST_CASE("noise-free fixture regions cross-validate as their own category") {
  const PipelineConfig cfg = default_config();
  for (const auto& [category, info] : cfg.registry)
    for (int i = 0; i < 20; ++i) {
      const CategoryLayout layout = default_layout(category).value_or(CategoryLayout{category, 1, 1200, 800, 12});
      const auto img = generate_fixture(layout, cfg.registry, 3, i);
      CAPTURE(category);
      CHECK(cross_validate_keywords(category, img.ground_truth->regions, cfg) == KeywordCheck::Consistent);
    }
}
