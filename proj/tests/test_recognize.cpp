#include <random>

#include "doctest.h"
#include "ftrs/error.hpp"
#include "ftrs/recognize.hpp"
#include "ftrs/text.hpp"
#include "support.hpp"

using namespace ftrs;

namespace {

FieldResult type1(const RawTicketImage& img, const PipelineConfig& cfg) {
  const FixtureRecognizer rec(cfg.registry, cfg.noise);
  return recognize_type1(img, img.ground_truth->category, rec, cfg);
}

FieldResult type2(const RawTicketImage& img, const PipelineConfig& cfg) {
  const FixtureRecognizer rec(cfg.registry, cfg.noise);
  return recognize_type2(img, img.ground_truth->category, rec, rec, rec, rec, cfg);
}

std::vector<TextRegion> type3(const RawTicketImage& img, const NoiseModel& noise = {}) {
  const FixtureRecognizer rec(default_registry(), noise);
  return recognize_type3(img, rec, rec, rec);
}

class ThrowingDetector final : public KeywordFieldDetector {
 public:
  std::vector<FieldDetection> detect(const RawTicketImage&, const std::string&) const override {
    throw std::runtime_error("model crashed");
  }
};

}  // namespace

TEST_CASE("field count follows the layout table") {
  const PipelineConfig cfg = default_config();
  for (auto [category, n] : {std::pair{"VAT ticket", 7}, {"toll ticket", 5}, {"quota ticket", 1}, {"taxi ticket", 2}})
    for (int i = 0; i < 10; ++i) {
      const auto img = test::make_fixture(category, i);
      const auto r = type1(img, cfg);
      CAPTURE(category);
      CHECK(r.fields.size() == std::size_t(n));
      CHECK(r.fields == img.ground_truth->fields);
      CHECK(r.flagged.empty());
    }
  const auto quota = type1(test::make_fixture("quota ticket"), cfg);
  CHECK(quota.fields.count("Amount") == 1);
}

TEST_CASE("type I low-confidence field is flagged") {
  const PipelineConfig cfg = default_config();
  auto img = test::make_fixture("toll ticket");
  for (auto& r : img.ground_truth->regions)
    if (r.field == "Fee") r.confidence = 0.90;
  const auto out = type1(img, cfg);
  CHECK(out.flagged == std::set<std::string>{"Fee"});
  CHECK(out.min_confidence() == 0.90);
  CHECK(out.fields.size() == 5);
}

TEST_CASE("type II splits the name field off to the segment path") {
  const PipelineConfig cfg = default_config();
  for (int i = 0; i < 20; ++i) {
    const auto img = test::make_fixture("train ticket", i);
    const auto out = type2(img, cfg);
    CHECK(out.fields.size() == 3);
    CHECK(out.fields == img.ground_truth->fields);
    CHECK_FALSE(out.missing_name_region);
    CHECK(out.flagged.empty());
  }

  // The name value comes from the character path: corrupting only what the
  // character classifier sees shows up in the name and nowhere else.
  class Upper final : public CharClassifier {
   public:
    CharPrediction recognize(const RawTicketImage&, const Box&) const override { return {"#", 0.5}; }
  };
  const auto img = test::make_fixture("train ticket", 4);
  const FixtureRecognizer rec(cfg.registry, {});
  const auto out = recognize_type2(img, "train ticket", rec, rec, rec, Upper(), cfg);
  const std::string truth = img.ground_truth->fields.at("Name");
  CHECK(out.fields.at("Name") == std::string(text::length(truth), '#'));
  CHECK(out.flagged == std::set<std::string>{"Name"});
  for (const auto& [k, v] : out.fields)
    if (k != "Name") CHECK(v == img.ground_truth->fields.at(k));
}

TEST_CASE("type II without a name region") {
  const PipelineConfig cfg = default_config();
  auto img = test::make_fixture("train ticket", 2);
  std::erase_if(img.ground_truth->regions, [](const TextRegion& r) { return r.field == "Name"; });
  const auto out = type2(img, cfg);
  CHECK(out.missing_name_region);
  CHECK(out.fields.size() == 2);
  CHECK(out.fields.count("Name") == 0);
  CHECK(out.flagged.count("Name") == 1);
}

TEST_CASE("type III yields one region per line in ground-truth order") {
  for (int i = 0; i < 20; ++i) {
    const auto img = test::make_fixture("bank receipt", i);
    const auto regions = type3(img);
    const auto& gt = img.ground_truth->regions;
    REQUIRE(regions.size() == 39);
    for (std::size_t k = 0; k < gt.size(); ++k) {
      CHECK(regions[k].text == gt[k].text);
      CHECK(regions[k].bbox == gt[k].bbox);
      CHECK(regions[k].confidence == 1.0);
    }
  }
}

TEST_CASE("type III region confidence is the minimum character confidence") {
  class Chars final : public CharClassifier {
   public:
    CharPrediction recognize(const RawTicketImage&, const Box& b) const override {
      return {"x", b.x < 10 ? 0.4 : 0.9};
    }
  };
  class Seg final : public CharSegmenter {
   public:
    std::vector<Box> segment(const RawTicketImage&, const Box& l) const override {
      return {{l.x, l.y, 5, l.h}, {l.x + 5, l.y, 5, l.h}, {l.x + 10, l.y, 5, l.h}};
    }
  };
  class Lines final : public TextLineDetector {
   public:
    std::vector<Box> detect(const RawTicketImage&, const std::optional<Box>&) const override {
      return {{0, 0, 15, 10}, {20, 0, 15, 10}};
    }
  };
  const auto out = recognize_type3(RawTicketImage{}, Lines(), Seg(), Chars());
  REQUIRE(out.size() == 2);
  CHECK(out[0].text == "xxx");
  CHECK(out[0].confidence == 0.4);
  CHECK(out[1].confidence == 0.9);
}

TEST_CASE("backend exceptions surface as BackendFailure") {
  const PipelineConfig cfg = default_config();
  try {
    recognize_type1(test::make_fixture("taxi ticket"), "taxi ticket", ThrowingDetector(), cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendFailure);
  }
  const FixtureRecognizer rec(cfg.registry, {});
  RawTicketImage bare;
  bare.width_px = bare.height_px = 10;
  try {
    recognize_type3(bare, rec, rec, rec);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendFailure);
  }
}

TEST_CASE("identity noise leaves regions untouched") {
  const auto img = test::make_fixture("bank receipt", 1);
  const auto& gt = img.ground_truth->regions;
  for (std::uint64_t seed : {0ull, 1ull, 7ull, 0xdeadbeefull}) {
    const NoiseModel m{0, 0, 0, seed};
    CHECK(apply_noise(m, gt, img.width_px, img.height_px) == gt);
    CHECK(type3(img, m).size() == gt.size());
  }
}

TEST_CASE("noise is deterministic per seed") {
  const auto img = test::make_fixture("bank receipt", 5);
  const auto& gt = img.ground_truth->regions;
  const NoiseModel m{0.02, 0.0, 0.0, 7};
  const auto a = apply_noise(m, gt, img.width_px, img.height_px);
  const auto b = apply_noise(m, gt, img.width_px, img.height_px);
  CHECK(a == b);
  json ja = a, jb = b;
  CHECK(ja.dump() == jb.dump());
  CHECK(type3(img, m) == type3(img, m));

  const NoiseModel heavy{0.5, 0.2, 3.0, 1};
  const NoiseModel other{0.5, 0.2, 3.0, 2};
  CHECK(apply_noise(heavy, gt, img.width_px, img.height_px) != apply_noise(other, gt, img.width_px, img.height_px));
}

TEST_CASE("full deletion empties texts and keeps boxes") {
  const auto img = test::make_fixture("bank receipt", 2);
  const auto& gt = img.ground_truth->regions;
  const auto out = apply_noise({0.3, 1.0, 0.0, 9}, gt, img.width_px, img.height_px);
  REQUIRE(out.size() == gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    CHECK(out[i].text.empty());
    CHECK(out[i].bbox == gt[i].bbox);
    const double expected = std::max(0.0, 1.0 - kPerturbationPenalty * text::length(gt[i].text));
    CHECK(out[i].confidence == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("full substitution swaps exactly the confusable characters") {
  const TextRegion r{{0, 0, 50, 10}, "O1l0ab王z", 1.0, RegionKind::FreeText, "", false};
  const auto out = perturb_region({1.0, 0.0, 0.0, 3}, r, 0, 100, 100);
  CHECK(out.text == "0l1Oab玉z");
  CHECK(out.confidence == doctest::Approx(1.0 - 5 * kPerturbationPenalty));
  for (const auto& [a, b] : confusable_pairs()) CHECK(a != b);
}

TEST_CASE("region confidence never negative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  const auto img = test::make_fixture("bank receipt", 3);
  for (int t = 0; t < 200; ++t) {
    const NoiseModel m{u(rng), u(rng), 10 * u(rng), rng()};
    for (const auto& r : apply_noise(m, img.ground_truth->regions, img.width_px, img.height_px)) {
      CHECK(r.confidence >= 0.0);
      CHECK(r.confidence <= 1.0);
      CHECK(r.bbox.x >= 0);
      CHECK(r.bbox.y >= 0);
      CHECK(r.bbox.right() <= img.width_px);
      CHECK(r.bbox.bottom() <= img.height_px);
      CHECK(r.bbox.w > 0);
      CHECK(r.bbox.h > 0);
    }
  }
}

TEST_CASE("jitter stays within the half-width") {
  const Box b{100, 100, 50, 20};
  for (std::size_t i = 0; i < 100; ++i) {
    const Box j = jitter_box({0, 0, 2.0, 42}, b, i, 1000, 1000);
    CHECK(std::abs(j.x - b.x) <= 2.0);
    CHECK(std::abs(j.y - b.y) <= 2.0);
    CHECK(std::abs(j.right() - b.right()) <= 2.0 + 1e-9);
    CHECK(std::abs(j.bottom() - b.bottom()) <= 2.0 + 1e-9);
  }
}

TEST_CASE("tickets draw independent noise") {
  const NoiseModel m{0.02, 0, 0, 7};
  CHECK(noise_for_ticket(m, "a").seed != noise_for_ticket(m, "b").seed);
  CHECK(noise_for_ticket(m, "a").seed == noise_for_ticket(m, "a").seed);
  CHECK(noise_for_ticket(m, "a").p_sub == 0.02);
}
