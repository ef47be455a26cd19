#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ftrs/types.hpp"

namespace ftrs {

struct FieldDetection {
  std::string label;
  std::string text;
  Box bbox;
  double confidence = 0.0;
};

class KeywordFieldDetector {
 public:
  virtual ~KeywordFieldDetector() = default;
  virtual std::vector<FieldDetection> detect(const RawTicketImage& ticket, const std::string& category) const = 0;
};

class TextLineDetector {
 public:
  virtual ~TextLineDetector() = default;
  /// Line boxes, restricted to those centred inside `roi` when given.
  virtual std::vector<Box> detect(const RawTicketImage& ticket, const std::optional<Box>& roi) const = 0;
};

class CharSegmenter {
 public:
  virtual ~CharSegmenter() = default;
  virtual std::vector<Box> segment(const RawTicketImage& ticket, const Box& line) const = 0;
};

struct CharPrediction {
  std::string character;
  double confidence = 0.0;
};

class CharClassifier {
 public:
  virtual ~CharClassifier() = default;
  virtual CharPrediction recognize(const RawTicketImage& ticket, const Box& char_box) const = 0;
};

struct FieldResult {
  std::map<std::string, std::string> fields;
  std::map<std::string, Box> boxes;
  std::map<std::string, double> confidences;
  std::vector<TextRegion> regions;
  std::set<std::string> flagged;  // fields below tau_recog
  bool missing_name_region = false;

  /// Minimum field confidence; 1 when there are no fields.
  double min_confidence() const;
};

FieldResult recognize_type1(const RawTicketImage& ticket, const std::string& category,
                            const KeywordFieldDetector& detector, const PipelineConfig& cfg);

std::vector<TextRegion> recognize_type3(const RawTicketImage& ticket, const TextLineDetector& lines,
                                        const CharSegmenter& seg, const CharClassifier& chars,
                                        const std::optional<Box>& roi = std::nullopt);

FieldResult recognize_type2(const RawTicketImage& ticket, const std::string& category,
                            const KeywordFieldDetector& detector, const TextLineDetector& lines,
                            const CharSegmenter& seg, const CharClassifier& chars, const PipelineConfig& cfg);

/// Symmetric pairs of characters a recognizer plausibly confuses.
const std::vector<std::pair<char32_t, char32_t>>& confusable_pairs();

inline constexpr double kPerturbationPenalty = 0.05;

/// Perturbs region `index` of a region list. Text and box draws use separate
/// streams derived from (model.seed, index), so the box does not depend on
/// the text.
TextRegion perturb_region(const NoiseModel& model, const TextRegion& region, std::size_t index, int width,
                          int height);
Box jitter_box(const NoiseModel& model, const Box& box, std::size_t index, int width, int height);

std::vector<TextRegion> apply_noise(const NoiseModel& model, std::span<const TextRegion> regions, int width,
                                    int height);

/// The model re-seeded for one ticket, so tickets draw independent noise.
NoiseModel noise_for_ticket(const NoiseModel& model, const std::string& ticket_id);

/// Deterministic stand-in for every recognition backend: it reads the
/// fixture ground truth and replays it through the noise model.
class FixtureRecognizer final : public KeywordFieldDetector,
                                public TextLineDetector,
                                public CharSegmenter,
                                public CharClassifier {
 public:
  FixtureRecognizer(CategoryRegistry registry, NoiseModel noise)
      : registry_(std::move(registry)), noise_(noise) {}

  std::vector<FieldDetection> detect(const RawTicketImage& ticket, const std::string& category) const override;
  std::vector<Box> detect(const RawTicketImage& ticket, const std::optional<Box>& roi) const override;
  std::vector<Box> segment(const RawTicketImage& ticket, const Box& line) const override;
  CharPrediction recognize(const RawTicketImage& ticket, const Box& char_box) const override;

 private:
  const GroundTruth& truth(const RawTicketImage& ticket) const;
  std::vector<Box> observed_boxes(const RawTicketImage& ticket, const NoiseModel& model) const;

  CategoryRegistry registry_;
  NoiseModel noise_;
};

}  // namespace ftrs
