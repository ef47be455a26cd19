#pragma once

#include <set>
#include <span>
#include <string>

#include "ftrs/types.hpp"

namespace ftrs {

struct CategoryPrediction {
  std::string category;
  double confidence = 0.0;
};

class TicketClassifier {
 public:
  virtual ~TicketClassifier() = default;
  virtual CategoryPrediction predict(const RawTicketImage& ticket) const = 0;
  virtual std::set<std::string> known_categories() const = 0;
};

/// Reads the planted category and confidence from fixture ground truth.
/// With an empty label set it accepts whatever label the fixture carries.
class FixtureTicketClassifier final : public TicketClassifier {
 public:
  FixtureTicketClassifier() = default;
  explicit FixtureTicketClassifier(std::set<std::string> labels) : labels_(std::move(labels)) {}
  CategoryPrediction predict(const RawTicketImage& ticket) const override;
  std::set<std::string> known_categories() const override { return labels_; }

 private:
  std::set<std::string> labels_;
};

enum class Gate { Accepted, NeedsAudit };

struct ClassificationOutcome {
  Gate gate = Gate::NeedsAudit;
  CategoryPrediction prediction;
  bool unfamiliar = false;  // label missing from the registry
};

ClassificationOutcome classify_ticket(const RawTicketImage& ticket, const TicketClassifier& classifier,
                                      const PipelineConfig& cfg);

enum class KeywordCheck { Consistent, Mismatch, Inconclusive };
std::string to_string(KeywordCheck c);

KeywordCheck cross_validate_keywords(const std::string& category, std::span<const TextRegion> regions,
                                     const PipelineConfig& cfg);

}  // namespace ftrs
