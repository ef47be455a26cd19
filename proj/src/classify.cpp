#include "ftrs/classify.hpp"

#include "ftrs/error.hpp"
#include "ftrs/structure.hpp"

namespace ftrs {

CategoryPrediction FixtureTicketClassifier::predict(const RawTicketImage& ticket) const {
  if (!ticket.ground_truth) throw Error(ErrorCode::BackendFailure, "fixture classifier needs ground truth");
  const GroundTruth& gt = *ticket.ground_truth;
  if (!labels_.empty() && !labels_.count(gt.category))
    throw Error(ErrorCode::BackendFailure, "fixture label '" + gt.category + "' outside the classifier label set");
  return {gt.category, gt.category_conf};
}

ClassificationOutcome classify_ticket(const RawTicketImage& ticket, const TicketClassifier& classifier,
                                      const PipelineConfig& cfg) {
  ClassificationOutcome out;
  out.prediction = classifier.predict(ticket);
  out.unfamiliar = !cfg.registry.count(out.prediction.category);
  out.gate = (!out.unfamiliar && out.prediction.confidence >= cfg.tau_class) ? Gate::Accepted : Gate::NeedsAudit;
  return out;
}

std::string to_string(KeywordCheck c) {
  switch (c) {
    case KeywordCheck::Consistent: return "consistent";
    case KeywordCheck::Mismatch: return "mismatch";
    case KeywordCheck::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

KeywordCheck cross_validate_keywords(const std::string& category, std::span<const TextRegion> regions,
                                     const PipelineConfig& cfg) {
  auto any_region_matches = [&](const std::string& title) {
    if (title.empty()) return false;
    for (const auto& r : regions)
      if (fuzzy_match_keyword(r.text, title)) return true;
    return false;
  };
  const auto own = cfg.registry.find(category);
  if (own != cfg.registry.end() && any_region_matches(own->second.title_keyword)) return KeywordCheck::Consistent;
  for (const auto& [name, info] : cfg.registry)
    if (name != category && any_region_matches(info.title_keyword)) return KeywordCheck::Mismatch;
  return KeywordCheck::Inconclusive;
}

}  // namespace ftrs
