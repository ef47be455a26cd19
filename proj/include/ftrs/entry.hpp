#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "ftrs/types.hpp"

namespace ftrs {

inline constexpr std::string_view kOtherSubject = "others";

struct EntryDecision {
  std::string subject;
  double confidence = 0.0;
  bool needs_audit = false;
};

class EntryClassifier {
 public:
  virtual ~EntryClassifier() = default;
  virtual std::pair<std::string, double> predict(const std::string& text) const = 0;
};

/// Fields in the configured order, then the remaining fields by name, then
/// the category, joined with " | ".
std::string entry_text(const std::map<std::string, std::string>& fields, const std::string& category,
                       const PipelineConfig& cfg);

/// Rule baseline: the first rule whose pattern occurs in the entry text.
EntryDecision classify_entry(const std::map<std::string, std::string>& fields, const std::string& category,
                             std::span<const EntryRule> rules, const PipelineConfig& cfg);

EntryDecision classify_entry(const std::map<std::string, std::string>& fields, const std::string& category,
                             const EntryClassifier& classifier, const PipelineConfig& cfg);

}  // namespace ftrs
