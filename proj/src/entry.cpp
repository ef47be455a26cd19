#include "ftrs/entry.hpp"

#include <algorithm>
#include <set>

#include "ftrs/error.hpp"

namespace ftrs {

std::string entry_text(const std::map<std::string, std::string>& fields, const std::string& category,
                       const PipelineConfig& cfg) {
  std::string out;
  std::set<std::string> used;
  auto add = [&](const std::string& s) {
    if (!out.empty()) out += " | ";
    out += s;
  };
  for (const auto& name : cfg.entry_field_order) {
    const auto it = fields.find(name);
    if (it == fields.end() || !used.insert(name).second) continue;
    add(it->second);
  }
  for (const auto& [name, value] : fields)
    if (!used.count(name)) add(value);
  add(category);
  return out;
}

EntryDecision classify_entry(const std::map<std::string, std::string>& fields, const std::string& category,
                             std::span<const EntryRule> rules, const PipelineConfig& cfg) {
  if (fields.empty()) throw Error(ErrorCode::InvalidArgument, "entry classification needs at least one field");
  const std::string detail = entry_text(fields, category, cfg);
  for (const auto& rule : rules)
    if (!rule.pattern.empty() && detail.find(rule.pattern) != std::string::npos) return {rule.subject, 1.0, false};
  return {std::string(kOtherSubject), 0.0, true};
}

EntryDecision classify_entry(const std::map<std::string, std::string>& fields, const std::string& category,
                             const EntryClassifier& classifier, const PipelineConfig& cfg) {
  if (fields.empty()) throw Error(ErrorCode::InvalidArgument, "entry classification needs at least one field");
  auto [subject, confidence] = classifier.predict(entry_text(fields, category, cfg));
  confidence = std::clamp(confidence, 0.0, 1.0);
  if (std::find(cfg.subjects.begin(), cfg.subjects.end(), subject) == cfg.subjects.end())
    return {std::string(kOtherSubject), 0.0, true};
  return {subject, confidence, confidence < cfg.tau_entry};
}

}  // namespace ftrs
