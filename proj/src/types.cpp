#include "ftrs/types.hpp"

#include <cmath>

#include "ftrs/error.hpp"

namespace ftrs {

std::string to_string(TicketType t) {
  switch (t) {
    case TicketType::I: return "I";
    case TicketType::II: return "II";
    case TicketType::III: return "III";
  }
  return "?";
}

std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::KeywordField: return "keyword-field";
    case RegionKind::FreeText: return "free-text";
    case RegionKind::ValueFragment: return "value-fragment";
  }
  return "?";
}

std::string to_string(AuditState s) {
  switch (s) {
    case AuditState::None: return "none";
    case AuditState::Pending: return "pending";
    case AuditState::Confirmed: return "confirmed";
    case AuditState::Overturned: return "overturned";
  }
  return "?";
}

TicketType parse_ticket_type(const std::string& s) {
  if (s == "I") return TicketType::I;
  if (s == "II") return TicketType::II;
  if (s == "III") return TicketType::III;
  throw Error(ErrorCode::SchemaViolation, "ticket type must be I, II or III, got '" + s + "'");
}

RegionKind parse_region_kind(const std::string& s) {
  if (s == "keyword-field") return RegionKind::KeywordField;
  if (s == "free-text") return RegionKind::FreeText;
  if (s == "value-fragment") return RegionKind::ValueFragment;
  throw Error(ErrorCode::SchemaViolation, "unknown region kind '" + s + "'");
}

AuditState parse_audit_state(const std::string& s) {
  if (s == "none") return AuditState::None;
  if (s == "pending") return AuditState::Pending;
  if (s == "confirmed") return AuditState::Confirmed;
  if (s == "overturned") return AuditState::Overturned;
  throw Error(ErrorCode::SchemaViolation, "unknown audit state '" + s + "'");
}

std::size_t EdgeRaster::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

std::vector<std::pair<int, int>> EdgeRaster::pixels() const {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (test(x, y)) out.emplace_back(x, y);
  return out;
}

json number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

json box_to_json(const Box& b) { return json::array({number(b.x), number(b.y), number(b.w), number(b.h)}); }

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::SchemaViolation, "bbox must be [x, y, w, h]");
  for (const auto& v : j)
    if (!v.is_number()) throw Error(ErrorCode::SchemaViolation, "bbox entries must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void to_json(json& j, const TextRegion& r) {
  j = json{{"bbox", box_to_json(r.bbox)}, {"text", r.text}, {"conf", number(r.confidence)}, {"kind", to_string(r.kind)}};
  if (!r.field.empty()) j["field"] = r.field;
  if (r.anchor) j["anchor"] = true;
}

void from_json(const json& j, TextRegion& r) {
  r.bbox = box_from_json(j.at("bbox"));
  r.text = j.value("text", std::string{});
  r.confidence = j.value("conf", 1.0);
  r.kind = parse_region_kind(j.value("kind", std::string{"free-text"}));
  r.field = j.value("field", std::string{});
  r.anchor = j.value("anchor", false);
}

void to_json(json& j, const CategoryInfo& c) {
  j = json{{"type", to_string(c.type)}, {"title_keyword", c.title_keyword}, {"field_keywords", c.field_keywords}};
  if (!c.name_field.empty()) j["name_field"] = c.name_field;
}

void from_json(const json& j, CategoryInfo& c) {
  c.type = parse_ticket_type(j.at("type").get<std::string>());
  c.title_keyword = j.value("title_keyword", std::string{});
  c.field_keywords = j.value("field_keywords", std::vector<std::string>{});
  c.name_field = j.value("name_field", std::string{});
}

void to_json(json& j, const NoiseModel& n) {
  j = json{{"p_sub", n.p_sub}, {"p_del", n.p_del}, {"sigma_jitter_px", n.sigma_jitter_px}, {"seed", n.seed}};
}

void from_json(const json& j, NoiseModel& n) {
  n.p_sub = j.value("p_sub", 0.0);
  n.p_del = j.value("p_del", 0.0);
  n.sigma_jitter_px = j.value("sigma_jitter_px", 0.0);
  n.seed = j.value("seed", std::uint64_t{0});
}

void to_json(json& j, const TicketRecord& r) {
  json boxes = json::object();
  for (const auto& [k, b] : r.field_boxes) boxes[k] = box_to_json(b);
  json conf = json::object();
  for (const auto& [k, v] : r.stage_confidences) conf[k] = number(v);
  j = json{{"id", r.id},
           {"width", r.width_px},
           {"height", r.height_px},
           {"rotation_class", r.rotation_class},
           {"category", r.category},
           {"type", r.ticket_type ? json(to_string(*r.ticket_type)) : json(nullptr)},
           {"regions", r.regions},
           {"fields", r.fields},
           {"field_boxes", boxes},
           {"entry", r.entry_subject ? json(*r.entry_subject) : json(nullptr)},
           {"conf", conf},
           {"level", r.info_level},
           {"audit_state", to_string(r.audit_state)},
           {"flags", r.flags},
           {"keyword_check", r.keyword_check},
           {"source_digest", r.source_digest}};
}

void from_json(const json& j, TicketRecord& r) {
  r.id = j.at("id").get<std::string>();
  r.width_px = j.value("width", 0);
  r.height_px = j.value("height", 0);
  r.rotation_class = j.value("rotation_class", 0);
  r.category = j.value("category", std::string{});
  r.ticket_type.reset();
  if (j.contains("type") && !j["type"].is_null()) r.ticket_type = parse_ticket_type(j["type"].get<std::string>());
  r.regions = j.value("regions", std::vector<TextRegion>{});
  r.fields = j.value("fields", std::map<std::string, std::string>{});
  r.field_boxes.clear();
  if (j.contains("field_boxes"))
    for (const auto& [k, v] : j["field_boxes"].items()) r.field_boxes[k] = box_from_json(v);
  r.entry_subject.reset();
  if (j.contains("entry") && !j["entry"].is_null()) r.entry_subject = j["entry"].get<std::string>();
  r.stage_confidences = j.value("conf", std::map<std::string, double>{});
  r.info_level = j.value("level", 4);
  r.audit_state = parse_audit_state(j.value("audit_state", std::string{"none"}));
  r.flags = j.value("flags", std::set<std::string>{});
  r.keyword_check = j.value("keyword_check", std::string{});
  r.source_digest = j.value("source_digest", std::string{});
}

}  // namespace ftrs
