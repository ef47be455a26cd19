#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ftrs/geometry.hpp"
#include "json.hpp"

namespace ftrs {

using json = nlohmann::json;

enum class TicketType { I, II, III };
enum class RegionKind { KeywordField, FreeText, ValueFragment };
enum class AuditState { None, Pending, Confirmed, Overturned };

std::string to_string(TicketType t);
std::string to_string(RegionKind k);
std::string to_string(AuditState s);
TicketType parse_ticket_type(const std::string& s);
RegionKind parse_region_kind(const std::string& s);
AuditState parse_audit_state(const std::string& s);

struct TextRegion {
  Box bbox;
  std::string text;
  double confidence = 1.0;
  RegionKind kind = RegionKind::FreeText;
  // Field keyword for information regions, empty otherwise.
  std::string field;
  // Title region that pins the upright orientation.
  bool anchor = false;

  friend bool operator==(const TextRegion&, const TextRegion&) = default;
};

struct GroundTruth {
  std::string category;
  double category_conf = 1.0;
  int rotation_class = 0;
  std::vector<TextRegion> regions;
  std::map<std::string, std::string> fields;
};

struct TicketBox {
  Box box;
  double score = 1.0;
};

/// Row-major binary grid of line pixels.
class EdgeRaster {
 public:
  EdgeRaster() = default;
  EdgeRaster(int width, int height) : width_(width), height_(height), bits_(std::size_t(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return bits_.empty(); }

  bool test(int x, int y) const { return bits_[std::size_t(y) * width_ + x] != 0; }
  void set(int x, int y) {
    if (x >= 0 && y >= 0 && x < width_ && y < height_) bits_[std::size_t(y) * width_ + x] = 1;
  }
  std::size_t count() const;
  std::vector<std::pair<int, int>> pixels() const;

  friend bool operator==(const EdgeRaster&, const EdgeRaster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct RawTicketImage {
  std::string id;
  int width_px = 0;
  int height_px = 0;
  std::vector<TicketBox> ticket_boxes;
  std::optional<EdgeRaster> edges;
  std::optional<GroundTruth> ground_truth;
};

struct CategoryInfo {
  TicketType type = TicketType::I;
  std::string title_keyword;
  std::vector<std::string> field_keywords;
  // Type II only: the field recognized through the segment-and-classify path.
  std::string name_field;
};

using CategoryRegistry = std::map<std::string, CategoryInfo>;

struct NoiseModel {
  double p_sub = 0.0;
  double p_del = 0.0;
  double sigma_jitter_px = 0.0;
  std::uint64_t seed = 0;
};

struct EntryRule {
  std::string pattern;
  std::string subject;
};

struct PipelineConfig {
  double tau_class = 0.98;
  double tau_recog = 0.95;
  double tau_entry = 0.90;
  int n_class = 8;
  CategoryRegistry registry;
  std::vector<EntryRule> entry_rules;
  std::vector<std::string> subjects;
  // Field order used to build the accounting-entry text.
  std::vector<std::string> entry_field_order;
  int scarce_min_count = 50;
  NoiseModel noise;

  double theta_deg() const { return 360.0 / n_class; }
};

struct TicketRecord {
  std::string id;
  int width_px = 0;
  int height_px = 0;
  int rotation_class = 0;
  std::string category;
  std::optional<TicketType> ticket_type;
  std::vector<TextRegion> regions;
  std::map<std::string, std::string> fields;
  std::map<std::string, Box> field_boxes;
  std::optional<std::string> entry_subject;
  std::map<std::string, double> stage_confidences;
  int info_level = 4;
  AuditState audit_state = AuditState::None;
  std::set<std::string> flags;
  // consistent | mismatch | inconclusive, empty when the check did not run.
  std::string keyword_check;
  std::string source_digest;

  friend bool operator==(const TicketRecord&, const TicketRecord&) = default;
};

/// Integral values serialize as JSON integers, everything else as doubles.
json number(double v);

json box_to_json(const Box& b);
Box box_from_json(const json& j);

void to_json(json& j, const TextRegion& r);
void from_json(const json& j, TextRegion& r);
void to_json(json& j, const CategoryInfo& c);
void from_json(const json& j, CategoryInfo& c);
void to_json(json& j, const NoiseModel& n);
void from_json(const json& j, NoiseModel& n);
void to_json(json& j, const TicketRecord& r);
void from_json(const json& j, TicketRecord& r);

}  // namespace ftrs
