#include "ftrs/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include "ftrs/structure.hpp"
#include "ftrs/text.hpp"

namespace ftrs {

namespace {

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw SchemaError(path + "/" + key, "required");
  return obj.at(key);
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(path, "must be finite");
  return d;
}

int positive_int(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() <= 0 || v.get<long long>() > 1'000'000)
    throw SchemaError(path, "must be a positive integer");
  return v.get<int>();
}

double unit_interval(const json& v, const std::string& path) {
  const double d = number_at(v, path);
  if (d < 0.0 || d > 1.0) throw SchemaError(path, "must lie in [0, 1]");
  return d;
}

std::string string_at(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "must be a string");
  return v.get<std::string>();
}

Box box_at(const json& v, const std::string& path, std::size_t arity) {
  if (!v.is_array() || v.size() != arity) throw SchemaError(path, "must be an array of " + std::to_string(arity) + " numbers");
  Box b{number_at(v[0], path + "/0"), number_at(v[1], path + "/1"), number_at(v[2], path + "/2"),
        number_at(v[3], path + "/3")};
  if (b.w <= 0) throw SchemaError(path + "/2", "width must be positive");
  if (b.h <= 0) throw SchemaError(path + "/3", "height must be positive");
  return b;
}

TextRegion region_at(const json& v, const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "must be an object");
  TextRegion r;
  r.bbox = box_at(field(v, path, "bbox"), path + "/bbox", 4);
  r.text = v.contains("text") ? string_at(v["text"], path + "/text") : std::string{};
  r.confidence = v.contains("conf") ? unit_interval(v["conf"], path + "/conf") : 1.0;
  if (v.contains("kind")) {
    try {
      r.kind = parse_region_kind(string_at(v["kind"], path + "/kind"));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(path + "/kind", e.what());
    }
  }
  if (v.contains("field")) r.field = string_at(v["field"], path + "/field");
  if (v.contains("anchor")) {
    if (!v["anchor"].is_boolean()) throw SchemaError(path + "/anchor", "must be a boolean");
    r.anchor = v["anchor"].get<bool>();
  }
  return r;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

RawTicketImage fixture_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("", "fixture must be a JSON object");
  RawTicketImage img;
  img.width_px = positive_int(field(j, "", "width"), "/width");
  img.height_px = positive_int(field(j, "", "height"), "/height");
  if (j.contains("id")) img.id = string_at(j["id"], "/id");

  const json& boxes = field(j, "", "ticket_boxes");
  if (!boxes.is_array()) throw SchemaError("/ticket_boxes", "must be an array");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const std::string p = "/ticket_boxes/" + std::to_string(i);
    const Box b = box_at(boxes[i], p, 5);
    img.ticket_boxes.push_back({b, unit_interval(boxes[i][4], p + "/4")});
  }

  if (j.contains("edge_pixels")) {
    const json& px = j["edge_pixels"];
    if (!px.is_array()) throw SchemaError("/edge_pixels", "must be an array");
    EdgeRaster raster(img.width_px, img.height_px);
    for (std::size_t i = 0; i < px.size(); ++i) {
      const std::string p = "/edge_pixels/" + std::to_string(i);
      if (!px[i].is_array() || px[i].size() != 2 || !px[i][0].is_number_integer() || !px[i][1].is_number_integer())
        throw SchemaError(p, "must be [x, y] integers");
      const int x = px[i][0].get<int>(), y = px[i][1].get<int>();
      if (x < 0 || y < 0 || x >= img.width_px || y >= img.height_px) throw SchemaError(p, "outside the image");
      raster.set(x, y);
    }
    img.edges = std::move(raster);
  }

  if (j.contains("ground_truth") && !j["ground_truth"].is_null()) {
    const json& g = j["ground_truth"];
    if (!g.is_object()) throw SchemaError("/ground_truth", "must be an object");
    GroundTruth gt;
    gt.category = string_at(field(g, "/ground_truth", "category"), "/ground_truth/category");
    if (g.contains("category_conf")) gt.category_conf = unit_interval(g["category_conf"], "/ground_truth/category_conf");
    if (g.contains("rotation_class")) {
      if (!g["rotation_class"].is_number_integer() || g["rotation_class"].get<int>() < 0)
        throw SchemaError("/ground_truth/rotation_class", "must be a non-negative integer");
      gt.rotation_class = g["rotation_class"].get<int>();
    }
    if (g.contains("regions")) {
      if (!g["regions"].is_array()) throw SchemaError("/ground_truth/regions", "must be an array");
      for (std::size_t i = 0; i < g["regions"].size(); ++i)
        gt.regions.push_back(region_at(g["regions"][i], "/ground_truth/regions/" + std::to_string(i)));
    }
    if (g.contains("fields")) {
      if (!g["fields"].is_object()) throw SchemaError("/ground_truth/fields", "must be an object");
      for (const auto& [k, v] : g["fields"].items()) gt.fields[k] = string_at(v, "/ground_truth/fields/" + k);
    }
    img.ground_truth = std::move(gt);
  }
  if (img.id.empty()) img.id = "t" + fixture_digest(img);
  return img;
}

json fixture_to_json(const RawTicketImage& img) {
  json j;
  if (!img.id.empty()) j["id"] = img.id;
  j["width"] = img.width_px;
  j["height"] = img.height_px;
  json boxes = json::array();
  for (const auto& tb : img.ticket_boxes) {
    json b = box_to_json(tb.box);
    b.push_back(number(tb.score));
    boxes.push_back(std::move(b));
  }
  j["ticket_boxes"] = boxes;
  if (img.edges) {
    json px = json::array();
    for (auto [x, y] : img.edges->pixels()) px.push_back({x, y});
    j["edge_pixels"] = px;
  }
  if (img.ground_truth) {
    const GroundTruth& gt = *img.ground_truth;
    json g{{"category", gt.category}, {"regions", gt.regions}, {"fields", gt.fields}};
    if (gt.category_conf != 1.0) g["category_conf"] = number(gt.category_conf);
    if (gt.rotation_class != 0) g["rotation_class"] = gt.rotation_class;
    j["ground_truth"] = g;
  }
  return j;
}

RawTicketImage load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("not valid JSON: ") + e.what());
  }
  if (j.is_object() && !j.contains("id")) j["id"] = path.stem().string();
  return fixture_from_json(j);
}

std::string fixture_digest(const RawTicketImage& image) {
  RawTicketImage copy = image;
  copy.id.clear();
  return hex16(text::fnv1a(fixture_to_json(copy).dump()));
}

// --- generation ------------------------------------------------------------------

std::optional<CategoryLayout> default_layout(const std::string& category) {
  static const std::vector<CategoryLayout> layouts = {
      {"VAT ticket", 200, 2047, 1210, 75},   {"toll ticket", 200, 1057, 904, 18},
      {"quota ticket", 200, 1283, 894, 16},  {"train ticket", 200, 534, 1530, 17},
      {"taxi ticket", 200, 1047, 667, 52},   {"bank receipt", 200, 2420, 1733, 39},
  };
  for (const auto& l : layouts)
    if (l.category == category) return l;
  return std::nullopt;
}

FixtureSpec fixture_spec_from_json(const json& j, const CategoryRegistry& registry) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, "fixture spec: " + m); };
  if (!j.is_object() || !j.contains("categories") || !j["categories"].is_array()) bad("needs a categories array");
  FixtureSpec spec;
  spec.category_conf = j.value("category_conf", 1.0);
  spec.edges = j.value("edges", false);
  if (spec.category_conf < 0.0 || spec.category_conf > 1.0) bad("category_conf must lie in [0, 1]");
  std::set<std::string> seen;
  for (const json& c : j["categories"]) {
    if (!c.is_object() || !c.contains("category") || !c["category"].is_string()) bad("each entry needs a category");
    CategoryLayout l;
    l.category = c["category"].get<std::string>();
    if (!registry.count(l.category)) bad("unknown category '" + l.category + "'");
    if (!seen.insert(l.category).second) bad("duplicate category '" + l.category + "'");
    const auto def = default_layout(l.category);
    if (def) l = *def;
    if (!c.contains("count") || !c["count"].is_number_integer() || c["count"].get<int>() < 0)
      bad("count for '" + l.category + "' must be a non-negative integer");
    l.count = c["count"].get<int>();
    l.width = c.value("width", l.width);
    l.height = c.value("height", l.height);
    l.text_regions = c.value("text_regions", l.text_regions);
    const auto& info = registry.at(l.category);
    const int minimum = 1 + 2 * static_cast<int>(info.field_keywords.size());
    if (l.width < 200 || l.height < 200) bad("'" + l.category + "' needs width and height of at least 200");
    if (l.text_regions < minimum)
      bad("'" + l.category + "' needs at least " + std::to_string(minimum) + " text regions");
    spec.categories.push_back(l);
  }
  return spec;
}

json fixture_spec_to_json(const FixtureSpec& spec) {
  json cats = json::array();
  for (const auto& l : spec.categories)
    cats.push_back({{"category", l.category}, {"count", l.count}, {"width", l.width}, {"height", l.height},
                    {"text_regions", l.text_regions}});
  return json{{"categories", cats}, {"category_conf", number(spec.category_conf)}, {"edges", spec.edges}};
}

namespace {

const std::vector<std::string> kCompanies = {
    "北京华联商贸有限公司", "上海浦江科技有限公司", "广州南方物流有限公司", "深圳创新电子有限公司",
    "杭州西湖文化传媒有限公司", "成都天府餐饮管理有限公司", "武汉长江建材有限公司", "南京金陵医药有限公司"};
const std::vector<std::string> kPeople = {"张伟", "王芳", "李娜", "刘洋", "陈静", "杨磊", "赵敏", "黄勇", "周杰", "吴婷"};
const std::vector<std::string> kPlaces = {"徐州东站", "济南西站", "南京南站", "合肥站", "郑州北站", "天津西站"};
const std::vector<std::string> kGoods = {"printer paper A4",  "office chair",     "laptop computer",
                                         "hotel accommodation", "consulting service", "catering service",
                                         "express delivery",  "equipment repair", "software license"};
const std::vector<std::string> kPurposes = {"Payment for goods", "Service fee", "Salary", "Loan interest"};
const std::vector<std::string> kNotes = {"无", "加急", "按合同付款", "季度结算", "预付款"};
const std::vector<std::string> kBanks = {"中国银行北京分行", "中国银行上海分行", "中国银行广州分行"};
const std::vector<std::string> kCurrencies = {"CNY", "USD", "EUR"};
const std::vector<std::string> kFiller = {
    "国家税务总局监制", "发票专用章", "机打代码", "校验码", "开票人", "复核", "收款人", "备注栏", "第一联",
    "记账联", "密码区", "价税合计", "中国铁路", "仅供报销使用", "限乘当日当次车", "请妥善保管", "客户回单",
    "经办", "网点", "凭证种类", "打印时间", "联系电话", "地址", "税务登记号"};

class Draw {
 public:
  explicit Draw(std::mt19937_64& rng) : rng_(rng) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  const std::string& pick(const std::vector<std::string>& v) { return v[uniform(0, int(v.size()) - 1)]; }
  std::string digits(int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s.push_back(char('0' + uniform(0, 9)));
    return s;
  }
  std::string amount() { return std::to_string(uniform(10, 99999)) + "." + digits(2); }
  std::string date() {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", uniform(2018, 2021), uniform(1, 12), uniform(1, 28));
    return buf;
  }

 private:
  std::mt19937_64& rng_;
};

std::string field_value(const std::string& keyword, Draw& d) {
  if (keyword == "Code") return d.digits(12);
  if (keyword == "Number") return d.digits(8);
  if (keyword == "Date") return d.date();
  if (keyword == "Buyer" || keyword == "Seller" || keyword == "Payer" || keyword == "Beneficiary")
    return d.pick(kCompanies);
  if (keyword == "Goods") return d.pick(kGoods);
  if (keyword == "Total" || keyword == "Amount" || keyword == "Fee" || keyword == "Fare") return d.amount();
  if (keyword == "Station" || keyword == "Entrance" || keyword == "Exit") return d.pick(kPlaces);
  if (keyword == "Plate") return "京A" + d.digits(5);
  if (keyword == "Name") return d.pick(kPeople);
  if (keyword == "Train No") return std::string(1, "GDK"[d.uniform(0, 2)]) + std::to_string(d.uniform(1, 9999));
  if (keyword == "Flight") return std::string(d.uniform(0, 1) ? "CA" : "MU") + d.digits(4);
  if (keyword == "Serial No") return d.digits(16);
  if (keyword == "Account No") return d.digits(19);
  if (keyword == "Currency") return d.pick(kCurrencies);
  if (keyword == "Purpose") return d.pick(kPurposes);
  if (keyword == "Remarks" || keyword == "Postscript") return d.pick(kNotes);
  if (keyword == "Bank") return d.pick(kBanks);
  return d.digits(6);
}

std::string filler_text(Draw& d) {
  return d.uniform(0, 3) == 0 ? d.digits(d.uniform(6, 12)) : d.pick(kFiller);
}

struct Checker {
  const CategoryRegistry& registry;
  const CategoryInfo& info;

  bool clear_of_titles(const std::string& s) const {
    for (const auto& [name, c] : registry)
      if (fuzzy_match_keyword(s, c.title_keyword)) return false;
    return true;
  }
  // Only `own` may match, and only as the leading keyword of the line.
  bool keywords_ok(const std::string& s, const std::string& own) const {
    if (info.type != TicketType::III) return true;
    for (const auto& kw : info.field_keywords) {
      const auto m = fuzzy_match_keyword(s, kw);
      if (kw == own) {
        if (!m || m->start != 0 || m->end != text::length(kw) || m->edit_distance != 0) return false;
      } else if (m) {
        return false;
      }
    }
    return true;
  }
  bool ok(const std::string& s, const std::string& own = {}) const { return clear_of_titles(s) && keywords_ok(s, own); }
};

template <class Gen>
std::string draw_valid(Gen gen, const Checker& check, const std::string& own = {}) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::string s = gen();
    if (check.ok(s, own)) return s;
  }
  throw Error(ErrorCode::InvalidConfig, "fixture generator cannot find text clear of keywords");
}

struct Item {
  enum Kind { Filler, Pair, Inline, SplitRight } kind;
  std::string a, b;  // label/keyword and value, or the filler text
  std::string keyword;
};

std::uint64_t category_seed(std::uint64_t seed, const std::string& category, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(text::fnv1a(category)), static_cast<std::uint32_t>(index)};
  std::uint64_t out;
  seq.generate(reinterpret_cast<std::uint32_t*>(&out), reinterpret_cast<std::uint32_t*>(&out) + 2);
  return out;
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

EdgeRaster draw_line_edges(int width, int height, const std::vector<TextRegion>& regions) {
  EdgeRaster raster(width, height);
  for (const auto& r : regions) {
    const int y = static_cast<int>(std::lround(r.bbox.cy()));
    const int x0 = static_cast<int>(std::lround(r.bbox.x));
    const int x1 = static_cast<int>(std::lround(r.bbox.right()));
    for (int x = x0; x < x1; ++x) raster.set(x, y);
  }
  return raster;
}

RawTicketImage generate_fixture(const CategoryLayout& layout, const CategoryRegistry& registry, std::uint64_t seed,
                                int index, double category_conf, bool edges) {
  const CategoryInfo& info = registry.at(layout.category);
  std::mt19937_64 rng(category_seed(seed, layout.category, index));
  Draw d(rng);
  const Checker check{registry, info};
  const int W = layout.width, H = layout.height;
  const double h = std::clamp(std::round(H / 40.0), 16.0, 40.0);
  const double pitch = std::round(h * 1.5);
  const double margin = std::round(h);

  GroundTruth gt;
  gt.category = layout.category;
  gt.category_conf = category_conf;

  // Title across the top band.
  {
    const double cw = h * 0.8;
    const double tw = std::min<double>(W - 2 * margin, cw * text::length(info.title_keyword));
    gt.regions.push_back({{std::round((W - tw) / 2), margin, std::round(tw), h}, info.title_keyword, 1.0,
                          RegionKind::FreeText, "", true});
  }

  std::vector<Item> items;
  std::optional<std::pair<std::string, std::string>> below_pair;
  int used = 1;
  if (info.type == TicketType::III) {
    std::vector<std::string> kws = info.field_keywords;
    std::shuffle(kws.begin(), kws.end(), rng);
    static const char* seps[] = {":", "：", ": "};
    for (std::size_t i = 0; i < kws.size(); ++i) {
      const std::string& kw = kws[i];
      if (i < 2 && !check.ok(kw, kw)) throw Error(ErrorCode::InvalidConfig, "keyword '" + kw + "' collides with another");
      std::string value, line;
      for (int attempt = 0; attempt < 200 && line.empty(); ++attempt) {
        value = field_value(kw, d);
        const std::string candidate = i < 2 ? value : kw + seps[d.uniform(0, 2)] + value;
        if (check.ok(value) && (i < 2 || check.ok(candidate, kw))) line = candidate;
      }
      if (line.empty()) throw Error(ErrorCode::InvalidConfig, "no unambiguous value for '" + kw + "'");
      gt.fields[kw] = value;
      if (i == 0 && kws.size() >= 2) {
        below_pair = {kw, value};
        used += 2;
      } else if (i == 1) {
        items.push_back({Item::SplitRight, kw, value, kw});
        used += 2;
      } else {
        items.push_back({Item::Inline, line, value, kw});
        used += 1;
      }
    }
  } else {
    for (const auto& kw : info.field_keywords) {
      const std::string value = draw_valid([&] { return field_value(kw, d); }, check);
      gt.fields[kw] = value;
      items.push_back({Item::Pair, kw, value, kw});
      used += 2;
    }
  }
  const int fillers = std::max(0, layout.text_regions - used);
  for (int i = 0; i < fillers; ++i) items.push_back({Item::Filler, draw_valid([&] { return filler_text(d); }, check), "", ""});
  std::shuffle(items.begin(), items.end(), rng);

  // Slot grid under the title.
  const double y0 = margin + h + pitch;
  const int rows = std::max(1, static_cast<int>((H - y0 - margin) / pitch));
  int cols = 1;
  while (rows * cols < static_cast<int>(items.size()) + (below_pair ? cols + 1 : 0)) ++cols;
  const double colw = (W - 2 * margin) / cols;

  std::size_t max_chars = 1;
  for (const auto& it : items) max_chars = std::max(max_chars, text::length(it.a) + (it.kind == Item::Pair || it.kind == Item::SplitRight ? text::length(it.b) + 1 : 0));
  const double cw = std::min(h * 0.8, (colw - h) / static_cast<double>(max_chars));

  std::vector<std::vector<bool>> taken(rows, std::vector<bool>(cols, false));
  auto slot_box = [&](int r, int c, std::size_t chars, double offset_chars = 0) {
    return Box{std::round(margin + c * colw + offset_chars * cw), std::round(y0 + r * pitch),
               std::round(std::max<double>(1, chars) * cw), h};
  };
  if (below_pair) {
    const int r = d.uniform(0, std::max(0, rows - 2));
    for (int c = 0; c < cols; ++c) taken[r][c] = true;
    taken[std::min(r + 1, rows - 1)][0] = true;
    gt.regions.push_back({slot_box(r, 0, text::length(below_pair->first)), below_pair->first, 1.0,
                          RegionKind::FreeText, "", false});
    gt.regions.push_back({slot_box(r + 1, 0, text::length(below_pair->second)), below_pair->second, 1.0,
                          RegionKind::FreeText, "", false});
  }
  std::vector<std::pair<int, int>> free_slots;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (!taken[r][c]) free_slots.push_back({r, c});
  if (free_slots.size() < items.size())
    throw Error(ErrorCode::InvalidConfig, "layout for '" + layout.category + "' has too few slots");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto [r, c] = free_slots[i];
    const Item& it = items[i];
    switch (it.kind) {
      case Item::Filler:
      case Item::Inline:
        gt.regions.push_back({slot_box(r, c, text::length(it.a)), it.a, 1.0, RegionKind::FreeText, "", false});
        break;
      case Item::Pair:
        gt.regions.push_back({slot_box(r, c, text::length(it.a)), it.a, 1.0, RegionKind::FreeText, "", false});
        gt.regions.push_back({slot_box(r, c, text::length(it.b), text::length(it.a) + 1.0), it.b, 1.0,
                              RegionKind::KeywordField, it.keyword, false});
        break;
      case Item::SplitRight:
        gt.regions.push_back({slot_box(r, c, text::length(it.a)), it.a, 1.0, RegionKind::FreeText, "", false});
        gt.regions.push_back({slot_box(r, c, text::length(it.b), text::length(it.a) + 1.0), it.b, 1.0,
                              RegionKind::FreeText, "", false});
        break;
    }
  }

  RawTicketImage img;
  char name[32];
  std::snprintf(name, sizeof name, "_%04d", index + 1);
  img.id = slug(layout.category) + name;
  img.width_px = W;
  img.height_px = H;
  img.ticket_boxes.push_back({{0, 0, double(W), double(H)}, 1.0});
  if (edges) img.edges = draw_line_edges(W, H, gt.regions);
  img.ground_truth = std::move(gt);
  return img;
}

GeneratedCorpus generate_corpus(const FixtureSpec& spec, const CategoryRegistry& registry, std::uint64_t seed) {
  GeneratedCorpus out;
  json counts = json::object();
  json files = json::array();
  for (const auto& layout : spec.categories) {
    if (layout.count == 0) {
      out.warnings.push_back("category '" + layout.category + "' has count 0 and is omitted");
      continue;
    }
    counts[layout.category] = layout.count;
    for (int i = 0; i < layout.count; ++i) {
      RawTicketImage img = generate_fixture(layout, registry, seed, i, spec.category_conf, spec.edges);
      const std::string file = img.id + ".json";
      files.push_back(file);
      out.files.emplace_back(file, std::move(img));
    }
  }
  out.manifest = json{{"seed", seed}, {"total", out.files.size()}, {"categories", counts}, {"files", files}};
  return out;
}

void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [file, img] : corpus.files) {
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    out << fixture_to_json(img).dump() << '\n';
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + (dir / file).string());
  }
  std::ofstream m(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  m << corpus.manifest.dump(2) << '\n';
}

RawTicketImage rotation_fixture(std::uint64_t seed, int index) {
  std::mt19937_64 rng(category_seed(seed, "rotation", index));
  Draw d(rng);
  const int W = d.uniform(240, 360), H = d.uniform(160, 240);
  GroundTruth gt;
  gt.category = "rotation suite";
  const double h = 8, pitch = 16, margin = 12;
  const double tw = d.uniform(W / 3, W / 2);
  gt.regions.push_back({{std::round((W - tw) / 2), margin, tw, h}, "title", 1.0, RegionKind::FreeText, "", true});
  const int lines = static_cast<int>((H - margin - (margin + h + pitch)) / pitch);
  for (int i = 0; i < lines; ++i) {
    const double y = margin + h + pitch + i * pitch;
    const double x = margin + d.uniform(0, 20);
    const double w = d.uniform(W / 3, W - int(margin) * 2 - int(x - margin));
    gt.regions.push_back({{x, y, w, h}, "line", 1.0, RegionKind::FreeText, "", false});
  }
  RawTicketImage img;
  img.id = "rot_" + std::to_string(index);
  img.width_px = W;
  img.height_px = H;
  img.ticket_boxes.push_back({{0, 0, double(W), double(H)}, 1.0});
  img.edges = draw_line_edges(W, H, gt.regions);
  img.ground_truth = std::move(gt);
  return img;
}

}  // namespace ftrs
