#include "ftrs/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ftrs/error.hpp"

namespace ftrs {

CategoryRegistry default_registry() {
  CategoryRegistry reg;
  reg["VAT ticket"] = {TicketType::I, "VAT Invoice", {"Code", "Number", "Date", "Buyer", "Seller", "Goods", "Total"}, {}};
  reg["toll ticket"] = {TicketType::I, "Expressway Receipt", {"Station", "Entrance", "Exit", "Plate", "Fee"}, {}};
  reg["quota ticket"] = {TicketType::I, "Quota Voucher", {"Amount"}, {}};
  reg["taxi ticket"] = {TicketType::I, "Taxi Fare Slip", {"Date", "Amount"}, {}};
  reg["train ticket"] = {TicketType::II, "Railway Ticket", {"Name", "Train No", "Fare"}, "Name"};
  reg["plane ticket"] = {TicketType::II, "Air Itinerary", {"Name", "Flight", "Fare"}, "Name"};
  reg["bank receipt"] = {TicketType::III,
                         "Remittance Advice",
                         {"Serial No", "Date", "Amount", "Currency", "Purpose", "Remarks", "Postscript", "Payer",
                          "Beneficiary", "Account No", "Bank"},
                         {}};
  return reg;
}

std::vector<std::string> default_subjects() {
  return {"office expenses",       "travel expenses",      "labor expenses",     "business entertainment",
          "vehicle expenses",      "communication expenses", "utilities",        "rent",
          "repair expenses",       "consulting fees",      "training expenses",  "conference expenses",
          "advertising expenses",  "postage and courier",  "printing expenses",  "insurance premiums",
          "bank charges",          "interest expenses",    "taxes and surcharges", "depreciation",
          "amortization",          "low-value consumables", "raw materials",     "inventory goods",
          "fixed assets",          "intangible assets",    "accounts payable",   "accounts receivable",
          "prepayments",           "employee welfare",     "social security",    "housing fund",
          "research and development", "miscellaneous expenses"};
}

std::vector<EntryRule> demo_entry_rules() {
  return {
      {"printer paper", "office expenses"},
      {"office chair", "office expenses"},
      {"laptop computer", "fixed assets"},
      {"hotel accommodation", "travel expenses"},
      {"air ticket service", "travel expenses"},
      {"consulting service", "consulting fees"},
      {"catering service", "business entertainment"},
      {"express delivery", "postage and courier"},
      {"equipment repair", "repair expenses"},
      {"software license", "intangible assets"},
      {"Payment for goods", "accounts payable"},
      {"Service fee", "bank charges"},
      {"Salary", "labor expenses"},
      {"Loan interest", "interest expenses"},
      {"train ticket", "travel expenses"},
      {"plane ticket", "travel expenses"},
      {"taxi ticket", "travel expenses"},
      {"toll ticket", "vehicle expenses"},
      {"quota ticket", "miscellaneous expenses"},
  };
}

std::vector<std::string> default_entry_field_order() {
  return {"Goods", "Purpose", "Buyer", "Seller", "Payer", "Beneficiary", "Code", "Number", "Date", "Total", "Amount"};
}

PipelineConfig default_config() {
  PipelineConfig cfg;
  cfg.registry = default_registry();
  cfg.subjects = default_subjects();
  cfg.entry_rules = demo_entry_rules();
  cfg.entry_field_order = default_entry_field_order();
  return cfg;
}

void validate(const PipelineConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  for (auto [name, tau] : {std::pair{"tau_class", cfg.tau_class}, {"tau_recog", cfg.tau_recog}, {"tau_entry", cfg.tau_entry}})
    if (!(tau > 0.0 && tau <= 1.0)) fail(std::string(name) + " must lie in (0, 1]");
  if (cfg.n_class < 1) fail("n_class must be positive");
  if (cfg.scarce_min_count < 1) fail("scarce_min_count must be positive");
  if (cfg.subjects.size() != 34) fail("subject list must hold 34 subjects, got " + std::to_string(cfg.subjects.size()));
  const std::set<std::string> subjects(cfg.subjects.begin(), cfg.subjects.end());
  if (subjects.size() != cfg.subjects.size()) fail("subject list has duplicates");
  for (const auto& rule : cfg.entry_rules) {
    if (rule.pattern.empty()) fail("entry rule with empty pattern");
    if (!subjects.count(rule.subject)) fail("entry rule subject '" + rule.subject + "' not in subject list");
  }
  for (const auto& [name, info] : cfg.registry) {
    if (info.type == TicketType::II && info.name_field.empty()) fail("type II category '" + name + "' lacks name_field");
    if (!info.name_field.empty() &&
        std::find(info.field_keywords.begin(), info.field_keywords.end(), info.name_field) == info.field_keywords.end())
      fail("name_field of '" + name + "' is not one of its field keywords");
  }
  for (auto p : {cfg.noise.p_sub, cfg.noise.p_del})
    if (p < 0.0 || p > 1.0) fail("noise probabilities must lie in [0, 1]");
  if (cfg.noise.sigma_jitter_px < 0.0) fail("sigma_jitter_px must be non-negative");
}

CategoryRegistry registry_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "registry must be a JSON object");
  CategoryRegistry reg;
  for (const auto& [name, v] : j.items()) reg[name] = v.get<CategoryInfo>();
  return reg;
}

json registry_to_json(const CategoryRegistry& reg) {
  json j = json::object();
  for (const auto& [name, info] : reg) j[name] = info;
  return j;
}

std::vector<EntryRule> rules_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "entry rules must be a JSON list");
  std::vector<EntryRule> rules;
  for (const auto& r : j) rules.push_back({r.at("pattern").get<std::string>(), r.at("subject").get<std::string>()});
  return rules;
}

json rules_to_json(const std::vector<EntryRule>& rules) {
  json j = json::array();
  for (const auto& r : rules) j.push_back({{"pattern", r.pattern}, {"subject", r.subject}});
  return j;
}

BackendSpec backends_from_json(const json& j) {
  BackendSpec spec;
  spec.rotation = j.value("rotation", spec.rotation);
  spec.hough_top_k = j.value("hough_top_k", spec.hough_top_k);
  spec.classifier = j.value("classifier", spec.classifier);
  spec.recognition = j.value("recognition", spec.recognition);
  spec.entry = j.value("entry", spec.entry);
  return spec;
}

json backends_to_json(const BackendSpec& spec) {
  return {{"rotation", spec.rotation},
          {"hough_top_k", spec.hough_top_k},
          {"classifier", spec.classifier},
          {"recognition", spec.recognition},
          {"entry", spec.entry}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

namespace {

json resolve(const json& v, const std::filesystem::path& base_dir) {
  return v.is_string() ? read_json_file(base_dir / v.get<std::string>()) : v;
}

}  // namespace

LoadedConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  LoadedConfig out;
  PipelineConfig& cfg = out.pipeline;
  try {
    cfg.tau_class = j.value("tau_class", cfg.tau_class);
    cfg.tau_recog = j.value("tau_recog", cfg.tau_recog);
    cfg.tau_entry = j.value("tau_entry", cfg.tau_entry);
    cfg.n_class = j.value("n_class", cfg.n_class);
    cfg.scarce_min_count = j.value("scarce_min_count", cfg.scarce_min_count);
    cfg.registry = j.contains("registry") ? registry_from_json(resolve(j["registry"], base_dir)) : default_registry();
    cfg.subjects = j.contains("subjects") ? resolve(j["subjects"], base_dir).get<std::vector<std::string>>()
                                          : default_subjects();
    cfg.entry_rules =
        j.contains("entry_rules") ? rules_from_json(resolve(j["entry_rules"], base_dir)) : demo_entry_rules();
    cfg.entry_field_order = j.value("entry_field_order", default_entry_field_order());
    if (j.contains("noise")) cfg.noise = j["noise"].get<NoiseModel>();
    if (j.contains("backends")) out.backends = backends_from_json(resolve(j["backends"], base_dir));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  validate(cfg);
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

json config_to_json(const PipelineConfig& cfg, const BackendSpec& backends) {
  return {{"tau_class", cfg.tau_class},
          {"tau_recog", cfg.tau_recog},
          {"tau_entry", cfg.tau_entry},
          {"n_class", cfg.n_class},
          {"scarce_min_count", cfg.scarce_min_count},
          {"registry", registry_to_json(cfg.registry)},
          {"subjects", cfg.subjects},
          {"entry_rules", rules_to_json(cfg.entry_rules)},
          {"entry_field_order", cfg.entry_field_order},
          {"noise", cfg.noise},
          {"backends", backends_to_json(backends)}};
}

}  // namespace ftrs
