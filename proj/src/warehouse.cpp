#include "ftrs/warehouse.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <mutex>
#include <sstream>

#include "ftrs/error.hpp"

namespace ftrs {

namespace {

constexpr int kSchema = 1;
constexpr const char* kLogFile = "records.ndjson";
constexpr const char* kSnapshotFile = "snapshot.json";

std::int64_t system_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

json boxes_to_json(const std::map<std::string, Box>& boxes) {
  json j = json::object();
  for (const auto& [k, b] : boxes) j[k] = box_to_json(b);
  return j;
}

std::map<std::string, Box> boxes_from_json(const json& j) {
  std::map<std::string, Box> out;
  for (const auto& [k, v] : j.items()) out[k] = box_from_json(v);
  return out;
}

}  // namespace

int compute_level(const TicketRecord& r) {
  if (r.category.empty()) {
    if (r.audit_state == AuditState::Pending) return 4;
    throw Error(ErrorCode::MissingTC, "record '" + r.id + "' has no category");
  }
  const bool kc = !r.fields.empty(), kbb = !r.field_boxes.empty(), ae = r.entry_subject.has_value();
  if (kc && kbb && ae) return 1;
  if (kc && kbb) return 2;
  if (kc) return 3;
  return 4;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ForwardBranch: return "forward-branch";
    case Provenance::Fixture: return "fixture";
    case Provenance::Manual: return "manual";
  }
  return "manual";
}

Provenance parse_provenance(const std::string& s) {
  if (s == "forward-branch") return Provenance::ForwardBranch;
  if (s == "fixture") return Provenance::Fixture;
  if (s == "manual") return Provenance::Manual;
  throw Error(ErrorCode::SchemaViolation, "unknown provenance '" + s + "'");
}

std::string to_string(Verdict v) { return v == Verdict::Confirmed ? "confirmed" : "overturned"; }

Verdict parse_verdict(const std::string& s) {
  if (s == "confirmed") return Verdict::Confirmed;
  if (s == "overturned") return Verdict::Overturned;
  throw Error(ErrorCode::SchemaViolation, "unknown verdict '" + s + "'");
}

void to_json(json& j, const AuditDecision& d) {
  json supplied = json::object();
  if (d.supplied.category) supplied["category"] = *d.supplied.category;
  if (d.supplied.fields) supplied["fields"] = *d.supplied.fields;
  if (d.supplied.field_boxes) supplied["field_boxes"] = boxes_to_json(*d.supplied.field_boxes);
  if (d.supplied.entry) supplied["entry"] = *d.supplied.entry;
  j = json{{"record_id", d.record_id},
           {"version", d.version},
           {"auditor", d.auditor},
           {"supplied", supplied},
           {"verdict", to_string(d.verdict)},
           {"ts", d.ts},
           {"category_in_registry", d.category_in_registry}};
}

void from_json(const json& j, AuditDecision& d) {
  d = AuditDecision{};
  d.record_id = j.value("record_id", std::string{});
  d.version = j.at("version").get<int>();
  d.auditor = j.value("auditor", std::string{});
  if (j.contains("supplied")) {
    const json& s = j.at("supplied");
    if (s.contains("category")) d.supplied.category = s.at("category").get<std::string>();
    if (s.contains("fields")) d.supplied.fields = s.at("fields").get<std::map<std::string, std::string>>();
    if (s.contains("field_boxes")) d.supplied.field_boxes = boxes_from_json(s.at("field_boxes"));
    if (s.contains("entry")) d.supplied.entry = s.at("entry").get<std::string>();
  }
  d.verdict = parse_verdict(j.at("verdict").get<std::string>());
  d.ts = j.value("ts", std::int64_t{0});
  d.category_in_registry = j.value("category_in_registry", true);
}

json to_json(const WarehouseRecord& r) {
  json j = r.record;
  j["version"] = r.version;
  j["ts"] = r.ingest_ts;
  j["provenance"] = to_string(r.provenance);
  j["audit_history"] = r.audit_history;
  return j;
}

json to_json(const StatsReport& r) {
  json levels = json::object();
  for (const auto& [l, n] : r.by_level) levels[std::to_string(l)] = n;
  return json{{"total", r.total},
              {"by_category", r.by_category},
              {"by_level", levels},
              {"by_audit_state", r.by_audit_state},
              {"push_sets", {{"error_prone", r.error_prone}, {"unfamiliar", r.unfamiliar}, {"scarce", r.scarce}}},
              {"suggestions", r.suggestions}};
}

Warehouse::Warehouse(Options opts) : Warehouse(std::move(opts), false) {}

Warehouse::Warehouse(Options opts, bool memory_only) : opts_(std::move(opts)) {
  if (!opts_.clock) opts_.clock = system_ms;
  if (opts_.snapshot_every == 0) opts_.snapshot_every = 1000;
  if (memory_only) opts_.dir.clear();
  if (!opts_.dir.empty()) load_from_disk();
}

std::unique_ptr<Warehouse> Warehouse::replay(std::istream& log, Options opts) {
  std::unique_ptr<Warehouse> store(new Warehouse(std::move(opts), true));
  Warehouse& w = *store;
  std::string line;
  while (std::getline(log, line)) {
    const bool complete = !log.eof();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      if (!complete) break;  // torn final write
      throw Error(ErrorCode::SchemaViolation, std::string("log line unreadable: ") + e.what());
    }
    w.apply_line(j);
    w.lines_.push_back(line);
    w.log_bytes_ += line.size() + 1;
  }
  return store;
}

void Warehouse::load_from_disk() {
  std::error_code ec;
  std::filesystem::create_directories(opts_.dir, ec);
  if (ec) throw Error(ErrorCode::StoreUnavailable, "cannot create " + opts_.dir.string() + ": " + ec.message());
  const auto log_path = opts_.dir / kLogFile;
  std::string content;
  {
    std::ifstream in(log_path, std::ios::binary);
    if (in) content.assign(std::istreambuf_iterator<char>(in), {});
  }
  // Drop a torn tail so later appends start on a line boundary.
  const std::size_t boundary = content.rfind('\n') == std::string::npos ? 0 : content.rfind('\n') + 1;
  if (boundary < content.size()) {
    content.resize(boundary);
    std::filesystem::resize_file(log_path, boundary, ec);
    if (ec) throw Error(ErrorCode::StoreUnavailable, "cannot trim " + log_path.string());
  }

  std::size_t offset = 0;
  std::ifstream snap_in(opts_.dir / kSnapshotFile);
  if (snap_in) {
    try {
      std::string header;
      std::getline(snap_in, header);
      const json head = json::parse(header);
      const std::size_t bytes = head.at("log_bytes").get<std::size_t>();
      bool usable = head.at("schema").get<int>() == kSchema && bytes <= content.size() &&
                    (bytes == 0 || content[bytes - 1] == '\n');
      if (usable && bytes > 0) {
        const std::size_t start = content.rfind('\n', bytes - 2);
        const json last = json::parse(content.substr(start == std::string::npos ? 0 : start + 1,
                                                     bytes - 1 - (start == std::string::npos ? 0 : start + 1)));
        usable = last.at("id") == head.at("last").at("id") && last.at("version") == head.at("last").at("version");
      }
      if (usable) {
        const json snap = json::parse(snap_in);
        for (const json& line : snap.at("lines")) apply_line(line);
        offset = bytes;
      }
    } catch (const std::exception&) {
      records_.clear();
      by_time_.clear();
      by_category_.clear();
      by_level_.clear();
      by_state_.clear();
      last_ts_ = 0;
      offset = 0;
    }
  }
  std::istringstream rest(content.substr(offset));
  std::string line;
  while (std::getline(rest, line)) {
    if (line.empty()) continue;
    try {
      apply_line(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::StoreUnavailable, std::string("corrupt log line: ") + e.what());
    }
  }
  log_bytes_ = content.size();
}

void Warehouse::index_remove(const WarehouseRecord& r) {
  const auto& id = r.record.id;
  by_category_[r.record.category].erase(id);
  if (by_category_[r.record.category].empty()) by_category_.erase(r.record.category);
  by_level_[r.record.info_level].erase(id);
  if (by_level_[r.record.info_level].empty()) by_level_.erase(r.record.info_level);
  by_state_[to_string(r.record.audit_state)].erase(id);
  if (by_state_[to_string(r.record.audit_state)].empty()) by_state_.erase(to_string(r.record.audit_state));
}

void Warehouse::index_add(const WarehouseRecord& r) {
  by_category_[r.record.category].insert(r.record.id);
  by_level_[r.record.info_level].insert(r.record.id);
  by_state_[to_string(r.record.audit_state)].insert(r.record.id);
}

void Warehouse::apply_line(const json& line) {
  if (line.value("schema", 0) != kSchema) throw Error(ErrorCode::SchemaViolation, "unsupported log schema");
  WarehouseRecord rec;
  rec.record = line.get<TicketRecord>();
  rec.version = line.at("version").get<int>();
  rec.ingest_ts = line.at("ts").get<std::int64_t>();
  rec.provenance = parse_provenance(line.at("provenance").get<std::string>());

  auto it = records_.find(rec.record.id);
  const int expected = it == records_.end() ? 1 : static_cast<int>(it->second.versions.size()) + 1;
  if (rec.version != expected)
    throw Error(ErrorCode::SchemaViolation, "log version gap for '" + rec.record.id + "'");
  if (it != records_.end()) {
    rec.audit_history = it->second.versions.back().audit_history;
    index_remove(it->second.versions.back());
  } else {
    it = records_.emplace(rec.record.id, Entry{{}, rec.ingest_ts}).first;
    by_time_.insert({rec.ingest_ts, rec.record.id});
  }
  if (line.contains("audit") && !line["audit"].is_null()) rec.audit_history.push_back(line["audit"].get<AuditDecision>());
  last_ts_ = std::max(last_ts_, rec.ingest_ts);
  index_add(rec);
  it->second.versions.push_back(std::move(rec));
}

std::int64_t Warehouse::next_ts() { return std::max(opts_.clock(), last_ts_); }

void Warehouse::append(WarehouseRecord rec, const std::optional<AuditDecision>& decision) {
  json line = rec.record;
  line["schema"] = kSchema;
  line["version"] = rec.version;
  line["ts"] = rec.ingest_ts;
  line["provenance"] = to_string(rec.provenance);
  line["audit"] = decision ? json(*decision) : json(nullptr);
  const std::string text = line.dump();

  if (!opts_.dir.empty()) {
    std::ofstream out(opts_.dir / kLogFile, std::ios::binary | std::ios::app);
    out << text << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StoreUnavailable, "append to " + (opts_.dir / kLogFile).string() + " failed");
  } else {
    lines_.push_back(text);
  }
  log_bytes_ += text.size() + 1;
  apply_line(json::parse(text));
  if (!opts_.dir.empty() && ++appends_since_snapshot_ >= opts_.snapshot_every) {
    appends_since_snapshot_ = 0;
    write_snapshot();
  }
}

void Warehouse::write_snapshot() {
  json lines = json::array();
  // Versions in log order: replaying by (ts, id, version) preserves per-id order.
  std::vector<const WarehouseRecord*> ordered;
  for (const auto& [id, e] : records_)
    for (const auto& v : e.versions) ordered.push_back(&v);
  std::stable_sort(ordered.begin(), ordered.end(), [](const WarehouseRecord* a, const WarehouseRecord* b) {
    return a->ingest_ts < b->ingest_ts;
  });
  for (const WarehouseRecord* v : ordered) {
    json line = v->record;
    line["schema"] = kSchema;
    line["version"] = v->version;
    line["ts"] = v->ingest_ts;
    line["provenance"] = to_string(v->provenance);
    const std::size_t prior = v->version > 1 ? records_.at(v->record.id).versions[v->version - 2].audit_history.size() : 0;
    line["audit"] = v->audit_history.size() > prior ? json(v->audit_history.back()) : json(nullptr);
    lines.push_back(std::move(line));
  }
  // The log's final line identifies the snapshot position.
  std::ifstream in(opts_.dir / kLogFile, std::ios::binary);
  std::string content(std::istreambuf_iterator<char>(in), {});
  if (content.empty()) return;
  const std::size_t start = content.rfind('\n', content.size() - 2);
  const json tail = json::parse(content.substr(start == std::string::npos ? 0 : start + 1));
  // Header line, then the payload line.
  const json head{{"schema", kSchema},
                  {"log_bytes", content.size()},
                  {"last", {{"id", tail.at("id")}, {"version", tail.at("version")}}}};
  json payload = json::object();
  payload["lines"] = std::move(lines);
  const auto tmp = opts_.dir / (std::string(kSnapshotFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << head.dump() << '\n' << payload.dump() << '\n';
    if (!out) throw Error(ErrorCode::StoreUnavailable, "snapshot write failed");
  }
  std::filesystem::rename(tmp, opts_.dir / kSnapshotFile);
}

IngestResult Warehouse::ingest(const TicketRecord& incoming, Provenance provenance) {
  if (incoming.id.empty()) throw Error(ErrorCode::InvalidArgument, "record id is empty");
  std::unique_lock lock(mu_);
  TicketRecord rec = incoming;
  const auto it = records_.find(rec.id);
  if (it != records_.end()) {
    const TicketRecord& prior = it->second.versions.back().record;
    if (rec.category.empty()) {
      rec.category = prior.category;
      rec.ticket_type = prior.ticket_type;
    }
    if (rec.fields.empty()) rec.fields = prior.fields;
    if (rec.field_boxes.empty()) rec.field_boxes = prior.field_boxes;
    if (!rec.entry_subject) rec.entry_subject = prior.entry_subject;
  }
  rec.info_level = compute_level(rec);
  if (it != records_.end() && rec == it->second.versions.back().record) return {it->second.versions.back().version, false};

  WarehouseRecord w;
  w.record = std::move(rec);
  w.version = it == records_.end() ? 1 : static_cast<int>(it->second.versions.size()) + 1;
  w.ingest_ts = next_ts();
  w.provenance = provenance;
  const int version = w.version;
  append(std::move(w), std::nullopt);
  return {version, true};
}

WarehouseRecord Warehouse::audit_decide(const std::string& id, AuditDecision d) {
  std::unique_lock lock(mu_);
  const auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorCode::UnknownRecord, "no record '" + id + "'");
  const WarehouseRecord& cur = it->second.versions.back();
  if (d.version != cur.version)
    throw Error(ErrorCode::StaleVersion, "decision on version " + std::to_string(d.version) + ", latest is " +
                                             std::to_string(cur.version));
  if (d.verdict == Verdict::Overturned && d.supplied.empty())
    throw Error(ErrorCode::InvalidArgument, "an overturned verdict must supply corrected information");

  d.record_id = id;
  d.ts = next_ts();
  d.category_in_registry = !d.supplied.category || opts_.registry.count(*d.supplied.category) > 0;

  WarehouseRecord next = cur;
  TicketRecord& r = next.record;
  if (d.supplied.category) {
    r.category = *d.supplied.category;
    const auto reg = opts_.registry.find(r.category);
    r.ticket_type = reg == opts_.registry.end() ? std::nullopt : std::optional(reg->second.type);
  }
  if (d.supplied.fields)
    for (const auto& [k, v] : *d.supplied.fields) r.fields[k] = v;
  if (d.supplied.field_boxes)
    for (const auto& [k, b] : *d.supplied.field_boxes) r.field_boxes[k] = b;
  if (d.supplied.entry) r.entry_subject = *d.supplied.entry;
  r.audit_state = d.verdict == Verdict::Confirmed ? AuditState::Confirmed : AuditState::Overturned;
  r.info_level = compute_level(r);

  next.version = cur.version + 1;
  next.ingest_ts = d.ts;
  next.provenance = Provenance::Manual;
  append(next, d);
  return it->second.versions.back();
}

std::optional<WarehouseRecord> Warehouse::latest(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second.versions.back();
}

std::vector<WarehouseRecord> Warehouse::history(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = records_.find(id);
  return it == records_.end() ? std::vector<WarehouseRecord>{} : it->second.versions;
}

std::size_t Warehouse::record_count() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::size_t Warehouse::version_count() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& [id, e] : records_) n += e.versions.size();
  return n;
}

double Warehouse::gated_confidence(const TicketRecord& r) {
  const auto it = r.stage_confidences.find("classification");
  return it == r.stage_confidences.end() ? 0.0 : it->second;
}

PushSets Warehouse::push_sets_locked(double tau_class, int scarce_min_count) const {
  PushSets out;
  std::map<std::string, std::size_t> counts;
  for (const auto& [id, e] : records_)
    if (!e.versions.back().record.category.empty()) ++counts[e.versions.back().record.category];
  for (const auto& [ts, id] : by_time_) {
    const WarehouseRecord& w = records_.at(id).versions.back();
    const double conf = gated_confidence(w.record);
    if (!w.audit_history.empty()) {
      const AuditDecision& last = w.audit_history.back();
      if (last.verdict == Verdict::Overturned && conf >= tau_class) out.error_prone.push_back(id);
      if (conf < tau_class) {
        const auto named = std::find_if(w.audit_history.rbegin(), w.audit_history.rend(),
                                        [](const AuditDecision& d) { return d.supplied.category.has_value(); });
        if (named != w.audit_history.rend() && !named->category_in_registry) out.unfamiliar.push_back(id);
      }
    }
    const auto c = counts.find(w.record.category);
    if (c != counts.end() && c->second < static_cast<std::size_t>(scarce_min_count)) out.scarce.push_back(id);
  }
  return out;
}

PushSets Warehouse::select_push_sets(double tau_class, int scarce_min_count) const {
  std::shared_lock lock(mu_);
  return push_sets_locked(tau_class, scarce_min_count);
}

StatsReport Warehouse::stats_report(const TimeWindow& window, double tau_class, int scarce_min_count) const {
  std::shared_lock lock(mu_);
  StatsReport rep;
  for (int l = 1; l <= 4; ++l) rep.by_level[l] = 0;
  for (auto s : {AuditState::None, AuditState::Pending, AuditState::Confirmed, AuditState::Overturned})
    rep.by_audit_state[to_string(s)] = 0;
  std::set<std::string> in_window;
  for (const auto& [ts, id] : by_time_) {
    if (window.from && ts < *window.from) continue;
    if (window.to && ts >= *window.to) continue;
    in_window.insert(id);
    const TicketRecord& r = records_.at(id).versions.back().record;
    ++rep.total;
    ++rep.by_category[r.category];
    ++rep.by_level[r.info_level];
    ++rep.by_audit_state[to_string(r.audit_state)];
  }
  const PushSets sets = push_sets_locked(tau_class, scarce_min_count);
  auto count_in = [&](const std::vector<std::string>& ids) {
    return static_cast<std::size_t>(std::count_if(ids.begin(), ids.end(), [&](const auto& id) { return in_window.count(id) > 0; }));
  };
  rep.error_prone = count_in(sets.error_prone);
  rep.unfamiliar = count_in(sets.unfamiliar);
  rep.scarce = count_in(sets.scarce);

  if (const auto pending = rep.by_audit_state["pending"]; pending > 0)
    rep.suggestions.push_back(std::to_string(pending) + " records wait for audit");
  if (rep.error_prone > 0)
    rep.suggestions.push_back(std::to_string(rep.error_prone) + " confident results were overturned; retrain on the error-prone set");
  if (rep.unfamiliar > 0)
    rep.suggestions.push_back(std::to_string(rep.unfamiliar) + " records carry categories missing from the registry");
  for (const auto& [cat, n] : rep.by_category)
    if (n < static_cast<std::size_t>(scarce_min_count))
      rep.suggestions.push_back("category '" + cat + "' is scarce (" + std::to_string(n) + " records)");
  return rep;
}

QueuePage Warehouse::audit_queue(std::size_t limit,
                                 const std::optional<std::pair<std::int64_t, std::string>>& after) const {
  std::shared_lock lock(mu_);
  QueuePage page;
  const auto pending = by_state_.find(to_string(AuditState::Pending));
  if (pending == by_state_.end() || limit == 0) return page;
  auto it = after ? by_time_.upper_bound(*after) : by_time_.begin();
  for (; it != by_time_.end(); ++it) {
    if (!pending->second.count(it->second)) continue;
    if (page.items.size() == limit) {
      const auto& last = page.items.back();
      page.next = std::pair{records_.at(last.record.id).first_ts, last.record.id};
      break;
    }
    page.items.push_back(records_.at(it->second).versions.back());
  }
  return page;
}

std::string Warehouse::dump_index() const {
  std::shared_lock lock(mu_);
  json j = json::object();
  json& recs = j["records"] = json::object();
  for (const auto& [id, e] : records_) {
    json& slot = recs[id] = json::object();
    slot["first_ts"] = e.first_ts;
    json& versions = slot["versions"] = json::array();
    for (const auto& v : e.versions) versions.push_back(to_json(v));
  }
  json& times = j["by_time"] = json::array();
  for (const auto& [ts, id] : by_time_) times.push_back(json::array({ts, id}));
  j["by_category"] = by_category_;
  json& levels = j["by_level"] = json::object();
  for (const auto& [l, ids] : by_level_) levels[std::to_string(l)] = ids;
  j["by_state"] = by_state_;
  j["last_ts"] = last_ts_;
  return j.dump();
}

std::uintmax_t Warehouse::log_bytes() const {
  std::shared_lock lock(mu_);
  return log_bytes_;
}

std::string Warehouse::log_text() const {
  std::shared_lock lock(mu_);
  std::string out;
  for (const auto& l : lines_) out += l + '\n';
  return out;
}

}  // namespace ftrs
