#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "ftrs/types.hpp"

namespace ftrs {

/// Table 1 level from the information present on the record.
int compute_level(const TicketRecord& record);

enum class Provenance { ForwardBranch, Fixture, Manual };
std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& s);

enum class Verdict { Confirmed, Overturned };
std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct SuppliedInfo {
  std::optional<std::string> category;
  std::optional<std::map<std::string, std::string>> fields;
  std::optional<std::map<std::string, Box>> field_boxes;
  std::optional<std::string> entry;

  bool empty() const { return !category && !fields && !field_boxes && !entry; }
  friend bool operator==(const SuppliedInfo&, const SuppliedInfo&) = default;
};

struct AuditDecision {
  std::string record_id;
  int version = 0;  // the version the auditor looked at
  std::string auditor;
  SuppliedInfo supplied;
  Verdict verdict = Verdict::Confirmed;
  std::int64_t ts = 0;                // set by the store
  bool category_in_registry = true;  // registry snapshot, set by the store

  friend bool operator==(const AuditDecision&, const AuditDecision&) = default;
};

void to_json(json& j, const AuditDecision& d);
void from_json(const json& j, AuditDecision& d);

struct WarehouseRecord {
  TicketRecord record;
  int version = 1;
  std::int64_t ingest_ts = 0;
  Provenance provenance = Provenance::ForwardBranch;
  std::vector<AuditDecision> audit_history;
};

json to_json(const WarehouseRecord& r);

struct PushSets {
  std::vector<std::string> error_prone;
  std::vector<std::string> unfamiliar;
  std::vector<std::string> scarce;
};

struct TimeWindow {
  std::optional<std::int64_t> from;  // inclusive
  std::optional<std::int64_t> to;    // exclusive
};

struct StatsReport {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_category;
  std::map<int, std::size_t> by_level;
  std::map<std::string, std::size_t> by_audit_state;
  std::size_t error_prone = 0, unfamiliar = 0, scarce = 0;
  std::vector<std::string> suggestions;
};

json to_json(const StatsReport& r);

struct IngestResult {
  int version = 0;
  bool appended = false;
};

struct QueuePage {
  std::vector<WarehouseRecord> items;
  // (ingest timestamp, id) of the last item when more pending records follow.
  std::optional<std::pair<std::int64_t, std::string>> next;
};

/// Append-only versioned store. One writer at a time; readers share a lock.
class Warehouse {
 public:
  struct Options {
    std::filesystem::path dir;  // empty: memory only
    std::size_t snapshot_every = 1000;
    std::function<std::int64_t()> clock;  // defaults to the system clock in ms
    CategoryRegistry registry;
  };

  explicit Warehouse(Options opts);

  /// Memory-only store rebuilt from log text.
  static std::unique_ptr<Warehouse> replay(std::istream& log, Options opts);

  IngestResult ingest(const TicketRecord& record, Provenance provenance = Provenance::ForwardBranch);
  WarehouseRecord audit_decide(const std::string& id, AuditDecision decision);

  std::optional<WarehouseRecord> latest(const std::string& id) const;
  std::vector<WarehouseRecord> history(const std::string& id) const;
  std::size_t record_count() const;
  std::size_t version_count() const;

  PushSets select_push_sets(double tau_class, int scarce_min_count) const;
  StatsReport stats_report(const TimeWindow& window, double tau_class, int scarce_min_count) const;
  QueuePage audit_queue(std::size_t limit, const std::optional<std::pair<std::int64_t, std::string>>& after) const;

  /// Canonical dump of every version and secondary index.
  std::string dump_index() const;
  std::uintmax_t log_bytes() const;
  /// Log contents of a memory-only store.
  std::string log_text() const;

  /// The classification confidence the audit gates act on; 0 when absent.
  static double gated_confidence(const TicketRecord& r);

 private:
  struct Entry {
    std::vector<WarehouseRecord> versions;
    std::int64_t first_ts = 0;
  };

  Warehouse(Options opts, bool memory_only);
  void load_from_disk();
  void apply_line(const json& line);
  void append(WarehouseRecord rec, const std::optional<AuditDecision>& decision);
  void index_remove(const WarehouseRecord& r);
  void index_add(const WarehouseRecord& r);
  std::int64_t next_ts();
  void write_snapshot();
  PushSets push_sets_locked(double tau_class, int scarce_min_count) const;

  Options opts_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Entry> records_;
  std::set<std::pair<std::int64_t, std::string>> by_time_;
  std::map<std::string, std::set<std::string>> by_category_;
  std::map<int, std::set<std::string>> by_level_;
  std::map<std::string, std::set<std::string>> by_state_;
  std::vector<std::string> lines_;  // memory-only log
  std::uintmax_t log_bytes_ = 0;
  std::size_t appends_since_snapshot_ = 0;
  std::int64_t last_ts_ = 0;
};

}  // namespace ftrs
