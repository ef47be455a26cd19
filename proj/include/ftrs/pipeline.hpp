#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftrs/classify.hpp"
#include "ftrs/config.hpp"
#include "ftrs/entry.hpp"
#include "ftrs/error.hpp"
#include "ftrs/preprocess.hpp"
#include "ftrs/recognize.hpp"
#include "ftrs/types.hpp"
#include "ftrs/warehouse.hpp"

namespace ftrs {

/// Stage names in execution order.
inline const std::vector<std::string>& stage_order() {
  static const std::vector<std::string> order = {"segmentation", "rotation",    "classification",
                                                 "recognition",  "structuring", "entry"};
  return order;
}

struct BackendSet {
  std::shared_ptr<const RotationClassifier> rotation;
  std::shared_ptr<const TicketClassifier> classifier;
  std::shared_ptr<const KeywordFieldDetector> detector;
  std::shared_ptr<const TextLineDetector> lines;
  std::shared_ptr<const CharSegmenter> segmenter;
  std::shared_ptr<const CharClassifier> chars;
  std::shared_ptr<const EntryClassifier> entry;  // null: rule table
};

BackendSet make_backends(const BackendSpec& spec, const PipelineConfig& cfg);

TicketType route_ticket_type(const std::string& category, const PipelineConfig& cfg);

enum class Status { Accepted, NeedsAudit };
std::string to_string(Status s);

struct ProcessOutcome {
  Status status = Status::Accepted;
  std::optional<std::string> divert_stage;
  TicketRecord record;
  std::vector<std::string> executed_stages;
  std::optional<ErrorCode> error;  // UnknownCategory or MissingNameRegion
  int version = 0;                  // warehouse version, 0 when not ingested
};

json to_json(const ProcessOutcome& o);

struct AnalyzeOptions {
  bool force_full_surface = false;
};

/// Runs the forward branch on one segmented crop without touching a store.
ProcessOutcome analyze_crop(const RawTicketImage& crop, double segmentation_score, const PipelineConfig& cfg,
                            const BackendSet& backends, const AnalyzeOptions& opts = {});

/// Segments `raw` and analyzes its highest-scoring ticket region.
ProcessOutcome analyze_ticket(const RawTicketImage& raw, const PipelineConfig& cfg, const BackendSet& backends,
                              const AnalyzeOptions& opts = {});

/// analyze_ticket plus warehouse ingest.
ProcessOutcome process_ticket(const RawTicketImage& raw, const PipelineConfig& cfg, const BackendSet& backends,
                              Warehouse& store, Provenance provenance = Provenance::ForwardBranch);

/// Every ticket region of a multi-ticket image, each ingested.
std::vector<ProcessOutcome> process_image(const RawTicketImage& raw, const PipelineConfig& cfg,
                                          const BackendSet& backends, Warehouse& store);

}  // namespace ftrs
