#include "ftrs/pipeline.hpp"

#include <algorithm>

#include "ftrs/fixtures.hpp"
#include "ftrs/structure.hpp"

namespace ftrs {

BackendSet make_backends(const BackendSpec& spec, const PipelineConfig& cfg) {
  BackendSet b;
  if (spec.rotation == "fixture") {
    b.rotation = std::make_shared<OracleRotationClassifier>(cfg.n_class);
  } else if (spec.rotation == "hough") {
    HoughOrientationClassifier::Options o;
    o.n_class = cfg.n_class;
    o.top_k = spec.hough_top_k;
    b.rotation = std::make_shared<HoughOrientationClassifier>(o);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown rotation backend '" + spec.rotation + "'");
  }
  if (spec.classifier != "fixture")
    throw Error(ErrorCode::InvalidConfig, "unknown classifier backend '" + spec.classifier + "'");
  b.classifier = std::make_shared<FixtureTicketClassifier>();
  if (spec.recognition != "fixture")
    throw Error(ErrorCode::InvalidConfig, "unknown recognition backend '" + spec.recognition + "'");
  auto rec = std::make_shared<FixtureRecognizer>(cfg.registry, cfg.noise);
  b.detector = rec;
  b.lines = rec;
  b.segmenter = rec;
  b.chars = rec;
  if (spec.entry != "rules") throw Error(ErrorCode::InvalidConfig, "unknown entry backend '" + spec.entry + "'");
  return b;
}

TicketType route_ticket_type(const std::string& category, const PipelineConfig& cfg) {
  const auto it = cfg.registry.find(category);
  if (it == cfg.registry.end()) throw Error(ErrorCode::UnknownCategory, "category '" + category + "' is not registered");
  return it->second.type;
}

std::string to_string(Status s) { return s == Status::Accepted ? "accepted" : "needs_audit"; }

json to_json(const ProcessOutcome& o) {
  json j{{"status", to_string(o.status)},
         {"divert_stage", o.divert_stage ? json(*o.divert_stage) : json(nullptr)},
         {"record", o.record}};
  if (o.error) j["error"] = std::string(to_string(*o.error));
  if (o.version > 0) j["version"] = o.version;
  return j;
}

namespace {

class Run {
 public:
  Run(ProcessOutcome& out) : out_(out) {}

  void executed(const std::string& stage, double confidence) {
    out_.executed_stages.push_back(stage);
    out_.record.stage_confidences[stage] = std::clamp(confidence, 0.0, 1.0);
  }

  ProcessOutcome& divert(const std::string& stage) {
    out_.status = Status::NeedsAudit;
    out_.divert_stage = stage;
    out_.record.audit_state = AuditState::Pending;
    out_.record.flags.insert("diverted:" + stage);
    return finish();
  }

  ProcessOutcome& finish() {
    out_.record.info_level = compute_level(out_.record);
    return out_;
  }

 private:
  ProcessOutcome& out_;
};

}  // namespace

ProcessOutcome analyze_crop(const RawTicketImage& input, double segmentation_score, const PipelineConfig& cfg,
                            const BackendSet& be, const AnalyzeOptions& opts) {
  ProcessOutcome out;
  TicketRecord& rec = out.record;
  rec.id = input.id;
  rec.width_px = input.width_px;
  rec.height_px = input.height_px;
  rec.source_digest = fixture_digest(input);
  Run run(out);
  run.executed("segmentation", segmentation_score);

  const RotationEstimate rot = detect_rotation(input, *be.rotation, cfg);
  rec.rotation_class = rot.class_k;
  run.executed("rotation", rot.confidence);
  if (rot.confidence < cfg.tau_class) return run.divert("rotation");
  const RawTicketImage ticket = correct_direction(input, rot, cfg);
  rec.width_px = ticket.width_px;
  rec.height_px = ticket.height_px;

  const ClassificationOutcome cls = classify_ticket(ticket, *be.classifier, cfg);
  rec.category = cls.prediction.category;
  run.executed("classification", cls.prediction.confidence);
  if (cls.unfamiliar) {
    rec.flags.insert("unfamiliar");
    out.error = ErrorCode::UnknownCategory;
    return run.divert("classification");
  }
  const TicketType type = route_ticket_type(rec.category, cfg);
  rec.ticket_type = type;
  if (cls.gate == Gate::NeedsAudit) return run.divert("classification");

  const CategoryInfo& info = cfg.registry.at(rec.category);
  const bool full_surface = type == TicketType::III || opts.force_full_surface;
  double recog_conf = 1.0;
  if (full_surface) {
    rec.regions = recognize_type3(ticket, *be.lines, *be.segmenter, *be.chars);
    for (const auto& r : rec.regions) recog_conf = std::min(recog_conf, r.confidence);
    if (rec.regions.empty()) recog_conf = 0.0;
  } else {
    const FieldResult fr = type == TicketType::I
                               ? recognize_type1(ticket, rec.category, *be.detector, cfg)
                               : recognize_type2(ticket, rec.category, *be.detector, *be.lines, *be.segmenter,
                                                 *be.chars, cfg);
    rec.regions = fr.regions;
    rec.fields = fr.fields;
    rec.field_boxes = fr.boxes;
    recog_conf = fr.fields.empty() ? 0.0 : fr.min_confidence();
    for (const auto& f : fr.flagged) rec.flags.insert("low-confidence:" + f);
    if (fr.missing_name_region) {
      rec.flags.insert("missing-name-region");
      out.error = ErrorCode::MissingNameRegion;
      recog_conf = 0.0;
    }
  }
  run.executed("recognition", recog_conf);

  const KeywordCheck check = cross_validate_keywords(rec.category, rec.regions, cfg);
  rec.keyword_check = to_string(check);
  if (check == KeywordCheck::Mismatch) {
    // The category is what is in doubt; the recognition result stays for the auditor.
    rec.stage_confidences.erase("recognition");
    rec.flags.insert("keyword-mismatch");
    return run.divert("classification");
  }
  if (recog_conf < cfg.tau_recog) return run.divert("recognition");

  if (full_surface) {
    const StructureResult sr = structure_fields({rec.regions, info.field_keywords, TicketType::III});
    for (const auto& [kw, v] : sr.result_map) {
      rec.fields[kw] = v.value;
      rec.field_boxes[kw] = v.bbox;
    }
    for (const auto& kw : sr.unresolved) rec.flags.insert("unresolved:" + kw);
    const double total = static_cast<double>(sr.result_map.size() + sr.unresolved.size());
    run.executed("structuring", total == 0 ? 0.0 : sr.result_map.size() / total);
    if (rec.stage_confidences["structuring"] < cfg.tau_recog) return run.divert("structuring");
  }

  if (rec.fields.empty()) {
    run.executed("entry", 0.0);
    return run.divert("entry");
  }
  const EntryDecision entry = be.entry ? classify_entry(rec.fields, rec.category, *be.entry, cfg)
                                       : classify_entry(rec.fields, rec.category, cfg.entry_rules, cfg);
  run.executed("entry", entry.confidence);
  if (entry.needs_audit) return run.divert("entry");
  rec.entry_subject = entry.subject;
  return run.finish();
}

ProcessOutcome analyze_ticket(const RawTicketImage& raw, const PipelineConfig& cfg, const BackendSet& be,
                              const AnalyzeOptions& opts) {
  if (raw.width_px <= 0 || raw.height_px <= 0) throw Error(ErrorCode::InvalidArgument, "image needs positive size");
  const auto crops = segment_regions(raw);
  std::size_t best = 0;
  for (std::size_t i = 1; i < crops.size(); ++i)
    if (crops[i].ticket_boxes.front().score > crops[best].ticket_boxes.front().score) best = i;
  ProcessOutcome out = analyze_crop(crops[best], crops[best].ticket_boxes.front().score, cfg, be, opts);
  out.record.source_digest = fixture_digest(raw);
  return out;
}

ProcessOutcome process_ticket(const RawTicketImage& raw, const PipelineConfig& cfg, const BackendSet& be,
                              Warehouse& store, Provenance provenance) {
  ProcessOutcome out = analyze_ticket(raw, cfg, be);
  out.version = store.ingest(out.record, provenance).version;
  out.record = store.latest(out.record.id)->record;
  return out;
}

std::vector<ProcessOutcome> process_image(const RawTicketImage& raw, const PipelineConfig& cfg, const BackendSet& be,
                                          Warehouse& store) {
  if (raw.width_px <= 0 || raw.height_px <= 0) throw Error(ErrorCode::InvalidArgument, "image needs positive size");
  std::vector<ProcessOutcome> outs;
  for (const auto& crop : segment_regions(raw)) {
    ProcessOutcome o = analyze_crop(crop, crop.ticket_boxes.front().score, cfg, be);
    o.version = store.ingest(o.record).version;
    o.record = store.latest(o.record.id)->record;
    outs.push_back(std::move(o));
  }
  return outs;
}

}  // namespace ftrs
