#include "ftrs/recognize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ftrs/error.hpp"
#include "ftrs/text.hpp"

namespace ftrs {

namespace {

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BackendFailure, e.what());
  }
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::size_t index, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t(index) >> 32),
                    stream};
  return std::mt19937_64(seq);
}

std::u32string confusables_of(char32_t c) {
  std::u32string out;
  for (const auto& [a, b] : confusable_pairs()) {
    if (a == c) out.push_back(b);
    if (b == c) out.push_back(a);
  }
  return out;
}

}  // namespace

double FieldResult::min_confidence() const {
  double m = 1.0;
  for (const auto& [k, c] : confidences) m = std::min(m, c);
  return m;
}

const std::vector<std::pair<char32_t, char32_t>>& confusable_pairs() {
  static const std::vector<std::pair<char32_t, char32_t>> pairs = {
      {U'0', U'O'}, {U'1', U'l'}, {U'王', U'玉'}, {U'未', U'末'}, {U'己', U'已'},
      {U'人', U'入'}, {U'大', U'太'}, {U'日', U'曰'}, {U'土', U'士'}, {U'刀', U'力'},
  };
  return pairs;
}

Box jitter_box(const NoiseModel& model, const Box& box, std::size_t index, int width, int height) {
  if (model.sigma_jitter_px <= 0.0) return box;
  auto rng = stream_rng(model.seed, index, 1);
  std::uniform_real_distribution<double> u(-model.sigma_jitter_px, model.sigma_jitter_px);
  const double W = width, H = height;
  double x0 = std::clamp(box.x + u(rng), 0.0, W);
  double y0 = std::clamp(box.y + u(rng), 0.0, H);
  double x1 = std::clamp(box.right() + u(rng), 0.0, W);
  double y1 = std::clamp(box.bottom() + u(rng), 0.0, H);
  if (x1 - x0 < 1.0) {
    x0 = std::min(x0, W - 1.0);
    x1 = x0 + 1.0;
  }
  if (y1 - y0 < 1.0) {
    y0 = std::min(y0, H - 1.0);
    y1 = y0 + 1.0;
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

TextRegion perturb_region(const NoiseModel& model, const TextRegion& region, std::size_t index, int width,
                          int height) {
  TextRegion out = region;
  out.bbox = jitter_box(model, region.bbox, index, width, height);
  if (model.p_sub <= 0.0 && model.p_del <= 0.0) return out;

  auto rng = stream_rng(model.seed, index, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::u32string kept;
  int perturbations = 0;
  for (char32_t c : text::decode(region.text)) {
    const double del = u(rng), sub = u(rng);
    if (del < model.p_del) {
      ++perturbations;
      continue;
    }
    if (sub < model.p_sub) {
      const std::u32string alts = confusables_of(c);
      if (!alts.empty()) {
        kept.push_back(alts[std::uniform_int_distribution<std::size_t>(0, alts.size() - 1)(rng)]);
        ++perturbations;
        continue;
      }
    }
    kept.push_back(c);
  }
  out.text = text::encode(kept);
  out.confidence = std::max(0.0, region.confidence - kPerturbationPenalty * perturbations);
  return out;
}

std::vector<TextRegion> apply_noise(const NoiseModel& model, std::span<const TextRegion> regions, int width,
                                    int height) {
  std::vector<TextRegion> out;
  out.reserve(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) out.push_back(perturb_region(model, regions[i], i, width, height));
  return out;
}

NoiseModel noise_for_ticket(const NoiseModel& model, const std::string& ticket_id) {
  NoiseModel m = model;
  m.seed = text::fnv1a(ticket_id, model.seed ^ 14695981039346656037ull);
  return m;
}

FieldResult recognize_type1(const RawTicketImage& ticket, const std::string& category,
                            const KeywordFieldDetector& detector, const PipelineConfig& cfg) {
  const auto it = cfg.registry.find(category);
  if (it == cfg.registry.end()) throw Error(ErrorCode::UnknownCategory, category);
  const auto& keywords = it->second.field_keywords;
  const auto detections = guarded([&] { return detector.detect(ticket, category); });

  FieldResult out;
  for (const auto& d : detections) {
    const bool is_field = std::find(keywords.begin(), keywords.end(), d.label) != keywords.end();
    TextRegion region{d.bbox, d.text, d.confidence, is_field ? RegionKind::KeywordField : RegionKind::FreeText,
                      is_field ? d.label : std::string(), false};
    out.regions.push_back(region);
    if (!is_field) continue;
    const auto prev = out.confidences.find(d.label);
    if (prev != out.confidences.end() && prev->second >= d.confidence) continue;
    out.fields[d.label] = d.text;
    out.boxes[d.label] = d.bbox;
    out.confidences[d.label] = d.confidence;
  }
  for (const auto& [label, conf] : out.confidences)
    if (conf < cfg.tau_recog) out.flagged.insert(label);
  return out;
}

std::vector<TextRegion> recognize_type3(const RawTicketImage& ticket, const TextLineDetector& lines,
                                        const CharSegmenter& seg, const CharClassifier& chars,
                                        const std::optional<Box>& roi) {
  return guarded([&] {
    std::vector<TextRegion> out;
    for (const Box& line : lines.detect(ticket, roi)) {
      TextRegion r;
      r.bbox = line;
      r.kind = RegionKind::FreeText;
      const auto boxes = seg.segment(ticket, line);
      double conf = boxes.empty() ? 0.0 : 1.0;
      for (const Box& cb : boxes) {
        const CharPrediction p = chars.recognize(ticket, cb);
        r.text += p.character;
        conf = std::min(conf, p.confidence);
      }
      r.confidence = std::clamp(conf, 0.0, 1.0);
      out.push_back(std::move(r));
    }
    return out;
  });
}

FieldResult recognize_type2(const RawTicketImage& ticket, const std::string& category,
                            const KeywordFieldDetector& detector, const TextLineDetector& lines,
                            const CharSegmenter& seg, const CharClassifier& chars, const PipelineConfig& cfg) {
  FieldResult out = recognize_type1(ticket, category, detector, cfg);
  const std::string& name_field = cfg.registry.at(category).name_field;
  const auto box = out.boxes.find(name_field);
  if (box == out.boxes.end()) {
    out.missing_name_region = true;
    out.flagged.insert(name_field);
    return out;
  }
  const Box roi = box->second;
  const auto name_lines = recognize_type3(ticket, lines, seg, chars, roi);
  std::string value;
  double conf = name_lines.empty() ? 0.0 : 1.0;
  for (const auto& r : name_lines) {
    value += r.text;
    conf = std::min(conf, r.confidence);
  }
  out.fields[name_field] = value;
  out.confidences[name_field] = conf;
  out.flagged.erase(name_field);
  if (conf < cfg.tau_recog) out.flagged.insert(name_field);
  for (auto& r : out.regions)
    if (r.field == name_field) {
      r.text = value;
      r.confidence = conf;
    }
  return out;
}

const GroundTruth& FixtureRecognizer::truth(const RawTicketImage& ticket) const {
  if (!ticket.ground_truth) throw Error(ErrorCode::BackendFailure, "fixture backend needs ground truth");
  return *ticket.ground_truth;
}

std::vector<Box> FixtureRecognizer::observed_boxes(const RawTicketImage& ticket, const NoiseModel& model) const {
  const auto& regions = truth(ticket).regions;
  std::vector<Box> out;
  out.reserve(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i)
    out.push_back(jitter_box(model, regions[i].bbox, i, ticket.width_px, ticket.height_px));
  return out;
}

std::vector<FieldDetection> FixtureRecognizer::detect(const RawTicketImage& ticket,
                                                      const std::string& category) const {
  const auto& regions = truth(ticket).regions;
  const auto cat = registry_.find(category);
  const NoiseModel model = noise_for_ticket(noise_, ticket.id);
  std::vector<FieldDetection> out;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const TextRegion& r = regions[i];
    std::string label;
    if (r.anchor) {
      label = "title";
    } else if (!r.field.empty() && cat != registry_.end()) {
      const auto& kws = cat->second.field_keywords;
      if (std::find(kws.begin(), kws.end(), r.field) != kws.end()) label = r.field;
    }
    if (label.empty()) continue;
    const TextRegion seen = perturb_region(model, r, i, ticket.width_px, ticket.height_px);
    out.push_back({label, seen.text, seen.bbox, seen.confidence});
  }
  return out;
}

std::vector<Box> FixtureRecognizer::detect(const RawTicketImage& ticket, const std::optional<Box>& roi) const {
  auto boxes = observed_boxes(ticket, noise_for_ticket(noise_, ticket.id));
  if (roi) std::erase_if(boxes, [&](const Box& b) { return !contains(*roi, Point{b.cx(), b.cy()}); });
  return boxes;
}

std::vector<Box> FixtureRecognizer::segment(const RawTicketImage& ticket, const Box& line) const {
  const NoiseModel model = noise_for_ticket(noise_, ticket.id);
  const auto boxes = observed_boxes(ticket, model);
  std::size_t best = boxes.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i] == line) {
      best = i;
      break;
    }
    const double d = std::hypot(boxes[i].cx() - line.cx(), boxes[i].cy() - line.cy());
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best == boxes.size()) return {};
  const auto& r = truth(ticket).regions[best];
  const std::size_t n = text::length(perturb_region(model, r, best, ticket.width_px, ticket.height_px).text);
  std::vector<Box> out;
  const double step = line.w / std::max<std::size_t>(n, 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back({line.x + step * i, line.y, step, line.h});
  return out;
}

CharPrediction FixtureRecognizer::recognize(const RawTicketImage& ticket, const Box& char_box) const {
  const NoiseModel model = noise_for_ticket(noise_, ticket.id);
  const auto boxes = observed_boxes(ticket, model);
  const Point c{char_box.cx(), char_box.cy()};
  std::size_t best = boxes.size();
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (contains(boxes[i], c) && (best == boxes.size() || boxes[i].area() < boxes[best].area())) best = i;
  if (best == boxes.size()) return {"", 0.0};
  const TextRegion seen =
      perturb_region(model, truth(ticket).regions[best], best, ticket.width_px, ticket.height_px);
  const std::u32string chars = text::decode(seen.text);
  if (chars.empty()) return {"", 0.0};
  const Box& line = boxes[best];
  const double step = line.w / chars.size();
  const auto idx = static_cast<std::size_t>(
      std::clamp(std::floor((c.x - line.x) / step), 0.0, static_cast<double>(chars.size() - 1)));
  return {text::encode(chars[idx]), seen.confidence};
}

}  // namespace ftrs
