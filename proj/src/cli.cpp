#include "ftrs/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include "ftrs/config.hpp"
#include "ftrs/fixtures.hpp"
#include "ftrs/metrics.hpp"
#include "ftrs/pipeline.hpp"
#include "ftrs/structure.hpp"

namespace ftrs::cli {

namespace {

std::vector<std::filesystem::path> fixture_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "manifest.json")
      files.push_back(e.path());
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return files;
}

json error_json(const std::exception& e) {
  if (const auto* fe = dynamic_cast<const Error*>(&e)) return {{"code", std::string(to_string(fe->code()))}, {"message", fe->what()}};
  return {{"code", "SchemaViolation"}, {"message", e.what()}};
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

int run_batch(const std::filesystem::path& input, const std::filesystem::path& out,
              const std::filesystem::path& config, std::optional<std::uint64_t> seed, std::ostream& log,
              BatchSummary* summary_out) {
  LoadedConfig cfg;
  BackendSet backends;
  try {
    cfg = load_config(config);
    if (seed) cfg.pipeline.noise.seed = *seed;
    validate(cfg.pipeline);
    backends = make_backends(cfg.backends, cfg.pipeline);
  } catch (const std::exception& e) {
    log << "error: unusable config " << config << ": " << e.what() << '\n';
    return 1;
  }
  std::vector<std::filesystem::path> files;
  try {
    files = fixture_files(input);
  } catch (const std::exception& e) {
    log << "error: cannot read input directory " << input << ": " << e.what() << '\n';
    return 2;
  }
  std::ofstream sink(out, std::ios::binary | std::ios::trunc);
  if (!sink) {
    log << "error: cannot write " << out << '\n';
    return 2;
  }

  Warehouse store({{}, 1000, [] { return std::int64_t{0}; }, cfg.pipeline.registry});
  BatchSummary summary;
  std::vector<SampleEval> evals;
  for (const auto& path : files) {
    json line{{"file", path.filename().string()}};
    try {
      const RawTicketImage raw = load_fixture(path);
      const ProcessOutcome o = process_ticket(raw, cfg.pipeline, backends, store);
      line.update(to_json(o));
      ++summary.processed;
      ++(o.status == Status::Accepted ? summary.accepted : summary.needs_audit);
      if (raw.ground_truth && !raw.ground_truth->fields.empty())
        evals.push_back(evaluate_fields(raw.ground_truth->fields, o.record.fields));
    } catch (const std::exception& e) {
      ++summary.errors;
      line["error"] = error_json(e);
    }
    sink << line.dump() << '\n';
  }
  if (!evals.empty()) {
    summary.p_char = p_char(evals);
    summary.p_ticket = p_ticket(evals);
  }
  log << "processed " << summary.processed << " accepted " << summary.accepted << " needs_audit "
      << summary.needs_audit << " errors " << summary.errors << " p_char " << percent(summary.p_char) << " p_ticket "
      << percent(summary.p_ticket) << '\n';
  if (summary_out) *summary_out = summary;
  return summary.errors > 0 ? 2 : 0;
}

int gen_fixtures(const std::filesystem::path& spec_path, const std::filesystem::path& out, std::uint64_t seed,
                 std::ostream& log) {
  try {
    const CategoryRegistry registry = default_registry();
    const FixtureSpec spec = fixture_spec_from_json(read_json_file(spec_path), registry);
    const GeneratedCorpus corpus = generate_corpus(spec, registry, seed);
    for (const auto& w : corpus.warnings) log << "warning: " << w << '\n';
    write_corpus(corpus, out);
    log << "wrote " << corpus.files.size() << " fixtures to " << out.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_bench(const std::filesystem::path& corpus, int repeat, std::ostream& out, std::ostream& table) {
  if (repeat < 1) {
    table << "error: --repeat must be at least 1\n";
    return 1;
  }
  std::vector<RawTicketImage> tickets;
  try {
    for (const auto& p : fixture_files(corpus)) tickets.push_back(load_fixture(p));
  } catch (const std::exception& e) {
    table << "error: " << e.what() << '\n';
    return 1;
  }
  if (tickets.empty()) {
    table << "error: corpus " << corpus << " holds no fixtures\n";
    return 1;
  }
  const PipelineConfig cfg = default_config();
  const BackendSet backends = make_backends({}, cfg);

  struct Arm {
    const char* name;
    bool full;
  };
  const Arm arms[] = {{"fast", false}, {"general", true}};
  std::vector<TimingLogEntry> log;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_category;  // fast, general

  for (const RawTicketImage& t : tickets) {
    const std::string category = t.ground_truth ? t.ground_truth->category : std::string("unknown");
    for (const Arm& arm : arms) {
      std::vector<double> runs;
      ProcessOutcome last;
      for (int k = 0; k < repeat; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          last = analyze_ticket(t, cfg, backends, {arm.full});
        } catch (const std::exception& e) {
          table << "warning: " << t.id << ": " << e.what() << '\n';
        }
        runs.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
      }
      std::vector<double> sorted = runs;
      std::sort(sorted.begin(), sorted.end());
      const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                              : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
      const bool full_surface = arm.full || (last.record.ticket_type && *last.record.ticket_type == TicketType::III);
      TimingLogEntry e{t.width_px, t.height_px, 0.0, 0.0, median};
      if (full_surface && t.ground_truth)
        for (const auto& r : t.ground_truth->regions) e.a_text += r.bbox.area();
      for (const auto& [k, b] : last.record.field_boxes) e.a_information += b.area();
      log.push_back(e);
      (arm.full ? per_category[category].second : per_category[category].first).push_back(median);
      json line = e;
      line["kind"] = "timing";
      line["file"] = t.id;
      line["category"] = category;
      line["arm"] = arm.name;
      line["runs_ms"] = runs;
      line["median_ms"] = median;
      out << line.dump() << '\n';
    }
  }

  try {
    json line = to_json(fit_cost_model(log));
    line["kind"] = "cost_model";
    out << line.dump() << '\n';
  } catch (const Error& e) {
    out << json{{"kind", "cost_model"}, {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}}.dump()
        << '\n';
  }

  std::vector<CategoryTiming> timings;
  for (const auto& [cat, arms_ms] : per_category) {
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    timings.push_back({cat, std::max(mean(arms_ms.first), 1e-9), std::max(mean(arms_ms.second), 1e-9),
                       static_cast<double>(arms_ms.first.size()) / static_cast<double>(tickets.size())});
  }
  double wsum = 0.0;
  for (const auto& t : timings) wsum += t.weight;
  for (auto& t : timings) t.weight /= wsum;
  const SpeedupReport rep = speedup_report(timings);
  json line = rep.to_json();
  line["kind"] = "speedup";
  out << line.dump() << '\n';
  table << rep.table();
  return 0;
}

int run_structure(const std::filesystem::path& input, const std::optional<std::filesystem::path>& out,
                  std::ostream& stdout_stream, std::ostream& log) {
  try {
    const json j = read_json_file(input);
    StructureInput in;
    in.input_list = j.at("regions").get<std::vector<TextRegion>>();
    in.keyword_list = j.at("keywords").get<std::vector<std::string>>();
    in.ticket_type = TicketType::III;
    if (in.keyword_list.empty()) throw Error(ErrorCode::InvalidArgument, "keywords must not be empty");
    const StructureResult r = structure_fields(in);
    json fields = json::object();
    for (const auto& [k, v] : r.result_map) fields[k] = v.value;
    const json result{{"fields", fields}, {"unresolved", r.unresolved}};
    if (out) {
      std::ofstream f(*out, std::ios::binary | std::ios::trunc);
      f << result.dump(2) << '\n';
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + out->string());
    } else {
      stdout_stream << result.dump(2) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ftrs::cli
