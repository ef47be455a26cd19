#include <cstdlib>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "ftrs/cli.hpp"
#include "support.hpp"

using namespace ftrs;

namespace {

const std::filesystem::path kData = FTRS_DATA_DIR;
const std::filesystem::path kConfig = kData / "config.json";

std::vector<json> lines_of(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(json::parse(l));
  return out;
}

void write_small_corpus(const std::filesystem::path& dir, int per_category, std::uint64_t seed = 0) {
  auto spec = test::default_layout_spec();
  for (auto& c : spec.categories) c.count = per_category;
  write_corpus(generate_corpus(spec, default_registry(), seed), dir);
}

int tool(const std::string& args) {
  const int rc = std::system((std::string(FTRS_TOOL) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("empty input directory gives a zero summary") {
  test::TempDir in, out;
  std::ostringstream log;
  cli::BatchSummary s;
  CHECK(cli::run_batch(in.path(), out / "o.jsonl", kConfig, std::nullopt, log, &s) == 0);
  CHECK(s.processed == 0);
  CHECK(s.errors == 0);
  CHECK_FALSE(s.p_char);
  CHECK(test::slurp(out / "o.jsonl").empty());
  CHECK(log.str().find("processed 0") != std::string::npos);
}

TEST_CASE("corrupt fixture is isolated") {
  test::TempDir in, out;
  write_small_corpus(in.path(), 1);
  test::spit(in / "zz_corrupt.json", R"({"height": 10, "ticket_boxes": []})");
  std::ostringstream log;
  cli::BatchSummary s;
  CHECK(cli::run_batch(in.path(), out / "o.jsonl", kConfig, std::nullopt, log, &s) == 2);
  CHECK(s.processed == 6);
  CHECK(s.accepted == 6);
  CHECK(s.errors == 1);
  const auto lines = lines_of(test::slurp(out / "o.jsonl"));
  REQUIRE(lines.size() == 7);
  CHECK(lines.back()["file"] == "zz_corrupt.json");
  CHECK(lines.back()["error"]["code"] == "SchemaViolation");
  CHECK(lines.back()["error"]["message"].get<std::string>().find("/width") != std::string::npos);
}

TEST_CASE("unusable config exits 1") {
  test::TempDir in, out;
  test::spit(in / "c.json", R"({"tau_class": 7})");
  std::ostringstream log;
  CHECK(cli::run_batch(in.path(), out / "o.jsonl", in / "c.json", std::nullopt, log) == 1);
  CHECK(cli::run_batch(in.path(), out / "o.jsonl", in / "missing.json", std::nullopt, log) == 1);
}

TEST_CASE("batch over a noise-free corpus") {
  test::TempDir in, out;
  write_small_corpus(in.path(), 4);
  std::ostringstream log;
  cli::BatchSummary s;
  CHECK(cli::run_batch(in.path(), out / "o.jsonl", kConfig, std::nullopt, log, &s) == 0);
  CHECK(s.processed == 24);
  CHECK(s.accepted == 24);
  CHECK(s.p_char == 1.0);
  CHECK(s.p_ticket == 1.0);
  for (const auto& l : lines_of(test::slurp(out / "o.jsonl"))) {
    CHECK(l["status"] == "accepted");
    CHECK(l["version"] == 1);
  }
}

TEST_CASE("seed override changes the noise") {
  test::TempDir in, out, cfgdir;
  write_small_corpus(in.path(), 2);
  json cfg = read_json_file(kConfig);
  for (const char* k : {"registry", "subjects", "entry_rules", "backends"}) cfg[k] = kData / cfg[k].get<std::string>();
  cfg["noise"]["p_sub"] = 0.3;
  test::spit(cfgdir / "c.json", cfg.dump());
  std::ostringstream log;
  cli::run_batch(in.path(), out / "a", cfgdir / "c.json", 1, log);
  cli::run_batch(in.path(), out / "b", cfgdir / "c.json", 1, log);
  cli::run_batch(in.path(), out / "c", cfgdir / "c.json", 2, log);
  CHECK(test::slurp(out / "a") == test::slurp(out / "b"));
  CHECK(test::slurp(out / "a") != test::slurp(out / "c"));
}

TEST_CASE("gen is deterministic and reports zero counts") {
  test::TempDir a, b, spec;
  std::ostringstream log;
  json s = read_json_file(kData / "fixture_spec.json");
  for (auto& c : s["categories"]) c["count"] = c["category"] == "toll ticket" ? 0 : 2;
  test::spit(spec / "s.json", s.dump());
  CHECK(cli::gen_fixtures(spec / "s.json", a.path(), 5, log) == 0);
  CHECK(cli::gen_fixtures(spec / "s.json", b.path(), 5, log) == 0);
  CHECK(log.str().find("warning: category 'toll ticket' has count 0") != std::string::npos);
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(a.path())) {
    CHECK(test::slurp(e.path()) == test::slurp(b / e.path().filename().string()));
    ++n;
  }
  CHECK(n == 11);
  CHECK(read_json_file(a / "manifest.json")["total"] == 10);

  test::spit(spec / "bad.json", R"({"categories": [{"category": "lottery stub", "count": 1}]})");
  CHECK(cli::gen_fixtures(spec / "bad.json", a.path(), 5, log) == 1);
}

TEST_CASE("bench on a single ticket reports an underdetermined fit") {
  test::TempDir in;
  test::spit(in / "one.json", fixture_to_json(test::make_fixture("taxi ticket")).dump());
  std::ostringstream out, table;
  CHECK(cli::run_bench(in.path(), 3, out, table) == 0);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 4);
  for (int i = 0; i < 2; ++i) {
    CHECK(lines[i]["kind"] == "timing");
    CHECK(lines[i]["runs_ms"].size() == 3);
    CHECK(lines[i].contains("median_ms"));
  }
  CHECK(lines[2]["kind"] == "cost_model");
  CHECK(lines[2]["error"]["code"] == "Underdetermined");
  CHECK(lines[3]["kind"] == "speedup");
}

TEST_CASE("bench medians and speedup on a mixed corpus") {
  test::TempDir in;
  write_small_corpus(in.path(), 2);
  std::ostringstream out, table;
  CHECK(cli::run_bench(in.path(), 3, out, table) == 0);
  const auto lines = lines_of(out.str());
  std::size_t timing = 0;
  for (const auto& l : lines) {
    if (l["kind"] != "timing") continue;
    ++timing;
    auto runs = l["runs_ms"].get<std::vector<double>>();
    std::sort(runs.begin(), runs.end());
    CHECK(l["median_ms"].get<double>() == runs[1]);
  }
  CHECK(timing == 24);
  CHECK(lines.back()["kind"] == "speedup");
  CHECK_FALSE(table.str().empty());
}

TEST_CASE("bench rejects empty corpora and bad repeat") {
  test::TempDir in;
  std::ostringstream out, table;
  CHECK(cli::run_bench(in.path(), 1, out, table) == 1);
  CHECK(cli::run_bench(in.path(), 0, out, table) == 1);
}

TEST_CASE("standalone structuring") {
  test::TempDir dir;
  test::spit(dir / "in.json", R"({
    "regions": [{"bbox": [0, 0, 200, 20], "text": "Payer:ACME Co Payee:Zenith"},
                {"bbox": [0, 40, 60, 20], "text": "Date"}],
    "keywords": ["Payer", "Payee", "Date"]})");
  std::ostringstream out, log;
  CHECK(cli::run_structure(dir / "in.json", std::nullopt, out, log) == 0);
  const json r = json::parse(out.str());
  CHECK(r["fields"] == json{{"Payer", "ACME Co"}, {"Payee", "Zenith"}});
  CHECK(r["unresolved"] == json::array({"Date"}));

  CHECK(cli::run_structure(dir / "in.json", dir / "out.json", out, log) == 0);
  CHECK(read_json_file(dir / "out.json") == r);

  test::spit(dir / "bad.json", R"({"regions": []})");
  CHECK(cli::run_structure(dir / "bad.json", std::nullopt, out, log) == 1);
}

TEST_CASE("binary exit codes") {
  test::TempDir in, out;
  CHECK(tool("process --input " + in.path().string() + " --out " + (out / "o").string() + " --config " +
             kConfig.string()) == 0);
  test::spit(in / "x.json", "[]");
  CHECK(tool("process --input " + in.path().string() + " --out " + (out / "o").string() + " --config " +
             kConfig.string()) == 2);
  CHECK(tool("bench --corpus " + out.path().string() + " --repeat 1") == 1);
  CHECK(tool("gen --spec " + (in / "nope.json").string() + " --out " + out.path().string() + " --seed 1") == 1);
  CHECK(tool("frobnicate") != 0);
}
