#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ftrs/cli.hpp"
#include "ftrs/error.hpp"
#include "ftrs/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"financial ticket recognition"};
  app.require_subcommand(1);

  std::string input, out, config, spec, corpus, service_cfg;
  std::optional<std::uint64_t> seed;
  std::uint64_t gen_seed = 0;
  int repeat = 1;

  auto* process = app.add_subcommand("process", "run the pipeline over a fixture directory");
  process->add_option("--input", input, "fixture directory")->required();
  process->add_option("--out", out, "JSON-lines output file")->required();
  process->add_option("--config", config, "pipeline config file")->required();
  process->add_option("--seed", seed, "recognition noise seed");

  auto* gen = app.add_subcommand("gen", "generate a fixture corpus");
  gen->add_option("--spec", spec, "fixture spec file")->required();
  gen->add_option("--out", out, "output directory")->required();
  gen->add_option("--seed", gen_seed, "generator seed");

  auto* bench = app.add_subcommand("bench", "time type-routed against full-surface processing");
  bench->add_option("--corpus", corpus, "fixture directory")->required();
  bench->add_option("--repeat", repeat, "runs per ticket and arm")->check(CLI::PositiveNumber);

  auto* structure = app.add_subcommand("structure", "match keywords against text regions");
  structure->add_option("--input", input, "{regions, keywords} file")->required();
  structure->add_option("--out", out, "output file (default stdout)");

  auto* serve = app.add_subcommand("serve", "start the HTTP service");
  serve->add_option("--config", service_cfg, "service config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*process) return ftrs::cli::run_batch(input, out, config, seed, std::cerr);
    if (*gen) return ftrs::cli::gen_fixtures(spec, out, gen_seed, std::cerr);
    if (*bench) return ftrs::cli::run_bench(corpus, repeat, std::cout, std::cerr);
    if (*structure) {
      std::optional<std::filesystem::path> dest;
      if (!out.empty()) dest = out;
      return ftrs::cli::run_structure(input, dest, std::cout, std::cerr);
    }
    if (*serve) return ftrs::serve(ftrs::load_service_config(service_cfg));
  } catch (const ftrs::Error& e) {
    std::cerr << "error: " << ftrs::to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
