#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ftrs::cli {

struct BatchSummary {
  std::size_t processed = 0, accepted = 0, needs_audit = 0, errors = 0;
  std::optional<double> p_char, p_ticket;
};

/// Exit 0 on success, 1 for an unusable config, 2 when any fixture failed.
int run_batch(const std::filesystem::path& input, const std::filesystem::path& out,
              const std::filesystem::path& config, std::optional<std::uint64_t> seed, std::ostream& log,
              BatchSummary* summary = nullptr);

int gen_fixtures(const std::filesystem::path& spec, const std::filesystem::path& out, std::uint64_t seed,
                 std::ostream& log);

/// JSON lines on `out`, aligned tables on `table`.
int run_bench(const std::filesystem::path& corpus, int repeat, std::ostream& out, std::ostream& table);

int run_structure(const std::filesystem::path& input, const std::optional<std::filesystem::path>& out,
                  std::ostream& stdout_stream, std::ostream& log);

}  // namespace ftrs::cli
