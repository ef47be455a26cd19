#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ftrs/config.hpp"
#include "ftrs/fixtures.hpp"

namespace ftrs::test {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ftrs_test_" + std::to_string(rd()) + "_" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream(p, std::ios::binary) << content;
}

inline RawTicketImage make_fixture(const std::string& category, int index = 1, std::uint64_t seed = 0,
                                   double conf = 1.0) {
  return generate_fixture(*default_layout(category), default_registry(), seed, index, conf);
}

inline FixtureSpec default_layout_spec() {
  FixtureSpec spec;
  for (const char* c : {"VAT ticket", "toll ticket", "quota ticket", "train ticket", "taxi ticket", "bank receipt"})
    spec.categories.push_back(*default_layout(c));
  return spec;
}

/// Seconds elapsed since construction.
class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace ftrs::test
