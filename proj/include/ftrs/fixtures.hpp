#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ftrs/error.hpp"
#include "ftrs/types.hpp"

namespace ftrs {

/// A fixture document that fails validation; `path` is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(ErrorCode::SchemaViolation, path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

RawTicketImage fixture_from_json(const json& j);
json fixture_to_json(const RawTicketImage& image);
RawTicketImage load_fixture(const std::filesystem::path& path);

/// Content hash of the canonical fixture document, as 16 hex digits.
std::string fixture_digest(const RawTicketImage& image);

struct CategoryLayout {
  std::string category;
  int count = 0;
  int width = 0;
  int height = 0;
  int text_regions = 0;
};

struct FixtureSpec {
  std::vector<CategoryLayout> categories;
  double category_conf = 1.0;
  bool edges = false;
};

/// Table-6 sized layout for the shipped categories; nullopt otherwise.
std::optional<CategoryLayout> default_layout(const std::string& category);

FixtureSpec fixture_spec_from_json(const json& j, const CategoryRegistry& registry);
json fixture_spec_to_json(const FixtureSpec& spec);

struct GeneratedCorpus {
  std::vector<std::pair<std::string, RawTicketImage>> files;  // file name, fixture
  json manifest;
  std::vector<std::string> warnings;
};

/// One upright fixture with a title anchor in the top band. Type I/II
/// fixtures pair a label region with a value region per field; type III
/// fixtures mix inline "keyword:value" lines with split key/value pairs.
RawTicketImage generate_fixture(const CategoryLayout& layout, const CategoryRegistry& registry, std::uint64_t seed,
                                int index, double category_conf = 1.0, bool edges = false);

GeneratedCorpus generate_corpus(const FixtureSpec& spec, const CategoryRegistry& registry, std::uint64_t seed);

/// Writes fixtures and manifest.json into `dir`.
void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir);

/// Text-line strokes: one horizontal run through each region's centre.
EdgeRaster draw_line_edges(int width, int height, const std::vector<TextRegion>& regions);

/// Small upright fixture for the orientation suites: edge raster plus an
/// anchor title in the top band.
RawTicketImage rotation_fixture(std::uint64_t seed, int index);

}  // namespace ftrs
