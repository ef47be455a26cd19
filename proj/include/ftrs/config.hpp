#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ftrs/types.hpp"

namespace ftrs {

/// Names the implementation serving each backend interface.
struct BackendSpec {
  std::string rotation = "fixture";  // fixture | hough
  int hough_top_k = 8;
  std::string classifier = "fixture";
  std::string recognition = "fixture";
  std::string entry = "rules";
};

struct LoadedConfig {
  PipelineConfig pipeline;
  BackendSpec backends;
};

CategoryRegistry default_registry();
std::vector<std::string> default_subjects();
std::vector<EntryRule> demo_entry_rules();
std::vector<std::string> default_entry_field_order();
PipelineConfig default_config();

/// Throws InvalidConfig on violated invariants.
void validate(const PipelineConfig& cfg);

CategoryRegistry registry_from_json(const json& j);
json registry_to_json(const CategoryRegistry& reg);
std::vector<EntryRule> rules_from_json(const json& j);
json rules_to_json(const std::vector<EntryRule>& rules);
BackendSpec backends_from_json(const json& j);
json backends_to_json(const BackendSpec& spec);

/// String values for registry/subjects/entry_rules/backends are file paths
/// relative to `base_dir`; objects and arrays are taken inline.
LoadedConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {});
LoadedConfig load_config(const std::filesystem::path& path);
json config_to_json(const PipelineConfig& cfg, const BackendSpec& backends = {});

json read_json_file(const std::filesystem::path& path);

}  // namespace ftrs
