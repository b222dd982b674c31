#pragma once

#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

// Thin checked accessors over yaml-cpp for the structured-text file family
// (plan, model, observation store, policy). All failures surface as
// beacon::FormatError.
namespace beacon::yaml {

YAML::Node load(std::string_view document, std::string_view what);
std::string emit(const YAML::Node& root);

YAML::Node require(const YAML::Node& node, const char* key);
std::string require_scalar(const YAML::Node& node, const char* key);
YAML::Node require_seq(const YAML::Node& node, const char* key);
YAML::Node require_map(const YAML::Node& node, const char* key);
double require_double(const YAML::Node& node, const char* key);
void require_version(const YAML::Node& root, const char* key, int version);

// Sequence of strings; absent key gives an empty list.
std::vector<std::string> string_list(const YAML::Node& node, const char* key);

}  // namespace beacon::yaml
