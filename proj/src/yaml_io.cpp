#include "beacon/yaml_io.hpp"

#include "beacon/error.hpp"
#include "beacon/text.hpp"

namespace beacon::yaml {

YAML::Node load(std::string_view document, std::string_view what) {
  try {
    auto root = YAML::Load(std::string(document));
    if (!root.IsMap()) throw FormatError(std::string(what) + " document is not a key-value map");
    return root;
  } catch (const YAML::Exception& e) {
    throw FormatError(std::string(what) + " document: " + e.what());
  }
}

std::string emit(const YAML::Node& root) {
  YAML::Emitter out;
  out << root;
  std::string s = out.c_str();
  s += '\n';
  return s;
}

YAML::Node require(const YAML::Node& node, const char* key) {
  if (!node.IsMap() || !node[key]) throw FormatError(std::string("missing key '") + key + "'");
  return node[key];
}

std::string require_scalar(const YAML::Node& node, const char* key) {
  const auto n = require(node, key);
  if (!n.IsScalar()) throw FormatError(std::string("key '") + key + "' must be a scalar");
  return n.as<std::string>();
}

YAML::Node require_seq(const YAML::Node& node, const char* key) {
  const auto n = require(node, key);
  if (!n.IsSequence()) throw FormatError(std::string("key '") + key + "' must be a list");
  return n;
}

YAML::Node require_map(const YAML::Node& node, const char* key) {
  const auto n = require(node, key);
  if (!n.IsMap()) throw FormatError(std::string("key '") + key + "' must be a map");
  return n;
}

double require_double(const YAML::Node& node, const char* key) {
  const auto s = require_scalar(node, key);
  const auto v = text::parse_double(s);
  if (!v) throw FormatError(std::string("key '") + key + "' is not a number: " + s);
  return *v;
}

void require_version(const YAML::Node& root, const char* key, int version) {
  if (!root[key]) throw FormatError(std::string("missing header '") + key + "'");
  const auto s = root[key].as<std::string>();
  if (s != std::to_string(version))
    throw FormatError(std::string("unsupported ") + key + " " + s + " (expected " + std::to_string(version) + ")");
}

std::vector<std::string> string_list(const YAML::Node& node, const char* key) {
  std::vector<std::string> out;
  if (!node[key]) return out;
  const auto n = node[key];
  if (!n.IsSequence()) throw FormatError(std::string("key '") + key + "' must be a list");
  for (const auto& item : n) out.push_back(item.as<std::string>());
  return out;
}

}  // namespace beacon::yaml
