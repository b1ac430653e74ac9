#pragma once

#include <ctime>
#include <map>
#include <string>

#include "ltcprune/errors.hpp"
#include "ltcprune/jsonio.hpp"
#include "ltcprune/numeric.hpp"
#include "ltcprune/version.hpp"

namespace ltcprune {

// One per CLI invocation. The config snapshot plus args are sufficient to
// re-run the command; the run id hashes exactly those reproducibility-
// relevant fields (never the timestamp).
struct RunManifest {
  std::string run_id;
  std::string command;
  std::string config_text;  // canonical effective config
  std::map<std::string, std::string> args;       // resolved inputs (paths, flags)
  std::map<std::string, std::string> artifacts;  // name -> written path
  std::string tool_version = kToolVersion;
  std::string created;  // wall-clock; informational only
  std::size_t warnings = 0;
};

inline std::string make_run_id(const std::string& command,
                               const std::string& config_text,
                               const std::map<std::string, std::string>& args) {
  std::string blob = command;
  blob += '\x1f';
  blob += config_text;
  for (const auto& [k, v] : args) {
    blob += '\x1f';
    blob += k;
    blob += '=';
    blob += v;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(blob)));
  return buf;
}

inline std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
#if defined(_WIN32)
  gmtime_s(&tm, &now);
#else
  gmtime_r(&now, &tm);
#endif
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string manifest_json_text(const RunManifest& m) {
  JNode root = JNode::obj();
  root.add("schema_version", JNode::i(kSchemaVersion));
  root.add("run_id", JNode::s(m.run_id));
  root.add("command", JNode::s(m.command));
  root.add("tool_version", JNode::s(m.tool_version));
  root.add("created", JNode::s(m.created));
  root.add("warnings", JNode::u(m.warnings));
  JNode args = JNode::obj();
  for (const auto& [k, v] : m.args) args.add(k, JNode::s(v));
  root.add("args", std::move(args));
  JNode artifacts = JNode::obj();
  for (const auto& [k, v] : m.artifacts) artifacts.add(k, JNode::s(v));
  root.add("artifacts", std::move(artifacts));
  root.add("config_text", JNode::s(m.config_text));
  return dump_json(root);
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
  write_text_file(path, manifest_json_text(m));
}

inline RunManifest read_manifest(const std::string& path) {
  const auto j = read_json_file(path);
  RunManifest m;
  m.run_id = json_get<std::string>(j, "run_id");
  m.command = json_get<std::string>(j, "command");
  m.tool_version = json_get<std::string>(j, "tool_version");
  m.created = json_get<std::string>(j, "created");
  m.warnings = json_get<std::size_t>(j, "warnings");
  m.config_text = json_get<std::string>(j, "config_text");
  // Bind before iterating: .items() on a temporary json dangles.
  const auto args = json_get<nlohmann::json>(j, "args");
  for (const auto& [k, v] : args.items()) m.args[k] = v.get<std::string>();
  const auto artifacts = json_get<nlohmann::json>(j, "artifacts");
  for (const auto& [k, v] : artifacts.items())
    m.artifacts[k] = v.get<std::string>();
  return m;
}

}  // namespace ltcprune
