#pragma once

// Writing goes through a small insertion-ordered DOM so artifacts are
// byte-deterministic (fixed key order, %.17g floats). Reading uses the
// vendored nlohmann parser via read_json_file below.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ltcprune/errors.hpp"
#include "ltcprune/numeric.hpp"

#include "json.hpp"

namespace ltcprune {

struct JNode {
  enum class Type { object, array, string, number, integer, uinteger, boolean, null_ };
  Type type = Type::null_;
  std::vector<std::pair<std::string, JNode>> members;  // object
  std::vector<JNode> items;                            // array
  std::string str;
  double num = 0.0;
  long long inum = 0;
  unsigned long long unum = 0;
  bool flag = false;

  static JNode obj() { JNode n; n.type = Type::object; return n; }
  static JNode arr() { JNode n; n.type = Type::array; return n; }
  static JNode s(std::string v) { JNode n; n.type = Type::string; n.str = std::move(v); return n; }
  static JNode d(double v) { JNode n; n.type = Type::number; n.num = v; return n; }
  static JNode i(long long v) { JNode n; n.type = Type::integer; n.inum = v; return n; }
  static JNode u(unsigned long long v) { JNode n; n.type = Type::uinteger; n.unum = v; return n; }
  static JNode b(bool v) { JNode n; n.type = Type::boolean; n.flag = v; return n; }

  JNode& add(const std::string& key, JNode child) {
    members.emplace_back(key, std::move(child));
    return members.back().second;
  }
  JNode& push(JNode child) {
    items.push_back(std::move(child));
    return items.back();
  }

  static JNode dvec(const std::vector<double>& v) {
    JNode n = arr();
    n.items.reserve(v.size());
    for (double x : v) n.push(d(x));
    return n;
  }
  static JNode svec(const std::vector<std::string>& v) {
    JNode n = arr();
    n.items.reserve(v.size());
    for (const auto& x : v) n.push(s(x));
    return n;
  }
};

namespace detail {

inline void json_escape(const std::string& in, std::string& out) {
  for (char c : in) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
}

inline void dump_json(const JNode& n, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad1(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (n.type) {
    case JNode::Type::object: {
      if (n.members.empty()) { out += "{}"; return; }
      out += "{\n";
      for (std::size_t i = 0; i < n.members.size(); ++i) {
        out += pad1;
        out += '"';
        json_escape(n.members[i].first, out);
        out += "\": ";
        dump_json(n.members[i].second, out, indent + 1);
        if (i + 1 < n.members.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += '}';
      return;
    }
    case JNode::Type::array: {
      if (n.items.empty()) { out += "[]"; return; }
      out += "[\n";
      for (std::size_t i = 0; i < n.items.size(); ++i) {
        out += pad1;
        dump_json(n.items[i], out, indent + 1);
        if (i + 1 < n.items.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += ']';
      return;
    }
    case JNode::Type::string:
      out += '"';
      json_escape(n.str, out);
      out += '"';
      return;
    case JNode::Type::number:
      // JSON has no NaN/Inf; represent them as null.
      if (std::isfinite(n.num)) out += format_double(n.num);
      else out += "null";
      return;
    case JNode::Type::integer: out += std::to_string(n.inum); return;
    case JNode::Type::uinteger: out += std::to_string(n.unum); return;
    case JNode::Type::boolean: out += n.flag ? "true" : "false"; return;
    case JNode::Type::null_: out += "null"; return;
  }
}

}  // namespace detail

inline std::string dump_json(const JNode& n) {
  std::string out;
  detail::dump_json(n, out, 0);
  out += '\n';
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw data_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw data_error("malformed JSON in " + path + ": " + e.what());
  }
}

// Strict field access: missing/ill-typed keys are data errors naming the key.
template <typename T>
T json_get(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw data_error("missing JSON field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw data_error("JSON field '" + key + "' has the wrong type");
  }
}

}  // namespace ltcprune
