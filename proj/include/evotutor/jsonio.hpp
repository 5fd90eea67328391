#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evotutor/core.hpp"

namespace evotutor {

using Json = nlohmann::json;

// Canonical rendering: object keys sorted (nlohmann's default object is a
// std::map, so iteration is already ordered), no whitespace, and every
// floating-point number printed with 9 significant digits. Replayed runs must
// produce byte-identical files, so all persisted records go through this.
inline void canonical_dump_to(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump();
        out.push_back(':');
        canonical_dump_to(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& el : j) {
        if (!first) out.push_back(',');
        first = false;
        canonical_dump_to(el, out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) throw Error(Errc::input, "non-finite number in canonical output");
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.9g", v);
      out += buf;
      break;
    }
    default:
      out += j.dump();
      break;
  }
}

inline std::string canonical_dump(const Json& j) {
  std::string out;
  canonical_dump_to(j, out);
  return out;
}

inline void write_lines(const std::string& path, const std::vector<Json>& records) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::input, "cannot open for writing: " + path);
  for (const auto& r : records) f << canonical_dump(r) << '\n';
}

inline void append_line(const std::string& path, const Json& record) {
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (!f) throw Error(Errc::input, "cannot open for appending: " + path);
  f << canonical_dump(record) << '\n';
}

inline std::vector<Json> read_lines(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::input, "cannot open for reading: " + path);
  std::vector<Json> records;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    records.push_back(Json::parse(line));
  }
  return records;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::input, "cannot open for reading: " + path);
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::input, "cannot open for writing: " + path);
  f << content;
}

}  // namespace evotutor
