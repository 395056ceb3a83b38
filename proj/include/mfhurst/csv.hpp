#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mfhurst/errors.hpp"

namespace mfhurst {

// Shortest decimal form that round-trips through binary64. All CSV and JSON
// exports use this so reruns are byte-identical.
inline std::string format_double(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline bool try_parse_double(std::string_view text, double& out) {
  // tolerate surrounding spaces and digit-group commas ("43,432.5")
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == ',') continue;
    cleaned.push_back(c);
  }
  if (cleaned.empty()) return false;
  const char* first = cleaned.data();
  const char* last = first + cleaned.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

// Splits one CSV record. Double quotes wrap fields that may contain the
// delimiter; "" inside a quoted field is an escaped quote.
inline std::vector<std::string> split_csv_line(std::string_view line,
                                               char delimiter = ',') {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && current.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return std::string(s.substr(b, e - b));
}

// Reads a whole text file, dropping blank lines and '#' comment lines.
// Returned pairs are (1-based line number, line content).
inline std::vector<std::pair<std::size_t, std::string>> read_lines(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::FileNotFound, "cannot open file: " + path);
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    lines.emplace_back(number, std::move(line));
  }
  return lines;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open for writing: " + path);
  out << content;
  if (!out) raise(ErrorCode::IoError, "write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::FileNotFound, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a 64-bit. Used for manifest checksums of inputs and outputs;
// accidental-change detection, not cryptographic integrity.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

}  // namespace mfhurst
