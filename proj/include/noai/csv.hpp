#pragma once

// Minimal RFC 4180 reading and writing. Category names such as
// "Computer Science, Information Systems" need quoting, so plain splitting on
// commas is not enough.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noai/error.hpp"

namespace noai::csv {

/// Reads one record from `in`. Quoted fields may contain commas, doubled
/// quotes and line breaks. Returns nullopt at end of input. `line` is
/// advanced by the number of physical lines consumed.
inline std::optional<std::vector<std::string>> read_row(std::istream& in, std::size_t& line) {
  std::string physical;
  if (!std::getline(in, physical)) return std::nullopt;
  ++line;
  const std::size_t start_line = line;

  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t i = 0;
  for (;;) {
    if (i == physical.size()) {
      if (quoted) {
        if (!std::getline(in, physical)) {
          throw MalformedRow(start_line, "unterminated quoted field");
        }
        ++line;
        field.push_back('\n');
        i = 0;
        continue;
      }
      break;
    }
    const char c = physical[i++];
    if (quoted) {
      if (c == '"') {
        if (i < physical.size() && physical[i] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      if (!field.empty() || was_quoted) {
        throw MalformedRow(start_line, "unexpected quote inside unquoted field");
      }
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\r' && i == physical.size()) {
      // tolerate CRLF
    } else {
      if (was_quoted) throw MalformedRow(start_line, "text after closing quote");
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

inline bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline std::string escape(std::string_view s) {
  if (!needs_quoting(s)) return std::string(s);
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Joins already-formatted cells, escaping each.
inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(cells[i]);
  }
  return out;
}

}  // namespace noai::csv
