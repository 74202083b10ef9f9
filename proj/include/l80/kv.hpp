#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace l80 {

/// One `key = value` line of a flat text file. `section` is empty outside
/// any `[section]` header.
struct KeyValue {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
/// Duplicate keys within a section and malformed lines raise ConfigError.
std::vector<KeyValue> parse_key_values(std::string_view text, bool allow_sections);

double parse_double(const KeyValue& kv);
long long parse_integer(const KeyValue& kv);

std::string read_text_file(const std::string& path);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace l80
