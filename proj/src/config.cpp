#include "l80/kv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "l80/errors.hpp"

namespace l80 {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(int line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text, bool allow_sections) {
  std::vector<KeyValue> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (!allow_sections) throw ConfigError(where(line_no) + "sections are not allowed here");
      if (line.back() != ']') throw ConfigError(where(line_no) + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(where(line_no) + "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where(line_no) + "expected key = value");
    KeyValue kv{section, std::string(trim(line.substr(0, eq))),
                std::string(trim(line.substr(eq + 1))), line_no};
    if (kv.key.empty()) throw ConfigError(where(line_no) + "empty key");
    if (!seen.emplace(kv.section, kv.key).second) {
      throw ConfigError(where(line_no) + "duplicate key '" + kv.key + "'");
    }
    out.push_back(std::move(kv));
  }
  return out;
}

double parse_double(const KeyValue& kv) {
  const char* begin = kv.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ConfigError(where(kv.line) + "'" + kv.key + "' expects a number, got '" + kv.value + "'");
  }
  return v;
}

long long parse_integer(const KeyValue& kv) {
  long long v = 0;
  const auto* first = kv.value.data();
  const auto* last = first + kv.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError(where(kv.line) + "'" + kv.key + "' expects an integer, got '" + kv.value + "'");
  }
  return v;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace l80
