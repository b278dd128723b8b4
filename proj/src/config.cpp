#include "swkb/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "swkb/error.hpp"

namespace swkb {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    fail(ErrorCode::ConfigParse, "not a number: '" + text + "'");
  }
  return v;
}

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigParse, "line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) fail(ErrorCode::ConfigParse, "line " + std::to_string(lineno) + ": empty key");
    if (kv.entries_.count(key)) {
      fail(ErrorCode::ConfigParse, "line " + std::to_string(lineno) + ": duplicate key " + key);
    }
    kv.entries_[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigParse, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool KeyValues::has(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> KeyValues::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorCode::ConfigParse, "missing key " + key);
  return it->second;
}

double KeyValues::number(const std::string& key) const { return parse_number(get(key)); }

double KeyValues::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int KeyValues::integer(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = number(key);
  if (v != static_cast<int>(v)) fail(ErrorCode::ConfigParse, key + " must be an integer");
  return static_cast<int>(v);
}

bool KeyValues::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::ConfigParse, key + " must be true or false");
}

std::vector<double> KeyValues::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split(get(key), ',')) out.push_back(parse_number(s));
  if (out.empty()) fail(ErrorCode::ConfigParse, key + " is empty");
  return out;
}

std::vector<std::string> KeyValues::strings(const std::string& key) const {
  return split(get(key), ',');
}

void KeyValues::set(const std::string& key, const std::string& value) { entries_[key] = value; }

}  // namespace swkb
