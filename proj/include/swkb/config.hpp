#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace swkb {

/// Flat key=value configuration. Blank lines and lines starting with '#' are ignored.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  /// Entries in sorted key order, used for hashing.
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

double parse_number(const std::string& text);
std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);

}  // namespace swkb
