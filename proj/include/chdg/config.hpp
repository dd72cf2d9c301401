#pragma once

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace chdg {

/// Flat `key = value` settings. Lines starting with '#' and trailing
/// '# ...' comments are ignored. Later assignments win.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<input>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// "key=value" from the command line.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Keys that were set but never read through a getter.
  std::vector<std::string> unused_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> read_;
};

}  // namespace chdg
