#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dpm/timeline.hpp"

namespace dpm {

/// Flat `section.key = value` store read from INI-like text:
///
///     # comment
///     [camera]
///     width = 256
///
/// Keys before the first section header have no prefix.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;  // 0 for overrides
  };

  /// Throws ConfigError with the offending line number.
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  /// Applies a `section.key=value` override.
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value, int line = 0);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }
  /// Directory relative paths in the file resolve against.
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_ = "<config>";
  std::filesystem::path base_dir_;
};

/// Defaults overlaid with every recognised key. Unknown keys and
/// malformed values raise ConfigError naming the line; the result is
/// validated.
SimConfig to_sim_config(const Config& config);

/// Every key with its resolved value; parsing it back reproduces `config`
/// exactly.
std::string snapshot(const SimConfig& config);

}  // namespace dpm
