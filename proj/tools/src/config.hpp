#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace owlab::cli {

// Bad or missing configuration; maps to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "section.key = value" lines; '#' starts a comment; lists are comma separated.
class Config {
 public:
  static Config parse(std::istream& is);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> nums(const std::string& key) const;
  std::vector<double> nums(const std::string& key, std::vector<double> fallback) const;
  std::vector<long long> integers(const std::string& key) const;
  std::vector<long long> integers(const std::string& key, std::vector<long long> fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Parses a number the way the config does ("inf" allowed, hex integers allowed for seeds).
double parse_number(const std::string& text, const std::string& key);
long long parse_integer(const std::string& text, const std::string& key);

}  // namespace owlab::cli
