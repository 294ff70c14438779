#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dcos/tuning.hpp"

namespace dcos {

// Flat "key = value" configuration; '#' starts a comment.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  // comma-separated list; a single entry is broadcast to length d when d > 0
  std::vector<double> numbers(const std::string& key, std::size_t d = 0) const;
  std::vector<long> integers(const std::string& key) const;
  // rows separated by ';'
  std::vector<std::vector<double>> matrix(const std::string& key) const;
  std::size_t list_length(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { price, cdf, moment, tune, convergence, compare_mc };

Command parse_command(const std::string& name);
std::string command_name(Command command);

struct JobOptions {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool strict = false;
};

struct JobConfig {
  Command command;
  Config config;
  JobOptions options;
};

std::size_t config_dimension(const Config& config);
Problem build_problem(const Config& config, std::size_t d);
Tolerance build_tolerance(const Config& config);

// Exit status: 0 success, 1 configuration error, 2 numerical failure, 3 strict-mode plateau.
int run_job(const JobConfig& job, std::ostream& out, std::ostream& err);

std::string format_double(double x);

}  // namespace dcos
