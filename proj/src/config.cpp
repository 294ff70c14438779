#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dcos/cli.hpp"

namespace dcos {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': not a number: '" + s + "'");
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.family",        "model.dimension",       "model.parameterization",
      "model.eta",           "model.covariance",      "model.sigma",
      "model.correlation",   "model.theta",           "model.nu",
      "model.a",             "model.s",               "market.spot",
      "market.rate",         "market.maturity",       "payoff.kind",
      "payoff.y",            "payoff.strike",         "damping.alpha",
      "damping.alpha_positive", "damping.alpha_negative", "damping.sweep", "tolerance.epsilon",
      "tolerance.moment_order", "tolerance.n_max",    "tolerance.l_over_m",
      "cos.n",               "cos.l",                 "cos.m",
      "smoothness.s",        "convergence.beta",      "convergence.gamma",
      "convergence.n",       "convergence.fit_min",   "convergence.fit_max",
      "convergence.maturity", "convergence.reference", "convergence.oracle_n",
      "mc.paths",            "mc.seed",               "compare.dimension",
      "compare.n",           "compare.l",             "compare.epsilon"};
  return keys;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  c.source_ = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
    if (c.values_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse(in, path);
}

std::string Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  return it->second;
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const { return to_double(key, text(key)); }

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v)) throw ConfigError("'" + key + "': expected an integer");
  return static_cast<long>(v);
}

std::vector<double> Config::numbers(const std::string& key, std::size_t d) const {
  std::vector<double> out;
  for (const auto& part : split(text(key), ',')) out.push_back(to_double(key, part));
  if (d > 0 && out.size() == 1) out.assign(d, out[0]);
  if (d > 0 && out.size() != d)
    throw ConfigError("'" + key + "': expected " + std::to_string(d) + " entries, got " +
                      std::to_string(out.size()));
  return out;
}

std::vector<long> Config::integers(const std::string& key) const {
  std::vector<long> out;
  for (double v : numbers(key)) {
    if (v != std::floor(v)) throw ConfigError("'" + key + "': expected integers");
    out.push_back(static_cast<long>(v));
  }
  return out;
}

std::vector<std::vector<double>> Config::matrix(const std::string& key) const {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text(key), ';')) {
    std::vector<double> r;
    for (const auto& part : split(row, ',')) r.push_back(to_double(key, part));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::size_t Config::list_length(const std::string& key) const { return split(text(key), ',').size(); }

Command parse_command(const std::string& name) {
  if (name == "price") return Command::price;
  if (name == "cdf") return Command::cdf;
  if (name == "moment") return Command::moment;
  if (name == "tune") return Command::tune;
  if (name == "convergence") return Command::convergence;
  if (name == "compare-mc") return Command::compare_mc;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command command) {
  switch (command) {
    case Command::price: return "price";
    case Command::cdf: return "cdf";
    case Command::moment: return "moment";
    case Command::tune: return "tune";
    case Command::convergence: return "convergence";
    case Command::compare_mc: return "compare-mc";
  }
  return "?";
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace dcos
