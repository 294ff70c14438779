#include <iostream>

#include <CLI11.hpp>

#include "dcos/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Damped COS method: CDFs, absolute moments and rainbow option prices"};
  std::string command;
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool strict = false;
  app.add_option("command", command, "price | cdf | moment | tune | convergence | compare-mc")
      ->required()
      ->check(CLI::IsMember({"price", "cdf", "moment", "tune", "convergence", "compare-mc"}));
  app.add_option("--config", config_path, "problem configuration file")->required();
  auto* out_opt = app.add_option("--out", out_path, "CSV output path");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--threads", threads, "worker threads (default: machine parallelism)");
  app.add_flag("--strict", strict, "treat a Parseval plateau as a failure");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  dcos::JobConfig job{dcos::parse_command(command), {}, {}};
  try {
    job.config = dcos::Config::load(config_path);
  } catch (const std::exception& e) {
    std::cerr << "cosctl: config error: " << e.what() << "\n";
    return 1;
  }
  if (*out_opt) job.options.out = out_path;
  if (*seed_opt) job.options.seed = seed;
  job.options.threads = threads;
  job.options.strict = strict;
  return dcos::run_job(job, std::cout, std::cerr);
}
