#pragma once

#include "tamed/experiments.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tamed {

/// A fully resolved run configuration. Optional fields in PartialConfig
/// below override these defaults with precedence
///   command line > JSON config file > TAMED_TAYLOR_SEED (seed only) > defaults,
/// and the resolved copy is echoed into every output file's metadata.
struct RunConfig {
  std::string problem = "ginzburg";
  double xi = 0.02;
  std::string scheme = "taylor15";
  bool taming = true;
  std::vector<int> N_list = {16, 32, 64, 128, 256, 512};
  int N_ref = 8192;
  int paths = 1000;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out;  ///< output stem; empty means "<subcommand>_<problem>_<scheme>"
  std::string format = "csv";
  bool override_ranges = false;
  /// Initial-state override (all components); NaN keeps the problem default.
  /// Needed to drive the divergence demonstrations from the command line.
  double x0 = std::numeric_limits<double>::quiet_NaN();

  /// Throws std::invalid_argument on out-of-domain values (empty N_list,
  /// paths < 1, unknown scheme/problem/format, threads < 0).
  void validate() const;
};

/// The same fields, all optional; unset fields inherit from the layer below.
struct PartialConfig {
  std::optional<std::string> problem;
  std::optional<double> xi;
  std::optional<std::string> scheme;
  std::optional<bool> taming;
  std::optional<std::vector<int>> N_list;
  std::optional<int> N_ref;
  std::optional<int> paths;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<bool> override_ranges;
  std::optional<double> x0;
};

/// Parses a comma-separated step-count list such as "16,32,64".
std::vector<int> parse_n_list(const std::string& text);

/// Loads a PartialConfig from a JSON file with keys problem, xi, scheme,
/// taming, n_list, n_ref, paths, seed, threads, out, format, override.
PartialConfig load_config_file(const std::string& path);

/// Defaults, overlaid with the config file (if any), the environment seed
/// fallback TAMED_TAYLOR_SEED, and finally the command-line layer.
RunConfig resolve_config(const PartialConfig& cli_layer,
                         const std::optional<std::string>& config_path);

/// Subcommand drivers; each validates, runs, writes its files next to the
/// output stem and prints a short summary to stdout. They return the process
/// exit status (0 on success; for `check` also only when every assumption
/// passes) and report failures on stderr rather than throwing across main.
int cmd_rate(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_check(const RunConfig& config);
int cmd_moments(const RunConfig& config);

}  // namespace tamed
