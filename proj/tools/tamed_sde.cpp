/// Command-line front end: rate, simulate, check and moments subcommands over
/// the tamed-scheme library. All numerical work lives in the library; this
/// file only parses flags into a PartialConfig and dispatches.

#include "tamed/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CliLayer {
  tamed::PartialConfig partial;
  std::optional<std::string> config_path;
};

/// Registers the shared flag set on a subcommand; every flag writes into the
/// PartialConfig only when the user actually passed it, preserving the
/// precedence CLI > config file > environment seed > defaults.
void add_common_flags(CLI::App* cmd, CliLayer& layer) {
  auto& p = layer.partial;
  cmd->add_option_function<std::string>(
         "--problem", [&p](const std::string& v) { p.problem = v; },
         "Problem name: ginzburg, holder or ou");
  cmd->add_option_function<double>(
         "--xi", [&p](double v) { p.xi = v; }, "Diffusion scale parameter");
  cmd->add_option_function<std::string>(
         "--scheme", [&p](const std::string& v) { p.scheme = v; },
         "Scheme: euler, milstein or taylor15");
  cmd->add_flag_callback(
         "--no-taming", [&p] { p.taming = false; },
         "Disable the taming factor (same step code, factor 1)");
  cmd->add_option_function<std::string>(
         "--n-list", [&p](const std::string& v) { p.N_list = tamed::parse_n_list(v); },
         "Comma-separated step counts, e.g. 16,32,64");
  cmd->add_option_function<int>(
         "--n-ref", [&p](int v) { p.N_ref = v; }, "Reference step count");
  cmd->add_option_function<int>(
         "--paths", [&p](int v) { p.paths = v; }, "Monte Carlo path count");
  cmd->add_option_function<std::uint64_t>(
         "--seed", [&p](std::uint64_t v) { p.seed = v; }, "Master seed");
  cmd->add_option_function<int>(
         "--threads", [&p](int v) { p.threads = v; },
         "Worker pool size (0 = hardware); results are identical for any value");
  cmd->add_option_function<std::string>(
         "--out", [&p](const std::string& v) { p.out = v; }, "Output file stem");
  cmd->add_option_function<std::string>(
         "--format", [&p](const std::string& v) { p.format = v; },
         "Output format: csv or json");
  cmd->add_option_function<std::string>(
         "--config", [&layer](const std::string& v) { layer.config_path = v; },
         "JSON config file (lower precedence than flags)");
  cmd->add_flag_callback(
         "--override", [&p] { p.override_ranges = true; },
         "Allow xi outside the admissible range");
  cmd->add_option_function<double>(
         "--x0", [&p](double v) { p.x0 = v; }, "Initial state override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tamed explicit schemes (Euler, Milstein, order-1.5 Taylor) for "
               "SDEs with superlinearly growing coefficients"};
  app.require_subcommand(1);

  CliLayer layer;
  CLI::App* rate = app.add_subcommand(
      "rate", "Strong-error sweep over N with a log2-log2 rate fit");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Terminal states of independent paths at a single N");
  CLI::App* check = app.add_subcommand(
      "check", "Parameter ranges and growth/monotonicity condition checks");
  CLI::App* moments = app.add_subcommand(
      "moments", "E|X_T|^4 per N, tamed vs untamed");
  for (CLI::App* cmd : {rate, simulate, check, moments}) add_common_flags(cmd, layer);

  CLI11_PARSE(app, argc, argv);

  try {
    const tamed::RunConfig config = tamed::resolve_config(layer.partial, layer.config_path);
    if (rate->parsed()) return tamed::cmd_rate(config);
    if (simulate->parsed()) return tamed::cmd_simulate(config);
    if (check->parsed()) return tamed::cmd_check(config);
    return tamed::cmd_moments(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
