#include "tamed/runner.hpp"

#include "tamed/assumptions.hpp"
#include "tamed/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace tamed {

void RunConfig::validate() const {
  parse_builtin_kind(problem);
  parse_step_kind(scheme);
  if (!std::isfinite(xi)) throw std::invalid_argument("config: xi must be finite");
  if (N_list.empty()) throw std::invalid_argument("config: N list must not be empty");
  for (int N : N_list)
    if (N < 1) throw std::invalid_argument("config: every N must be >= 1");
  if (N_ref < 1) throw std::invalid_argument("config: N_ref must be >= 1");
  if (paths < 1) throw std::invalid_argument("config: paths must be >= 1");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("config: format must be csv or json");
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t consumed = 0;
    int value = 0;
    try {
      value = std::stoi(item, &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse step count '" + item + "'");
    }
    while (consumed < item.size() && std::isspace(static_cast<unsigned char>(item[consumed])))
      ++consumed;
    if (consumed != item.size())
      throw std::invalid_argument("cannot parse step count '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw std::invalid_argument("empty step-count list");
  return out;
}

PartialConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot parse config file '" + path + "': " + e.what());
  }

  PartialConfig c;
  if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
  if (j.contains("xi")) c.xi = j.at("xi").get<double>();
  if (j.contains("scheme")) c.scheme = j.at("scheme").get<std::string>();
  if (j.contains("taming")) c.taming = j.at("taming").get<bool>();
  if (j.contains("n_list")) c.N_list = j.at("n_list").get<std::vector<int>>();
  if (j.contains("n_ref")) c.N_ref = j.at("n_ref").get<int>();
  if (j.contains("paths")) c.paths = j.at("paths").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("format")) c.format = j.at("format").get<std::string>();
  if (j.contains("override")) c.override_ranges = j.at("override").get<bool>();
  if (j.contains("x0")) c.x0 = j.at("x0").get<double>();
  return c;
}

namespace {

void overlay(RunConfig& base, const PartialConfig& layer) {
  if (layer.problem) base.problem = *layer.problem;
  if (layer.xi) base.xi = *layer.xi;
  if (layer.scheme) base.scheme = *layer.scheme;
  if (layer.taming) base.taming = *layer.taming;
  if (layer.N_list) base.N_list = *layer.N_list;
  if (layer.N_ref) base.N_ref = *layer.N_ref;
  if (layer.paths) base.paths = *layer.paths;
  if (layer.seed) base.seed = *layer.seed;
  if (layer.threads) base.threads = *layer.threads;
  if (layer.out) base.out = *layer.out;
  if (layer.format) base.format = *layer.format;
  if (layer.override_ranges) base.override_ranges = *layer.override_ranges;
  if (layer.x0) base.x0 = *layer.x0;
}

std::uint64_t parse_seed_env(const char* text) {
  std::string s(text);
  std::size_t consumed = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(s, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("TAMED_TAYLOR_SEED: cannot parse '" + s + "'");
  }
  if (consumed != s.size())
    throw std::invalid_argument("TAMED_TAYLOR_SEED: cannot parse '" + s + "'");
  return value;
}

Problem make_problem(const RunConfig& config) {
  Problem p = builtin_problem(parse_builtin_kind(config.problem), config.xi,
                              config.override_ranges);
  if (std::isfinite(config.x0)) p.x0.setConstant(config.x0);
  return p;
}

SchemeKind make_scheme(const RunConfig& config) {
  return SchemeKind{parse_step_kind(config.scheme), config.taming};
}

std::string output_stem(const RunConfig& config, const std::string& subcommand) {
  if (!config.out.empty()) return config.out;
  return subcommand + "_" + config.problem + "_" + config.scheme;
}

std::string n_list_string(const std::vector<int>& N_list) {
  std::ostringstream oss;
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (i) oss << ',';
    oss << N_list[i];
  }
  return oss.str();
}

/// Resolved-config echo for file metadata. The worker-pool size is omitted
/// on purpose: results are identical for every pool size, and files must be
/// byte-identical too.
MetadataLines config_metadata(const RunConfig& config) {
  MetadataLines lines;
  lines.emplace_back("xi", format_double(config.xi));
  lines.emplace_back("N_list", n_list_string(config.N_list));
  if (std::isfinite(config.x0)) lines.emplace_back("x0", format_double(config.x0));
  return lines;
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j;
  j["problem"] = config.problem;
  j["xi"] = config.xi;
  j["scheme"] = config.scheme;
  j["taming"] = config.taming;
  j["n_list"] = config.N_list;
  j["n_ref"] = config.N_ref;
  j["paths"] = config.paths;
  j["seed"] = config.seed;
  j["out"] = config.out;
  j["format"] = config.format;
  j["override"] = config.override_ranges;
  if (std::isfinite(config.x0)) j["x0"] = config.x0;
  return j;
}

int run_guarded(const char* name, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << name << ": error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

RunConfig resolve_config(const PartialConfig& cli_layer,
                         const std::optional<std::string>& config_path) {
  RunConfig config;
  if (const char* env = std::getenv("TAMED_TAYLOR_SEED")) config.seed = parse_seed_env(env);
  if (config_path) overlay(config, load_config_file(*config_path));
  overlay(config, cli_layer);
  config.validate();
  return config;
}

int cmd_rate(const RunConfig& config) {
  return run_guarded("rate", [&] {
    const Problem problem = make_problem(config);
    const SchemeKind scheme = make_scheme(config);
    const ErrorTable table = strong_error(problem, scheme, config.N_list, config.N_ref,
                                          config.paths, config.seed, config.threads);
    const RateFit fit = fit_rate(table);
    const double target = 1.0 + problem.beta / 2.0;

    const std::string stem = output_stem(config, "rate");
    write_file(stem + ".csv", error_table_csv(table, config_metadata(config)));
    nlohmann::json j = error_table_json(table, &fit);
    j["config"] = config_json(config);
    j["theoretical_rate"] = target;
    write_file(stem + ".json", j.dump(2) + "\n");
    write_file(stem + ".log2", error_table_log2(table));

    std::cout << "problem " << problem.name << ", scheme " << config.scheme
              << (config.taming ? " (tamed)" : " (untamed)") << "\n"
              << "fitted slope " << fit.slope << "  |  theoretical rate 1 + beta/2 = "
              << target << "\n"
              << "wrote " << stem << ".csv, " << stem << ".json, " << stem << ".log2\n";
    return 0;
  });
}

int cmd_simulate(const RunConfig& config) {
  return run_guarded("simulate", [&] {
    if (config.N_list.size() != 1)
      throw std::invalid_argument(
          "simulate expects exactly one step count (pass --n-list with a single N)");
    const int N = config.N_list.front();
    const Problem problem = make_problem(config);
    const SchemeKind scheme = make_scheme(config);
    const TerminalBatch batch = simulate_terminals(problem, scheme, N, config.paths,
                                                   config.seed, config.threads);

    const std::string stem = output_stem(config, "simulate");
    std::string path;
    if (config.format == "csv") {
      std::ostringstream oss;
      oss << "# problem: " << problem.name << "\n# scheme: " << config.scheme << "\n"
          << "# taming: " << (config.taming ? "on" : "off") << "\n"
          << "# seed: " << config.seed << "\n# N: " << N << "\n"
          << "# paths: " << config.paths << "\n";
      for (const auto& [key, value] : config_metadata(config))
        oss << "# " << key << ": " << value << "\n";
      oss << "# explosions: " << batch.explosion_count << "\n";
      oss << "path";
      for (int k = 0; k < problem.d; ++k)
        oss << ",terminal" << (problem.d > 1 ? "_" + std::to_string(k) : "");
      oss << ",exploded,exploded_at\n";
      for (int i = 0; i < config.paths; ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        oss << i;
        for (int k = 0; k < problem.d; ++k)
          oss << ',' << format_double(batch.terminals[s](k));
        oss << ',' << static_cast<int>(batch.exploded[s]) << ',' << batch.exploded_at[s]
            << "\n";
      }
      path = stem + ".csv";
      write_file(path, oss.str());
    } else {
      nlohmann::json j;
      j["config"] = config_json(config);
      j["N"] = N;
      j["explosions"] = batch.explosion_count;
      j["terminals"] = nlohmann::json::array();
      for (int i = 0; i < config.paths; ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        nlohmann::json row;
        row["path"] = i;
        std::vector<double> terminal(batch.terminals[s].data(),
                                     batch.terminals[s].data() + batch.terminals[s].size());
        row["terminal"] = terminal;
        row["exploded"] = static_cast<bool>(batch.exploded[s]);
        row["exploded_at"] = batch.exploded_at[s];
        j["terminals"].push_back(row);
      }
      path = stem + ".json";
      write_file(path, j.dump(2) + "\n");
    }

    std::cout << "problem " << problem.name << ", scheme " << config.scheme
              << (config.taming ? " (tamed)" : " (untamed)") << ", N = " << N << "\n"
              << config.paths << " paths, " << batch.explosion_count << " exploded\n"
              << "wrote " << path << "\n";
    return 0;
  });
}

int cmd_check(const RunConfig& config) {
  return run_guarded("check", [&] {
    const BuiltinKind kind = parse_builtin_kind(config.problem);
    const ParameterRanges ranges = parameter_ranges(kind);  // rejects the OU problem
    const Problem problem = make_problem(config);
    const double p0 = static_cast<double>(ranges.min_p0);
    const double p1 = 3.0;
    const AssumptionReport report = check_all(problem, p0, p1);

    const std::string stem = output_stem(config, "check");
    nlohmann::json j;
    j["config"] = config_json(config);
    j["ranges"] = parameter_ranges_json(ranges);
    j["p0"] = p0;
    j["p1"] = p1;
    j["report"] = assumption_report_json(report);
    write_file(stem + ".json", j.dump(2) + "\n");

    std::cout << "problem " << problem.name << " (rho = " << ranges.rho
              << ", xi = " << config.xi << ")\n"
              << "min_p0 = " << ranges.min_p0 << ", xi_max = " << ranges.xi_max << "\n"
              << "p0 interval " << ranges.p0_interval << ", p1 interval "
              << ranges.p1_interval << "\n"
              << "checked at p0 = " << p0 << ", p1 = " << p1 << "\n";
    for (const AssumptionEntry& e : report.entries)
      std::cout << "  " << e.id << ": " << (e.pass ? "pass" : "FAIL") << " (" << e.detail
                << ")\n";
    std::cout << "wrote " << stem << ".json\n";
    return report.all_pass ? 0 : 1;
  });
}

int cmd_moments(const RunConfig& config) {
  return run_guarded("moments", [&] {
    const int p = 4;
    const Problem problem = make_problem(config);
    SchemeKind tamed_scheme = make_scheme(config);
    tamed_scheme.taming_enabled = true;
    SchemeKind untamed_scheme = tamed_scheme;
    untamed_scheme.taming_enabled = false;

    const std::vector<MomentRow> tamed_rows = moment_probe(
        problem, tamed_scheme, p, config.N_list, config.paths, config.seed, config.threads);
    const std::vector<MomentRow> untamed_rows = moment_probe(
        problem, untamed_scheme, p, config.N_list, config.paths, config.seed, config.threads);

    const std::string stem = output_stem(config, "moments");
    std::string path;
    if (config.format == "csv") {
      std::ostringstream oss;
      oss << "# problem: " << problem.name << "\n# scheme: " << config.scheme << "\n"
          << "# p: " << p << "\n# seed: " << config.seed << "\n"
          << "# paths: " << config.paths << "\n";
      for (const auto& [key, value] : config_metadata(config))
        oss << "# " << key << ": " << value << "\n";
      oss << "N,moment_tamed,explosions_tamed,moment_untamed,explosions_untamed\n";
      for (std::size_t i = 0; i < tamed_rows.size(); ++i) {
        oss << tamed_rows[i].N << ',' << format_double(tamed_rows[i].moment) << ','
            << tamed_rows[i].explosions << ',' << format_double(untamed_rows[i].moment)
            << ',' << untamed_rows[i].explosions << "\n";
      }
      path = stem + ".csv";
      write_file(path, oss.str());
    } else {
      nlohmann::json j;
      j["config"] = config_json(config);
      j["p"] = p;
      j["rows"] = nlohmann::json::array();
      for (std::size_t i = 0; i < tamed_rows.size(); ++i) {
        nlohmann::json row;
        row["N"] = tamed_rows[i].N;
        row["moment_tamed"] = std::isfinite(tamed_rows[i].moment)
                                  ? nlohmann::json(tamed_rows[i].moment)
                                  : nlohmann::json(nullptr);
        row["explosions_tamed"] = tamed_rows[i].explosions;
        row["moment_untamed"] = std::isfinite(untamed_rows[i].moment)
                                    ? nlohmann::json(untamed_rows[i].moment)
                                    : nlohmann::json(nullptr);
        row["explosions_untamed"] = untamed_rows[i].explosions;
        j["rows"].push_back(row);
      }
      path = stem + ".json";
      write_file(path, j.dump(2) + "\n");
    }

    std::cout << "problem " << problem.name << ", scheme " << config.scheme
              << ", E|X_T|^" << p << " per N (tamed vs untamed)\n";
    for (std::size_t i = 0; i < tamed_rows.size(); ++i)
      std::cout << "  N = " << tamed_rows[i].N << ": " << tamed_rows[i].moment << " vs "
                << untamed_rows[i].moment << " (" << untamed_rows[i].explosions
                << " untamed explosions)\n";
    std::cout << "wrote " << path << "\n";
    return 0;
  });
}

}  // namespace tamed
