#include "tamed/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace tamed {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string error_table_csv(const ErrorTable& table, const MetadataLines& extra) {
  std::ostringstream oss;
  oss << "# problem: " << table.problem << "\n";
  oss << "# scheme: " << table.scheme << "\n";
  oss << "# taming: " << (table.taming_enabled ? "on" : "off") << "\n";
  oss << "# seed: " << table.master_seed << "\n";
  oss << "# N_ref: " << table.N_ref << "\n";
  oss << "# paths: " << table.paths << "\n";
  for (const auto& [key, value] : extra) oss << "# " << key << ": " << value << "\n";
  for (const auto& warning : table.warnings) oss << "# warning: " << warning << "\n";
  oss << "N,rms_error,std_error,explosions\n";
  for (const ErrorRow& row : table.rows) {
    oss << row.N << ',' << format_double(row.rms_error) << ','
        << format_double(row.std_error) << ',' << row.explosions << "\n";
  }
  return oss.str();
}

nlohmann::json error_table_json(const ErrorTable& table, const RateFit* fit) {
  nlohmann::json j;
  j["problem"] = table.problem;
  j["scheme"] = table.scheme;
  j["taming"] = table.taming_enabled;
  j["seed"] = table.master_seed;
  j["N_ref"] = table.N_ref;
  j["paths"] = table.paths;
  j["N_list"] = table.N_list;
  j["warnings"] = table.warnings;
  j["rows"] = nlohmann::json::array();
  for (const ErrorRow& row : table.rows) {
    nlohmann::json r;
    r["N"] = row.N;
    // NaN is not representable in JSON; null marks an all-exploded row.
    if (std::isfinite(row.rms_error))
      r["rms_error"] = row.rms_error;
    else
      r["rms_error"] = nullptr;
    if (std::isfinite(row.std_error))
      r["std_error"] = row.std_error;
    else
      r["std_error"] = nullptr;
    r["explosions"] = row.explosions;
    j["rows"].push_back(r);
  }
  if (fit) {
    nlohmann::json f;
    f["slope"] = fit->slope;
    f["intercept"] = fit->intercept;
    f["r_squared"] = fit->r_squared;
    f["points_used"] = fit->points_used;
    f["warnings"] = fit->warnings;
    j["rate_fit"] = f;
  }
  return j;
}

ErrorTable error_table_from_json(const nlohmann::json& j) {
  ErrorTable table;
  table.problem = j.at("problem").get<std::string>();
  table.scheme = j.at("scheme").get<std::string>();
  table.taming_enabled = j.at("taming").get<bool>();
  table.master_seed = j.at("seed").get<std::uint64_t>();
  table.N_ref = j.at("N_ref").get<int>();
  table.paths = j.at("paths").get<int>();
  table.N_list = j.at("N_list").get<std::vector<int>>();
  if (j.contains("warnings"))
    table.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) {
    ErrorRow row;
    row.N = r.at("N").get<int>();
    row.rms_error = r.at("rms_error").is_null()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : r.at("rms_error").get<double>();
    row.std_error = r.at("std_error").is_null()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : r.at("std_error").get<double>();
    row.explosions = r.at("explosions").get<long>();
    table.rows.push_back(row);
  }
  return table;
}

std::string error_table_log2(const ErrorTable& table) {
  std::ostringstream oss;
  oss << "# log2(N) log2(rms_error)\n";
  for (const ErrorRow& row : table.rows) {
    if (!std::isfinite(row.rms_error) || row.rms_error <= 0.0) continue;
    oss << format_double(std::log2(static_cast<double>(row.N))) << ' '
        << format_double(std::log2(row.rms_error)) << "\n";
  }
  return oss.str();
}

nlohmann::json assumption_report_json(const AssumptionReport& report) {
  nlohmann::json j;
  j["all_pass"] = report.all_pass;
  j["entries"] = nlohmann::json::array();
  for (const AssumptionEntry& e : report.entries) {
    nlohmann::json entry;
    entry["id"] = e.id;
    entry["K"] = std::isfinite(e.K) ? nlohmann::json(e.K) : nlohmann::json(nullptr);
    entry["pass"] = e.pass;
    entry["detail"] = e.detail;
    std::vector<double> wx(e.worst_x.data(), e.worst_x.data() + e.worst_x.size());
    std::vector<double> wxb(e.worst_xbar.data(), e.worst_xbar.data() + e.worst_xbar.size());
    entry["worst_x"] = wx;
    entry["worst_xbar"] = wxb;
    j["entries"].push_back(entry);
  }
  return j;
}

nlohmann::json parameter_ranges_json(const ParameterRanges& ranges) {
  nlohmann::json j;
  j["rho"] = ranges.rho;
  j["min_p0"] = ranges.min_p0;
  j["xi_max"] = ranges.xi_max;
  j["p0_interval"] = ranges.p0_interval;
  j["p1_interval"] = ranges.p1_interval;
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec)
      throw std::runtime_error("write_file: cannot create directories for '" + path +
                               "': " + ec.message());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("write_file: cannot open '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write_file: write failed for '" + path + "'");
}

}  // namespace tamed
