#pragma once

#include "tamed/assumptions.hpp"
#include "tamed/experiments.hpp"

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

namespace tamed {

/// Formats a double with 17 significant digits (%.17g): lossless for IEEE
/// doubles and byte-stable across runs.
std::string format_double(double v);

/// Extra "# key: value" comment lines prepended to CSV output (resolved
/// configuration echo). Keys are written in the order given.
using MetadataLines = std::vector<std::pair<std::string, std::string>>;

/// CSV serialisation of an error table:
///   # problem: ..., # scheme: ..., # taming: ..., # seed: ...,
///   # N_ref: ..., # paths: ..., plus any extra metadata, then
///   N,rms_error,std_error,explosions
/// with doubles at 17 significant digits. Byte-stable for identical input.
std::string error_table_csv(const ErrorTable& table, const MetadataLines& extra = {});

/// JSON object mirroring the ErrorTable fields verbatim; the fit, when
/// given, is attached under "rate_fit".
nlohmann::json error_table_json(const ErrorTable& table,
                                const RateFit* fit = nullptr);

/// Parses error_table_json output back into a table (round-trip tested).
ErrorTable error_table_from_json(const nlohmann::json& j);

/// Two-column gnuplot-ready file: log2(N) and log2(rms_error) per usable row.
std::string error_table_log2(const ErrorTable& table);

/// JSON form of an assumption report plus parameter ranges.
nlohmann::json assumption_report_json(const AssumptionReport& report);
nlohmann::json parameter_ranges_json(const ParameterRanges& ranges);

/// Writes content to path, creating parent directories; throws
/// std::runtime_error with the path on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace tamed
