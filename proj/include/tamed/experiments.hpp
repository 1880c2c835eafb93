#pragma once

#include "tamed/brownian.hpp"
#include "tamed/problem.hpp"
#include "tamed/schemes.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tamed {

/// One row of a strong-error table: the root-mean-square terminal error at
/// step count N against the coupled reference, the Monte Carlo standard
/// error of the mean squared error, and how many paths were excluded as
/// exploded (reference or coarse run).
struct ErrorRow {
  int N = 0;
  double rms_error = 0.0;
  double std_error = 0.0;
  long explosions = 0;
};

/// Strong-error estimates for one (problem, scheme) pair across step counts,
/// plus everything needed to reproduce them.
struct ErrorTable {
  std::string problem;
  std::string scheme;
  bool taming_enabled = true;
  std::vector<int> N_list;
  int N_ref = 0;
  int paths = 0;
  std::uint64_t master_seed = 0;
  std::vector<ErrorRow> rows;  ///< sorted by N ascending
  std::vector<std::string> warnings;
};

/// L2 strong error at terminal time against a coupled same-scheme reference:
/// per path, the Brownian increments are generated once at N_ref, the scheme
/// is run there as the reference, and every coarse N consumes the exactly
/// aggregated increments of the same path. Per-path squared errors are
/// stored and reduced sequentially in path order, so the result is identical
/// for any worker-pool size (threads <= 0 picks the hardware count).
/// Exploded paths are excluded from the mean and counted per row; a row with
/// no surviving path gets rms NaN and a warning.
/// Throws std::invalid_argument unless paths >= 2 and N_ref is a positive
/// multiple of every N in N_list.
ErrorTable strong_error(const Problem& problem, const SchemeKind& scheme,
                        std::vector<int> N_list, int N_ref, int paths,
                        std::uint64_t master_seed, int threads = 0);

/// Least-squares fit of log2(rms_error) against log2(N); slope is reported
/// as a positive rate.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  std::vector<std::string> warnings;
};

/// Ordinary least squares over the rows with positive, finite rms_error;
/// zero-error rows (e.g. N == N_ref) are excluded with a warning. Throws
/// std::runtime_error when fewer than 3 usable rows remain.
RateFit fit_rate(const ErrorTable& table);

/// Terminal states of `paths` independent paths at one step count (fresh
/// increments per path; no reference). Exploded paths keep their marker.
struct TerminalBatch {
  std::vector<Vec> terminals;           ///< valid where exploded[i] is false
  std::vector<char> exploded;           ///< per-path explosion flag
  std::vector<int> exploded_at;         ///< step index, -1 when not exploded
  long explosion_count = 0;
};
TerminalBatch simulate_terminals(const Problem& problem, const SchemeKind& scheme,
                                 int N, int paths, std::uint64_t master_seed,
                                 int threads = 0);

/// Empirical p-th absolute moment of the terminal state per step count.
/// Any exploded path makes the row's moment +infinity (the explosion count
/// says how many); this is the expected outcome for untamed runs.
struct MomentRow {
  int N = 0;
  double moment = 0.0;
  long explosions = 0;
};

/// Requires even p >= 2 and paths >= 100 (std::invalid_argument otherwise).
std::vector<MomentRow> moment_probe(const Problem& problem, const SchemeKind& scheme,
                                    int p, const std::vector<int>& N_list, int paths,
                                    std::uint64_t master_seed, int threads = 0);

}  // namespace tamed
