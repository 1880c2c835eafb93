#pragma once

#include "tamed/problem.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tamed {

/// Admissible parameter ranges of an example problem: the minimal even
/// moment order min_p0 = 2(5 rho + 1) required by the convergence theorem,
/// the noise bound xi_max it implies, and the admissible intervals for the
/// moment parameters as printable descriptions.
struct ParameterRanges {
  double rho = 0.0;
  int min_p0 = 0;
  double xi_max = 0.0;
  std::string p0_interval;
  std::string p1_interval;
};

/// Ranges for the two superlinear example problems:
///   ginzburg: rho=2, min_p0=22, xi_max=sqrt(2/21), p1 in (2, 1/xi^2+1];
///   holder:   rho=4, min_p0=42, xi_max=sqrt(2/41), p1 in (2, 4/(5 xi^2)+1].
/// xi_max solves xi^2 (min_p0 - 1) = 2, i.e. min_p0 = 2/xi_max^2 + 1 exactly.
/// Throws std::invalid_argument for the calibration problem (no superlinear
/// ranges to report).
ParameterRanges parameter_ranges(BuiltinKind kind);

/// Outcome of checking one growth/monotonicity condition on a grid: the
/// fitted constant K (the ratio sup), where it was attained, and a verdict.
struct AssumptionEntry {
  std::string id;  ///< "A-1" ... "A-5"
  double K = 0.0;
  Vec worst_x, worst_xbar;  ///< worst_xbar empty for single-point conditions
  bool pass = true;
  std::string detail;
};

/// A-1: finiteness of E|x0|^{p0}. Deterministic initial states satisfy it
/// outright; reported as an informational pass.
AssumptionEntry check_A1(const Problem& problem, double p0);

/// A-2: 2 x b(x) + (p0-1)|sigma(x)|^2 <= K (1+|x|^2). Fits K as the ratio
/// sup over the grid and fails on edge growth: adding the last decade of
/// |x| must not raise the sup by more than 1%.
AssumptionEntry check_A2(const Problem& problem, double p0,
                         const std::vector<Vec>& x_grid);

/// A-3: 2(x-xb)(b(x)-b(xb)) + (p1-1)|sigma(x)-sigma(xb)|^2 <= K |x-xb|^2
/// over pairs, with the same sup-and-edge logic. For the built-in problems
/// the verdict additionally requires p1 to lie in the admissible interval of
/// parameter_ranges: the interval is conservative (derived with fixed Young
/// splittings), so a p1 slightly beyond it can still produce a bounded ratio
/// sup — the numeric check alone cannot flag it.
AssumptionEntry check_A3(const Problem& problem, double p1,
                         const std::vector<std::pair<Vec, Vec>>& pair_grid);

/// A-4: |H b_i(x) - H b_i(xb)| <= K (1+|x|+|xb|)^{rho-2} |x-xb| and
/// A-5: |H sigma_i(x) - H sigma_i(xb)| <= K (1+|x|+|xb|)^{(rho-4)/2} |x-xb|^beta,
/// with Frobenius norms on the Hessian differences.
std::pair<AssumptionEntry, AssumptionEntry> check_A4_A5(
    const Problem& problem, const std::vector<std::pair<Vec, Vec>>& pair_grid);

/// Signed log-spaced magnitudes 10^-3 .. 10^3, `points_per_sign` per sign,
/// plus the origin (components replicated across d dimensions).
std::vector<Vec> default_x_grid(int d, int points_per_sign = 400);

/// Pair grid for A-3/A-4/A-5: 10^4 seeded random pairs with log-uniform
/// magnitudes, near-diagonal pairs down to |x-xb| = 1e-6, pairs against the
/// origin, antisymmetric pairs (x, -x), and far pairs in the edge decade.
std::vector<std::pair<Vec, Vec>> default_pair_grid(int d, std::uint64_t seed = 1234);

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  bool all_pass = true;
};

/// Runs A-1 through A-5 with the default grids.
AssumptionReport check_all(const Problem& problem, double p0, double p1);

}  // namespace tamed
