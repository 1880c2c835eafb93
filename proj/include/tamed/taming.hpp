#pragma once

#include "tamed/problem.hpp"

#include <cstdint>
#include <vector>

namespace tamed {

/// Parameters of the uniform taming factor 1 / (1 + n^{-theta} |x|^{2 rho theta}).
struct TamingConfig {
  double theta = 1.5;  ///< desired rate; 3/2 everywhere in this artifact
  double rho = 2.0;    ///< growth exponent of the problem
  long long n = 1;     ///< step-count parameter
  bool enabled = true; ///< false reuses the same step code untamed

  /// Throws std::invalid_argument when theta <= 0 or n < 1.
  void validate() const;
};

/// The taming factor at x, a scalar in (0, 1]:
///   1 / (1 + n^{-theta} |x|^{2 rho theta}),  |x| the Euclidean norm,
/// or exactly 1 when taming is disabled. For rho = 0 the correction term is
/// constant (|x|^0 == 1, including at x = 0), so the factor is
/// 1/(1 + n^{-theta}). Once 2*rho*theta*ln|x| - theta*ln n exceeds 700 the
/// denominator overflows, so the factor is evaluated in log space and clamped
/// to the smallest positive double; it is finite and positive for |x| up to
/// 1e300 and beyond.
double taming_factor(const TamingConfig& cfg, const Vec& x);

/// Natural log of the taming factor, accurate even where the factor itself
/// underflows; use this to verify bound invariants at extreme |x|.
double taming_log_factor(const TamingConfig& cfg, const Vec& x);

/// Scalar-state overloads of the same quantities (|x| = |x_scalar|).
double taming_factor(const TamingConfig& cfg, double x);
double taming_log_factor(const TamingConfig& cfg, double x);

/// An OperatorBundle with every field multiplied by one shared taming factor,
/// i.e. the coefficients b^n, sigma^n, L^{n,0}b, L^{n,1}b, L^{n,0}sigma,
/// L^{n,1}sigma, L^{n,1}L^1 sigma of the tamed schemes.
struct TamedBundle {
  Vec b, sigma, L0b, L1b, L0sigma, L1sigma, L1L1sigma;
  double factor = 1.0;  ///< the scalar actually applied
};

/// Applies taming_factor(cfg, x) uniformly to all seven fields — exactly one
/// multiply per entry, no re-evaluation of the underlying operators.
TamedBundle tame(const OperatorBundle& bundle, const TamingConfig& cfg, const Vec& x);

/// Scalar twin of tame for the d == 1 fast path.
struct ScalarTamedBundle {
  double b, sigma, L0b, L1b, L0sigma, L1sigma, L1L1sigma;
  double factor = 1.0;
};
ScalarTamedBundle tame_scalar(const ScalarBundle& bundle, const TamingConfig& cfg, double x);

/// Growth audit of the seven tamed quantities. For each quantity the checker
/// records, per n in {2^4, ..., 2^14}, the sup over the grid of
///   |tamed quantity| / (n^power (1 + |x|)),
/// with the diffusion entry measured as |sigma^n|^2 / (n^{1/2} (1 + |x|^2)).
/// The powers are {1/2, 1/2, 1, 3/4, 3/4, 1/2, 3/4} for
/// {b, |sigma|^2, L0 b, L1 b, L0 sigma, L1 sigma, L1 L1 sigma}.
struct Remark2Report {
  struct Quantity {
    std::string name;
    double power;                ///< exponent on n in the envelope
    std::vector<long long> n_values;
    std::vector<double> sups;    ///< sup of the ratio per n
    std::vector<double> worst_x; ///< |x| attaining the sup per n
    bool growth_in_n = false;    ///< sup rose >5% over the last doubling of n
    bool edge_growth = false;    ///< sup rose >1% when the last grid decade is added
    bool pass = true;
  };
  std::vector<Quantity> quantities;
  bool all_pass = true;
};

/// Verifies the tamed-coefficient growth bounds on a grid: each ratio sup
/// must stabilise in n (no more than 5% growth over the final doubling) and
/// must not grow toward the grid edge (no more than 1% gained in the last
/// decade of |x|). Untamed superlinear coefficients fail the edge check.
Remark2Report check_remark2_bounds(const Problem& problem, const TamingConfig& cfg,
                                   const std::vector<Vec>& grid);

/// Signed log-spaced default grid for the growth audit: magnitudes from
/// 1e-3 to `max_magnitude` (default 1e6), `points_per_sign` per sign, plus 0.
std::vector<Vec> remark2_default_grid(int d, double max_magnitude = 1e6,
                                      int points_per_sign = 400);

}  // namespace tamed
