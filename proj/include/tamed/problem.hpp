#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tamed {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Plain scalar coefficient set for one-dimensional problems:
/// drift b, diffusion s and their first/second derivatives at a point.
/// Built-in problems supply this so hot loops can avoid vector temporaries;
/// the generic evaluators remain the reference implementation.
struct ScalarCoeffs {
  double b, bp, bpp;  ///< b(x), b'(x), b''(x)
  double s, sp, spp;  ///< sigma(x), sigma'(x), sigma''(x)
};

/// An SDE specification dX_t = b(X_t) dt + sigma(X_t) dW_t driven by a
/// single Wiener process (m = 1). The drift/diffusion evaluators come with
/// first and second derivatives so the order-1.5 correction terms can be
/// formed exactly.
struct Problem {
  std::string name;
  int d = 1;  ///< state dimension
  int m = 1;  ///< noise dimension, fixed to 1
  double rho = 2.0;   ///< growth exponent (>= 2; 0 for the Lipschitz calibration problem)
  double beta = 1.0;  ///< Hoelder exponent of the diffusion's second derivative, in (0,1]
  Vec x0;             ///< initial state
  double T = 1.0;     ///< time horizon

  std::function<Vec(const Vec&)> drift;
  std::function<Vec(const Vec&)> diffusion;
  std::function<Mat(const Vec&)> drift_jacobian;
  std::function<Mat(const Vec&)> diffusion_jacobian;
  /// One d-by-d Hessian per component of the drift / diffusion.
  std::function<std::vector<Mat>(const Vec&)> drift_hessians;
  std::function<std::vector<Mat>(const Vec&)> diffusion_hessians;

  /// Optional d==1 fast path used by the path integrator; equivalent to the
  /// generic evaluators (asserted by tests), never required.
  std::function<ScalarCoeffs(double)> scalar_coeffs;

  /// Noise scale the problem was built with (NaN for hand-assembled
  /// problems); lets parameter checks recover admissible ranges.
  double xi = std::numeric_limits<double>::quiet_NaN();

  /// Throws std::invalid_argument when a structural invariant is violated
  /// (d < 1, m != 1, T <= 0, beta outside (0,1], missing evaluator).
  void validate() const;
};

/// The drift/diffusion values and the five operator values at a point,
/// untamed: L0 applies the generator, L1 the diffusion-directional
/// derivative, and L1L1 the composition acting on sigma.
struct OperatorBundle {
  Vec b, sigma, L0b, L1b, L0sigma, L1sigma, L1L1sigma;
};

/// Evaluates, for f in {b, sigma} and each component k,
///   L0 f_k = sum_u b_u d_u f_k + 1/2 sum_{u,l} s_u s_l d2_{ul} f_k,
///   L1 f_k = sum_u s_u d_u f_k,
///   L1L1 s_k = sum_{u,l} s_u (d_u s_l)(d_l s_k) + sum_{u,l} s_u s_l d2_{ul} s_k.
/// Throws std::range_error naming the offending quantity when an
/// intermediate overflows to a non-finite value; never returns NaN silently.
OperatorBundle eval_operator_bundle(const Problem& problem, const Vec& x);

/// Scalar twin of eval_operator_bundle for d == 1 (same formulas on doubles).
struct ScalarBundle {
  double b, sigma, L0b, L1b, L0sigma, L1sigma, L1L1sigma;
};
ScalarBundle eval_scalar_bundle(const ScalarCoeffs& c);

/// Worst relative deviation between the supplied derivatives and central
/// finite differences, per evaluator, over a probe grid.
struct DerivativeReport {
  struct Entry {
    std::string evaluator;  ///< "drift_jacobian", "diffusion_hessians", ...
    double max_rel_dev = 0.0;
    Vec worst_point;
  };
  std::vector<Entry> entries;
  double worst = 0.0;
};

/// Compares drift_jacobian/diffusion_jacobian against central differences of
/// drift/diffusion (h = 1e-5) and the Hessians against central differences
/// of the supplied Jacobians. Differencing the Jacobian (instead of taking
/// second differences of the function) keeps the roundoff floor near 1e-11,
/// well below the validation tolerances. Throws std::runtime_error naming
/// evaluator and point when any deviation exceeds 1e-4.
DerivativeReport validate_derivatives(const Problem& problem,
                                      const std::vector<Vec>& probe_grid);

enum class BuiltinKind { ginzburg, holder, ou };

/// Builds one of the shipped example problems:
///  - ginzburg: dx = x(1-x^2) dt + xi (1-x^2) dW,    rho=2, beta=1
///  - holder:   dx = x(1-|x|^3) dt + xi |x|^{5/2} dW, rho=4, beta=0.5
///  - ou:       dx = -x dt + xi dW (Lipschitz calibration), rho=0, beta=1
/// all with x0 = 3 and T = 1. The noise scale is checked against the
/// admissible range (|xi| <= sqrt(2/21) resp. sqrt(2/41)); pass
/// override_xi_range = true to experiment outside it. Throws
/// std::invalid_argument on an out-of-range xi without the override.
Problem builtin_problem(BuiltinKind kind, double xi, bool override_xi_range = false);

/// Parses "ginzburg" / "holder" / "ou"; throws std::invalid_argument otherwise.
BuiltinKind parse_builtin_kind(const std::string& name);

}  // namespace tamed
