#include "tamed/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tamed {

namespace {

/// Admissible noise bounds of the built-in problems; xi_max solves
/// xi^2 (2(5 rho + 1) - 1) = 2 (see assumptions::parameter_ranges).
double builtin_xi_max(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::ginzburg: return std::sqrt(2.0 / 21.0);
    case BuiltinKind::holder: return std::sqrt(2.0 / 41.0);
    case BuiltinKind::ou: return std::numeric_limits<double>::infinity();
  }
  throw std::logic_error("builtin_xi_max: unreachable");
}

void require_finite(const Vec& v, const char* what, const Vec& x) {
  if (v.allFinite()) return;
  std::ostringstream oss;
  oss << "eval_operator_bundle: non-finite " << what << " at x = [" << x.transpose() << "]";
  throw std::range_error(oss.str());
}

Vec scalar_vec(double v) {
  Vec r(1);
  r(0) = v;
  return r;
}

Mat scalar_mat(double v) {
  Mat r(1, 1);
  r(0, 0) = v;
  return r;
}

/// Wires a one-dimensional problem from scalar coefficient callables.
Problem make_1d_problem(std::string name, double rho, double beta, double x0,
                        std::function<ScalarCoeffs(double)> coeffs) {
  Problem p;
  p.name = std::move(name);
  p.d = 1;
  p.m = 1;
  p.rho = rho;
  p.beta = beta;
  p.x0 = scalar_vec(x0);
  p.T = 1.0;
  p.scalar_coeffs = coeffs;
  p.drift = [coeffs](const Vec& x) { return scalar_vec(coeffs(x(0)).b); };
  p.diffusion = [coeffs](const Vec& x) { return scalar_vec(coeffs(x(0)).s); };
  p.drift_jacobian = [coeffs](const Vec& x) { return scalar_mat(coeffs(x(0)).bp); };
  p.diffusion_jacobian = [coeffs](const Vec& x) { return scalar_mat(coeffs(x(0)).sp); };
  p.drift_hessians = [coeffs](const Vec& x) {
    return std::vector<Mat>{scalar_mat(coeffs(x(0)).bpp)};
  };
  p.diffusion_hessians = [coeffs](const Vec& x) {
    return std::vector<Mat>{scalar_mat(coeffs(x(0)).spp)};
  };
  return p;
}

}  // namespace

void Problem::validate() const {
  if (d < 1) throw std::invalid_argument("Problem: d must be >= 1");
  if (m != 1) throw std::invalid_argument("Problem: m is fixed to 1");
  if (!(T > 0.0)) throw std::invalid_argument("Problem: T must be > 0");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("Problem: beta must lie in (0, 1]");
  if (x0.size() != d) throw std::invalid_argument("Problem: x0 must have length d");
  if (!drift || !diffusion || !drift_jacobian || !diffusion_jacobian ||
      !drift_hessians || !diffusion_hessians)
    throw std::invalid_argument("Problem: all evaluators must be set");
}

OperatorBundle eval_operator_bundle(const Problem& problem, const Vec& x) {
  const Vec b = problem.drift(x);
  const Vec s = problem.diffusion(x);
  require_finite(b, "b", x);
  require_finite(s, "sigma", x);

  const Mat Jb = problem.drift_jacobian(x);
  const Mat Js = problem.diffusion_jacobian(x);
  const std::vector<Mat> Hb = problem.drift_hessians(x);
  const std::vector<Mat> Hs = problem.diffusion_hessians(x);

  OperatorBundle out;
  out.b = b;
  out.sigma = s;

  // L0 f_k = (Jf b)_k + 1/2 s^T Hf_k s,  L1 f_k = (Jf s)_k.
  out.L0b = Jb * b;
  out.L1b = Jb * s;
  out.L0sigma = Js * b;
  out.L1sigma = Js * s;
  const int d = problem.d;
  for (int k = 0; k < d; ++k) {
    out.L0b(k) += 0.5 * s.dot(Hb[k] * s);
    out.L0sigma(k) += 0.5 * s.dot(Hs[k] * s);
  }

  // L1 L1 sigma_k = sum_{u,l} s_u (d_u s_l)(d_l s_k) + s^T Hs_k s
  //              = (Js (Js s))_k + s^T Hs_k s   (no 1/2 on the Hessian term).
  out.L1L1sigma = Js * (Js * s);
  for (int k = 0; k < d; ++k) {
    out.L1L1sigma(k) += s.dot(Hs[k] * s);
  }

  require_finite(out.L0b, "L0b", x);
  require_finite(out.L1b, "L1b", x);
  require_finite(out.L0sigma, "L0sigma", x);
  require_finite(out.L1sigma, "L1sigma", x);
  require_finite(out.L1L1sigma, "L1L1sigma", x);
  return out;
}

ScalarBundle eval_scalar_bundle(const ScalarCoeffs& c) {
  ScalarBundle out;
  out.b = c.b;
  out.sigma = c.s;
  out.L0b = c.b * c.bp + 0.5 * (c.s * c.s) * c.bpp;
  out.L1b = c.s * c.bp;
  out.L0sigma = c.b * c.sp + 0.5 * (c.s * c.s) * c.spp;
  out.L1sigma = c.s * c.sp;
  out.L1L1sigma = c.s * (c.sp * c.sp) + (c.s * c.s) * c.spp;
  return out;
}

namespace {

/// Central difference of a vector evaluator: column j of the Jacobian.
Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  const int d = static_cast<int>(x.size());
  Mat J(d, d);
  Vec xp = x, xm = x;
  for (int j = 0; j < d; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return J;
}

double max_rel_dev(const Mat& analytic, const Mat& numeric) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.rows(); ++i)
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      const double denom = std::max(1.0, std::abs(analytic(i, j)));
      worst = std::max(worst, std::abs(analytic(i, j) - numeric(i, j)) / denom);
    }
  return worst;
}

}  // namespace

DerivativeReport validate_derivatives(const Problem& problem,
                                      const std::vector<Vec>& probe_grid) {
  if (probe_grid.empty())
    throw std::invalid_argument("validate_derivatives: empty probe grid");
  const double h = 1e-5;
  const int d = problem.d;

  DerivativeReport report;
  report.entries = {{"drift_jacobian", 0.0, {}},
                    {"diffusion_jacobian", 0.0, {}},
                    {"drift_hessians", 0.0, {}},
                    {"diffusion_hessians", 0.0, {}}};

  auto update = [&](int slot, double dev, const Vec& x) {
    auto& e = report.entries[slot];
    if (dev > e.max_rel_dev) {
      e.max_rel_dev = dev;
      e.worst_point = x;
    }
  };

  for (const Vec& x : probe_grid) {
    if (!x.allFinite())
      throw std::invalid_argument("validate_derivatives: non-finite probe point");
    update(0, max_rel_dev(problem.drift_jacobian(x),
                          central_jacobian(problem.drift, x, h)), x);
    update(1, max_rel_dev(problem.diffusion_jacobian(x),
                          central_jacobian(problem.diffusion, x, h)), x);

    // Hessian row i of component k equals row i of d/dx_j [Jf(x)]: compare
    // against the central difference of the supplied Jacobian, which keeps
    // the roundoff floor at ~1e-11 instead of the ~1e-6 of double
    // differencing the function itself.
    const std::vector<Mat> Hb = problem.drift_hessians(x);
    const std::vector<Mat> Hs = problem.diffusion_hessians(x);
    for (int k = 0; k < d; ++k) {
      auto row_k_b = [&](const Vec& y) { return Vec(problem.drift_jacobian(y).row(k)); };
      auto row_k_s = [&](const Vec& y) { return Vec(problem.diffusion_jacobian(y).row(k)); };
      update(2, max_rel_dev(Hb[k], central_jacobian(row_k_b, x, h)), x);
      update(3, max_rel_dev(Hs[k], central_jacobian(row_k_s, x, h)), x);
    }
  }

  for (const auto& e : report.entries) report.worst = std::max(report.worst, e.max_rel_dev);
  if (report.worst > 1e-4) {
    const auto& bad = *std::max_element(
        report.entries.begin(), report.entries.end(),
        [](const auto& a, const auto& b) { return a.max_rel_dev < b.max_rel_dev; });
    std::ostringstream oss;
    oss << "validate_derivatives: " << bad.evaluator << " deviates by "
        << bad.max_rel_dev << " at x = [" << bad.worst_point.transpose() << "]";
    throw std::runtime_error(oss.str());
  }
  return report;
}

Problem builtin_problem(BuiltinKind kind, double xi, bool override_xi_range) {
  const double xi_max = builtin_xi_max(kind);
  if (!override_xi_range && std::abs(xi) > xi_max) {
    std::ostringstream oss;
    oss << "builtin_problem: |xi| = " << std::abs(xi)
        << " exceeds the admissible bound " << xi_max
        << " (xi^2 (p0-1) <= 2 at the minimal moment order); "
           "pass the override flag to experiment outside the range";
    throw std::invalid_argument(oss.str());
  }

  Problem p;
  switch (kind) {
    case BuiltinKind::ginzburg:
      // dx = x(1 - x^2) dt + xi (1 - x^2) dW
      p = make_1d_problem("ginzburg", 2.0, 1.0, 3.0, [xi](double x) {
        ScalarCoeffs c;
        c.b = x * (1.0 - x * x);
        c.bp = 1.0 - 3.0 * x * x;
        c.bpp = -6.0 * x;
        c.s = xi * (1.0 - x * x);
        c.sp = -2.0 * xi * x;
        c.spp = -2.0 * xi;
        return c;
      });
      break;
    case BuiltinKind::holder:
      // dx = x(1 - |x|^3) dt + xi |x|^{5/2} dW; the second derivatives
      // -12 x |x| and (15/4) xi |x|^{1/2} are continuous at 0 and evaluated
      // directly.
      p = make_1d_problem("holder", 4.0, 0.5, 3.0, [xi](double x) {
        const double ax = std::abs(x);
        const double sgn = (x > 0.0) - (x < 0.0);
        ScalarCoeffs c;
        c.b = x * (1.0 - ax * ax * ax);
        c.bp = 1.0 - 4.0 * ax * ax * ax;
        c.bpp = -12.0 * x * ax;
        c.s = xi * ax * ax * std::sqrt(ax);
        c.sp = 2.5 * xi * ax * std::sqrt(ax) * sgn;
        c.spp = 3.75 * xi * std::sqrt(ax);
        return c;
      });
      break;
    case BuiltinKind::ou:
      // dx = -x dt + xi dW: the globally Lipschitz calibration problem with
      // closed-form moments.
      p = make_1d_problem("ou", 0.0, 1.0, 3.0, [xi](double x) {
        ScalarCoeffs c;
        c.b = -x;
        c.bp = -1.0;
        c.bpp = 0.0;
        c.s = xi;
        c.sp = 0.0;
        c.spp = 0.0;
        return c;
      });
      break;
  }
  p.xi = xi;
  p.validate();
  return p;
}

BuiltinKind parse_builtin_kind(const std::string& name) {
  if (name == "ginzburg") return BuiltinKind::ginzburg;
  if (name == "holder") return BuiltinKind::holder;
  if (name == "ou") return BuiltinKind::ou;
  throw std::invalid_argument("unknown problem '" + name +
                              "' (expected ginzburg, holder or ou)");
}

}  // namespace tamed
