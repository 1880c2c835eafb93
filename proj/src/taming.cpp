#include "tamed/taming.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tamed {

void TamingConfig::validate() const {
  if (!(theta > 0.0)) throw std::invalid_argument("TamingConfig: theta must be > 0");
  if (rho < 0.0) throw std::invalid_argument("TamingConfig: rho must be >= 0");
  if (n < 1) throw std::invalid_argument("TamingConfig: n must be >= 1");
}

namespace {

/// log of the correction term n^{-theta} |x|^{2 rho theta}. The rho == 0
/// case is constant in x (|x|^0 == 1 for every x, the origin included), so
/// its x-part is written as an explicit zero; for rho > 0 at the origin the
/// log is -infinity, which the callers turn into a factor of exactly 1.
double correction_log(const TamingConfig& cfg, double norm_x) {
  const double x_part =
      cfg.rho == 0.0 ? 0.0 : 2.0 * cfg.rho * cfg.theta * std::log(norm_x);
  return x_part - cfg.theta * std::log(static_cast<double>(cfg.n));
}

double factor_from_norm(const TamingConfig& cfg, double norm_x) {
  if (!cfg.enabled) return 1.0;
  cfg.validate();
  const double corr_log = correction_log(cfg, norm_x);
  if (corr_log > 700.0) {
    // 1/(1 + e^L) ~= e^{-L}; clamp so the factor stays strictly positive.
    const double f = std::exp(-corr_log);
    return f > 0.0 ? f : std::numeric_limits<double>::denorm_min();
  }
  return 1.0 / (1.0 + std::exp(corr_log));
}

double log_factor_from_norm(const TamingConfig& cfg, double norm_x) {
  if (!cfg.enabled) return 0.0;
  cfg.validate();
  const double corr_log = correction_log(cfg, norm_x);
  if (corr_log > 700.0) return -corr_log;
  return -std::log1p(std::exp(corr_log));
}

}  // namespace

double taming_factor(const TamingConfig& cfg, const Vec& x) {
  return factor_from_norm(cfg, x.norm());
}

double taming_log_factor(const TamingConfig& cfg, const Vec& x) {
  return log_factor_from_norm(cfg, x.norm());
}

double taming_factor(const TamingConfig& cfg, double x) {
  return factor_from_norm(cfg, std::abs(x));
}

double taming_log_factor(const TamingConfig& cfg, double x) {
  return log_factor_from_norm(cfg, std::abs(x));
}

TamedBundle tame(const OperatorBundle& bundle, const TamingConfig& cfg, const Vec& x) {
  const double f = taming_factor(cfg, x);
  TamedBundle out;
  out.factor = f;
  out.b = f * bundle.b;
  out.sigma = f * bundle.sigma;
  out.L0b = f * bundle.L0b;
  out.L1b = f * bundle.L1b;
  out.L0sigma = f * bundle.L0sigma;
  out.L1sigma = f * bundle.L1sigma;
  out.L1L1sigma = f * bundle.L1L1sigma;
  return out;
}

ScalarTamedBundle tame_scalar(const ScalarBundle& bundle, const TamingConfig& cfg, double x) {
  const double f = taming_factor(cfg, x);
  ScalarTamedBundle out;
  out.factor = f;
  out.b = f * bundle.b;
  out.sigma = f * bundle.sigma;
  out.L0b = f * bundle.L0b;
  out.L1b = f * bundle.L1b;
  out.L0sigma = f * bundle.L0sigma;
  out.L1sigma = f * bundle.L1sigma;
  out.L1L1sigma = f * bundle.L1L1sigma;
  return out;
}

Remark2Report check_remark2_bounds(const Problem& problem, const TamingConfig& cfg,
                                   const std::vector<Vec>& grid) {
  if (grid.empty())
    throw std::invalid_argument("check_remark2_bounds: empty grid");

  static const char* names[7] = {"b",       "sigma_sq", "L0b",    "L1b",
                                 "L0sigma", "L1sigma",  "L1L1sigma"};
  static const double powers[7] = {0.5, 0.5, 1.0, 0.75, 0.75, 0.5, 0.75};

  std::vector<long long> n_values;
  for (long long n = 16; n <= 16384; n *= 2) n_values.push_back(n);

  // The operator bundle does not depend on n, so evaluate it once per point.
  struct PointData {
    double norm_x;
    double raw[7];  ///< untamed |quantity| (sigma entry squared)
  };
  std::vector<PointData> points;
  points.reserve(grid.size());
  double max_norm = 0.0;
  for (const Vec& x : grid) {
    const OperatorBundle ob = eval_operator_bundle(problem, x);
    PointData p;
    p.norm_x = x.norm();
    p.raw[0] = ob.b.norm();
    p.raw[1] = ob.sigma.squaredNorm();
    p.raw[2] = ob.L0b.norm();
    p.raw[3] = ob.L1b.norm();
    p.raw[4] = ob.L0sigma.norm();
    p.raw[5] = ob.L1sigma.norm();
    p.raw[6] = ob.L1L1sigma.norm();
    points.push_back(p);
    max_norm = std::max(max_norm, p.norm_x);
  }
  const double inner_cut = max_norm / 10.0;

  Remark2Report report;
  report.quantities.resize(7);
  for (int q = 0; q < 7; ++q) {
    auto& entry = report.quantities[q];
    entry.name = names[q];
    entry.power = powers[q];
    entry.n_values = n_values;
    for (long long n : n_values) {
      TamingConfig local = cfg;
      local.n = n;
      double sup = 0.0, sup_inner = 0.0, worst = 0.0;
      for (const PointData& p : points) {
        double f = factor_from_norm(local, p.norm_x);
        if (q == 1) f *= f;  // the diffusion bound is on |sigma^n|^2
        const double denom = (q == 1)
            ? std::pow(static_cast<double>(n), 0.5) * (1.0 + p.norm_x * p.norm_x)
            : std::pow(static_cast<double>(n), powers[q]) * (1.0 + p.norm_x);
        const double ratio = f * p.raw[q] / denom;
        if (ratio > sup) {
          sup = ratio;
          worst = p.norm_x;
        }
        if (p.norm_x <= inner_cut) sup_inner = std::max(sup_inner, ratio);
      }
      entry.sups.push_back(sup);
      entry.worst_x.push_back(worst);
      if (sup > 1.01 * sup_inner) entry.edge_growth = true;
    }
    const std::size_t last = entry.sups.size() - 1;
    if (entry.sups[last] > 1.05 * entry.sups[last - 1]) entry.growth_in_n = true;
    entry.pass = !entry.growth_in_n && !entry.edge_growth;
    report.all_pass = report.all_pass && entry.pass;
  }
  return report;
}

std::vector<Vec> remark2_default_grid(int d, double max_magnitude, int points_per_sign) {
  if (d < 1) throw std::invalid_argument("remark2_default_grid: d must be >= 1");
  if (points_per_sign < 2)
    throw std::invalid_argument("remark2_default_grid: need at least 2 points per sign");
  std::vector<Vec> grid;
  grid.reserve(2 * points_per_sign + 1);
  grid.push_back(Vec::Zero(d));
  const double lo = std::log10(1e-3), hi = std::log10(max_magnitude);
  for (int i = 0; i < points_per_sign; ++i) {
    const double mag = std::pow(10.0, lo + (hi - lo) * i / (points_per_sign - 1));
    Vec plus = Vec::Zero(d), minus = Vec::Zero(d);
    plus(0) = mag;
    minus(0) = -mag;
    grid.push_back(plus);
    grid.push_back(minus);
  }
  return grid;
}

}  // namespace tamed
