#include "tamed/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace tamed {

StepKind parse_step_kind(const std::string& name) {
  if (name == "euler") return StepKind::tamed_euler;
  if (name == "milstein") return StepKind::tamed_milstein;
  if (name == "taylor15") return StepKind::taylor15;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (expected euler, milstein or taylor15)");
}

std::string step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::tamed_euler: return "euler";
    case StepKind::tamed_milstein: return "milstein";
    case StepKind::taylor15: return "taylor15";
  }
  throw std::logic_error("step_kind_name: unreachable");
}

Vec step_taylor15(const StepInputs& in) {
  const double dt = in.pair.dt;
  const double dW = in.pair.dW;
  const double dZ = in.pair.dZ;
  const TamedBundle& c = in.tamed;
  return in.x + c.b * dt + c.sigma * dW + c.L1b * dZ + c.L0b * (0.5 * dt * dt) +
         c.L1sigma * (0.5 * (dW * dW - dt)) + c.L0sigma * (dW * dt - dZ) +
         c.L1L1sigma * (0.5 * (dW * dW / 3.0 - dt) * dW);
}

Vec step_tamed_euler(const StepInputs& in) {
  return in.x + in.tamed.b * in.pair.dt + in.tamed.sigma * in.pair.dW;
}

Vec step_tamed_milstein(const StepInputs& in) {
  const double dt = in.pair.dt;
  const double dW = in.pair.dW;
  return in.x + in.tamed.b * dt + in.tamed.sigma * dW +
         in.tamed.L1sigma * (0.5 * (dW * dW - dt));
}

Vec step_taylor15_integrated(const StepInputs& in) {
  const double dt = in.pair.dt;
  const double dW = in.pair.dW;
  const double dZ = in.pair.dZ;
  const TamedBundle& c = in.tamed;
  // Time integral of b-tilde over the step.
  const Vec drift_part = c.b * dt + c.L0b * (0.5 * dt * dt) + c.L1b * dZ;
  // Stochastic integral of sigma-tilde over the step.
  const Vec diff_part = c.sigma * dW + c.L1sigma * (0.5 * (dW * dW - dt)) +
                        c.L0sigma * (dt * dW - dZ) +
                        c.L1L1sigma * (0.5 * (dW * dW / 3.0 - dt) * dW);
  return in.x + drift_part + diff_part;
}

namespace {

bool out_of_range(const Vec& x) {
  return !x.allFinite() || x.norm() > explosion_threshold;
}

/// Zero-allocation d == 1 fold using the problem's scalar coefficients.
SimulateResult simulate_path_scalar(const Problem& problem, const SchemeKind& scheme,
                                    const PathIncrements& incs, bool record_trajectory) {
  TamingConfig cfg;
  cfg.rho = problem.rho;
  cfg.n = static_cast<long long>(std::ceil(incs.N / problem.T));
  cfg.enabled = scheme.taming_enabled;

  const auto& coeffs = problem.scalar_coeffs;
  double x = problem.x0(0);
  SimulateResult result;
  if (record_trajectory) {
    result.trajectory.reserve(static_cast<std::size_t>(incs.N) + 1);
    result.trajectory.push_back(problem.x0);
  }

  for (int i = 0; i < incs.N; ++i) {
    const IncrementPair& p = incs.pairs[static_cast<std::size_t>(i)];
    const ScalarTamedBundle c = tame_scalar(eval_scalar_bundle(coeffs(x)), cfg, x);
    const double dt = p.dt, dW = p.dW, dZ = p.dZ;
    double next = x;
    switch (scheme.kind) {
      case StepKind::tamed_euler:
        next = x + c.b * dt + c.sigma * dW;
        break;
      case StepKind::tamed_milstein:
        next = x + c.b * dt + c.sigma * dW + c.L1sigma * (0.5 * (dW * dW - dt));
        break;
      case StepKind::taylor15:
        next = x + c.b * dt + c.sigma * dW + c.L1b * dZ + c.L0b * (0.5 * dt * dt) +
               c.L1sigma * (0.5 * (dW * dW - dt)) + c.L0sigma * (dW * dt - dZ) +
               c.L1L1sigma * (0.5 * (dW * dW / 3.0 - dt) * dW);
        break;
    }
    x = next;
    if (record_trajectory) {
      Vec v(1);
      v(0) = x;
      result.trajectory.push_back(v);
    }
    if (!std::isfinite(x) || std::abs(x) > explosion_threshold) {
      result.exploded_at = i;
      break;
    }
  }
  result.terminal = Vec(1);
  result.terminal(0) = x;
  return result;
}

}  // namespace

SimulateResult simulate_path(const Problem& problem, const SchemeKind& scheme,
                             const PathIncrements& incs, bool record_trajectory) {
  if (incs.N < 1 || incs.pairs.size() != static_cast<std::size_t>(incs.N))
    throw std::invalid_argument("simulate_path: inconsistent increment container");

  if (problem.d == 1 && problem.scalar_coeffs)
    return simulate_path_scalar(problem, scheme, incs, record_trajectory);

  TamingConfig cfg;
  cfg.rho = problem.rho;
  cfg.n = static_cast<long long>(std::ceil(incs.N / problem.T));
  cfg.enabled = scheme.taming_enabled;

  Vec x = problem.x0;
  SimulateResult result;
  if (record_trajectory) {
    result.trajectory.reserve(static_cast<std::size_t>(incs.N) + 1);
    result.trajectory.push_back(x);
  }

  for (int i = 0; i < incs.N; ++i) {
    const TamedBundle tamed = tame(eval_operator_bundle(problem, x), cfg, x);
    const StepInputs in{x, tamed, incs.pairs[static_cast<std::size_t>(i)]};
    Vec next;
    switch (scheme.kind) {
      case StepKind::tamed_euler: next = step_tamed_euler(in); break;
      case StepKind::tamed_milstein: next = step_tamed_milstein(in); break;
      case StepKind::taylor15: next = step_taylor15(in); break;
    }
    x = std::move(next);
    if (record_trajectory) result.trajectory.push_back(x);
    if (out_of_range(x)) {
      result.exploded_at = i;
      break;
    }
  }
  result.terminal = std::move(x);
  return result;
}

}  // namespace tamed
