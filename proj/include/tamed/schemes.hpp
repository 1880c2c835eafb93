#pragma once

#include "tamed/brownian.hpp"
#include "tamed/problem.hpp"
#include "tamed/taming.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tamed {

enum class StepKind { tamed_euler, tamed_milstein, taylor15 };

/// Scheme selector: which one-step map to apply and whether the uniform
/// taming factor is active. Untamed mode reuses the identical step code with
/// factor 1, so taming is the only difference between the two modes.
struct SchemeKind {
  StepKind kind = StepKind::taylor15;
  bool taming_enabled = true;
};

/// Parses "euler" / "milstein" / "taylor15"; throws std::invalid_argument.
StepKind parse_step_kind(const std::string& name);
std::string step_kind_name(StepKind kind);

/// Inputs of a one-step map: the state, the tamed coefficient bundle
/// evaluated at that state (with n = ceil(N/T)), and the increment pair.
struct StepInputs {
  const Vec& x;
  const TamedBundle& tamed;
  const IncrementPair& pair;
};

/// The discrete order-1.5 strong Taylor update
///   X + b^n dt + sigma^n dW + L^{n,1}b dZ + 1/2 L^{n,0}b dt^2
///     + 1/2 L^{n,1}sigma (dW^2 - dt) + L^{n,0}sigma (dW dt - dZ)
///     + 1/2 L^{n,1}L^1 sigma (dW^2/3 - dt) dW,
/// componentwise in d (the increment combinations are scalars).
Vec step_taylor15(const StepInputs& in);

/// X + b^n dt + sigma^n dW.
Vec step_tamed_euler(const StepInputs& in);

/// X + b^n dt + sigma^n dW + 1/2 L^{n,1}sigma (dW^2 - dt).
Vec step_tamed_milstein(const StepInputs& in);

/// The same one-step update obtained by analytically integrating the
/// continuous-form scheme over [0, dt] with coefficients frozen at x: the
/// time integral of
///   b-tilde(s) = b^n + L^{n,0}b (s - kappa) + L^{n,1}b (W_s - W_kappa)
/// and the stochastic integral of
///   sigma-tilde(s) = sigma^n + L^{n,1}sigma (W_s - W_kappa)
///                  + L^{n,0}sigma (s - kappa) + L^{n,1}L^1 sigma II(s),
/// evaluated with the closed-form identities
///   int (s - kappa) ds            = dt^2 / 2,
///   int (W_s - W_kappa) ds        = dZ,
///   int (W_s - W_kappa) dW_s      = (dW^2 - dt) / 2,
///   int (s - kappa) dW_s          = dt dW - dZ,
///   int II dW (triple integral)   = (dW^2/3 - dt) dW / 2.
/// Agrees with step_taylor15 term for term; kept as an independent
/// formulation so tests can assert the discrete/continuous consistency.
Vec step_taylor15_integrated(const StepInputs& in);

/// Result of integrating one path: the terminal state, or an explosion
/// marker carrying the first step index at which the state left the finite
/// range (non-finite or |X| > 1e10). The Monte Carlo layer decides policy.
struct SimulateResult {
  Vec terminal;
  std::optional<int> exploded_at;
  std::vector<Vec> trajectory;  ///< x0 plus every post-step state, when recorded

  bool exploded() const { return exploded_at.has_value(); }
};

/// State magnitude beyond which a trajectory counts as exploded.
inline constexpr double explosion_threshold = 1e10;

/// Folds the chosen one-step map over the path increments from problem.x0.
/// The taming parameter is tied to the grid, n = ceil(N/T) (n = N for T=1),
/// and the tamed bundle is evaluated once per step at the current state. On
/// explosion the fold stops and the marker records the step index.
SimulateResult simulate_path(const Problem& problem, const SchemeKind& scheme,
                             const PathIncrements& incs, bool record_trajectory = false);

}  // namespace tamed
