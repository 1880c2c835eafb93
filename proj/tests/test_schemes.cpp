#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tamed/schemes.hpp"

#include <cmath>
#include <stdexcept>

using namespace tamed;

namespace {

Vec v1(double x) {
  Vec v(1);
  v(0) = x;
  return v;
}

TamedBundle bundle_from(double b, double sigma, double L0b, double L1b,
                        double L0sigma, double L1sigma, double L1L1sigma,
                        double factor = 1.0) {
  TamedBundle t;
  t.b = v1(factor * b);
  t.sigma = v1(factor * sigma);
  t.L0b = v1(factor * L0b);
  t.L1b = v1(factor * L1b);
  t.L0sigma = v1(factor * L0sigma);
  t.L1sigma = v1(factor * L1sigma);
  t.L1L1sigma = v1(factor * L1L1sigma);
  t.factor = factor;
  return t;
}

/// The worked bundle of the cubic problem at x = 2, xi = 0.02, scaled by the
/// worked taming factor 1/9 (n = 4, rho = 2).
TamedBundle worked_bundle() {
  return bundle_from(-6.0, -0.06, 65.9784, 0.66, 0.479928, 0.0048, -0.000528,
                     1.0 / 9.0);
}

Problem zero_problem() {
  Problem p;
  p.name = "zero";
  p.d = 1;
  p.rho = 0.0;
  p.beta = 1.0;
  p.x0 = v1(1.5);
  p.drift = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  p.diffusion = p.drift;
  p.drift_jacobian = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
  p.diffusion_jacobian = p.drift_jacobian;
  p.drift_hessians = [](const Vec& x) {
    return std::vector<Mat>(static_cast<std::size_t>(x.size()),
                            Mat::Zero(x.size(), x.size()));
  };
  p.diffusion_hessians = p.drift_hessians;
  return p;
}

}  // namespace

TEST_CASE("worked one-step values at x = 2, dt = 1/4, (dW, dZ) = (0.1, 0.0125)") {
  const Vec x = v1(2.0);
  const TamedBundle tamed = worked_bundle();
  const IncrementPair pair{0.1, 0.0125, 0.25};
  const StepInputs in{x, tamed, pair};

  // Frozen oracles from exact rational evaluation of the update formulas.
  CHECK(step_taylor15(in)(0) == doctest::Approx(2.0632782902222222).epsilon(1e-14));
  CHECK(step_tamed_euler(in)(0) == doctest::Approx(1.8326666666666667).epsilon(1e-14));
  CHECK(step_tamed_milstein(in)(0) == doctest::Approx(1.8326026666666666).epsilon(1e-14));
}

TEST_CASE("worked one-step value through the full evaluate/tame pipeline") {
  const Problem p = builtin_problem(BuiltinKind::ginzburg, 0.02);
  TamingConfig cfg;
  cfg.rho = p.rho;
  cfg.n = 4;
  const Vec x = v1(2.0);
  const TamedBundle tamed = tame(eval_operator_bundle(p, x), cfg, x);
  CHECK(tamed.factor == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  const IncrementPair pair{0.1, 0.0125, 0.25};
  const StepInputs in{x, tamed, pair};
  CHECK(step_taylor15(in)(0) == doctest::Approx(2.0632782902222222).epsilon(1e-12));
}

TEST_CASE("degenerate stochastic inputs isolate the deterministic terms") {
  const Vec x = v1(0.7);
  const TamedBundle t = bundle_from(1.3, -0.4, 2.0, 5.0, -7.0, 0.6, 11.0);
  const double dt = 0.125;
  const StepInputs in{x, t, IncrementPair{0.0, 0.0, dt}};
  // dW = dZ = 0: only b dt, 1/2 L0b dt^2 and -1/2 L1sigma dt survive.
  const double expected =
      0.7 + 1.3 * dt + 2.0 * (0.5 * dt * dt) + 0.6 * (0.5 * -dt);
  CHECK(step_taylor15(in)(0) == doctest::Approx(expected).epsilon(1e-15));

  // Pure diffusion bundle moves by sigma dW.
  const TamedBundle diff_only = bundle_from(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
  const StepInputs in2{x, diff_only, IncrementPair{0.3, 0.0, dt}};
  CHECK(step_taylor15(in2)(0) == doctest::Approx(0.7 + 0.3).epsilon(1e-15));
  CHECK(step_tamed_euler(in2)(0) == doctest::Approx(0.7 + 0.3).epsilon(1e-15));
}

TEST_CASE("degeneracy chain is exact") {
  const Vec x = v1(-1.2);
  const IncrementPair pair{0.21, 0.004, 0.0625};
  // Correction operators zero: taylor15 collapses to Milstein bitwise.
  const TamedBundle to_milstein = bundle_from(0.8, -0.3, 0.0, 0.0, 0.0, 0.45, 0.0);
  const StepInputs in1{x, to_milstein, pair};
  CHECK(step_taylor15(in1)(0) == step_tamed_milstein(in1)(0));
  // Additionally L1sigma = 0: collapses to Euler bitwise.
  const TamedBundle to_euler = bundle_from(0.8, -0.3, 0.0, 0.0, 0.0, 0.0, 0.0);
  const StepInputs in2{x, to_euler, pair};
  CHECK(step_taylor15(in2)(0) == step_tamed_euler(in2)(0));
  CHECK(step_tamed_milstein(in2)(0) == step_tamed_euler(in2)(0));
  // dW^2 = dt also kills the Milstein correction.
  const IncrementPair root{std::sqrt(0.0625), 0.002, 0.0625};
  const StepInputs in3{x, to_milstein, root};
  CHECK(step_tamed_milstein(in3)(0) == doctest::Approx(step_tamed_euler(in3)(0)).epsilon(1e-15));
}

TEST_CASE("discrete step equals the integrated continuous step") {
  RandomStream stream(314, 0);
  auto draw = [&] { return stream.normal_pair().first; };
  for (int trial = 0; trial < 10000; ++trial) {
    const int d = (trial % 3 == 0) ? 3 : 1;
    Vec x(d);
    TamedBundle t;
    t.b = Vec(d);
    t.sigma = Vec(d);
    t.L0b = Vec(d);
    t.L1b = Vec(d);
    t.L0sigma = Vec(d);
    t.L1sigma = Vec(d);
    t.L1L1sigma = Vec(d);
    for (int k = 0; k < d; ++k) {
      x(k) = 3.0 * draw();
      t.b(k) = draw();
      t.sigma(k) = draw();
      t.L0b(k) = draw();
      t.L1b(k) = draw();
      t.L0sigma(k) = draw();
      t.L1sigma(k) = draw();
      t.L1L1sigma(k) = draw();
    }
    const double dt = 0.01 + 0.99 * stream.uniform01();
    const IncrementPair pair = sample_increment_pair(stream, dt);
    const StepInputs in{x, t, pair};
    const Vec a = step_taylor15(in);
    const Vec b = step_taylor15_integrated(in);
    for (int k = 0; k < d; ++k) {
      const double scale = std::max({1.0, std::abs(a(k)), std::abs(b(k))});
      CHECK(std::abs(a(k) - b(k)) / scale <= 1e-14);
    }
  }
}

TEST_CASE("simulate_path: single step, zero problem, trajectory recording") {
  const Problem p = builtin_problem(BuiltinKind::ginzburg, 0.02);
  const SchemeKind scheme{StepKind::taylor15, true};
  const PathIncrements incs = generate_path(11, 0, 1, 1.0);
  const SimulateResult one = simulate_path(p, scheme, incs);
  // N = 1 means exactly one application of the step map with n = 1.
  TamingConfig cfg;
  cfg.rho = p.rho;
  cfg.n = 1;
  const TamedBundle tamed = tame(eval_operator_bundle(p, p.x0), cfg, p.x0);
  const StepInputs in{p.x0, tamed, incs.pairs[0]};
  CHECK(one.terminal(0) == doctest::Approx(step_taylor15(in)(0)).epsilon(1e-13));
  CHECK_FALSE(one.exploded());

  const Problem zero = zero_problem();
  for (StepKind kind : {StepKind::tamed_euler, StepKind::tamed_milstein, StepKind::taylor15}) {
    const SimulateResult r = simulate_path(zero, SchemeKind{kind, true},
                                           generate_path(3, 5, 32, 1.0));
    CHECK(r.terminal(0) == 1.5);
    CHECK_FALSE(r.exploded());
  }

  const SimulateResult rec =
      simulate_path(p, scheme, generate_path(11, 1, 16, 1.0), true);
  REQUIRE(rec.trajectory.size() == 17);
  CHECK(rec.trajectory.front()(0) == 3.0);
  CHECK(rec.trajectory.back()(0) == rec.terminal(0));
}

TEST_CASE("scalar fast path agrees with the generic evaluator path") {
  Problem p = builtin_problem(BuiltinKind::ginzburg, 0.02);
  REQUIRE(static_cast<bool>(p.scalar_coeffs));
  Problem generic = p;
  generic.scalar_coeffs = nullptr;  // force the Eigen path
  for (StepKind kind : {StepKind::tamed_euler, StepKind::tamed_milstein, StepKind::taylor15}) {
    for (int path = 0; path < 5; ++path) {
      const PathIncrements incs = generate_path(2025, path, 128, 1.0);
      const SchemeKind scheme{kind, true};
      const double fast = simulate_path(p, scheme, incs).terminal(0);
      const double slow = simulate_path(generic, scheme, incs).terminal(0);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
  }
}

TEST_CASE("untamed path from a large state explodes; tamed does not") {
  Problem p = builtin_problem(BuiltinKind::ginzburg, 0.02);
  p.x0 = v1(10.0);
  const PathIncrements incs = generate_path(42, 0, 8, 1.0);
  const SimulateResult untamed =
      simulate_path(p, SchemeKind{StepKind::taylor15, false}, incs);
  CHECK(untamed.exploded());
  CHECK(*untamed.exploded_at < 8);
  const SimulateResult tamed_run =
      simulate_path(p, SchemeKind{StepKind::taylor15, true}, incs);
  CHECK_FALSE(tamed_run.exploded());
  CHECK(std::abs(tamed_run.terminal(0)) < 20.0);
}

TEST_CASE("taming bias on the calibration problem shrinks like n^{-3/2}") {
  const Problem p = builtin_problem(BuiltinKind::ou, 0.1);
  for (int N : {16, 64, 256}) {
    const PathIncrements incs = generate_path(8, 2, N, 1.0);
    const double tamed_x =
        simulate_path(p, SchemeKind{StepKind::taylor15, true}, incs).terminal(0);
    const double untamed_x =
        simulate_path(p, SchemeKind{StepKind::taylor15, false}, incs).terminal(0);
    // rho = 0: per-coefficient gap is n^{-3/2}/(1+n^{-3/2}); terminal gap
    // stays within a moderate multiple of n^{-3/2}.
    CHECK(std::abs(tamed_x - untamed_x) <= 10.0 * std::pow(N, -1.5));
    CHECK(std::abs(tamed_x - untamed_x) > 0.0);
  }
}

TEST_CASE("scheme-kind parsing and names") {
  CHECK(parse_step_kind("euler") == StepKind::tamed_euler);
  CHECK(parse_step_kind("milstein") == StepKind::tamed_milstein);
  CHECK(parse_step_kind("taylor15") == StepKind::taylor15);
  CHECK_THROWS_AS(parse_step_kind("rk4"), std::invalid_argument);
  CHECK(step_kind_name(StepKind::taylor15) == "taylor15");
  CHECK(step_kind_name(StepKind::tamed_euler) == "euler");
  CHECK(step_kind_name(StepKind::tamed_milstein) == "milstein");
}

TEST_CASE("simulate_path rejects inconsistent increments") {
  const Problem p = builtin_problem(BuiltinKind::ou, 0.1);
  PathIncrements bad = generate_path(1, 0, 8, 1.0);
  bad.pairs.pop_back();
  CHECK_THROWS_AS(simulate_path(p, SchemeKind{StepKind::taylor15, true}, bad),
                  std::invalid_argument);
}
