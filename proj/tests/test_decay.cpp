// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "decay.hpp"
#include "dynamics.hpp"

using namespace dwlab;

namespace
{

DiscreteOperator circle_op(int n, double a0)
{
  return assemble_operator(Geometry::circle(2.0 * M_PI, n),
                           DampingProfile::constant(a0));
}

CauchyData mode_data(const DiscreteOperator &op, int wavenumber)
{
  CauchyData d;
  d.omega0.resize(op.n);
  d.omega1 = Eigen::VectorXcd::Zero(op.n);
  for (int i = 0; i < op.n; ++i)
    d.omega0(i) = std::exp(Complex(0.0, wavenumber * op.geometry.node_x(i)));
  d.op = &op;
  return d;
}

CauchyData make_random_data(const DiscreteOperator &op, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  CauchyData d;
  d.omega0.resize(op.n);
  d.omega1.resize(op.n);
  Eigen::VectorXd c0(op.n), c1(op.n);
  for (int i = 0; i < op.n; ++i)
  {
    const double w = 1.0 / (1.0 + std::abs(op.basis_eigs(i)));
    c0(i) = w * gauss(rng);
    c1(i) = w * gauss(rng);
  }
  d.omega0 = (op.basis * c0).cast<Complex>();
  d.omega1 = (op.basis * c1).cast<Complex>();
  d.op = &op;
  return d;
}

std::vector<double> uniform_grid(double t0, double t1, double dt)
{
  std::vector<double> g;
  for (double t = t0; t <= t1 + 1e-9; t += dt)
    g.push_back(t);
  return g;
}

}  // namespace

TEST_CASE("energy closed forms")
{
  const auto op = circle_op(32, 0.0);
  // Constant u, zero velocity: zero energy.
  CHECK(energy(op, Eigen::VectorXcd::Constant(op.n, 2.0),
               Eigen::VectorXcd::Zero(op.n)) == doctest::Approx(0.0));
  // u = e^{ix} on the 2pi circle: E = 0.5 * ||grad u||^2 = pi.
  const CauchyData d = mode_data(op, 1);
  CHECK(energy(op, d.omega0, d.omega1) == doctest::Approx(M_PI));
}

TEST_CASE("undamped evolution conserves energy")
{
  const auto op = circle_op(24, 0.0);
  const CauchyData d = make_random_data(op, 1);
  const double e0 = energy(op, d.omega0, d.omega1);
  for (auto method : {EvolveMethod::Modal, EvolveMethod::Ode})
  {
    const auto states = evolve(op, d, uniform_grid(0.0, 100.0, 10.0), method);
    for (const auto &st : states)
      CHECK(std::abs(energy(op, st.u, st.v) - e0) <= 1e-9 * e0);
  }
}

TEST_CASE("single mode follows the constant-damping oracle")
{
  const auto op = circle_op(32, 0.1);
  CauchyData d = mode_data(op, 1);
  // Pick the slower-decaying root tau for e^{-i tau t} initial velocity.
  const auto [tau, tau2] = constant_damping_oracle(1.0, 0.1);
  d.omega1 = tau * d.omega0;  // i dt u = tau u along the mode
  const auto modal = evolve(op, d, {10.0}, EvolveMethod::Modal);
  const auto ode = evolve(op, d, {10.0}, EvolveMethod::Ode);

  const Complex phase = std::exp(Complex(0.0, -1.0) * tau * 10.0);
  const Eigen::VectorXcd expect = phase * d.omega0;
  CHECK((modal[0].u - expect).norm() < 1e-6 * expect.norm());
  // Midpoint phase error is O(omega^3 dt^2 t); ~1e-3 at this resolution.
  CHECK((modal[0].u - ode[0].u).norm() < 1e-2 * expect.norm());
}

TEST_CASE("constant data is stationary")
{
  const auto op = circle_op(16, 0.4);
  CauchyData d;
  d.omega0 = Eigen::VectorXcd::Constant(op.n, 1.0);
  d.omega1 = Eigen::VectorXcd::Zero(op.n);
  d.op = &op;
  const auto states = evolve(op, d, {25.0}, EvolveMethod::Modal);
  CHECK((states[0].u - d.omega0).norm() < 1e-8 * d.omega0.norm());
  CHECK(states[0].v.norm() < 1e-8);
}

TEST_CASE("ode energy dissipation identity")
{
  const auto op = circle_op(24, 0.2);
  const CauchyData d = make_random_data(op, 4);
  const double dt = 0.01;
  const auto states = evolve(op, d, uniform_grid(5.0, 5.0 + dt, dt),
                             EvolveMethod::Ode);
  const double de = (energy(op, states[1].u, states[1].v) -
                     energy(op, states[0].u, states[0].v)) /
                    dt;
  // dE/dt = -2 int a |dt u|^2; dt u = -i v.
  const auto &mid = states[0];
  double diss = 0.0;
  for (int i = 0; i < op.n; ++i)
    diss += op.damping(i) * std::norm(mid.v(i));
  diss *= -2.0 * op.quad_weight();
  CHECK(de == doctest::Approx(diss).epsilon(0.02));
}

TEST_CASE("modal and ode agree on random data")
{
  const auto op = circle_op(20, 0.15);
  for (unsigned seed : {2u, 3u, 4u})
  {
    const CauchyData d = make_random_data(op, seed);
    const auto a = evolve(op, d, {10.0}, EvolveMethod::Modal);
    const auto b = evolve(op, d, {10.0}, EvolveMethod::Ode);
    // The implicit midpoint rule conserves modal amplitudes but accrues
    // O(dt^2) phase error in the high modes, so energies agree much more
    // tightly than pointwise states.
    CHECK((a[0].u - b[0].u).norm() <= 5e-2 * d.omega0.norm());
    const double ea = energy(op, a[0].u, a[0].v);
    const double eb = energy(op, b[0].u, b[0].v);
    CHECK(ea == doctest::Approx(eb).epsilon(1e-3));
  }
}

TEST_CASE("fit_decay_rate on synthetic series")
{
  EnergySeries s;
  for (double t = 0.0; t <= 30.0; t += 0.5)
  {
    s.times.push_back(t);
    s.energies.push_back(5.0 * std::exp(-0.2 * t));
  }
  const RateFit fit = fit_decay_rate(s, 5.0, 30.0);
  CHECK(fit.rate == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(fit.residual < 1e-10);

  // Two-mode series: late window isolates the slow rate.
  EnergySeries two;
  for (double t = 0.0; t <= 120.0; t += 0.5)
  {
    two.times.push_back(t);
    two.energies.push_back(std::exp(-0.2 * t) + std::exp(-0.6 * t));
  }
  const RateFit late = fit_decay_rate(two, 60.0, 120.0);
  CHECK(late.rate == doctest::Approx(0.2).epsilon(0.01));

  EnergySeries bad = s;
  bad.energies[20] = -1.0;
  CHECK_THROWS_AS(fit_decay_rate(bad, 5.0, 30.0), Error);
  CHECK_THROWS_AS(fit_decay_rate(s, 28.0, 30.0), Error);  // < 10 points
}

TEST_CASE("contour projectors: simple pole, algebra, tau = 0 state")
{
  const auto op = circle_op(12, 0.1);
  const CompanionOperator b = linearize(op);
  const Spectrum s = solve_spectrum(b, true);

  // Simple eigenvalue -> rank-1 idempotent.
  int at = 0;
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    if (std::abs(s.eigenvalues(i)) < std::abs(s.eigenvalues(at)))
      at = i;
  const ModeProjection zero_mode =
      contour_projector(b, s, s.eigenvalues(at), 0.05);
  CHECK(zero_mode.rank == 1);
  CHECK(zero_mode.idempotence_residual < 1e-10);
  // tau = 0 generalized eigenspace is spanned by (1, 0).
  Eigen::VectorXcd probe = Eigen::VectorXcd::Random(2 * op.n);
  const Eigen::VectorXcd proj = zero_mode.projector * probe;
  const Eigen::VectorXcd u = proj.head(op.n);
  CHECK((u - Eigen::VectorXcd::Constant(op.n, u.mean())).norm() <
        1e-8 * (1.0 + u.norm()));
  CHECK(proj.tail(op.n).norm() < 1e-8 * (1.0 + proj.norm()));

  // Enclosure violations are detected.
  CHECK_THROWS_AS(contour_projector(b, s, Complex(50.0, -5.0), 0.05), Error);
}

TEST_CASE("mode expansion: completeness, projector algebra, reconstruction")
{
  const auto op = circle_op(10, 0.1);
  const CompanionOperator b = linearize(op);
  const Spectrum s = solve_spectrum(b, true);
  const CauchyData d = make_random_data(op, 9);

  // Region holding the whole spectrum: remainder vanishes.
  SpectralRegion all{-20.0, 20.0, -1.0, 1.0};
  const ModeExpansion full = mode_expansion(b, s, d, all);
  Eigen::VectorXcd y0(2 * op.n);
  y0 << d.omega0, d.omega1;
  CHECK(full.remainder.norm() < 1e-8 * y0.norm());

  // Projector algebra.
  Eigen::MatrixXcd sum =
      Eigen::MatrixXcd::Zero(2 * op.n, 2 * op.n);
  for (const auto &m : full.modes)
    sum += m.projector;
  CHECK((sum - Eigen::MatrixXcd::Identity(2 * op.n, 2 * op.n)).norm() < 1e-8);
  for (size_t i = 0; i < full.modes.size(); ++i)
    for (size_t j = i + 1; j < full.modes.size(); ++j)
      CHECK((full.modes[i].projector * full.modes[j].projector).norm() <
            1e-8);

  // Low-frequency region on circle a = 0.1: only tau = 0 survives.
  SpectralRegion low{-0.5, 0.5, -0.15, 0.05};
  const ModeExpansion m = mode_expansion(b, s, d, low);
  REQUIRE(m.modes.size() == 1);
  CHECK(std::abs(m.modes[0].tau) < 1e-8);

  // Reconstruction: evolving modes + remainder matches direct evolution.
  const auto direct = evolve(op, d, {4.0}, EvolveMethod::Modal);
  CauchyData rd;
  rd.omega0 = m.remainder.head(op.n);
  rd.omega1 = m.remainder.tail(op.n);
  rd.op = &op;
  CauchyData pd;
  pd.omega0 = m.modes[0].projected.head(op.n);
  pd.omega1 = m.modes[0].projected.tail(op.n);
  pd.op = &op;
  const auto er = evolve(op, rd, {4.0}, EvolveMethod::Modal);
  const auto ep = evolve(op, pd, {4.0}, EvolveMethod::Modal);
  CHECK((direct[0].u - er[0].u - ep[0].u).norm() < 1e-7 * y0.norm());

  // Boundary hygiene.
  SpectralRegion grazing{-2.0, 2.0, -0.1, 0.05};  // Im = -0.1 hits the band
  CHECK_THROWS_AS(mode_expansion(b, s, d, grazing), Error);
}

TEST_CASE("window bound: closed form and zero case")
{
  const auto op = circle_op(24, 0.1);
  // Constant state: zero energy, zero ratio.
  CauchyData c;
  c.omega0 = Eigen::VectorXcd::Constant(op.n, 1.0);
  c.omega1 = Eigen::VectorXcd::Zero(op.n);
  c.op = &op;
  const auto cs = evolve(op, c, uniform_grid(2.0, 6.0, 0.05),
                         EvolveMethod::Modal);
  CHECK(window_bound_check(op, cs, 4.0) == doctest::Approx(0.0));

  // Single oscillatory mode: E(t) = E0 e^{-2 a t}, ||u||_H1^2 =
  // (1 + k^2) |c|^2 e^{-2 a t} * 2 pi; ratio known in closed form.
  CauchyData d = mode_data(op, 1);
  const auto [tau, tau2] = constant_damping_oracle(1.0, 0.1);
  d.omega1 = tau * d.omega0;
  const auto states = evolve(op, d, uniform_grid(2.0, 6.0, 0.025),
                             EvolveMethod::Modal);
  const double ratio = window_bound_check(op, states, 4.0);
  const double a0 = 0.1;
  const double e_t = 0.5 * 2.0 * M_PI * (std::norm(tau) + 1.0);
  const double h1 = 2.0 * 2.0 * M_PI;  // (1 + k^2)|u|^2 integral, k = 1
  double denom = 0.0;  // int_{T-2}^{T+1} e^{-2a(t-T)} dt
  denom = (std::exp(2.0 * a0 * 2.0) - std::exp(-2.0 * a0 * 1.0)) /
          (2.0 * a0);
  const double expect = e_t / (h1 * denom);
  CHECK(ratio == doctest::Approx(expect).epsilon(1e-4));

  CHECK_THROWS_AS(window_bound_check(op, cs, 1.0), Error);
}

TEST_CASE("window bound is stable across resolution")
{
  double ratios[2];
  int idx = 0;
  for (int n : {24, 48})
  {
    const auto op = circle_op(n, 0.1);
    CauchyData d;  // fixed smooth data independent of resolution
    d.omega0.resize(op.n);
    d.omega1 = Eigen::VectorXcd::Zero(op.n);
    for (int i = 0; i < op.n; ++i)
    {
      const double x = op.geometry.node_x(i);
      d.omega0(i) = std::sin(x) + 0.5 * std::cos(2.0 * x);
    }
    d.op = &op;
    const auto states = evolve(op, d, uniform_grid(2.0, 6.0, 0.05),
                               EvolveMethod::Modal);
    ratios[idx++] = window_bound_check(op, states, 4.0);
  }
  CHECK(std::abs(ratios[0] - ratios[1]) < 0.1 * std::abs(ratios[1]));
}

TEST_CASE("decay experiment on the circle matches Lebeau's formula")
{
  const auto op = circle_op(32, 0.1);
  const DampingProfile a = DampingProfile::constant(0.1);
  const CauchyData d = make_random_data(op, 12);
  const DecayReport rep =
      decay_experiment(op, a, d, std::nullopt, 100.0, 12);
  CHECK(rep.gap == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(rep.c_inf == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(rep.predicted_rate == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(std::abs(rep.fitted_rate - 0.2) <= 0.05 * 0.2);
  CHECK_FALSE(rep.no_control);

  // Theorem 1.3 prediction recorded when a pressure estimate is given.
  const DecayReport with_pr = decay_experiment(
      op, a, d, std::make_pair(-0.45, 0.1), 100.0, 12);
  CHECK(with_pr.theorem_rate == doctest::Approx(0.2));  // min hits G

  // Undamped: all rates zero.
  const auto op0 = circle_op(32, 0.0);
  const CauchyData d0 = make_random_data(op0, 12);
  const DecayReport zero = decay_experiment(
      op0, DampingProfile::constant(0.0), d0, std::nullopt, 50.0, 12);
  CHECK(zero.fitted_rate == 0.0);
  CHECK(zero.predicted_rate == 0.0);
}
