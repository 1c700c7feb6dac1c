// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "spectral.hpp"

using namespace dwlab;

namespace
{

DiscreteOperator circle_op(int n, double a0, double len = 2.0 * M_PI)
{
  return assemble_operator(Geometry::circle(len, n),
                           DampingProfile::constant(a0));
}

// Greedy bijective matching of computed eigenvalues against oracle roots.
double max_match_error(const Eigen::VectorXcd &eigs,
                       std::vector<Complex> oracle)
{
  double worst = 0.0;
  for (int i = 0; i < eigs.size(); ++i)
  {
    double best = std::numeric_limits<double>::infinity();
    size_t at = 0;
    for (size_t j = 0; j < oracle.size(); ++j)
    {
      const double d = std::abs(eigs(i) - oracle[j]);
      if (d < best)
      {
        best = d;
        at = j;
      }
    }
    worst = std::max(worst, best / std::max(1.0, std::abs(oracle[at])));
    oracle.erase(oracle.begin() + long(at));
  }
  return worst;
}

std::vector<Complex> circle_oracle(const DiscreteOperator &op, double a0)
{
  std::vector<Complex> roots;
  for (int i = 0; i < op.n; ++i)
  {
    const auto [r1, r2] = constant_damping_oracle(-op.basis_eigs(i), a0);
    roots.push_back(r1);
    roots.push_back(r2);
  }
  return roots;
}

}  // namespace

TEST_CASE("constant damping oracle roots")
{
  // k = 0: tau(tau + 2i a0) = 0.
  auto [r1, r2] = constant_damping_oracle(0.0, 0.1);
  CHECK(std::abs(r1) < 1e-15);
  CHECK(r2 == Complex(0.0, -0.2));
  // Oscillatory regime k^2 > a0^2: Im tau = -a0 exactly.
  auto [s1, s2] = constant_damping_oracle(1.0, 0.1);
  CHECK(s1.imag() == doctest::Approx(-0.1));
  CHECK(s2.imag() == doctest::Approx(-0.1));
  CHECK(s1.real() == doctest::Approx(std::sqrt(0.99)));
  // Overdamped regime k^2 < a0^2: both roots purely imaginary.
  auto [t1, t2] = constant_damping_oracle(0.25, 1.0);
  CHECK(std::abs(t1.real()) < 1e-14);
  CHECK(std::abs(t2.real()) < 1e-14);
}

TEST_CASE("circle spectrum matches the quadratic oracle")
{
  const auto op = circle_op(64, 0.1);
  const Spectrum s = solve_spectrum(linearize(op), false);
  CHECK(max_match_error(s.eigenvalues, circle_oracle(op, 0.1)) < 1e-6);
}

TEST_CASE("band and symmetry over random smooth dampings")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial)
  {
    const double c1 = unif(rng), c2 = unif(rng), amp = 0.3 + 0.4 * unif(rng);
    // Nonnegative smooth profile: squared trig polynomial.
    auto fn = [=](double x, double) {
      const double v = std::sin(x + c1) + 0.5 * std::cos(2 * x + c2);
      return amp * v * v;
    };
    const auto damping = DampingProfile::custom(fn, amp * 2.25);
    const auto op = assemble_operator(Geometry::circle(2.0 * M_PI, 32),
                                      damping);
    const Spectrum s = solve_spectrum(linearize(op), true);
    const DiagnosticsReport d = spectrum_diagnostics(s, op, {});
    CHECK(d.band_ok);
    CHECK(d.symmetry_ok);
  }
}

TEST_CASE("tau = 0 eigenvalue carries the constant state")
{
  const auto op = circle_op(24, 0.3);
  const Spectrum s = solve_spectrum(linearize(op), true);
  int at = 0;
  for (int i = 1; i < s.eigenvalues.size(); ++i)
    if (std::abs(s.eigenvalues(i)) < std::abs(s.eigenvalues(at)))
      at = i;
  CHECK(std::abs(s.eigenvalues(at)) < 1e-8);
  const Eigen::VectorXcd u = s.eigenvectors.col(at).head(op.n);
  const Eigen::VectorXcd dev =
      u - Eigen::VectorXcd::Constant(op.n, u.mean());
  CHECK(dev.norm() < 1e-7 * u.norm());
}

TEST_CASE("weyl counts on the circle")
{
  const auto op = circle_op(128, 0.1);
  const Spectrum s = solve_spectrum(linearize(op), false);
  const DiagnosticsReport d =
      spectrum_diagnostics(s, op, {10.5, 20.5, 40.5});
  for (const auto &w : d.weyl)
    CHECK(std::abs(double(w.measured) - 2.0 * w.lambda) <= 2.0);
}

TEST_CASE("resolvent norm blows up at an eigenvalue")
{
  const auto op = circle_op(16, 0.1);
  const QuadraticPencil pencil{&op};
  const Spectrum s = solve_spectrum(linearize(op), false);
  Complex tau = s.eigenvalues(5);
  const double near = resolvent_norm(pencil, tau + Complex(1e-7, 0.0));
  const double far = resolvent_norm(pencil, tau + Complex(0.5, 0.5));
  CHECK(near > 1e4 * far);
}

TEST_CASE("resolvent block identity")
{
  const auto op = circle_op(16, 0.2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 5; ++i)
  {
    const Complex tau(3.0 * unif(rng), -0.5 + 0.45 * unif(rng));
    CHECK(resolvent_block_check(op, tau) < 1e-10);
  }
}

TEST_CASE("semiclassical rescaling identities")
{
  const Complex tau(4.0, -0.1);
  const double hbar = 0.25;
  const RescaledEigenvalue r = semiclassical_rescale(tau, hbar);
  CHECK(r.lambda == tau * hbar);
  CHECK(r.z == 0.5 * r.lambda * r.lambda);
  CHECK(std::abs(r.z - (0.5 + hbar * r.zeta)) < 1e-14);
  CHECK_THROWS_AS(semiclassical_rescale(tau, 0.0), Error);
}

TEST_CASE("separable torus spectrum matches the dense solver")
{
  const auto g = Geometry::flat_torus(1.0, 1.0, 8, 8);
  const auto damping = DampingProfile::smoothed_strip(0.5, 0.3, 0.4, 0.05);
  const auto op = assemble_operator(g, damping);
  const Spectrum dense = solve_spectrum(linearize(op), false);
  const Eigen::VectorXcd sep = torus_separable_spectrum(g, damping);
  REQUIRE(sep.size() == dense.eigenvalues.size());
  CHECK(max_match_error(dense.eigenvalues,
                        {sep.data(), sep.data() + sep.size()}) < 1e-6);
}

TEST_CASE("pencil determinant vanishes exactly at companion eigenvalues")
{
  const auto op = circle_op(12, 0.15);
  const QuadraticPencil pencil{&op};
  const Spectrum s = solve_spectrum(linearize(op), false);
  for (int i : {0, 5, 11})
  {
    const Eigen::MatrixXcd p = pencil.evaluate(s.eigenvalues(i));
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
    CHECK(svd.singularValues()(op.n - 1) < 1e-8);
  }
}
