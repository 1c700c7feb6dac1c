// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "geometry.hpp"

using namespace dwlab;

TEST_CASE("circle operator: symmetric, NSD, exact eigenvalues")
{
  const auto g = Geometry::circle(2.0 * M_PI, 16);
  const auto op = assemble_operator(g, DampingProfile::constant(0.0));
  CHECK((op.laplacian - op.laplacian.transpose()).cwiseAbs().maxCoeff() <
        1e-10);
  // Circle of length 2pi: eigenvalues -k^2, k = 0, +-1, ..., with the
  // Nyquist mode unpaired.
  std::vector<double> eigs(op.basis_eigs.data(),
                           op.basis_eigs.data() + op.n);
  std::sort(eigs.begin(), eigs.end());
  CHECK(eigs.back() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eigs[op.n - 2] == doctest::Approx(-1.0));
  CHECK(eigs[op.n - 3] == doctest::Approx(-1.0));
  CHECK(eigs.front() == doctest::Approx(-64.0));
  // Basis orthonormal.
  const Eigen::MatrixXd gram = op.basis.transpose() * op.basis;
  CHECK((gram - Eigen::MatrixXd::Identity(op.n, op.n)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("torus operator eigenvalues are sums of 1d frequencies")
{
  const auto g = Geometry::flat_torus(1.0, 1.0, 8, 8);
  const auto op = assemble_operator(g, DampingProfile::constant(0.0));
  std::vector<double> eigs(op.basis_eigs.data(),
                           op.basis_eigs.data() + op.n);
  std::sort(eigs.begin(), eigs.end(), std::greater<>());
  const double k1 = 4.0 * M_PI * M_PI;  // (2 pi / L)^2
  CHECK(eigs[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eigs[1] == doctest::Approx(-k1));
  CHECK(eigs[4] == doctest::Approx(-k1));  // four modes with |k| = 2 pi
}

TEST_CASE("geometry invariants rejected")
{
  CHECK_THROWS_AS(Geometry::circle(-1.0, 32), Error);
  CHECK_THROWS_AS(Geometry::circle(1.0, 4), Error);
  CHECK_THROWS_AS(Geometry::flat_torus(1.0, 0.0, 8, 8), Error);
}

TEST_CASE("smoothed strip is exactly 0 outside and a0 in the core")
{
  const auto a = DampingProfile::smoothed_strip(0.5, 0.3, 0.7, 0.05);
  CHECK(a.value(0.0) == 0.0);
  CHECK(a.value(0.2) == 0.0);
  CHECK(a.value(0.5) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(a.sup_norm() == doctest::Approx(0.7));
  // C-infinity mollification: intermediate values strictly between.
  const double mid = a.value(0.5 - 0.125);
  CHECK(mid > 0.0);
  CHECK(mid < 0.7);
  // Periodic in the strip coordinate.
  CHECK(a.value(1.5, 0.0, 1.0) == doctest::Approx(a.value(0.5)));
}

TEST_CASE("matrix market round trip and validation")
{
  const std::string dir = std::filesystem::temp_directory_path().string();
  const std::string good = dir + "/dwlab_test_good.mtx";
  {
    std::ofstream f(good);
    f << "%%MatrixMarket matrix coordinate real symmetric\n"
      << "8 8 15\n";
    for (int i = 1; i <= 8; ++i)
      f << i << ' ' << i << " -2.0\n";
    for (int i = 2; i <= 8; ++i)
      f << i << ' ' << i - 1 << " 1.0\n";
  }
  const Eigen::MatrixXd m = read_matrix_market(good);
  CHECK(m(0, 1) == doctest::Approx(1.0));
  CHECK(m(1, 0) == doctest::Approx(1.0));
  CHECK(m(0, 0) == doctest::Approx(-2.0));
  CHECK(m(0, 7) == doctest::Approx(0.0));

  const std::string bad = dir + "/dwlab_test_bad.mtx";
  {
    std::ofstream f(bad);
    f << "%%MatrixMarket matrix coordinate real general\n"
      << "8 8 9\n";
    for (int i = 1; i <= 8; ++i)
      f << i << ' ' << i << " -2.0\n";
    f << "1 2 1.0\n";
  }
  Geometry g = Geometry::matrix_input(bad);
  CHECK_THROWS_WITH_AS(assemble_operator(g, DampingProfile::constant(0.1)),
                       doctest::Contains("not symmetric"), Error);
}

TEST_CASE("quadrature weight matches the geometry volume")
{
  const auto g = Geometry::circle(2.0 * M_PI, 32);
  const auto op = assemble_operator(g, DampingProfile::constant(0.0));
  CHECK(op.quad_weight() * op.n == doctest::Approx(2.0 * M_PI));
}
