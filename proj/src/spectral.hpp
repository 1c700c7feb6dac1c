// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace dwlab
{

using Complex = std::complex<double>;

// First-order linearization of the quadratic pencil: the 2N x 2N block
// matrix [[0, I], [-Delta, -2i diag(a)]].
struct CompanionOperator
{
  Eigen::MatrixXcd b;
  int n = 0;  // grid size N; b is 2N x 2N
  const DiscreteOperator *op = nullptr;
};

struct Spectrum
{
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // empty unless requested
  double eigenvector_condition = 0.0;
  double sup_damping = 0.0;
  bool near_defective = false;
  std::string provenance;
};

struct RescaledEigenvalue
{
  double hbar = 0.0;
  Complex tau, lambda, z, zeta;
};

// tau -> P(tau) = -Delta - tau^2 - 2 i a tau.
struct QuadraticPencil
{
  const DiscreteOperator *op = nullptr;
  Eigen::MatrixXcd evaluate(Complex tau) const;
};

struct WeylCount
{
  double lambda = 0.0;
  long measured = 0;
  double predicted = 0.0;
};

struct DiagnosticsReport
{
  bool band_ok = false;
  bool symmetry_ok = false;
  double gap = 0.0;  // G = min -Im tau over nonzero eigenvalues
  std::vector<WeylCount> weyl;
};

inline constexpr int kDenseSolverCap = 4096;  // max 2N for dense eigensolve

CompanionOperator linearize(const DiscreteOperator &op);

Spectrum solve_spectrum(const CompanionOperator &b, bool want_vectors);

// Roots of tau^2 + 2 i a0 tau - k_sq = 0, ordered by descending Im then
// descending Re.
std::pair<Complex, Complex> constant_damping_oracle(double k_sq, double a0);

DiagnosticsReport spectrum_diagnostics(const Spectrum &s,
                                       const DiscreteOperator &op,
                                       const std::vector<double> &weyl_lambdas);

// Operator norm of P(tau)^{-1} = 1 / sigma_min(P(tau)); +inf marker when
// exactly singular.
double resolvent_norm(const QuadraticPencil &pencil, Complex tau);

// Max elementwise difference between the directly solved (tau - B)^{-1} and
// its reconstruction from the four R(tau) blocks.
double resolvent_block_check(const DiscreteOperator &op, Complex tau);

RescaledEigenvalue semiclassical_rescale(Complex tau, double hbar);

// Spectrum of the torus operator with damping depending on x only, computed
// exactly per y-frequency block (each block is a 2*nx companion problem).
// Allows resolutions past the dense 2N cap.
Eigen::VectorXcd torus_separable_spectrum(const Geometry &torus,
                                          const DampingProfile &damping);

}  // namespace dwlab
