// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "spectral.hpp"

#include <algorithm>
#include <cmath>

namespace dwlab
{

using namespace std::complex_literals;

CompanionOperator linearize(const DiscreteOperator &op)
{
  const int n = op.n;
  CompanionOperator c;
  c.n = n;
  c.op = &op;
  c.b = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  c.b.topRightCorner(n, n) = Eigen::MatrixXcd::Identity(n, n);
  c.b.bottomLeftCorner(n, n) = (-op.laplacian).cast<Complex>();
  for (int i = 0; i < n; ++i)
    c.b(n + i, n + i) = -2.0i * op.damping(i);
  return c;
}

Spectrum solve_spectrum(const CompanionOperator &b, bool want_vectors)
{
  const int m = int(b.b.rows());
  if (m > kDenseSolverCap)
    throw Error("problem size exceeds dense solver cap");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(b.b, want_vectors);
  if (es.info() != Eigen::Success)
    throw Error("eigensolver failed to converge");

  Spectrum s;
  s.eigenvalues = es.eigenvalues();
  s.sup_damping = b.op ? b.op->sup_damping : 0.0;
  if (want_vectors)
  {
    s.eigenvectors = es.eigenvectors();
    // Residual check ||(B - tau)v|| <= 1e-8 ||B|| per pair.
    const double bnorm = b.b.norm();
    for (int j = 0; j < m; ++j)
    {
      const double res =
          (b.b * s.eigenvectors.col(j) - s.eigenvalues(j) * s.eigenvectors.col(j))
              .norm();
      if (res > 1e-8 * bnorm)
        throw Error("eigenvector residual exceeds tolerance");
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.eigenvectors);
    const double smin = svd.singularValues()(m - 1);
    s.eigenvector_condition =
        smin > 0.0 ? svd.singularValues()(0) / smin
                   : std::numeric_limits<double>::infinity();
    s.near_defective = s.eigenvector_condition > 1e8;
  }
  return s;
}

std::pair<Complex, Complex> constant_damping_oracle(double k_sq, double a0)
{
  const double disc = k_sq - a0 * a0;
  Complex t1, t2;
  if (disc >= 0.0)
  {
    const double r = std::sqrt(disc);
    t1 = Complex(r, -a0);
    t2 = Complex(-r, -a0);
  }
  else
  {
    const double r = std::sqrt(-disc);
    t1 = Complex(0.0, -a0 + r);
    t2 = Complex(0.0, -a0 - r);
  }
  return {t1, t2};
}

DiagnosticsReport spectrum_diagnostics(const Spectrum &s,
                                       const DiscreteOperator &op,
                                       const std::vector<double> &weyl_lambdas)
{
  DiagnosticsReport rep;
  const auto &ev = s.eigenvalues;
  const int m = int(ev.size());
  const double bnorm = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double zero_tol = 1e-8 * bnorm;

  rep.band_ok = true;
  for (int i = 0; i < m; ++i)
  {
    const double im = ev(i).imag();
    if (im > 1e-8 || im < -2.0 * s.sup_damping - 1e-8)
      rep.band_ok = false;
  }

  rep.symmetry_ok = true;
  for (int i = 0; i < m; ++i)
  {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j)
      best = std::min(best, std::abs(ev(j) + std::conj(ev(i))));
    if (best > 1e-6 * (1.0 + std::abs(ev(i))))
      rep.symmetry_ok = false;
  }

  rep.gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    if (std::abs(ev(i)) > zero_tol)
      rep.gap = std::min(rep.gap, -ev(i).imag());

  const double vol = op.geometry.volume();
  const int d = op.geometry.dim();
  for (double lam : weyl_lambdas)
  {
    WeylCount w;
    w.lambda = lam;
    for (int i = 0; i < m; ++i)
      if (ev(i).real() >= 0.0 && ev(i).real() <= lam)
        ++w.measured;
    // Phase-space volume of {|xi|_g^2 <= 1}: 2*vol in d=1, pi*vol in d=2.
    const double ball = d == 1 ? 2.0 : M_PI;
    w.predicted = std::pow(lam / (2.0 * M_PI), d) * ball * vol;
    rep.weyl.push_back(w);
  }
  return rep;
}

Eigen::MatrixXcd QuadraticPencil::evaluate(Complex tau) const
{
  const int n = op->n;
  Eigen::MatrixXcd p = (-op->laplacian).cast<Complex>();
  p -= tau * tau * Eigen::MatrixXcd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    p(i, i) -= 2.0i * op->damping(i) * tau;
  return p;
}

double resolvent_norm(const QuadraticPencil &pencil, Complex tau)
{
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil.evaluate(tau));
  const double smin = svd.singularValues()(pencil.op->n - 1);
  if (smin == 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

double resolvent_block_check(const DiscreteOperator &op, Complex tau)
{
  const int n = op.n;
  QuadraticPencil pencil{&op};

  Eigen::FullPivLU<Eigen::MatrixXcd> plu(pencil.evaluate(tau));
  if (!plu.isInvertible())
    throw Error("singular pencil: tau is an eigenvalue");
  const Eigen::MatrixXcd r = plu.inverse();

  const CompanionOperator comp = linearize(op);
  Eigen::MatrixXcd m =
      tau * Eigen::MatrixXcd::Identity(2 * n, 2 * n) - comp.b;
  Eigen::FullPivLU<Eigen::MatrixXcd> mlu(m);
  if (!mlu.isInvertible())
    throw Error("singular resolvent: tau is an eigenvalue");
  const Eigen::MatrixXcd direct = mlu.inverse();

  Eigen::VectorXcd diag_tl(n), diag_bl(n);
  for (int i = 0; i < n; ++i)
  {
    diag_tl(i) = -2.0i * op.damping(i) - tau;
    diag_bl(i) = tau * diag_tl(i);
  }
  Eigen::MatrixXcd blocks(2 * n, 2 * n);
  blocks.topLeftCorner(n, n) = r * diag_tl.asDiagonal();
  blocks.topRightCorner(n, n) = -r;
  blocks.bottomLeftCorner(n, n) =
      r * diag_bl.asDiagonal() - Eigen::MatrixXcd::Identity(n, n);
  blocks.bottomRightCorner(n, n) = -tau * r;

  return (direct - blocks).cwiseAbs().maxCoeff();
}

RescaledEigenvalue semiclassical_rescale(Complex tau, double hbar)
{
  if (!(hbar > 0.0 && hbar <= 1.0))
    throw Error("hbar must lie in (0, 1]");
  RescaledEigenvalue r;
  r.hbar = hbar;
  r.tau = tau;
  r.lambda = hbar * tau;
  r.z = 0.5 * r.lambda * r.lambda;
  r.zeta = (r.z - 0.5) / hbar;
  return r;
}

Eigen::VectorXcd torus_separable_spectrum(const Geometry &torus,
                                          const DampingProfile &damping)
{
  if (torus.kind != Geometry::Kind::FlatTorus)
    throw Error("separable spectrum requires a flat torus");
  if (damping.kind == DampingProfile::Kind::Samples)
    throw Error("separable spectrum requires x-only damping");

  // x block: 1D circle operator of length lx; y enters only through its
  // Fourier eigenvalues ey <= 0, shifting the x Laplacian.
  const Geometry cx = Geometry::circle(torus.lx, torus.nx);
  DiscreteOperator opx = assemble_operator(cx, damping);
  const Geometry cy = Geometry::circle(torus.ly, torus.ny);
  const DiscreteOperator opy =
      assemble_operator(cy, DampingProfile::constant(0.0));

  const int nx = torus.nx;
  Eigen::VectorXcd all(2 * nx * torus.ny);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2 * nx, 2 * nx);
  b.topRightCorner(nx, nx) = Eigen::MatrixXcd::Identity(nx, nx);
  for (int i = 0; i < nx; ++i)
    b(nx + i, nx + i) = -2.0i * opx.damping(i);
  long out = 0;
  for (int ky = 0; ky < torus.ny; ++ky)
  {
    const double ey = opy.basis_eigs(ky);
    b.bottomLeftCorner(nx, nx) =
        (-(opx.laplacian + ey * Eigen::MatrixXd::Identity(nx, nx)))
            .cast<Complex>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(b, false);
    if (es.info() != Eigen::Success)
      throw Error("eigensolver failed on torus block");
    all.segment(out, 2 * nx) = es.eigenvalues();
    out += 2 * nx;
  }
  return all;
}

}  // namespace dwlab
