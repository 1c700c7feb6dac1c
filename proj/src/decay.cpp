// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>

#include "dynamics.hpp"

namespace dwlab
{

namespace
{

Eigen::VectorXcd stack_state(const CauchyData &data)
{
  const int n = int(data.omega0.size());
  Eigen::VectorXcd y(2 * n);
  y.head(n) = data.omega0;
  y.tail(n) = data.omega1;
  return y;
}

WaveState split_state(double t, const Eigen::VectorXcd &y)
{
  const int n = int(y.size()) / 2;
  return WaveState{t, y.head(n), y.tail(n)};
}

double ode_step_size(const DiscreteOperator &op)
{
  const Geometry &g = op.geometry;
  double h;
  if (g.kind == Geometry::Kind::Circle)
    h = g.lx / g.nx;
  else if (g.kind == Geometry::Kind::FlatTorus)
    h = std::min(g.lx / g.nx, g.ly / g.ny);
  else
    h = 1.0 / std::sqrt(std::max(1.0, op.basis_eigs.cwiseAbs().maxCoeff()));
  return 0.2 * h;  // wave speed 1
}

std::vector<WaveState> evolve_modal(const DiscreteOperator &op,
                                    const CauchyData &data,
                                    const std::vector<double> &t_grid)
{
  const CompanionOperator b = linearize(op);
  const Spectrum s = solve_spectrum(b, true);
  if (s.near_defective || s.eigenvector_condition > 1e8)
    throw Error("modal evolution on a near-defective spectrum; use ode");
  const Eigen::VectorXcd coeff =
      s.eigenvectors.partialPivLu().solve(stack_state(data));
  std::vector<WaveState> out;
  out.reserve(t_grid.size());
  const Complex mi(0.0, -1.0);
  for (double t : t_grid)
  {
    const Eigen::VectorXcd phases =
        (mi * t * s.eigenvalues.array()).exp().matrix();
    out.push_back(split_state(t, s.eigenvectors * phases.cwiseProduct(coeff)));
  }
  return out;
}

std::vector<WaveState> evolve_ode(const DiscreteOperator &op,
                                  const CauchyData &data,
                                  const std::vector<double> &t_grid)
{
  const CompanionOperator comp = linearize(op);
  const int m = 2 * op.n;
  const double dt0 = ode_step_size(op);
  const bool nonneg = op.damping.minCoeff() >= -1e-12;

  Eigen::VectorXcd y = stack_state(data);
  double t = 0.0;
  const double e0 = energy(op, y.head(op.n), y.tail(op.n));
  double e_prev = e0;

  double cached_dt = -1.0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  Eigen::MatrixXcd rhs_mat;

  std::vector<WaveState> out;
  out.reserve(t_grid.size());
  const Complex ihalf(0.0, 0.5);
  for (double target : t_grid)
  {
    if (target < t - 1e-12)
      throw Error("t_grid must be ascending from 0");
    if (target > t + 1e-12)
    {
      const int steps = int(std::ceil((target - t) / dt0 - 1e-12));
      const double dt = (target - t) / steps;
      if (std::abs(dt - cached_dt) > 1e-15)
      {
        // Implicit midpoint: (I + i dt/2 B) y' = (I - i dt/2 B) y.
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
        lu.compute(id + ihalf * dt * comp.b);
        rhs_mat = id - ihalf * dt * comp.b;
        cached_dt = dt;
      }
      for (int k = 0; k < steps; ++k)
      {
        y = lu.solve(rhs_mat * y);
        if (nonneg)
        {
          const double e = energy(op, y.head(op.n), y.tail(op.n));
          if (e > e_prev + 1e-9 * e0)
            throw Error("ode step rejected: energy increase beyond tolerance");
          e_prev = e;
        }
      }
      t = target;
    }
    out.push_back(split_state(target, y));
  }
  return out;
}

}  // namespace

std::vector<WaveState> evolve(const DiscreteOperator &op,
                              const CauchyData &data,
                              const std::vector<double> &t_grid,
                              EvolveMethod method)
{
  if (data.omega0.size() != op.n || data.omega1.size() != op.n)
    throw Error("Cauchy data does not match the grid");
  if (t_grid.empty())
    throw Error("empty time grid");
  return method == EvolveMethod::Modal ? evolve_modal(op, data, t_grid)
                                       : evolve_ode(op, data, t_grid);
}

double energy(const DiscreteOperator &op, const Eigen::VectorXcd &u,
              const Eigen::VectorXcd &v)
{
  const double kinetic = v.squaredNorm();
  const double potential =
      -(u.dot(op.laplacian.cast<Complex>() * u)).real();
  return 0.5 * op.quad_weight() * (kinetic + std::max(0.0, potential));
}

double hs_norm_sq(const DiscreteOperator &op, const Eigen::VectorXcd &u,
                  double s)
{
  const Eigen::VectorXcd c = op.basis.transpose().cast<Complex>() * u;
  double acc = 0.0;
  for (int i = 0; i < op.n; ++i)
    acc += std::pow(1.0 - op.basis_eigs(i), s) * std::norm(c(i));
  return op.quad_weight() * acc;
}

EnergySeries energy_series(const DiscreteOperator &op,
                           const std::vector<WaveState> &states,
                           EvolveMethod method)
{
  EnergySeries series;
  series.method = method;
  for (const auto &st : states)
  {
    series.times.push_back(st.t);
    series.energies.push_back(energy(op, st.u, st.v));
  }
  return series;
}

RateFit fit_decay_rate(const EnergySeries &series, double window_lo,
                       double window_hi)
{
  std::vector<double> ts, ls;
  for (size_t i = 0; i < series.times.size(); ++i)
  {
    const double t = series.times[i];
    if (t < window_lo || t > window_hi)
      continue;
    if (series.energies[i] <= 0.0)
      throw Error("non-positive energy inside the fit window");
    ts.push_back(t);
    ls.push_back(std::log(series.energies[i]));
  }
  if (ts.size() < 10)
    throw Error("fit window holds fewer than 10 points");

  const double n = double(ts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < ts.size(); ++i)
  {
    sx += ts[i];
    sy += ls[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * ls[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < ts.size(); ++i)
  {
    const double r = ls[i] - (icpt + slope * ts[i]);
    ss += r * r;
  }
  RateFit fit;
  fit.rate = -slope;
  fit.residual = std::sqrt(ss / n);
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.points = int(ts.size());
  return fit;
}

ModeProjection contour_projector(const CompanionOperator &b,
                                 const Spectrum &spectrum, Complex center,
                                 double radius, int n_quad)
{
  if (radius <= 0.0 || n_quad < 4)
    throw Error("contour needs a positive radius and >= 4 nodes");
  std::vector<Complex> cluster;
  for (int i = 0; i < spectrum.eigenvalues.size(); ++i)
  {
    const double d = std::abs(spectrum.eigenvalues(i) - center);
    if (d < radius)
      cluster.push_back(spectrum.eigenvalues(i));
    else if (d < 2.0 * radius)
      throw Error("contour enclosure violated: foreign eigenvalue within "
                  "twice the radius");
  }
  if (cluster.empty())
    throw Error("contour encloses no eigenvalue");

  const int m = int(b.b.rows());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
  Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(m, m);
  for (int j = 0; j < n_quad; ++j)
  {
    const double theta = 2.0 * M_PI * j / n_quad;
    const Complex w = std::polar(1.0, theta);
    const Complex tau = center + radius * w;
    pi += (radius / n_quad) * w *
          (tau * id - b.b).partialPivLu().solve(id);
  }

  ModeProjection proj;
  proj.projector = pi;
  proj.idempotence_residual = (pi * pi - pi).norm();
  proj.rank = int(std::lround(pi.trace().real()));
  proj.multiplicity = int(cluster.size());
  Complex mean = 0.0;
  for (Complex tau : cluster)
    mean += tau;
  proj.tau = mean / double(cluster.size());
  if (proj.idempotence_residual > 1e-8 || proj.rank != proj.multiplicity)
    throw Error("contour enclosure violated: projector rank does not match "
                "the cluster");
  return proj;
}

namespace
{

double rect_boundary_distance(Complex tau, const SpectralRegion &r)
{
  const double dre = std::max(r.re_min - tau.real(), tau.real() - r.re_max);
  const double dim = std::max(r.im_min - tau.imag(), tau.imag() - r.im_max);
  if (dre <= 0.0 && dim <= 0.0)  // inside: distance to the nearest side
    return std::min(-dre, -dim);
  return std::hypot(std::max(0.0, dre), std::max(0.0, dim));
}

}  // namespace

ModeExpansion mode_expansion(const CompanionOperator &b,
                             const Spectrum &spectrum, const CauchyData &data,
                             const SpectralRegion &region)
{
  const int ne = int(spectrum.eigenvalues.size());
  std::vector<int> inside;
  for (int i = 0; i < ne; ++i)
  {
    const Complex tau = spectrum.eigenvalues(i);
    if (rect_boundary_distance(tau, region) < 1e-6)
      throw Error("eigenvalue within 1e-6 of the region boundary; nudge the "
                  "region");
    if (region.contains(tau))
      inside.push_back(i);
  }

  // Single-linkage clustering with gap threshold 1e-6 (1 + |tau|).
  std::vector<int> parent(inside.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (size_t i = 0; i < inside.size(); ++i)
    for (size_t j = i + 1; j < inside.size(); ++j)
    {
      const Complex a = spectrum.eigenvalues(inside[i]);
      const Complex c = spectrum.eigenvalues(inside[j]);
      const double thr = 1e-6 * (1.0 + std::max(std::abs(a), std::abs(c)));
      if (std::abs(a - c) <= thr)
        parent[find(int(i))] = find(int(j));
    }
  std::map<int, std::vector<Complex>> clusters;
  for (size_t i = 0; i < inside.size(); ++i)
    clusters[find(int(i))].push_back(spectrum.eigenvalues(inside[i]));

  const Eigen::VectorXcd y0 = stack_state(data);
  ModeExpansion exp;
  exp.remainder = y0;
  for (const auto &[root, taus] : clusters)
  {
    Complex center = 0.0;
    for (Complex tau : taus)
      center += tau;
    center /= double(taus.size());
    double spread = 0.0;
    for (Complex tau : taus)
      spread = std::max(spread, std::abs(tau - center));
    double nearest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ne; ++i)
    {
      const Complex tau = spectrum.eigenvalues(i);
      if (std::abs(tau - center) > spread + 1e-12)
        nearest = std::min(nearest, std::abs(tau - center));
    }
    const double radius =
        std::isfinite(nearest) ? 0.5 * nearest : spread + 1.0;
    if (radius <= spread)
      throw Error("eigenvalue clusters too close for disjoint contours");
    ModeProjection proj = contour_projector(b, spectrum, center, radius);
    proj.projected = proj.projector * y0;
    exp.remainder -= proj.projected;
    exp.modes.push_back(std::move(proj));
  }
  return exp;
}

double window_bound_check(const DiscreteOperator &op,
                          const std::vector<WaveState> &states, double T)
{
  if (T < 2.0)
    throw Error("window bound needs T >= 2");
  std::vector<const WaveState *> win;
  for (const auto &st : states)
    if (st.t >= T - 2.0 - 1e-9 && st.t <= T + 1.0 + 1e-9)
      win.push_back(&st);
  if (win.size() < 2 || win.front()->t > T - 2.0 + 1e-9 ||
      win.back()->t < T + 1.0 - 1e-9)
    throw Error("insufficient sampling for the window bound");
  for (size_t i = 1; i < win.size(); ++i)
    if (win[i]->t - win[i - 1]->t > 0.05 + 1e-9)
      throw Error("insufficient sampling for the window bound");

  double integral = 0.0;
  double prev_t = win.front()->t;
  double prev_v = hs_norm_sq(op, win.front()->u, 1.0);
  for (size_t i = 1; i < win.size(); ++i)
  {
    const double v = hs_norm_sq(op, win[i]->u, 1.0);
    integral += 0.5 * (win[i]->t - prev_t) * (v + prev_v);
    prev_t = win[i]->t;
    prev_v = v;
  }

  const WaveState *at_t = win.front();
  for (const auto *st : win)
    if (std::abs(st->t - T) < std::abs(at_t->t - T))
      at_t = st;
  const double e = energy(op, at_t->u, at_t->v);
  return integral > 0.0 ? e / integral : 0.0;
}

DecayReport decay_experiment(const DiscreteOperator &op,
                             const DampingProfile &damping,
                             const CauchyData &data,
                             std::optional<std::pair<double, double>>
                                 pressure_and_margin,
                             double horizon, unsigned long seed)
{
  DecayReport rep;
  rep.kappa = 0.5 * op.geometry.dim();

  const CompanionOperator comp = linearize(op);
  const Spectrum spec = solve_spectrum(comp, true);
  const double zero_tol = 1e-8 * comp.b.norm();
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.eigenvalues.size(); ++i)
    if (std::abs(spec.eigenvalues(i)) > zero_tol)
      gap = std::min(gap, -spec.eigenvalues(i).imag());
  rep.gap = std::max(0.0, std::isfinite(gap) ? gap : 0.0);

  std::unique_ptr<DynamicalSystem> sys;
  if (op.geometry.kind == Geometry::Kind::Circle)
    sys = std::make_unique<CircleFlow>(op.geometry.lx);
  else if (op.geometry.kind == Geometry::Kind::FlatTorus)
    sys = std::make_unique<TorusFlow>(op.geometry.lx, op.geometry.ly);
  else
    throw Error("decay experiment needs a flow model (circle or torus)");
  // Invariant-orbit witnesses: vertical torus geodesics through undamped
  // columns have exactly zero time average, pinning C(inf) = 0 when
  // geometric control fails.
  std::vector<PhasePoint> witnesses;
  if (op.geometry.kind == Geometry::Kind::FlatTorus)
    for (int i = 0; i < op.geometry.nx; ++i)
    {
      const double x = op.geometry.lx * i / op.geometry.nx;
      if (damping.value(x, 0.0, op.geometry.lx) == 0.0)
        witnesses.push_back(
            {PhasePoint::Kind::Torus, x, 0.0, 0.0, 1.0});
    }
  const DampingStats stats =
      min_time_average(damping, *sys, op.geometry, 40.0, 400, seed,
                       witnesses);
  rep.c_inf = stats.min_average;
  rep.a_bar = stats.liouville_mean;
  rep.predicted_rate = 2.0 * std::min(rep.gap, rep.c_inf);
  rep.no_control = damping.sup_norm() > 0.0 && rep.c_inf <= 1e-12;
  if (pressure_and_margin)
    rep.theorem_rate =
        2.0 * std::min(rep.gap, std::abs(pressure_and_margin->first +
                                         pressure_and_margin->second));

  if (damping.sup_norm() == 0.0)
  {
    rep.window_hi = horizon;
    return rep;  // conservative case: all rates zero
  }

  double lo = rep.gap > 1e-10 ? 5.0 / rep.gap : 5.0 / damping.sup_norm();
  lo = std::min(lo, 0.6 * horizon);  // keep a usable window when G is tiny
  const double step = std::min(0.5, (horizon - lo) / 12.0);
  std::vector<double> grid;
  for (double t = 0.0; t <= horizon + 1e-9; t += step)
    grid.push_back(t);

  const EvolveMethod method =
      spec.near_defective || spec.eigenvector_condition > 1e8
          ? EvolveMethod::Ode
          : EvolveMethod::Modal;
  const auto states = evolve(op, data, grid, method);
  const EnergySeries series = energy_series(op, states, method);
  const RateFit fit = fit_decay_rate(series, lo, horizon);
  rep.fitted_rate = std::max(0.0, fit.rate);
  rep.window_lo = fit.window_lo;
  rep.window_hi = fit.window_hi;
  rep.residual = fit.residual;
  return rep;
}

}  // namespace dwlab
