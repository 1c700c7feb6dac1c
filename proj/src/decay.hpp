// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "spectral.hpp"

namespace dwlab
{

// (u, i dt u) at t = 0; omega0 plays the H^1 role, omega1 the H^0 role.
struct CauchyData
{
  Eigen::VectorXcd omega0;
  Eigen::VectorXcd omega1;
  const DiscreteOperator *op = nullptr;
};

struct WaveState
{
  double t = 0.0;
  Eigen::VectorXcd u;
  Eigen::VectorXcd v;  // i dt u
};

enum class EvolveMethod
{
  Modal,
  Ode
};

struct EnergySeries
{
  std::vector<double> times;
  std::vector<double> energies;
  EvolveMethod method = EvolveMethod::Ode;
};

struct ModeProjection
{
  Complex tau;           // cluster mean
  int multiplicity = 0;  // numerical cluster size
  int rank = 0;
  Eigen::MatrixXcd projector;
  Eigen::VectorXcd projected;  // projector applied to the companion state
  double idempotence_residual = 0.0;
};

struct SpectralRegion
{
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;

  bool contains(Complex tau) const
  {
    return tau.real() >= re_min && tau.real() <= re_max &&
           tau.imag() >= im_min && tau.imag() <= im_max;
  }
};

struct ModeExpansion
{
  std::vector<ModeProjection> modes;
  Eigen::VectorXcd remainder;
};

struct RateFit
{
  double rate = 0.0;
  double residual = 0.0;  // RMS of log-energy residuals
  double window_lo = 0.0, window_hi = 0.0;
  int points = 0;
};

struct DecayReport
{
  double gap = 0.0;    // G
  double c_inf = 0.0;  // C(infinity) estimate
  double a_bar = 0.0;
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;  // 2 min(G, C(inf)), Lebeau's rho(0)
  double theorem_rate = -1.0;   // 2 min(G, |Pr + margin|); < 0 when no
                                // pressure estimate was supplied
  double window_lo = 0.0, window_hi = 0.0;
  double residual = 0.0;
  double kappa = 0.0;
  bool no_control = false;  // C(inf) = 0: fitted rate resolution-dependent
};

std::vector<WaveState> evolve(const DiscreteOperator &op,
                              const CauchyData &data,
                              const std::vector<double> &t_grid,
                              EvolveMethod method);

double energy(const DiscreteOperator &op, const Eigen::VectorXcd &u,
              const Eigen::VectorXcd &v);

// Squared H^s norm via the Fourier multiplier (1 + |k|^2)^{s/2}.
double hs_norm_sq(const DiscreteOperator &op, const Eigen::VectorXcd &u,
                  double s);

EnergySeries energy_series(const DiscreteOperator &op,
                           const std::vector<WaveState> &states,
                           EvolveMethod method);

RateFit fit_decay_rate(const EnergySeries &series, double window_lo,
                       double window_hi);

ModeProjection contour_projector(const CompanionOperator &b,
                                 const Spectrum &spectrum, Complex center,
                                 double radius, int n_quad = 32);

ModeExpansion mode_expansion(const CompanionOperator &b,
                             const Spectrum &spectrum, const CauchyData &data,
                             const SpectralRegion &region);

// E(u, T) / \int_{T-2}^{T+1} ||u||_{H^1}^2 dt; states must sample
// [T-2, T+1] with step <= 0.05.
double window_bound_check(const DiscreteOperator &op,
                          const std::vector<WaveState> &states, double T);

DecayReport decay_experiment(const DiscreteOperator &op,
                             const DampingProfile &damping,
                             const CauchyData &data,
                             std::optional<std::pair<double, double>>
                                 pressure_and_margin,
                             double horizon, unsigned long seed = 1);

}  // namespace dwlab
