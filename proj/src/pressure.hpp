// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "dynamics.hpp"

namespace dwlab
{

struct PressureConfig
{
  std::vector<double> epsilon_list;  // descending
  std::vector<int> t_list;           // ascending
  double delta = 0.25;               // energy-shell half width, in (0, 1/2)
  double cover_diam = 0.15;
  long budget = 1024;
  unsigned long seed = 1;

  void validate() const;

  // Defaults per system family; epsilon/budget sized so the greedy separated
  // sets keep growing over the whole T range instead of saturating.
  static PressureConfig map_defaults();
  static PressureConfig flow_defaults();
};

enum class PressureMethod
{
  Separated,
  Cover,
  Transfer,
  ClosedForm
};

struct PressureEstimate
{
  double value = 0.0;
  PressureMethod method = PressureMethod::Separated;
  double eps = 0.0;
  int horizon = 0;
  double z_value = 0.0;   // raw log Z_T / T
  double error_bar = 0.0;
};

struct SeparatedResult
{
  PressureEstimate best;  // smallest eps, largest T
  std::vector<PressureEstimate> table;
};

struct CoverWord
{
  std::vector<long> symbols;
  double coarse_sum = 0.0;  // sup of the Birkhoff sum over sampled cylinder points
  long support_samples = 0;
};

struct CoverResult
{
  PressureEstimate est;
  std::vector<CoverWord> words;  // selected subcover with weights
  long uncovered_cells = 0;      // partition cells never visited by a sample
};

struct GapVerdict
{
  double pressure = 0.0;
  double margin = 0.0;
  double threshold = 0.0;  // Pr + eps
  bool satisfied = false;
};

SeparatedResult pressure_separated(const DynamicalSystem &sys,
                                   const ScalarField &f,
                                   const PressureConfig &cfg);

CoverResult pressure_cover(const DynamicalSystem &sys, const ScalarField &f,
                           const PressureConfig &cfg);

PressureEstimate pressure_transfer(const Eigen::MatrixXd &adjacency,
                                   const Eigen::VectorXd &word_weights);

// Runs the separated estimator over the (eps, T) grid and extrapolates
// T -> infinity by a linear fit of value vs 1/T at the smallest eps.
PressureEstimate pressure_schedule(const DynamicalSystem &sys,
                                   const ScalarField &f,
                                   const PressureConfig &cfg);

// Fit-only variant reusing an already computed separated table.
PressureEstimate pressure_schedule(const SeparatedResult &sep,
                                   const PressureConfig &cfg);

GapVerdict gap_condition(const PressureEstimate &est, double margin);

}  // namespace dwlab
