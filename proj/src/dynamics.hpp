// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "geometry.hpp"

namespace dwlab
{

// Point of a model phase space. Torus points carry position + unit covector;
// hyperbolic points carry an SL(2,R) frame (base point g.i in the upper half
// plane, direction from the frame); map points are just a coordinate.
struct PhasePoint
{
  enum class Kind
  {
    Torus,
    Hyperbolic,
    Circle,
    Map
  };
  Kind kind = Kind::Map;
  double x = 0.0, y = 0.0;      // torus position / circle position / map coord
  double xi1 = 1.0, xi2 = 0.0;  // torus unit covector, circle direction xi1
  Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();  // hyperbolic
};

struct TrajectorySample
{
  PhasePoint start;
  int horizon = 0;
  double birkhoff_sum = 0.0;
  double log_ju = 0.0;
  double weight_au = 0.0;
};

struct DampingStats
{
  double liouville_mean = 0.0;
  double min_average = 0.0;  // C(infinity) upper estimate at the horizon
  double sup_norm = 0.0;
  double horizon = 0.0;
  int n_samples = 0;
  long seed = 0;
};

// Common surface for the pressure estimators: continuous-time geodesic flows
// and discrete expanding maps. Flows use Bowen time step 0.1, maps exact
// iterates.
class DynamicalSystem
{
public:
  virtual ~DynamicalSystem() = default;
  virtual PhasePoint flow(const PhasePoint &p, double t) const = 0;
  virtual double distance(const PhasePoint &a, const PhasePoint &b) const = 0;
  virtual std::vector<PhasePoint> sample(int n, unsigned long seed) const = 0;
  virtual bool discrete_time() const { return false; }
  // Cell id of the partition with the given diameter, for cover words.
  virtual long cell_of(const PhasePoint &p, double diam) const = 0;
  // Total cell count of the cover partition, or -1 when not enumerable.
  virtual long cell_count(double) const { return -1; }
  // Damping evaluated at the base point pi(p).
  virtual double damping_value(const DampingProfile &damping,
                               const PhasePoint &p) const = 0;

  // Packed trajectory samples for the separated-set estimator. `pack` writes
  // packed_size() floats; `packed_within` decides distance <= eps on the
  // quotient (deck translates included).
  virtual int packed_size() const = 0;
  virtual void pack(const PhasePoint &p, float *out) const = 0;
  virtual bool packed_within(const float *a, const float *b,
                             double eps) const = 0;
  // Hash-cell keys for eps-neighbor queries at time 0. With query=false the
  // point's own cell keys are emitted (one per deck alias); with query=true
  // the full neighborhood of cells that could hold points within eps.
  // Guarantee: if d(a, b) <= eps then the query keys of a intersect the
  // insert keys of b.
  virtual void neighbor_cells(const float *p, double eps, bool query,
                              std::vector<long> &keys) const = 0;
};

class TorusFlow : public DynamicalSystem
{
public:
  TorusFlow(double lx, double ly) : lx_(lx), ly_(ly) {}
  PhasePoint flow(const PhasePoint &p, double t) const override;
  double distance(const PhasePoint &a, const PhasePoint &b) const override;
  std::vector<PhasePoint> sample(int n, unsigned long seed) const override;
  long cell_of(const PhasePoint &p, double diam) const override;
  long cell_count(double diam) const override;
  double damping_value(const DampingProfile &damping,
                       const PhasePoint &p) const override;
  int packed_size() const override { return 3; }
  void pack(const PhasePoint &p, float *out) const override;
  bool packed_within(const float *a, const float *b,
                     double eps) const override;
  void neighbor_cells(const float *p, double eps, bool query,
                      std::vector<long> &keys) const override;

private:
  double lx_, ly_;
};

class CircleFlow : public DynamicalSystem
{
public:
  explicit CircleFlow(double length) : len_(length) {}
  PhasePoint flow(const PhasePoint &p, double t) const override;
  double distance(const PhasePoint &a, const PhasePoint &b) const override;
  std::vector<PhasePoint> sample(int n, unsigned long seed) const override;
  long cell_of(const PhasePoint &p, double diam) const override;
  long cell_count(double diam) const override;
  double damping_value(const DampingProfile &damping,
                       const PhasePoint &p) const override;
  int packed_size() const override { return 2; }
  void pack(const PhasePoint &p, float *out) const override;
  bool packed_within(const float *a, const float *b,
                     double eps) const override;
  void neighbor_cells(const float *p, double eps, bool query,
                      std::vector<long> &keys) const override;

private:
  double len_;
};

// Geodesic flow on the Bolza surface: frames in SL(2,R) modulo the genus-2
// octagon group, flow = right multiplication by diag(e^{t/2}, e^{-t/2}),
// reduction = left multiplication into the Dirichlet domain of i.
class BolzaFlow : public DynamicalSystem
{
public:
  BolzaFlow();
  PhasePoint flow(const PhasePoint &p, double t) const override;
  double distance(const PhasePoint &a, const PhasePoint &b) const override;
  std::vector<PhasePoint> sample(int n, unsigned long seed) const override;
  long cell_of(const PhasePoint &p, double diam) const override;
  double damping_value(const DampingProfile &damping,
                       const PhasePoint &p) const override;
  int packed_size() const override { return 7; }  // frame + disk coords
  void pack(const PhasePoint &p, float *out) const override;
  bool packed_within(const float *a, const float *b,
                     double eps) const override;
  void neighbor_cells(const float *p, double eps, bool query,
                      std::vector<long> &keys) const override;

  Eigen::Matrix2d reduce(const Eigen::Matrix2d &g) const;
  // Flow without quotient reduction, for local (finite-difference) probes.
  static Eigen::Matrix2d flow_frame(const Eigen::Matrix2d &g, double t);
  // Base point of the frame in the Poincare disk and direction angle.
  static void disk_coords(const Eigen::Matrix2d &g, double &re, double &im,
                          double &angle);

  const std::vector<Eigen::Matrix2d> &generators() const { return gens_; }

private:
  std::vector<Eigen::Matrix2d> gens_;  // 8 side pairings (4 + inverses)
};

// Doubling map x -> 2x mod 1: discrete-time oracle fixture with entropy
// log 2 and Pr(-log 2) = 0.
class DoublingMap : public DynamicalSystem
{
public:
  PhasePoint flow(const PhasePoint &p, double t) const override;
  double distance(const PhasePoint &a, const PhasePoint &b) const override;
  std::vector<PhasePoint> sample(int n, unsigned long seed) const override;
  bool discrete_time() const override { return true; }
  long cell_of(const PhasePoint &p, double diam) const override;
  long cell_count(double diam) const override;
  double damping_value(const DampingProfile &damping,
                       const PhasePoint &p) const override;
  int packed_size() const override { return 1; }
  void pack(const PhasePoint &p, float *out) const override;
  bool packed_within(const float *a, const float *b,
                     double eps) const override;
  void neighbor_cells(const float *p, double eps, bool query,
                      std::vector<long> &keys) const override;
};

using ScalarField = std::function<double(const PhasePoint &)>;

TrajectorySample birkhoff_average(const DynamicalSystem &sys,
                                  const ScalarField &f, const PhasePoint &p,
                                  int horizon);

// a^u(p) = -int_0^1 a(flow(p, s)) ds + 0.5 log J^u; the Jacobian term is -1/2
// in curvature -1 and 0 on flat geometries (flagged non-Anosov).
double a_u_weight(const DampingProfile &damping, const DynamicalSystem &sys,
                  const PhasePoint &p, bool *non_anosov_flag = nullptr);

double liouville_mean(const DampingProfile &damping, const Geometry &geometry);

DampingStats min_time_average(const DampingProfile &damping,
                              const DynamicalSystem &sys,
                              const Geometry &geometry, double horizon,
                              int n_samples, unsigned long seed,
                              const std::vector<PhasePoint> &extra_points = {});

std::vector<PhasePoint> sample_phase_points(const Geometry &geometry, int n,
                                            unsigned long seed);

}  // namespace dwlab
