// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwlab
{

struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Model geometries carrying a grid resolution. Circle and FlatTorus use
// equispaced periodic grids; MatrixInput wraps a user-supplied Laplacian
// (Matrix Market, real symmetric, spectrum <= 0).
class Geometry
{
public:
  enum class Kind
  {
    Circle,
    FlatTorus,
    MatrixInput
  };

  static Geometry circle(double length, int n);
  static Geometry flat_torus(double lx, double ly, int nx, int ny);
  static Geometry matrix_input(const std::string &path);

  Kind kind = Kind::Circle;
  double lx = 0.0, ly = 0.0;
  int nx = 0, ny = 0;
  std::string path;
  Eigen::MatrixXd input_matrix;  // MatrixInput only

  int dim() const { return kind == Kind::FlatTorus ? 2 : 1; }
  int size() const;
  double volume() const;

  // Grid node coordinates, node index -> (x[, y]). Torus nodes are ordered
  // x-major: i = ix * ny + iy.
  double node_x(int i) const;
  double node_y(int i) const;
};

// Damping coefficient a >= 0. SmoothedStrip is a C-infinity mollified
// indicator of a periodic strip in the first coordinate: identically a0 in
// the strip interior, identically 0 outside, smooth transition of width
// `smoothing` inside the strip edges.
class DampingProfile
{
public:
  enum class Kind
  {
    Constant,
    SmoothedStrip,
    Samples,
    Custom
  };

  static DampingProfile constant(double a0);
  static DampingProfile smoothed_strip(double center, double width, double a0,
                                       double smoothing);
  static DampingProfile samples(std::vector<double> values);
  // Arbitrary callable a(x, y) with declared sup norm; used by tests and
  // flow-side averaging.
  static DampingProfile custom(std::function<double(double, double)> fn,
                               double sup);

  Kind kind = Kind::Constant;
  double a0 = 0.0, center = 0.0, width = 0.0, smoothing = 0.0;
  std::vector<double> sample_values;
  std::function<double(double, double)> fn;

  // Pointwise evaluation; the strip coordinate is taken modulo `period`.
  double value(double x, double y = 0.0, double period = 1.0) const;
  double sup_norm() const { return sup_; }

  Eigen::VectorXd sample_on(const Geometry &g) const;

private:
  double sup_ = 0.0;
};

// Discretized -Laplacian (stored as Delta, spectrum <= 0) plus diagonal
// damping on the same grid, with the orthonormal eigenbasis kept for
// Fourier-multiplier norms.
struct DiscreteOperator
{
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd damping;
  int n = 0;
  Geometry geometry;
  Eigen::MatrixXd basis;       // columns: orthonormal eigenvectors of Delta
  Eigen::VectorXd basis_eigs;  // matching eigenvalues, all <= 0
  double sup_damping = 0.0;

  // L2 quadrature weight of one grid node.
  double quad_weight() const { return geometry.volume() / n; }
};

DiscreteOperator assemble_operator(const Geometry &geometry,
                                   const DampingProfile &damping);

Eigen::MatrixXd read_matrix_market(const std::string &path);

}  // namespace dwlab
