// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dwlab
{

namespace
{

// C-infinity step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u)
{
  if (u <= 0.0)
    return 0.0;
  if (u >= 1.0)
    return 1.0;
  const double e0 = std::exp(-1.0 / u);
  const double e1 = std::exp(-1.0 / (1.0 - u));
  return e0 / (e0 + e1);
}

double wrap_centered(double x, double period)
{
  double r = std::fmod(x, period);
  if (r < -0.5 * period)
    r += period;
  if (r >= 0.5 * period)
    r -= period;
  return r;
}

// Orthonormal real Fourier basis on an equispaced periodic grid of n nodes
// over [0, length), together with the exact Laplacian eigenvalues -k^2.
void fourier_basis_1d(double length, int n, Eigen::MatrixXd &basis,
                      Eigen::VectorXd &eigs)
{
  basis.resize(n, n);
  eigs.resize(n);
  const double h = length / n;
  int col = 0;
  basis.col(col).setConstant(1.0 / std::sqrt(double(n)));
  eigs(col++) = 0.0;
  for (int k = 1; k < (n + 1) / 2; ++k)
  {
    const double kphys = 2.0 * M_PI * k / length;
    for (int j = 0; j < n; ++j)
    {
      basis(j, col) = std::sqrt(2.0 / n) * std::cos(kphys * j * h);
      basis(j, col + 1) = std::sqrt(2.0 / n) * std::sin(kphys * j * h);
    }
    eigs(col) = -kphys * kphys;
    eigs(col + 1) = -kphys * kphys;
    col += 2;
  }
  if (n % 2 == 0)
  {
    const double kphys = M_PI * n / length;
    for (int j = 0; j < n; ++j)
      basis(j, col) = (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(n));
    eigs(col++) = -kphys * kphys;
  }
}

}  // namespace

Geometry Geometry::circle(double length, int n)
{
  if (length <= 0.0)
    throw Error("circle length must be positive");
  if (n < 8)
    throw Error("resolution must be >= 8 per dimension");
  Geometry g;
  g.kind = Kind::Circle;
  g.lx = length;
  g.nx = n;
  return g;
}

Geometry Geometry::flat_torus(double lx, double ly, int nx, int ny)
{
  if (lx <= 0.0 || ly <= 0.0)
    throw Error("torus side lengths must be positive");
  if (nx < 8 || ny < 8)
    throw Error("resolution must be >= 8 per dimension");
  Geometry g;
  g.kind = Kind::FlatTorus;
  g.lx = lx;
  g.ly = ly;
  g.nx = nx;
  g.ny = ny;
  return g;
}

Geometry Geometry::matrix_input(const std::string &path)
{
  Geometry g;
  g.kind = Kind::MatrixInput;
  g.path = path;
  g.input_matrix = read_matrix_market(path);
  g.nx = int(g.input_matrix.rows());
  g.lx = 1.0;
  if (g.nx < 8)
    throw Error("matrix input dimension must be >= 8");
  return g;
}

int Geometry::size() const
{
  return kind == Kind::FlatTorus ? nx * ny : nx;
}

double Geometry::volume() const
{
  return kind == Kind::FlatTorus ? lx * ly : lx;
}

double Geometry::node_x(int i) const
{
  if (kind == Kind::FlatTorus)
    return (i / ny) * (lx / nx);
  return i * (lx / nx);
}

double Geometry::node_y(int i) const
{
  if (kind == Kind::FlatTorus)
    return (i % ny) * (ly / ny);
  return 0.0;
}

DampingProfile DampingProfile::constant(double a0)
{
  if (a0 < 0.0)
    throw Error("damping must be nonnegative");
  DampingProfile d;
  d.kind = Kind::Constant;
  d.a0 = a0;
  d.sup_ = a0;
  return d;
}

DampingProfile DampingProfile::smoothed_strip(double center, double width,
                                              double a0, double smoothing)
{
  if (a0 < 0.0)
    throw Error("damping must be nonnegative");
  if (width <= 0.0 || smoothing <= 0.0)
    throw Error("strip width and smoothing must be positive");
  DampingProfile d;
  d.kind = Kind::SmoothedStrip;
  d.center = center;
  d.width = width;
  d.a0 = a0;
  d.smoothing = smoothing;
  d.sup_ = a0;
  return d;
}

DampingProfile DampingProfile::samples(std::vector<double> values)
{
  DampingProfile d;
  d.kind = Kind::Samples;
  d.sup_ = 0.0;
  for (double v : values)
  {
    if (v < 0.0)
      throw Error("damping sample is negative");
    d.sup_ = std::max(d.sup_, v);
  }
  d.sample_values = std::move(values);
  return d;
}

DampingProfile DampingProfile::custom(std::function<double(double, double)> fn,
                                      double sup)
{
  DampingProfile d;
  d.kind = Kind::Custom;
  d.fn = std::move(fn);
  d.sup_ = sup;
  return d;
}

double DampingProfile::value(double x, double y, double period) const
{
  switch (kind)
  {
    case Kind::Constant:
      return a0;
    case Kind::SmoothedStrip:
    {
      const double d = std::abs(wrap_centered(x - center, period));
      return a0 * smooth_step((0.5 * width - d) / smoothing);
    }
    case Kind::Custom:
      return fn(x, y);
    case Kind::Samples:
      throw Error("sampled damping profile has no off-grid evaluation");
  }
  return 0.0;
}

Eigen::VectorXd DampingProfile::sample_on(const Geometry &g) const
{
  const int n = g.size();
  Eigen::VectorXd v(n);
  if (kind == Kind::Samples)
  {
    if (int(sample_values.size()) != n)
      throw Error("damping sample count does not match grid size");
    for (int i = 0; i < n; ++i)
      v(i) = sample_values[i];
    return v;
  }
  for (int i = 0; i < n; ++i)
    v(i) = value(g.node_x(i), g.node_y(i), g.lx);
  return v;
}

DiscreteOperator assemble_operator(const Geometry &geometry,
                                   const DampingProfile &damping)
{
  DiscreteOperator op;
  op.geometry = geometry;
  op.n = geometry.size();

  switch (geometry.kind)
  {
    case Geometry::Kind::Circle:
    {
      fourier_basis_1d(geometry.lx, geometry.nx, op.basis, op.basis_eigs);
      op.laplacian =
          op.basis * op.basis_eigs.asDiagonal() * op.basis.transpose();
      break;
    }
    case Geometry::Kind::FlatTorus:
    {
      Eigen::MatrixXd bx, by;
      Eigen::VectorXd ex, ey;
      fourier_basis_1d(geometry.lx, geometry.nx, bx, ex);
      fourier_basis_1d(geometry.ly, geometry.ny, by, ey);
      const int nx = geometry.nx, ny = geometry.ny, n = nx * ny;
      op.basis.resize(n, n);
      op.basis_eigs.resize(n);
      for (int cx = 0; cx < nx; ++cx)
        for (int cy = 0; cy < ny; ++cy)
        {
          const int c = cx * ny + cy;
          op.basis_eigs(c) = ex(cx) + ey(cy);
          for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < ny; ++iy)
              op.basis(ix * ny + iy, c) = bx(ix, cx) * by(iy, cy);
        }
      op.laplacian =
          op.basis * op.basis_eigs.asDiagonal() * op.basis.transpose();
      break;
    }
    case Geometry::Kind::MatrixInput:
    {
      const Eigen::MatrixXd &m = geometry.input_matrix;
      const double scale = std::max(1.0, m.norm());
      if ((m - m.transpose()).norm() > 1e-12 * scale)
        throw Error("laplacian not symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      if (es.eigenvalues().maxCoeff() > 1e-10 * scale)
        throw Error("laplacian not negative semidefinite");
      op.laplacian = m;
      op.basis = es.eigenvectors();
      op.basis_eigs = es.eigenvalues();
      break;
    }
  }

  op.damping = damping.sample_on(geometry);
  if (op.damping.minCoeff() < 0.0)
    throw Error("damping has negative sample");
  op.sup_damping = op.damping.maxCoeff();
  return op;
}

Eigen::MatrixXd read_matrix_market(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open matrix file: " + path);
  std::string line;
  bool symmetric = false;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw Error("not a Matrix Market file: " + path);
  if (line.find("coordinate") == std::string::npos ||
      line.find("real") == std::string::npos)
    throw Error("expected real coordinate Matrix Market format");
  symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line))
  {
    if (!line.empty() && line[0] != '%')
      break;
  }
  std::istringstream hdr(line);
  long rows = 0, cols = 0, nnz = 0;
  hdr >> rows >> cols >> nnz;
  if (rows <= 0 || rows != cols)
    throw Error("matrix must be square");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (long k = 0; k < nnz; ++k)
  {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      throw Error("truncated Matrix Market entry list");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw Error("matrix entry index out of range");
    m(i - 1, j - 1) = v;
    if (symmetric)
      m(j - 1, i - 1) = v;
  }
  return m;
}

}  // namespace dwlab
