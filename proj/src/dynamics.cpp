// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "dynamics.hpp"

#include <cmath>
#include <complex>

namespace dwlab
{

namespace
{

double wrap_unit(double x, double period)
{
  double r = std::fmod(x, period);
  if (r < 0.0)
    r += period;
  return r;
}

double wrap_delta(double d, double period)
{
  d = std::fmod(d, period);
  if (d < -0.5 * period)
    d += period;
  if (d > 0.5 * period)
    d -= period;
  return d;
}

double angle_delta(double a, double b)
{
  return wrap_delta(a - b, 2.0 * M_PI);
}

std::complex<double> mobius(const Eigen::Matrix2d &g, std::complex<double> z)
{
  return (g(0, 0) * z + g(0, 1)) / (g(1, 0) * z + g(1, 1));
}

// Hyperbolic distance in the upper half plane.
double dist_hp(std::complex<double> z1, std::complex<double> z2)
{
  const double q = std::norm(z1 - z2) / (2.0 * z1.imag() * z2.imag());
  return std::acosh(1.0 + q);
}

// Composite Simpson of a(flow(p, s)) over [0, len], 16 substeps.
double damping_line_integral(const DynamicalSystem &sys,
                             const DampingProfile &damping, const PhasePoint &p,
                             double len)
{
  constexpr int kSub = 16;
  const double h = len / kSub;
  double acc = 0.0;
  for (int j = 0; j <= kSub; ++j)
  {
    const double w = (j == 0 || j == kSub) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * sys.damping_value(damping, sys.flow(p, j * h));
  }
  return acc * h / 3.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// TorusFlow

PhasePoint TorusFlow::flow(const PhasePoint &p, double t) const
{
  PhasePoint q = p;
  q.x = wrap_unit(p.x + t * p.xi1, lx_);
  q.y = wrap_unit(p.y + t * p.xi2, ly_);
  return q;
}

double TorusFlow::distance(const PhasePoint &a, const PhasePoint &b) const
{
  const double dx = wrap_delta(a.x - b.x, lx_);
  const double dy = wrap_delta(a.y - b.y, ly_);
  const double da = angle_delta(std::atan2(a.xi2, a.xi1),
                                std::atan2(b.xi2, b.xi1));
  return std::sqrt(dx * dx + dy * dy + da * da);
}

std::vector<PhasePoint> TorusFlow::sample(int n, unsigned long seed) const
{
  if (n < 1)
    throw Error("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<PhasePoint> out(n);
  for (auto &p : out)
  {
    p.kind = PhasePoint::Kind::Torus;
    p.x = u01(rng) * lx_;
    p.y = u01(rng) * ly_;
    const double th = u01(rng) * 2.0 * M_PI;
    p.xi1 = std::cos(th);
    p.xi2 = std::sin(th);
  }
  return out;
}

long TorusFlow::cell_of(const PhasePoint &p, double diam) const
{
  const long nx = std::max<long>(1, std::lround(std::ceil(lx_ / diam)));
  const long ny = std::max<long>(1, std::lround(std::ceil(ly_ / diam)));
  const long na = std::max<long>(1, std::lround(std::ceil(2.0 * M_PI / diam)));
  const long ix = std::min<long>(nx - 1, long(p.x / lx_ * nx));
  const long iy = std::min<long>(ny - 1, long(p.y / ly_ * ny));
  const double th = wrap_unit(std::atan2(p.xi2, p.xi1), 2.0 * M_PI);
  const long ia = std::min<long>(na - 1, long(th / (2.0 * M_PI) * na));
  return (ix * ny + iy) * na + ia;
}

double TorusFlow::damping_value(const DampingProfile &damping,
                                const PhasePoint &p) const
{
  return damping.value(p.x, p.y, lx_);
}

// ---------------------------------------------------------------------------
// CircleFlow

PhasePoint CircleFlow::flow(const PhasePoint &p, double t) const
{
  PhasePoint q = p;
  q.x = wrap_unit(p.x + t * p.xi1, len_);
  return q;
}

double CircleFlow::distance(const PhasePoint &a, const PhasePoint &b) const
{
  const double dx = wrap_delta(a.x - b.x, len_);
  const double ds = a.xi1 == b.xi1 ? 0.0 : M_PI;
  return std::sqrt(dx * dx + ds * ds);
}

std::vector<PhasePoint> CircleFlow::sample(int n, unsigned long seed) const
{
  if (n < 1)
    throw Error("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<PhasePoint> out(n);
  for (auto &p : out)
  {
    p.kind = PhasePoint::Kind::Circle;
    p.x = u01(rng) * len_;
    p.xi1 = u01(rng) < 0.5 ? 1.0 : -1.0;
    p.xi2 = 0.0;
  }
  return out;
}

long CircleFlow::cell_of(const PhasePoint &p, double diam) const
{
  const long nx = std::max<long>(1, std::lround(std::ceil(len_ / diam)));
  const long ix = std::min<long>(nx - 1, long(p.x / len_ * nx));
  return 2 * ix + (p.xi1 > 0.0 ? 0 : 1);
}

double CircleFlow::damping_value(const DampingProfile &damping,
                                 const PhasePoint &p) const
{
  return damping.value(p.x, 0.0, len_);
}

// ---------------------------------------------------------------------------
// BolzaFlow

BolzaFlow::BolzaFlow()
{
  // Hyperbolic translations of length l with cosh(l/2) = 1 + sqrt(2), along
  // the four geodesics through i at angles k*pi/4, plus inverses. These are
  // the side pairings of the regular octagon (genus-2 surface).
  const double c = 1.0 + std::sqrt(2.0);
  const double s = std::sqrt(c * c - 1.0);
  Eigen::Matrix2d boost;
  boost << c, s, s, c;
  for (int k = 0; k < 4; ++k)
  {
    const double th = k * M_PI / 8.0;
    Eigen::Matrix2d rot;
    rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    gens_.push_back(rot * boost * rot.transpose());
  }
  for (int k = 0; k < 4; ++k)
    gens_.push_back(gens_[k].inverse());
}

Eigen::Matrix2d BolzaFlow::flow_frame(const Eigen::Matrix2d &g, double t)
{
  Eigen::Matrix2d a;
  a << std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t);
  return g * a;
}

Eigen::Matrix2d BolzaFlow::reduce(const Eigen::Matrix2d &g) const
{
  Eigen::Matrix2d cur = g;
  const std::complex<double> i(0.0, 1.0);
  for (int iter = 0; iter < 64; ++iter)
  {
    const double d0 = dist_hp(mobius(cur, i), i);
    int best = -1;
    double bestd = d0 - 1e-12;
    for (int k = 0; k < int(gens_.size()); ++k)
    {
      const double dk = dist_hp(mobius(gens_[k] * cur, i), i);
      if (dk < bestd)
      {
        bestd = dk;
        best = k;
      }
    }
    if (best < 0)
      return cur;
    cur = gens_[best] * cur;
  }
  throw Error("fundamental-domain reduction did not terminate");
}

PhasePoint BolzaFlow::flow(const PhasePoint &p, double t) const
{
  PhasePoint q = p;
  Eigen::Matrix2d g = p.frame;
  double remaining = t;
  const double step = t >= 0.0 ? 1.0 : -1.0;
  while (std::abs(remaining) > 0.0)
  {
    const double dt = std::abs(remaining) > 1.0 ? step : remaining;
    g = reduce(flow_frame(g, dt));
    const double det = g.determinant();
    if (det <= 0.0)
      throw Error("frame determinant lost positivity");
    g /= std::sqrt(det);
    remaining -= dt;
  }
  q.frame = g;
  return q;
}

void BolzaFlow::disk_coords(const Eigen::Matrix2d &g, double &re, double &im,
                            double &angle)
{
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> z = mobius(g, i);
  const std::complex<double> w = (z - i) / (z + i);
  re = w.real();
  im = w.imag();
  const std::complex<double> den = g(1, 0) * i + g(1, 1);
  // Tangent at z is i / den^2; push to the disk chart via d/dz of the Cayley
  // map, 2i / (z + i)^2.
  const std::complex<double> v = (i / (den * den)) * (2.0 * i / ((z + i) * (z + i)));
  angle = std::arg(v);
}

double BolzaFlow::distance(const PhasePoint &a, const PhasePoint &b) const
{
  double xb, yb, ab;
  disk_coords(b.frame, xb, yb, ab);
  const std::complex<double> wb(xb, yb);
  double best = std::numeric_limits<double>::infinity();
  // Minimize over one ring of deck translates for points reduced to opposite
  // sides of the octagon.
  for (int k = -1; k < int(gens_.size()); ++k)
  {
    const Eigen::Matrix2d ga = k < 0 ? a.frame : Eigen::Matrix2d(gens_[k] * a.frame);
    double xa, ya, aa;
    disk_coords(ga, xa, ya, aa);
    const std::complex<double> wa(xa, ya);
    const double q =
        std::norm(wa - wb) / ((1.0 - std::norm(wa)) * (1.0 - std::norm(wb)));
    const double dh = std::acosh(1.0 + 2.0 * std::max(0.0, q));
    const double da = angle_delta(aa, ab);
    best = std::min(best, std::sqrt(dh * dh + da * da));
  }
  return best;
}

std::vector<PhasePoint> BolzaFlow::sample(int n, unsigned long seed) const
{
  if (n < 1)
    throw Error("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double tmax = 2.5;  // covers the octagon circumradius
  const std::complex<double> i(0.0, 1.0);
  std::vector<PhasePoint> out;
  out.reserve(n);
  while (int(out.size()) < n)
  {
    // Hyperbolic-area uniform radius, uniform angle, then keep only points
    // whose reduced representative is themselves (Dirichlet domain).
    const double t = std::acosh(1.0 + u01(rng) * (std::cosh(tmax) - 1.0));
    const double phi = u01(rng) * 2.0 * M_PI;
    const double r = std::tanh(0.5 * t);  // disk radius at distance t
    const std::complex<double> w = r * std::complex<double>(std::cos(phi), std::sin(phi));
    const std::complex<double> z = i * (1.0 + w) / (1.0 - w);  // half plane
    Eigen::Matrix2d trans;
    const double yy = z.imag();
    trans << std::sqrt(yy), z.real() / std::sqrt(yy), 0.0, 1.0 / std::sqrt(yy);
    const Eigen::Matrix2d red = reduce(trans);
    if ((red - trans).cwiseAbs().maxCoeff() > 1e-9)
      continue;  // outside the fundamental octagon
    const double th = u01(rng) * M_PI;
    Eigen::Matrix2d rot;
    rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    PhasePoint p;
    p.kind = PhasePoint::Kind::Hyperbolic;
    p.frame = trans * rot;
    out.push_back(p);
  }
  return out;
}

long BolzaFlow::cell_of(const PhasePoint &p, double diam) const
{
  double x, y, a;
  disk_coords(p.frame, x, y, a);
  const long nx = std::max<long>(1, std::lround(std::ceil(2.0 / diam)));
  const long na = std::max<long>(1, std::lround(std::ceil(2.0 * M_PI / diam)));
  const long ix = std::min<long>(nx - 1, long((x + 1.0) / 2.0 * nx));
  const long iy = std::min<long>(nx - 1, long((y + 1.0) / 2.0 * nx));
  const long ia =
      std::min<long>(na - 1, long(wrap_unit(a, 2.0 * M_PI) / (2.0 * M_PI) * na));
  return (ix * nx + iy) * na + ia;
}

double BolzaFlow::damping_value(const DampingProfile &damping,
                                const PhasePoint &p) const
{
  if (damping.kind == DampingProfile::Kind::Constant)
    return damping.a0;
  if (damping.kind == DampingProfile::Kind::Custom)
  {
    double x, y, a;
    disk_coords(p.frame, x, y, a);
    return damping.fn(x, y);
  }
  throw Error("unsupported damping profile on the Bolza surface");
}

// ---------------------------------------------------------------------------
// DoublingMap

PhasePoint DoublingMap::flow(const PhasePoint &p, double t) const
{
  const long k = std::lround(t);
  PhasePoint q = p;
  double x = p.x;
  for (long j = 0; j < k; ++j)
    x = wrap_unit(2.0 * x, 1.0);
  q.x = x;
  return q;
}

double DoublingMap::distance(const PhasePoint &a, const PhasePoint &b) const
{
  return std::abs(wrap_delta(a.x - b.x, 1.0));
}

std::vector<PhasePoint> DoublingMap::sample(int n, unsigned long seed) const
{
  if (n < 1)
    throw Error("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<PhasePoint> out(n);
  for (auto &p : out)
  {
    p.kind = PhasePoint::Kind::Map;
    p.x = u01(rng);
  }
  return out;
}

long DoublingMap::cell_of(const PhasePoint &p, double diam) const
{
  const long nx = std::max<long>(1, std::lround(std::ceil(1.0 / diam)));
  return std::min<long>(nx - 1, long(p.x * nx));
}

double DoublingMap::damping_value(const DampingProfile &damping,
                                  const PhasePoint &p) const
{
  return damping.value(p.x, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Packed orbits and neighbor hashing

namespace
{

long mix_key(long ix, long iy, long ia)
{
  return (ix * 73856093L) ^ (iy * 19349663L) ^ (ia * 83492791L);
}

long periodic_index(double x, double period, double cell, long &ncells)
{
  ncells = std::max<long>(1, long(period / cell));
  const double cw = period / ncells;
  long i = long(std::floor(x / cw)) % ncells;
  if (i < 0)
    i += ncells;
  return i;
}

// Emit the 27-neighborhood (or the single cell) over up to three periodic
// axes; na == 0 marks an unused axis.
void emit_keys(long ix, long nxc, long iy, long nyc, long ia, long nac,
               bool query, std::vector<long> &keys)
{
  const int r = query ? 1 : 0;
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -r; dy <= r; ++dy)
      for (int da = -r; da <= r; ++da)
      {
        const long jx = nxc > 0 ? (ix + dx + nxc) % nxc : ix + dx;
        const long jy = nyc > 0 ? (iy + dy + nyc) % nyc : iy + dy;
        const long ja = nac > 0 ? (ia + da + nac) % nac : ia + da;
        keys.push_back(mix_key(jx, jy, ja));
      }
}

}  // namespace

void TorusFlow::pack(const PhasePoint &p, float *out) const
{
  out[0] = float(p.x);
  out[1] = float(p.y);
  out[2] = float(std::atan2(p.xi2, p.xi1));
}

bool TorusFlow::packed_within(const float *a, const float *b,
                              double eps) const
{
  const double dx = wrap_delta(double(a[0]) - b[0], lx_);
  const double dy = wrap_delta(double(a[1]) - b[1], ly_);
  const double da = wrap_delta(double(a[2]) - b[2], 2.0 * M_PI);
  return dx * dx + dy * dy + da * da <= eps * eps;
}

void TorusFlow::neighbor_cells(const float *p, double eps, bool query,
                               std::vector<long> &keys) const
{
  long nxc, nyc, nac;
  const long ix = periodic_index(p[0], lx_, eps, nxc);
  const long iy = periodic_index(p[1], ly_, eps, nyc);
  const long ia =
      periodic_index(wrap_unit(p[2], 2.0 * M_PI), 2.0 * M_PI, eps, nac);
  emit_keys(ix, nxc, iy, nyc, ia, nac, query, keys);
}

long TorusFlow::cell_count(double diam) const
{
  const long nx = std::max<long>(1, std::lround(std::ceil(lx_ / diam)));
  const long ny = std::max<long>(1, std::lround(std::ceil(ly_ / diam)));
  const long na = std::max<long>(1, std::lround(std::ceil(2.0 * M_PI / diam)));
  return nx * ny * na;
}

void CircleFlow::pack(const PhasePoint &p, float *out) const
{
  out[0] = float(p.x);
  out[1] = float(p.xi1);
}

bool CircleFlow::packed_within(const float *a, const float *b,
                               double eps) const
{
  if ((a[1] > 0) != (b[1] > 0))
    return eps >= M_PI;
  return std::abs(wrap_delta(double(a[0]) - b[0], len_)) <= eps;
}

void CircleFlow::neighbor_cells(const float *p, double eps, bool query,
                                std::vector<long> &keys) const
{
  long nxc;
  const long ix = periodic_index(p[0], len_, eps, nxc);
  const long dir = p[1] > 0 ? 0 : 1;
  emit_keys(ix, nxc, dir, 0, 0, 1, query, keys);
}

long CircleFlow::cell_count(double diam) const
{
  return 2 * std::max<long>(1, std::lround(std::ceil(len_ / diam)));
}

void BolzaFlow::pack(const PhasePoint &p, float *out) const
{
  out[0] = float(p.frame(0, 0));
  out[1] = float(p.frame(0, 1));
  out[2] = float(p.frame(1, 0));
  out[3] = float(p.frame(1, 1));
  double x, y, a;
  disk_coords(p.frame, x, y, a);
  out[4] = float(x);
  out[5] = float(y);
  out[6] = float(a);
}

bool BolzaFlow::packed_within(const float *a, const float *b,
                              double eps) const
{
  const auto composite = [&](double xa, double ya, double aa) {
    const double num = (xa - b[4]) * (xa - b[4]) + (ya - b[5]) * (ya - b[5]);
    const double den =
        (1.0 - xa * xa - ya * ya) * (1.0 - double(b[4]) * b[4] - double(b[5]) * b[5]);
    const double dh =
        den > 0.0 ? std::acosh(1.0 + 2.0 * num / den)
                  : std::numeric_limits<double>::infinity();
    const double da = angle_delta(aa, b[6]);
    return dh * dh + da * da;
  };
  if (composite(a[4], a[5], a[6]) <= eps * eps)
    return true;
  Eigen::Matrix2d ga;
  ga << a[0], a[1], a[2], a[3];
  for (const auto &gen : gens_)
  {
    double x, y, ang;
    disk_coords(gen * ga, x, y, ang);
    if (composite(x, y, ang) <= eps * eps)
      return true;
  }
  return false;
}

void BolzaFlow::neighbor_cells(const float *p, double eps, bool query,
                               std::vector<long> &keys) const
{
  // Euclidean cell width eps/2: hyperbolic distance <= eps implies disk
  // Euclidean distance <= eps/2.
  const double cw = 0.5 * eps;
  long nac;
  const auto cell_xy = [&](double v) { return long(std::floor((v + 2.0) / cw)); };
  if (query)
  {
    const long ix = cell_xy(p[4]);
    const long iy = cell_xy(p[5]);
    const long ia =
        periodic_index(wrap_unit(p[6], 2.0 * M_PI), 2.0 * M_PI, eps, nac);
    emit_keys(ix, 0, iy, 0, ia, nac, true, keys);
    return;
  }
  Eigen::Matrix2d g;
  g << p[0], p[1], p[2], p[3];
  for (int k = -1; k < int(gens_.size()); ++k)
  {
    const Eigen::Matrix2d gk = k < 0 ? g : Eigen::Matrix2d(gens_[k] * g);
    double x, y, a;
    disk_coords(gk, x, y, a);
    const long ia =
        periodic_index(wrap_unit(a, 2.0 * M_PI), 2.0 * M_PI, eps, nac);
    emit_keys(cell_xy(x), 0, cell_xy(y), 0, ia, nac, false, keys);
  }
}

void DoublingMap::pack(const PhasePoint &p, float *out) const
{
  out[0] = float(p.x);
}

bool DoublingMap::packed_within(const float *a, const float *b,
                                double eps) const
{
  return std::abs(wrap_delta(double(a[0]) - b[0], 1.0)) <= eps;
}

void DoublingMap::neighbor_cells(const float *p, double eps, bool query,
                                 std::vector<long> &keys) const
{
  long nxc;
  const long ix = periodic_index(p[0], 1.0, eps, nxc);
  emit_keys(ix, nxc, 0, 1, 0, 1, query, keys);
}

long DoublingMap::cell_count(double diam) const
{
  return std::max<long>(1, std::lround(std::ceil(1.0 / diam)));
}

// ---------------------------------------------------------------------------
// Birkhoff machinery

TrajectorySample birkhoff_average(const DynamicalSystem &sys,
                                  const ScalarField &f, const PhasePoint &p,
                                  int horizon)
{
  if (horizon < 1)
    throw Error("horizon must be >= 1");
  TrajectorySample ts;
  ts.start = p;
  ts.horizon = horizon;
  PhasePoint cur = p;
  for (int k = 0; k < horizon; ++k)
  {
    ts.birkhoff_sum += f(cur);
    cur = sys.flow(cur, 1.0);
  }
  if (p.kind == PhasePoint::Kind::Hyperbolic)
    ts.log_ju = -double(horizon);
  return ts;
}

double a_u_weight(const DampingProfile &damping, const DynamicalSystem &sys,
                  const PhasePoint &p, bool *non_anosov_flag)
{
  const double integral = damping_line_integral(sys, damping, p, 1.0);
  if (p.kind == PhasePoint::Kind::Hyperbolic)
  {
    if (non_anosov_flag)
      *non_anosov_flag = false;
    return -integral - 0.5;  // 0.5 log J^u = -1/2 in curvature -1
  }
  if (p.kind == PhasePoint::Kind::Torus || p.kind == PhasePoint::Kind::Circle)
  {
    if (non_anosov_flag)
      *non_anosov_flag = true;  // no unstable Jacobian on flat geometries
    return -integral;
  }
  throw Error("pressure weight undefined for this phase space");
}

double liouville_mean(const DampingProfile &damping, const Geometry &geometry)
{
  if (damping.kind == DampingProfile::Kind::Constant)
    return damping.a0;
  return damping.sample_on(geometry).mean();
}

DampingStats min_time_average(const DampingProfile &damping,
                              const DynamicalSystem &sys,
                              const Geometry &geometry, double horizon,
                              int n_samples, unsigned long seed,
                              const std::vector<PhasePoint> &extra_points)
{
  if (horizon < 10.0)
    throw Error("horizon must be >= 10");
  if (n_samples < 100)
    throw Error("need at least 100 samples");
  std::vector<PhasePoint> pts = sys.sample(n_samples, seed);
  pts.insert(pts.end(), extra_points.begin(), extra_points.end());

  DampingStats st;
  st.horizon = horizon;
  st.n_samples = int(pts.size());
  st.seed = long(seed);
  st.sup_norm = damping.sup_norm();
  st.liouville_mean = liouville_mean(damping, geometry);
  st.min_average = std::numeric_limits<double>::infinity();
  for (const auto &p0 : pts)
  {
    double acc = 0.0;
    PhasePoint cur = p0;
    double done = 0.0;
    while (done < horizon - 1e-12)
    {
      const double len = std::min(1.0, horizon - done);
      acc += damping_line_integral(sys, damping, cur, len);
      cur = sys.flow(cur, len);
      done += len;
    }
    st.min_average = std::min(st.min_average, acc / horizon);
  }
  return st;
}

std::vector<PhasePoint> sample_phase_points(const Geometry &geometry, int n,
                                            unsigned long seed)
{
  if (geometry.kind == Geometry::Kind::FlatTorus)
    return TorusFlow(geometry.lx, geometry.ly).sample(n, seed);
  if (geometry.kind == Geometry::Kind::Circle)
    return CircleFlow(geometry.lx).sample(n, seed);
  throw Error("phase-point sampling needs a circle or torus geometry");
}

}  // namespace dwlab
