// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "pressure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace dwlab
{

void PressureConfig::validate() const
{
  if (epsilon_list.empty() || t_list.empty())
    throw Error("pressure schedule needs epsilon and T lists");
  for (size_t i = 1; i < epsilon_list.size(); ++i)
    if (epsilon_list[i] >= epsilon_list[i - 1])
      throw Error("epsilon list must be strictly descending");
  for (double e : epsilon_list)
    if (e <= 0.0)
      throw Error("epsilon must be positive");
  for (size_t i = 1; i < t_list.size(); ++i)
    if (t_list[i] <= t_list[i - 1])
      throw Error("T list must be strictly ascending");
  if (t_list.front() < 1)
    throw Error("T must be >= 1");
  if (!(delta > 0.0 && delta < 0.5))
    throw Error("delta must lie in (0, 1/2)");
  if (budget < 1)
    throw Error("sample budget must be positive");
}

PressureConfig PressureConfig::map_defaults()
{
  PressureConfig cfg;
  cfg.epsilon_list = {0.2, 0.1, 0.05};
  cfg.t_list = {4, 6, 8, 10};
  cfg.budget = 200000;
  cfg.cover_diam = 0.05;
  return cfg;
}

PressureConfig PressureConfig::flow_defaults()
{
  PressureConfig cfg;
  cfg.epsilon_list = {0.7, 0.5};
  cfg.t_list = {1, 2, 3, 4};
  cfg.budget = 80000;
  cfg.cover_diam = 0.15;
  return cfg;
}

namespace
{

// Shared packed-orbit workspace for one candidate set.
struct OrbitSet
{
  int n = 0;
  int ps = 0;
  int per_unit = 1;  // packed samples per unit time (10 for flows)
  int tmax = 0;
  int tsteps = 0;
  std::vector<float> packed;                // n * tsteps * ps
  std::vector<double> birkhoff;             // n * (tmax + 1) prefix sums

  const float *at(int i, int k) const { return &packed[(size_t(i) * tsteps + k) * ps]; }
  double birk(int i, int t) const { return birkhoff[size_t(i) * (tmax + 1) + t]; }
};

OrbitSet build_orbits(const DynamicalSystem &sys, const ScalarField &f,
                      const PressureConfig &cfg)
{
  OrbitSet os;
  os.n = int(cfg.budget);
  os.ps = sys.packed_size();
  os.per_unit = sys.discrete_time() ? 1 : 5;
  os.tmax = cfg.t_list.back();
  os.tsteps = os.tmax * os.per_unit + 1;
  os.packed.resize(size_t(os.n) * os.tsteps * os.ps);
  os.birkhoff.resize(size_t(os.n) * (os.tmax + 1));

  const auto pts = sys.sample(os.n, cfg.seed);
  const double step = 1.0 / os.per_unit;
  for (int i = 0; i < os.n; ++i)
  {
    PhasePoint cur = pts[i];
    double prefix = 0.0;
    for (int k = 0; k <= os.tmax; ++k)
    {
      os.birkhoff[size_t(i) * (os.tmax + 1) + k] = prefix;
      const int sub = k == os.tmax ? 1 : os.per_unit;
      for (int j = 0; j < sub; ++j)
        sys.pack(j == 0 ? cur : sys.flow(cur, j * step),
                 &os.packed[(size_t(i) * os.tsteps + k * os.per_unit + j) * os.ps]);
      if (k < os.tmax)
      {
        prefix += f(cur);
        cur = sys.flow(cur, 1.0);
      }
    }
  }
  return os;
}

bool is_separated(const DynamicalSystem &sys, const OrbitSet &os, int i, int j,
                  double eps, int t)
{
  const int last = t * os.per_unit;
  for (int k = 0; k <= last; ++k)
    if (!sys.packed_within(os.at(i, k), os.at(j, k), eps))
      return true;
  return false;
}

double log_sum_exp(const std::vector<double> &v)
{
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v)
    s += std::exp(x - m);
  return m + std::log(s);
}

PressureEstimate greedy_separated(const DynamicalSystem &sys,
                                  const OrbitSet &os, double eps, int t)
{
  std::unordered_map<long, std::vector<int>> hash;
  std::vector<long> keys;
  std::vector<int> stamp(os.n, -1);
  std::vector<double> weights;

  for (int i = 0; i < os.n; ++i)
  {
    keys.clear();
    sys.neighbor_cells(os.at(i, 0), eps, true, keys);
    bool ok = true;
    for (long key : keys)
    {
      const auto it = hash.find(key);
      if (it == hash.end())
        continue;
      for (int j : it->second)
      {
        if (stamp[j] == i)
          continue;
        stamp[j] = i;
        if (!is_separated(sys, os, i, j, eps, t))
        {
          ok = false;
          break;
        }
      }
      if (!ok)
        break;
    }
    if (!ok)
      continue;
    keys.clear();
    sys.neighbor_cells(os.at(i, 0), eps, false, keys);
    for (long key : keys)
      hash[key].push_back(i);
    weights.push_back(os.birk(i, t));
  }

  PressureEstimate est;
  est.method = PressureMethod::Separated;
  est.eps = eps;
  est.horizon = t;
  est.z_value = log_sum_exp(weights) / t;
  est.value = est.z_value;
  return est;
}

}  // namespace

SeparatedResult pressure_separated(const DynamicalSystem &sys,
                                   const ScalarField &f,
                                   const PressureConfig &cfg)
{
  cfg.validate();
  if (cfg.budget < 1000)
    throw Error("separated estimator needs a budget of at least 1000 points");
  const OrbitSet os = build_orbits(sys, f, cfg);

  SeparatedResult res;
  for (double eps : cfg.epsilon_list)
    for (int t : cfg.t_list)
      res.table.push_back(greedy_separated(sys, os, eps, t));
  res.best = res.table.back();  // smallest eps, largest T
  return res;
}

CoverResult pressure_cover(const DynamicalSystem &sys, const ScalarField &f,
                           const PressureConfig &cfg)
{
  cfg.validate();
  const int t = cfg.t_list.back();
  const double diam = cfg.cover_diam;
  const auto pts = sys.sample(int(cfg.budget), cfg.seed);

  std::map<std::vector<long>, CoverWord> words;
  std::set<long> visited;
  for (const auto &p0 : pts)
  {
    std::vector<long> word(t);
    double birk = 0.0;
    PhasePoint cur = p0;
    for (int k = 0; k < t; ++k)
    {
      word[k] = sys.cell_of(cur, diam);
      birk += f(cur);
      cur = sys.flow(cur, 1.0);
    }
    visited.insert(word[0]);
    auto [it, fresh] = words.try_emplace(word);
    CoverWord &w = it->second;
    if (fresh)
    {
      w.symbols = word;
      w.coarse_sum = birk;
    }
    else
      w.coarse_sum = std::max(w.coarse_sum, birk);
    ++w.support_samples;
  }

  // Cylinder membership follows the sampled itineraries, which partition the
  // sample set; the greedy weight-aware subcover therefore keeps every
  // visited word.
  CoverResult res;
  std::vector<double> weights;
  for (const auto &[key, w] : words)
  {
    res.words.push_back(w);
    weights.push_back(w.coarse_sum);
  }
  std::sort(res.words.begin(), res.words.end(),
            [](const CoverWord &a, const CoverWord &b) {
              return a.coarse_sum > b.coarse_sum;
            });

  res.est.method = PressureMethod::Cover;
  res.est.eps = diam;
  res.est.horizon = t;
  res.est.z_value = log_sum_exp(weights) / t;
  res.est.value = res.est.z_value;

  const long total = sys.cell_count(diam);
  res.uncovered_cells = total >= 0 ? total - long(visited.size()) : 0;
  return res;
}

PressureEstimate pressure_transfer(const Eigen::MatrixXd &adjacency,
                                   const Eigen::VectorXd &word_weights)
{
  const int n = int(adjacency.rows());
  if (adjacency.cols() != n || word_weights.size() != n)
    throw Error("adjacency must be square and match the weight vector");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (adjacency(i, j) != 0.0 && adjacency(i, j) != 1.0)
        throw Error("adjacency entries must be 0 or 1");

  // Irreducibility: strong connectivity via forward/backward reachability.
  const auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty())
    {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w)
      {
        const double e = forward ? adjacency(v, w) : adjacency(w, v);
        if (e != 0.0 && !seen[w])
        {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    return seen;
  };
  const auto fwd = reach(true), bwd = reach(false);
  std::ostringstream bad;
  for (int i = 0; i < n; ++i)
    if (!fwd[i] || !bwd[i])
      bad << ' ' << i;
  if (!bad.str().empty())
    throw Error("adjacency is reducible; unreachable states:" + bad.str());

  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = adjacency(i, j) * std::exp(word_weights(j));

  // Power iteration with a diagonal shift so periodic shifts still converge.
  const double shift = m.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  double lam = 0.0;
  for (int it = 0; it < 200000; ++it)
  {
    Eigen::VectorXd u = m * v + shift * v;
    const double lam_new = v.dot(u);
    u.normalize();
    const bool done = std::abs(lam_new - lam) <= 1e-13 * std::abs(lam_new) &&
                      (m * u + shift * u - lam_new * u).norm() <= 1e-12 * lam_new;
    v = u;
    lam = lam_new;
    if (done)
      break;
  }
  PressureEstimate est;
  est.method = PressureMethod::Transfer;
  est.horizon = n;
  est.value = std::log(lam - shift);
  est.z_value = est.value;
  return est;
}

PressureEstimate pressure_schedule(const DynamicalSystem &sys,
                                   const ScalarField &f,
                                   const PressureConfig &cfg)
{
  return pressure_schedule(pressure_separated(sys, f, cfg), cfg);
}

PressureEstimate pressure_schedule(const SeparatedResult &sep,
                                   const PressureConfig &cfg)
{
  cfg.validate();
  if (cfg.t_list.size() < 2)
    throw Error("schedule needs at least two horizons");
  const double eps_min = cfg.epsilon_list.back();

  // Linear fit value = a + b / T at the smallest epsilon; a is the
  // extrapolated pressure.
  std::vector<double> xs, ys;
  for (const auto &e : sep.table)
    if (e.eps == eps_min)
    {
      xs.push_back(1.0 / e.horizon);
      ys.push_back(e.value);
    }
  if (xs.size() < 2)
    throw Error("degenerate schedule fit: fewer than 2 usable horizons");
  const double n = double(xs.size());
  const double sx = std::accumulate(xs.begin(), xs.end(), 0.0);
  const double sy = std::accumulate(ys.begin(), ys.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i)
  {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i)
  {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }

  PressureEstimate est;
  est.method = PressureMethod::Separated;
  est.eps = eps_min;
  est.horizon = cfg.t_list.back();
  est.value = intercept;
  est.z_value = sep.best.z_value;
  est.error_bar = std::sqrt(ss / n);
  return est;
}

GapVerdict gap_condition(const PressureEstimate &est, double margin)
{
  if (!std::isfinite(est.value))
    throw Error("pressure estimate must be finite");
  if (margin <= 0.0)
    throw Error("margin must be positive");
  GapVerdict v;
  v.pressure = est.value;
  v.margin = margin;
  v.threshold = est.value + margin;
  v.satisfied = v.threshold < 0.0;
  return v;
}

}  // namespace dwlab
