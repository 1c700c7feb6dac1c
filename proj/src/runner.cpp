// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dynamics.hpp"

namespace dwlab
{

using nlohmann::json;

DampingProfile RunConfig::make_damping() const
{
  if (damping_kind == "constant")
    return DampingProfile::constant(a0);
  return DampingProfile::smoothed_strip(strip_center, strip_width, a0,
                                        strip_smoothing);
}

Geometry RunConfig::make_geometry() const
{
  if (geometry_kind == "circle")
    return Geometry::circle(length, resolution);
  if (geometry_kind == "torus")
    return Geometry::flat_torus(lx, ly, resolution,
                                ny > 0 ? ny : resolution);
  if (geometry_kind == "matrix")
    return Geometry::matrix_input(matrix_path);
  throw Error("geometry '" + geometry_kind + "' has no discrete operator");
}

namespace
{

void check_keys(const json &obj, const std::set<std::string> &allowed,
                const std::string &where, std::vector<std::string> &errs)
{
  for (const auto &[key, val] : obj.items())
    if (!allowed.count(key))
      errs.push_back("unknown key '" + where + key + "'");
}

template <typename T>
bool fetch(const json &obj, const char *key, T &dst)
{
  const auto it = obj.find(key);
  if (it == obj.end())
    return false;
  dst = it->get<T>();
  return true;
}

}  // namespace

std::string default_config_json()
{
  json j;
  j["experiment"] = "spectrum";
  j["geometry"] = {{"kind", "circle"},
                   {"length", 2.0 * M_PI},
                   {"lx", 1.0},
                   {"ly", 1.0},
                   {"resolution", 64},
                   {"ny", 0},
                   {"path", ""}};
  j["damping"] = {{"kind", "constant"},
                  {"a0", 0.1},
                  {"center", 0.5},
                  {"width", 0.3},
                  {"smoothing", 0.05}};
  const PressureConfig pc = PressureConfig::flow_defaults();
  j["pressure"] = {{"epsilons", pc.epsilon_list},
                   {"horizons", pc.t_list},
                   {"budget", pc.budget},
                   {"cover_diam", pc.cover_diam},
                   {"delta", pc.delta},
                   {"margin", 0.1}};
  j["decay"] = {{"horizon", 100.0}};
  j["seed"] = 1;
  return j.dump(2);
}

RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("config file not readable: " + path);
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.source_path = path;
  std::vector<std::string> errs;
  try
  {
    check_keys(j, {"experiment", "geometry", "damping", "pressure", "decay",
                   "seed"},
               "", errs);
    // experiment may be absent: the CLI subcommand supplies it.
    fetch(j, "experiment", cfg.experiment);
    if (!cfg.experiment.empty() && cfg.experiment != "spectrum" &&
        cfg.experiment != "pressure" && cfg.experiment != "decay" &&
        cfg.experiment != "verify-gap")
      errs.push_back("experiment must be one of spectrum, pressure, decay, "
                     "verify-gap");
    fetch(j, "seed", cfg.seed);

    if (j.contains("geometry"))
    {
      const json &g = j["geometry"];
      check_keys(g, {"kind", "length", "lx", "ly", "resolution", "ny",
                     "path"},
                 "geometry.", errs);
      fetch(g, "kind", cfg.geometry_kind);
      fetch(g, "length", cfg.length);
      fetch(g, "lx", cfg.lx);
      fetch(g, "ly", cfg.ly);
      fetch(g, "resolution", cfg.resolution);
      fetch(g, "ny", cfg.ny);
      fetch(g, "path", cfg.matrix_path);
    }
    else
      errs.push_back("missing 'geometry'");

    static const std::set<std::string> kGeoms{"circle", "torus", "matrix",
                                              "bolza", "doubling"};
    if (!kGeoms.count(cfg.geometry_kind))
      errs.push_back("geometry.kind must be one of circle, torus, matrix, "
                     "bolza, doubling");
    const bool needs_operator =
        cfg.experiment == "spectrum" || cfg.experiment == "decay";
    if (needs_operator && cfg.geometry_kind != "circle" &&
        cfg.geometry_kind != "torus" && cfg.geometry_kind != "matrix")
      errs.push_back("experiment '" + cfg.experiment +
                     "' needs a circle, torus, or matrix geometry");
    if ((cfg.experiment == "pressure" || cfg.experiment == "verify-gap") &&
        cfg.geometry_kind == "matrix")
      errs.push_back("pressure experiments need a flow or map geometry");
    if (cfg.geometry_kind == "matrix" && cfg.matrix_path.empty())
      errs.push_back("geometry.path required for matrix input");
    if (cfg.geometry_kind == "matrix" && !cfg.matrix_path.empty() &&
        !std::filesystem::exists(cfg.matrix_path))
      errs.push_back("geometry.path does not exist: " + cfg.matrix_path);
    if (cfg.length <= 0.0 || cfg.lx <= 0.0 || cfg.ly <= 0.0)
      errs.push_back("geometry sizes must be positive");

    if (j.contains("damping"))
    {
      const json &d = j["damping"];
      check_keys(d, {"kind", "a0", "center", "width", "smoothing"},
                 "damping.", errs);
      fetch(d, "kind", cfg.damping_kind);
      fetch(d, "a0", cfg.a0);
      fetch(d, "center", cfg.strip_center);
      fetch(d, "width", cfg.strip_width);
      fetch(d, "smoothing", cfg.strip_smoothing);
      if (cfg.damping_kind != "constant" && cfg.damping_kind != "strip")
        errs.push_back("damping.kind must be constant or strip");
      if (cfg.a0 < 0.0)
        errs.push_back("damping.a0 must be nonnegative");
      if (cfg.damping_kind == "strip" &&
          (cfg.strip_width <= 0.0 || cfg.strip_smoothing <= 0.0))
        errs.push_back("damping strip width and smoothing must be positive");
    }

    cfg.pressure = cfg.geometry_kind == "doubling"
                       ? PressureConfig::map_defaults()
                       : PressureConfig::flow_defaults();
    cfg.pressure.seed = cfg.seed;
    if (j.contains("pressure"))
    {
      const json &p = j["pressure"];
      check_keys(p, {"epsilons", "horizons", "budget", "cover_diam", "delta",
                     "margin"},
                 "pressure.", errs);
      cfg.pressure_set = true;
      fetch(p, "epsilons", cfg.pressure.epsilon_list);
      fetch(p, "horizons", cfg.pressure.t_list);
      fetch(p, "budget", cfg.pressure.budget);
      fetch(p, "cover_diam", cfg.pressure.cover_diam);
      fetch(p, "delta", cfg.pressure.delta);
      fetch(p, "margin", cfg.margin);
      if (cfg.margin <= 0.0)
        errs.push_back("pressure.margin must be positive");
      try
      {
        cfg.pressure.validate();
      }
      catch (const Error &e)
      {
        errs.push_back(std::string("pressure schedule: ") + e.what());
      }
    }

    if (j.contains("decay"))
    {
      const json &d = j["decay"];
      check_keys(d, {"horizon"}, "decay.", errs);
      fetch(d, "horizon", cfg.decay_horizon);
      if (cfg.decay_horizon <= 0.0)
        errs.push_back("decay.horizon must be positive");
    }

    if (cfg.resolution < 8)
      errs.push_back("geometry.resolution must be >= 8");
  }
  catch (const json::exception &e)
  {
    errs.push_back(std::string("type error: ") + e.what());
  }

  if (!errs.empty())
  {
    std::ostringstream msg;
    msg << "invalid config (" << errs.size() << " violation"
        << (errs.size() == 1 ? "" : "s") << "):";
    for (const auto &e : errs)
      msg << "\n  - " << e;
    throw Error(msg.str());
  }
  return cfg;
}

namespace
{

struct FlowModel
{
  std::unique_ptr<DynamicalSystem> sys;
  ScalarField weight;  // a^u-type pressure weight
};

FlowModel make_flow_model(const RunConfig &cfg)
{
  FlowModel m;
  const DampingProfile damping = cfg.make_damping();
  if (cfg.geometry_kind == "circle")
    m.sys = std::make_unique<CircleFlow>(cfg.length);
  else if (cfg.geometry_kind == "torus")
    m.sys = std::make_unique<TorusFlow>(cfg.lx, cfg.ly);
  else if (cfg.geometry_kind == "bolza")
    m.sys = std::make_unique<BolzaFlow>();
  else if (cfg.geometry_kind == "doubling")
    m.sys = std::make_unique<DoublingMap>();
  else
    throw Error("no flow model for geometry '" + cfg.geometry_kind + "'");

  const DynamicalSystem *sys = m.sys.get();
  if (cfg.geometry_kind == "doubling")
    m.weight = [damping](const PhasePoint &p) {
      return -damping.value(p.x);
    };
  else if (cfg.geometry_kind == "bolza" &&
           damping.kind == DampingProfile::Kind::Constant)
  {
    const double w = -damping.a0 - 0.5;  // constant a^u in curvature -1
    m.weight = [w](const PhasePoint &) { return w; };
  }
  else
    m.weight = [damping, sys](const PhasePoint &p) {
      return a_u_weight(damping, *sys, p);
    };
  return m;
}

CauchyData random_cauchy_data(const DiscreteOperator &op, unsigned long seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd c0(op.n), c1(op.n);
  for (int i = 0; i < op.n; ++i)
  {
    // Smooth data: coefficients damped by the frequency.
    const double w = 1.0 / (1.0 + std::abs(op.basis_eigs(i)));
    c0(i) = w * gauss(rng);
    c1(i) = w * gauss(rng);
  }
  CauchyData data;
  data.omega0 = (op.basis * c0).cast<Complex>();
  data.omega1 = (op.basis * c1).cast<Complex>();
  data.op = &op;
  return data;
}

struct Stage
{
  json params = json::object();
  std::vector<LongRow> long_rows;
};

double spectrum_gap(const Spectrum &s, double bnorm)
{
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    if (std::abs(s.eigenvalues(i)) > 1e-8 * bnorm)
      gap = std::min(gap, -s.eigenvalues(i).imag());
  return std::isfinite(gap) ? std::max(0.0, gap) : 0.0;
}

void run_spectrum(const RunConfig &cfg, const std::string &out, json &stages,
                  std::vector<std::string> &files,
                  std::vector<LongRow> &rows)
{
  const DiscreteOperator op =
      assemble_operator(cfg.make_geometry(), cfg.make_damping());
  const CompanionOperator comp = linearize(op);
  const Spectrum s = solve_spectrum(comp, true);
  const double kmax = std::sqrt(std::max(1.0, -op.basis_eigs.minCoeff()));
  const DiagnosticsReport d =
      spectrum_diagnostics(s, op, {0.3 * kmax, 0.5 * kmax, 0.7 * kmax});

  write_spectrum_csv(out + "/spectrum.csv", s);
  files.push_back("spectrum.csv");
  write_diagnostics_json(out + "/diagnostics.json", d);
  files.push_back("diagnostics.json");
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    rows.push_back({"spectrum", "tau", s.eigenvalues(i).real(),
                    s.eigenvalues(i).imag()});
  stages["spectrum"] = {{"n", op.n},
                        {"gap", d.gap},
                        {"band_ok", d.band_ok},
                        {"symmetry_ok", d.symmetry_ok}};
}

GapVerdict run_pressure(const RunConfig &cfg, const std::string &out,
                        json &stages, std::vector<std::string> &files,
                        std::vector<LongRow> &rows)
{
  const FlowModel model = make_flow_model(cfg);
  const SeparatedResult sep =
      pressure_separated(*model.sys, model.weight, cfg.pressure);
  const PressureEstimate sched = pressure_schedule(sep, cfg.pressure);
  const GapVerdict verdict = gap_condition(sched, cfg.margin);

  std::vector<PressureEstimate> table = sep.table;
  table.push_back(sched);
  write_pressure_csv(out + "/pressure.csv", table);
  files.push_back("pressure.csv");
  write_gap_json(out + "/gap.json", verdict);
  files.push_back("gap.json");
  for (const auto &e : sep.table)
    rows.push_back({"pressure", "eps=" + format_double(e.eps),
                    double(e.horizon), e.value});
  stages["pressure"] = {{"budget", cfg.pressure.budget},
                        {"seed", cfg.pressure.seed},
                        {"value", sched.value},
                        {"error_bar", sched.error_bar},
                        {"margin", cfg.margin}};
  return verdict;
}

void run_decay(const RunConfig &cfg, const std::string &out, json &stages,
               std::vector<std::string> &files, std::vector<LongRow> &rows)
{
  const DiscreteOperator op =
      assemble_operator(cfg.make_geometry(), cfg.make_damping());
  const DampingProfile damping = cfg.make_damping();
  const CauchyData data = random_cauchy_data(op, cfg.seed);
  const DecayReport rep = decay_experiment(op, damping, data, std::nullopt,
                                           cfg.decay_horizon, cfg.seed);

  const CompanionOperator comp = linearize(op);
  const Spectrum s = solve_spectrum(comp, false);
  write_spectrum_csv(out + "/spectrum.csv", s);
  files.push_back("spectrum.csv");

  std::vector<double> grid;
  for (double t = 0.0; t <= cfg.decay_horizon + 1e-9; t += 0.5)
    grid.push_back(t);
  const Spectrum sv = solve_spectrum(comp, true);
  const EvolveMethod method =
      sv.near_defective || sv.eigenvector_condition > 1e8
          ? EvolveMethod::Ode
          : EvolveMethod::Modal;
  const EnergySeries series =
      energy_series(op, evolve(op, data, grid, method), method);
  write_energy_csv(out + "/energy.csv", series);
  files.push_back("energy.csv");
  write_decay_json(out + "/decay.json", rep);
  files.push_back("decay.json");

  for (size_t i = 0; i < series.times.size(); ++i)
    rows.push_back({"energy", method == EvolveMethod::Modal ? "modal" : "ode",
                    series.times[i], series.energies[i]});
  stages["decay"] = {{"G", rep.gap},
                     {"c_inf", rep.c_inf},
                     {"fitted_rate", rep.fitted_rate},
                     {"predicted_rate", rep.predicted_rate},
                     {"horizon", cfg.decay_horizon},
                     {"no_control", rep.no_control}};
}

void run_verify_gap(const RunConfig &cfg, const std::string &out,
                    json &stages, std::vector<std::string> &files,
                    std::vector<LongRow> &rows)
{
  const GapVerdict verdict = run_pressure(cfg, out, stages, files, rows);
  json v = {{"pressure", verdict.pressure},
            {"margin", verdict.margin},
            {"threshold", verdict.threshold},
            {"satisfied", verdict.satisfied}};
  if (cfg.geometry_kind == "circle" || cfg.geometry_kind == "torus")
  {
    const DiscreteOperator op =
        assemble_operator(cfg.make_geometry(), cfg.make_damping());
    const CompanionOperator comp = linearize(op);
    const Spectrum s = solve_spectrum(comp, false);
    const double gap = spectrum_gap(s, comp.b.norm());
    v["gap"] = gap;
    v["rho"] = 2.0 * std::min(gap, std::abs(verdict.threshold));
    stages["verify-gap"] = {{"gap", gap}, {"rho", v["rho"]}};
  }
  std::ofstream vf(out + "/verify.json", std::ios::binary);
  vf << v.dump(2) << '\n';
  files.push_back("verify.json");
}

}  // namespace

std::string experiment_compat_error(const RunConfig &cfg)
{
  if (cfg.experiment != "spectrum" && cfg.experiment != "pressure" &&
      cfg.experiment != "decay" && cfg.experiment != "verify-gap")
    return "experiment must be one of spectrum, pressure, decay, verify-gap";
  const bool needs_operator =
      cfg.experiment == "spectrum" || cfg.experiment == "decay";
  if (needs_operator && cfg.geometry_kind != "circle" &&
      cfg.geometry_kind != "torus" && cfg.geometry_kind != "matrix")
    return "experiment '" + cfg.experiment +
           "' needs a circle, torus, or matrix geometry";
  if ((cfg.experiment == "pressure" || cfg.experiment == "verify-gap") &&
      cfg.geometry_kind == "matrix")
    return "pressure experiments need a flow or map geometry";
  return "";
}

RunManifest run_experiment(const RunConfig &cfg)
{
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest man;
  man.config_hash =
      cfg.source_path.empty() ? "-" : content_hash(cfg.source_path);

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  {
    std::ofstream probe(cfg.out_dir + "/.write_probe",
                        std::ios::binary | std::ios::trunc);
    if (!probe)
      throw Error("output directory not writable: " + cfg.out_dir);
  }
  std::filesystem::remove(cfg.out_dir + "/.write_probe", ec);

  json stages = json::object();
  stages["config"] = {{"experiment", cfg.experiment},
                      {"geometry", cfg.geometry_kind},
                      {"damping", cfg.damping_kind},
                      {"seed", cfg.seed},
                      {"threads", cfg.threads}};
  std::vector<std::string> files;
  std::vector<LongRow> rows;
  try
  {
    if (cfg.experiment == "spectrum")
      run_spectrum(cfg, cfg.out_dir, stages, files, rows);
    else if (cfg.experiment == "pressure")
      run_pressure(cfg, cfg.out_dir, stages, files, rows);
    else if (cfg.experiment == "decay")
      run_decay(cfg, cfg.out_dir, stages, files, rows);
    else if (cfg.experiment == "verify-gap")
      run_verify_gap(cfg, cfg.out_dir, stages, files, rows);
    else
      throw Error("unknown experiment: " + cfg.experiment);
    man.ok = true;
  }
  catch (const std::exception &e)
  {
    man.error = e.what();  // partial artifacts stay on disk
  }

  if (!rows.empty())
  {
    write_long_csv(cfg.out_dir + "/long.csv", rows);
    files.push_back("long.csv");
  }

  man.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  man.stages_json = stages.dump();
  for (const auto &f : files)
    man.outputs.emplace_back(f, content_hash(cfg.out_dir + "/" + f));

  json mj;
  mj["config_hash"] = man.config_hash;
  mj["version"] = man.version;
  mj["wall_time_s"] = man.wall_time_s;
  mj["stages"] = stages;
  mj["outputs"] = json::array();
  for (const auto &[f, h] : man.outputs)
    mj["outputs"].push_back({{"file", f}, {"hash", h}});
  if (!man.error.empty())
    mj["error"] = man.error;
  std::ofstream mf(cfg.out_dir + "/manifest.json", std::ios::binary);
  mf << mj.dump(2) << '\n';
  return man;
}

}  // namespace dwlab
