// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#include "io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace dwlab
{

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace
{

std::ofstream open_out(const std::string &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open output file: " + path);
  return out;
}

void dump_json(const std::string &path, const nlohmann::json &j)
{
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace

std::string pressure_method_name(PressureMethod m)
{
  switch (m)
  {
    case PressureMethod::Separated: return "separated";
    case PressureMethod::Cover: return "cover";
    case PressureMethod::Transfer: return "transfer";
    case PressureMethod::ClosedForm: return "closed_form";
  }
  return "unknown";
}

void write_spectrum_csv(const std::string &path, const Spectrum &s)
{
  auto out = open_out(path);
  out << "index,re_tau,im_tau,neg_im,cond_flag\n";
  const int flag = s.near_defective ? 1 : 0;
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    out << i << ',' << format_double(s.eigenvalues(i).real()) << ','
        << format_double(s.eigenvalues(i).imag()) << ','
        << format_double(-s.eigenvalues(i).imag()) << ',' << flag << '\n';
}

void write_pressure_csv(const std::string &path,
                        const std::vector<PressureEstimate> &table)
{
  auto out = open_out(path);
  out << "method,eps,T,value,error_bar\n";
  for (const auto &e : table)
    out << pressure_method_name(e.method) << ',' << format_double(e.eps)
        << ',' << e.horizon << ',' << format_double(e.value) << ','
        << format_double(e.error_bar) << '\n';
}

void write_energy_csv(const std::string &path, const EnergySeries &series)
{
  auto out = open_out(path);
  out << "t,energy,method\n";
  const char *name = series.method == EvolveMethod::Modal ? "modal" : "ode";
  for (size_t i = 0; i < series.times.size(); ++i)
    out << format_double(series.times[i]) << ','
        << format_double(series.energies[i]) << ',' << name << '\n';
}

void write_trajectory_csv(const std::string &path,
                          const DynamicalSystem &sys, const ScalarField &f,
                          const std::vector<PhasePoint> &points, int horizon)
{
  auto out = open_out(path);
  out << "sample_id,t,x,y,xi1,xi2,birkhoff_sum\n";
  for (size_t i = 0; i < points.size(); ++i)
  {
    PhasePoint cur = points[i];
    double birk = 0.0;
    for (int t = 0; t <= horizon; ++t)
    {
      out << i << ',' << t << ',' << format_double(cur.x) << ','
          << format_double(cur.y) << ',' << format_double(cur.xi1) << ','
          << format_double(cur.xi2) << ',' << format_double(birk) << '\n';
      birk += f(cur);
      cur = sys.flow(cur, 1.0);
    }
  }
}

void write_long_csv(const std::string &path,
                    const std::vector<LongRow> &rows)
{
  auto out = open_out(path);
  out << "series,key,x,y\n";
  for (const auto &r : rows)
    out << r.series << ',' << r.key << ',' << format_double(r.x) << ','
        << format_double(r.y) << '\n';
}

void write_diagnostics_json(const std::string &path,
                            const DiagnosticsReport &d)
{
  nlohmann::json j;
  j["band_ok"] = d.band_ok;
  j["symmetry_ok"] = d.symmetry_ok;
  j["gap"] = d.gap;
  j["weyl"] = nlohmann::json::array();
  for (const auto &w : d.weyl)
    j["weyl"].push_back({{"lambda", w.lambda},
                         {"measured", w.measured},
                         {"predicted", w.predicted}});
  dump_json(path, j);
}

void write_gap_json(const std::string &path, const GapVerdict &v)
{
  dump_json(path, {{"pressure", v.pressure},
                   {"margin", v.margin},
                   {"threshold", v.threshold},
                   {"satisfied", v.satisfied}});
}

void write_decay_json(const std::string &path, const DecayReport &r)
{
  nlohmann::json j;
  j["G"] = r.gap;
  j["c_inf"] = r.c_inf;
  j["a_bar"] = r.a_bar;
  j["fitted_rate"] = r.fitted_rate;
  j["predicted_rate"] = r.predicted_rate;
  j["window"] = {r.window_lo, r.window_hi};
  j["residual"] = r.residual;
  j["kappa"] = r.kappa;
  j["no_control"] = r.no_control;
  if (r.theorem_rate >= 0.0)
    j["theorem_rate"] = r.theorem_rate;
  dump_json(path, j);
}

std::string content_hash(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot hash missing file: " + path);
  unsigned long long h = 1469598103934665603ull;
  char c;
  while (in.get(c))
  {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

}  // namespace dwlab
