// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "decay.hpp"
#include "pressure.hpp"

namespace dwlab
{

// Long-format plot row: series name, free-form key, abscissa, ordinate.
struct LongRow
{
  std::string series;
  std::string key;
  double x = 0.0;
  double y = 0.0;
};

std::string format_double(double v);

void write_spectrum_csv(const std::string &path, const Spectrum &s);

void write_pressure_csv(const std::string &path,
                        const std::vector<PressureEstimate> &table);

void write_energy_csv(const std::string &path, const EnergySeries &series);

void write_trajectory_csv(const std::string &path,
                          const DynamicalSystem &sys, const ScalarField &f,
                          const std::vector<PhasePoint> &points, int horizon);

void write_long_csv(const std::string &path,
                    const std::vector<LongRow> &rows);

void write_diagnostics_json(const std::string &path,
                            const DiagnosticsReport &d);

void write_gap_json(const std::string &path, const GapVerdict &v);

void write_decay_json(const std::string &path, const DecayReport &r);

// FNV-1a 64-bit hash of a file's bytes, hex encoded.
std::string content_hash(const std::string &path);

std::string pressure_method_name(PressureMethod m);

}  // namespace dwlab
