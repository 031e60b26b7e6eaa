#pragma once

// Parametric sweeps over (pH, temperature, source value) and the headline
// figures of merit: pH sensitivity [V/pH] and temperature coefficient
// [ppm/degC], plus the closed-form readout output used as an oracle.

#include <iosfwd>
#include <string>
#include <vector>

#include "isim/circuit.hpp"
#include "isim/solver.hpp"

namespace isim {

struct SweepAxis {
  SweepVariable variable = SweepVariable::ph;
  std::string source_name;  // for source axes
  double start = 0.0, stop = 0.0, step = 1.0;

  int points() const;
  double at(int i) const { return start + i * step; }
};

struct Probe {
  std::string p = "0";
  std::string n = "0";  // differential probe; "0" for ground-referenced
  std::string label() const;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;  // outermost first; innermost is warm-started
  Probe probe;
};

struct SweepPoint {
  double vo = 0.0;
  double ph = 0.0;
  double temp_c = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> grid;  // row-major in axis order
  int failed_points() const;
};

// Solves every grid point. Points along the innermost axis warm-start from
// their predecessor; outer combinations may run on up to `jobs` threads.
// Non-convergent points are flagged in the grid, never interpolated.
SweepResult run_sweep(const Circuit& circuit, const SweepSpec& spec,
                      const SolverConfig& config, int jobs = 1);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys);

// |slope| of V_O against pH on the fixed-temperature slice.
double sensitivity(const SweepResult& result, double at_temp_c);

// (vo_max - vo_min) / (|vo_mean| * (t_max - t_min)) * 1e6 on the fixed-pH
// temperature slice.
double temperature_coefficient(const SweepResult& result, double at_ph);

// Output of the readout pair from the saturation square law:
//   sqrt(2I/(K'2 (W/L)2)) + Vth_nmos - sqrt(2I/(K'1 (W/L)1)) - Vth_isfet.
// Collapses to Vth_nmos - Vth_isfet for a matched pair.
double closed_form_vo(const MosfetModel& nmos, const IsfetModel& isfet,
                      double i_bias, double w, double l, double ph,
                      double t_kelvin);
double closed_form_vo_general(const MosfetModel& nmos, const IsfetModel& isfet,
                              double i_bias, double w_isfet, double l_isfet,
                              double w_nmos, double l_nmos, double ph,
                              double t_kelvin);

struct SensitivityEntry {
  double temp_c = 0.0;
  double slope_v_per_ph = 0.0;
  double r2 = 1.0;
};

struct TcEntry {
  double ph = 0.0;
  double tc_ppm = 0.0;
};

struct MetricsReport {
  std::vector<SensitivityEntry> sensitivity_per_temp;
  std::vector<TcEntry> tc_per_ph;
  double tc_per_ph_worst = 0.0;
  double tc_joint = 0.0;
  double vo_min = 0.0, vo_max = 0.0, vo_mean = 0.0;
  std::string probe_name;
};

struct CsvError : std::runtime_error {
  int row;
  CsvError(int row_, const std::string& msg)
      : std::runtime_error(msg), row(row_) {}
};

// CSV schema: `ph,temp_c,<probe>,converged,iterations`, one row per grid
// point, row-major, 9 significant digits, LF line endings.
std::string write_csv(const SweepResult& result);
SweepResult read_csv(std::istream& in);  // throws CsvError

MetricsReport compute_metrics(const SweepResult& result);

}  // namespace isim
