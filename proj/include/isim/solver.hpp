#pragma once

// Nonlinear DC solve: modified nodal analysis + Newton-Raphson with
// per-unknown step clamping, gmin stepping, and source stepping fallbacks.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isim/circuit.hpp"
#include "isim/linalg.hpp"

namespace isim {

struct SolverConfig {
  double abstol = 1e-12;      // KCL residual tolerance [A]
  double reltol = 1e-6;       // relative update tolerance
  double vntol = 1e-6;        // absolute voltage update tolerance [V]
  int max_iter = 100;         // iterations per attempt
  double vstep_limit = 0.5;   // Newton update clamp per unknown [V]
  std::vector<double> gmin_ladder = {1e-3, 1e-4, 1e-5, 1e-6,  1e-7,  1e-8,
                                     1e-9, 1e-10, 1e-11, 1e-12};
  int source_steps = 10;
};

enum class SolveStrategy { direct, gmin, source_step };

struct OperatingPoint {
  std::vector<double> node_voltages;    // per unknown node [V]
  std::vector<double> branch_currents;  // per vsource then vcvs [A]
  std::vector<std::pair<std::string, DeviceEval>> device_evals;
  int iterations = 0;
  SolveStrategy strategy = SolveStrategy::direct;
  double max_kcl_residual = 0.0;

  double voltage(const Circuit& circuit, const std::string& label) const;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linearized MNA system at iterate x: Jacobian and residual f(x). Unknowns
// are node voltages followed by vsource/vcvs branch currents. src_scale
// multiplies every independent source (used by source stepping).
void stamp(const Circuit& circuit, const std::vector<double>& x, double gmin,
           double src_scale, Matrix& jacobian, std::vector<double>& residual);

OperatingPoint newton_dc(const Circuit& circuit, const SolverConfig& config,
                         const std::optional<std::vector<double>>& initial_guess = {});

const char* strategy_name(SolveStrategy s);

}  // namespace isim
