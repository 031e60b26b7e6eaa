#pragma once

// Canonical netlist generators for the readout pair, the Widlar bias
// source, and the small fixtures used across the test suite. Generators
// emit dialect text and re-parse it, so the returned Netlist is always
// known-clean.

#include <string>

#include "isim/devices.hpp"
#include "isim/netlist.hpp"

namespace isim {

enum class BiasMode { ideal_sources, widlar };

struct WidlarConfig {
  MosfetModel mirror_model{.vto = 0.7, .kp = 1e-4, .lambda = 0.0};
  double mirror_w = 100e-6;
  double mirror_l = 10e-6;
  double r_ref = 0.0;           // 0: size for the target current
  double r_emitter_deg = 100.0;  // 0 collapses to a simple mirror
  double supply = 3.3;
  double mirror_ratio_wl = 1.0;
  double target_current = 100e-6;
};

struct ReadoutConfig {
  MosfetModel nmos_model;
  IsfetModel isfet_model;
  double w = 840e-6;   // identical pair geometry
  double l = 18e-6;
  double i_bias = 100e-6;
  BiasMode bias_mode = BiasMode::ideal_sources;
  double opamp_gain = 1e7;
  double v_ref_electrode = 0.0;
  double supplies = 3.3;  // symmetric +/- rails
  double ph = 7.0;
  bool swap_branches = false;  // ISFET into the feedback branch, inputs swapped
  WidlarConfig widlar;
};

enum class FixtureKind { divider, diode_connected, single_isfet };

// Readout topology: ISFET + NMOS pair, equal branch currents, VCVS
// op-amp with output node VO (the probe). Includes .sweep ph and .sweep
// temp directives for the standard 13x21 grid.
Netlist build_readout(const ReadoutConfig& cfg);

Netlist build_widlar(const WidlarConfig& cfg);

Netlist build_fixture(FixtureKind kind);

// Reference-branch resistor that sets the requested mirror leg current,
// from the saturation square law (exact at lambda = 0).
double widlar_r_ref_for(const WidlarConfig& cfg, double supply_span,
                        double leg_current);

}  // namespace isim
