#pragma once

// Compact device models: level-1 MOSFET with linear V_TH(T) and power-law
// K'(T), plus the ISFET electrochemical gate stage layered on top of it.
// All functions here are pure; they carry no state between calls.

#include <stdexcept>

namespace isim {

namespace constants {
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double q_electron = 1.602176634e-19;  // C
inline constexpr double t_ref = 298.16;                // K, 25 C reference
inline constexpr double celsius_offset = 273.16;
inline constexpr double eps0 = 8.8541878128e-12;       // F/m
inline constexpr double eps_water_rel = 78.5;
}  // namespace constants

inline double celsius_to_kelvin(double t_c) { return t_c + constants::celsius_offset; }
inline double kelvin_to_celsius(double t_k) { return t_k - constants::celsius_offset; }

struct MosfetModel {
  double vto = 0.7;       // zero-bias threshold at t_nom [V]
  double kp = 1e-4;       // transconductance parameter mu_n*Cox [A/V^2]
  double lambda = 0.0;    // channel-length modulation [1/V]
  double tcv = -1.4e-3;   // dVth/dT [V/K]
  double mu_exp = -1.5;   // mobility temperature exponent
  double t_nom = constants::t_ref;  // model reference temperature [K]
};

struct IsfetModel {
  MosfetModel mos;
  double alpha = 1.0;       // sensitivity adjustment, in [0,1]
  double ph_pzc = 2.2;      // pH of point of zero charge
  double e_ref = 0.205;     // Ag/AgCl reference electrode potential [V]
  double de_ref_dt = -1.4e-4;  // reference electrode drift [V/K]
  double chi_sol = 0.0;     // surface dipole potential [V]
  double dphi_lj = 0.0;     // liquid-junction drop [V]
  double e0 = 0.0;          // pH-independent threshold offset [V]
  double c_helm = 0.16;     // Helmholtz capacitance per area [F/m^2]
  double c_gouy_n0 = 6.022e25;  // bulk ion concentration [1/m^3] (~0.1 mol/m^3)
};

enum class Region { cutoff, triode, saturation };

struct DeviceEval {
  double id = 0.0;   // drain current [A]
  double gm = 0.0;   // dId/dVgs [S]
  double gds = 0.0;  // dId/dVds [S]
  Region region = Region::cutoff;
};

// Nernst slope 2.303*k*T/q in V/pH. Maximum attainable pH sensitivity.
double nernst_slope(double t_kelvin);

// Electrolyte-insulator surface potential: -alpha * nernst * (ph_pzc - ph).
double surface_potential(double ph, const IsfetModel& model, double t_kelvin);

// Total electrochemical threshold addition V_pH (reference electrode,
// dipole, liquid junction, surface potential).
double flatband_shift(const IsfetModel& model, double ph, double t_kelvin);

double mosfet_vth_at(const MosfetModel& model, double t_kelvin);
double mosfet_kp_at(const MosfetModel& model, double t_kelvin);

// ISFET threshold = MOSFET threshold + flatband shift. With the constant
// offsets folded into E0 this is the familiar alpha*nernst(T)*pH + E0 form,
// E0 = vto + tcv*(T - t_nom) + e_ref + chi_sol + dphi_lj - alpha*nernst*ph_pzc.
double isfet_vth_at(const IsfetModel& model, double ph, double t_kelvin);

// Level-1 square law. Requires w, l > 0; vds >= 0 (n-channel orientation).
DeviceEval eval_mosfet(const MosfetModel& model, double w, double l,
                       double vgs, double vds, double t_kelvin);

// MOSFET evaluation with effective gate drive vgs_eff = v_ref - flatband.
DeviceEval eval_isfet(const IsfetModel& model, double w, double l,
                      double v_ref_to_source, double vds, double ph,
                      double t_kelvin);

// Series Helmholtz / Gouy-Chapman double-layer capacitance at potential
// psi0. Reported in operating-point output only; never enters the DC solve.
double double_layer_capacitance(const IsfetModel& model, double psi0,
                                double t_kelvin, double area);

}  // namespace isim
