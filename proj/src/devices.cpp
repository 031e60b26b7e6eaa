#include "isim/devices.hpp"

#include <cmath>
#include <numbers>

namespace isim {

double nernst_slope(double t_kelvin) {
  if (t_kelvin < 0) throw std::invalid_argument("nernst_slope: negative temperature");
  // ln(10)*kT/q; the usual "2.303" rounding is too coarse at the 0.01 mV level
  return std::numbers::ln10 * constants::k_boltzmann * t_kelvin /
         constants::q_electron;
}

double surface_potential(double ph, const IsfetModel& model, double t_kelvin) {
  if (ph < 0.0 || ph > 14.0) throw std::invalid_argument("surface_potential: pH out of [0,14]");
  return -model.alpha * nernst_slope(t_kelvin) * (model.ph_pzc - ph);
}

double flatband_shift(const IsfetModel& model, double ph, double t_kelvin) {
  return model.e_ref + model.de_ref_dt * (t_kelvin - constants::t_ref) +
         model.chi_sol + model.dphi_lj + surface_potential(ph, model, t_kelvin);
}

double mosfet_vth_at(const MosfetModel& model, double t_kelvin) {
  return model.vto + model.tcv * (t_kelvin - model.t_nom);
}

double mosfet_kp_at(const MosfetModel& model, double t_kelvin) {
  return model.kp * std::pow(t_kelvin / model.t_nom, model.mu_exp);
}

double isfet_vth_at(const IsfetModel& model, double ph, double t_kelvin) {
  return mosfet_vth_at(model.mos, t_kelvin) + flatband_shift(model, ph, t_kelvin);
}

DeviceEval eval_mosfet(const MosfetModel& model, double w, double l,
                       double vgs, double vds, double t_kelvin) {
  if (w <= 0.0 || l <= 0.0) throw std::invalid_argument("eval_mosfet: non-positive geometry");
  const double vth = mosfet_vth_at(model, t_kelvin);
  const double beta = mosfet_kp_at(model, t_kelvin) * (w / l);
  const double vov = vgs - vth;
  DeviceEval e;
  if (vov <= 0.0) {
    e.region = Region::cutoff;
    return e;
  }
  const double clm = 1.0 + model.lambda * vds;
  if (vds < vov) {
    e.region = Region::triode;
    const double core = vov * vds - 0.5 * vds * vds;
    e.id = beta * core * clm;
    e.gm = beta * vds * clm;
    e.gds = beta * (vov - vds) * clm + beta * core * model.lambda;
  } else {
    e.region = Region::saturation;
    const double core = 0.5 * vov * vov;
    e.id = beta * core * clm;
    e.gm = beta * vov * clm;
    e.gds = beta * core * model.lambda;
  }
  return e;
}

DeviceEval eval_isfet(const IsfetModel& model, double w, double l,
                      double v_ref_to_source, double vds, double ph,
                      double t_kelvin) {
  const double vgs_eff = v_ref_to_source - flatband_shift(model, ph, t_kelvin);
  return eval_mosfet(model.mos, w, l, vgs_eff, vds, t_kelvin);
}

double double_layer_capacitance(const IsfetModel& model, double psi0,
                                double t_kelvin, double area) {
  if (area <= 0.0 || t_kelvin <= 0.0)
    throw std::invalid_argument("double_layer_capacitance: non-positive area or temperature");
  const double kt = constants::k_boltzmann * t_kelvin;
  const double q = constants::q_electron;
  const double eps = constants::eps_water_rel * constants::eps0;
  // Gouy-Chapman diffuse layer per unit area at potential psi0.
  const double c_gouy =
      std::sqrt(2.0 * model.c_gouy_n0 * eps * q * q / kt) *
      std::cosh(q * psi0 / (2.0 * kt));
  const double ch = model.c_helm * area;
  const double cg = c_gouy * area;
  return ch * cg / (ch + cg);
}

}  // namespace isim
