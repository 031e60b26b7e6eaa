#include "isim/builders.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace isim {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string nmos_model_card(const std::string& name, const MosfetModel& m) {
  std::ostringstream s;
  s << ".model " << name << " NMOS (VTO=" << num(m.vto) << " KP=" << num(m.kp)
    << " LAMBDA=" << num(m.lambda) << " TCV=" << num(m.tcv)
    << " MUEXP=" << num(m.mu_exp) << " TNOM=" << num(m.t_nom) << ")";
  return s.str();
}

std::string isfet_model_card(const std::string& name, const IsfetModel& m) {
  std::ostringstream s;
  s << ".model " << name << " ISFET (VTO=" << num(m.mos.vto)
    << " KP=" << num(m.mos.kp) << " LAMBDA=" << num(m.mos.lambda)
    << " TCV=" << num(m.mos.tcv) << " MUEXP=" << num(m.mos.mu_exp)
    << " TNOM=" << num(m.mos.t_nom) << " ALPHA=" << num(m.alpha)
    << " PHPZC=" << num(m.ph_pzc) << " EREF=" << num(m.e_ref)
    << " EREFTC=" << num(m.de_ref_dt) << " CHISOL=" << num(m.chi_sol)
    << " DPHILJ=" << num(m.dphi_lj) << " E0=" << num(m.e0)
    << " CHELM=" << num(m.c_helm) << " N0=" << num(m.c_gouy_n0) << ")";
  return s.str();
}

Netlist parse_or_die(const std::string& text) {
  ParseResult r = parse(text);
  if (!r.ok())
    throw std::logic_error("builder emitted invalid netlist: " +
                           r.diagnostics.front().message);
  return std::move(r.netlist);
}

double vgs_for_current(const MosfetModel& m, double wl, double id) {
  return m.vto + std::sqrt(2.0 * id / (m.kp * wl));
}

}  // namespace

double widlar_r_ref_for(const WidlarConfig& cfg, double supply_span,
                        double leg_current) {
  const double wl = cfg.mirror_w / cfg.mirror_l;
  const double vgs_leg =
      vgs_for_current(cfg.mirror_model, wl * cfg.mirror_ratio_wl, leg_current);
  const double v_nb = vgs_leg + leg_current * cfg.r_emitter_deg;
  const double vov = v_nb - cfg.mirror_model.vto;
  if (vov <= 0.0)
    throw std::invalid_argument("widlar_r_ref_for: reference device cut off");
  const double i_ref = 0.5 * cfg.mirror_model.kp * wl * vov * vov;
  return (supply_span - v_nb) / i_ref;
}

Netlist build_readout(const ReadoutConfig& cfg) {
  if (cfg.w <= 0 || cfg.l <= 0 || cfg.i_bias <= 0)
    throw std::invalid_argument("build_readout: bad geometry or bias");
  if (cfg.opamp_gain < 1e4)
    throw std::invalid_argument("build_readout: opamp gain must be >= 1e4");

  std::ostringstream s;
  s << "isfet-mosfet readout (generated)\n";
  s << "* bias=" << (cfg.bias_mode == BiasMode::widlar ? "widlar" : "ideal")
    << " i_bias=" << num(cfg.i_bias) << " w=" << num(cfg.w)
    << " l=" << num(cfg.l) << " gain=" << num(cfg.opamp_gain)
    << " vref=" << num(cfg.v_ref_electrode)
    << " supplies=" << num(cfg.supplies) << " ph=" << num(cfg.ph)
    << " swap=" << (cfg.swap_branches ? 1 : 0) << "\n";
  s << "* equal pull-down current sources at both transistor sources;\n";
  s << "* op-amp output VO feeds the gate of the non-sensing device\n";
  s << "* probe: VO\n";
  s << "VDD VDD 0 " << num(cfg.supplies) << "\n";
  s << "VSS VSS 0 " << num(-cfg.supplies) << "\n";
  s << "VREF NREF 0 " << num(cfg.v_ref_electrode) << "\n";
  const std::string geo = "W=" + num(cfg.w) + " L=" + num(cfg.l);
  if (!cfg.swap_branches) {
    s << "F1 VDD NREF S1 0 ISF " << geo << " PH=" << num(cfg.ph) << "\n";
    s << "M2 VDD VO S2 0 NM " << geo << "\n";
  } else {
    s << "M1 VDD NREF S1 0 NM " << geo << "\n";
    s << "F2 VDD VO S2 0 ISF " << geo << " PH=" << num(cfg.ph) << "\n";
  }
  if (cfg.bias_mode == BiasMode::ideal_sources) {
    s << "IB1 S1 VSS " << num(cfg.i_bias) << "\n";
    s << "IB2 S2 VSS " << num(cfg.i_bias) << "\n";
  } else {
    WidlarConfig w = cfg.widlar;
    const double span = 2.0 * cfg.supplies;
    const double r_ref = w.r_ref > 0 ? w.r_ref
                                     : widlar_r_ref_for(w, span, cfg.i_bias);
    const std::string mgeo =
        "W=" + num(w.mirror_w * w.mirror_ratio_wl) + " L=" + num(w.mirror_l);
    s << "* widlar bias: r_ref=" << num(r_ref)
      << " r_deg=" << num(w.r_emitter_deg) << "\n";
    s << "RREF VDD NB " << num(r_ref) << "\n";
    s << "MW1 NB NB VSS 0 MIR W=" << num(w.mirror_w) << " L=" << num(w.mirror_l)
      << "\n";
    if (w.r_emitter_deg > 0) {
      s << "MCS1 S1 NB E1 0 MIR " << mgeo << "\n";
      s << "RE1 E1 VSS " << num(w.r_emitter_deg) << "\n";
      s << "MCS2 S2 NB E2 0 MIR " << mgeo << "\n";
      s << "RE2 E2 VSS " << num(w.r_emitter_deg) << "\n";
    } else {
      s << "MCS1 S1 NB VSS 0 MIR " << mgeo << "\n";
      s << "MCS2 S2 NB VSS 0 MIR " << mgeo << "\n";
    }
  }
  // keeping the S1,S2 input order preserves negative feedback in both
  // modes; the output sign flips because the driven device swaps branches
  s << "EOP VO 0 S1 S2 " << num(cfg.opamp_gain) << "\n";
  s << "RLOAD VO 0 1MEG\n";
  s << nmos_model_card("NM", cfg.nmos_model) << "\n";
  s << isfet_model_card("ISF", cfg.isfet_model) << "\n";
  if (cfg.bias_mode == BiasMode::widlar)
    s << nmos_model_card("MIR", cfg.widlar.mirror_model) << "\n";
  s << ".op\n";
  s << ".sweep ph 1 13 1\n";
  s << ".sweep temp 0 100 5\n";
  s << ".end\n";
  return parse_or_die(s.str());
}

Netlist build_widlar(const WidlarConfig& cfg) {
  if (cfg.r_emitter_deg < 0 || cfg.supply <= 0)
    throw std::invalid_argument("build_widlar: bad configuration");
  const double wl = cfg.mirror_w / cfg.mirror_l;
  // reference branch sized so the diode-connected input carries the target
  const double vgs_ref =
      vgs_for_current(cfg.mirror_model, wl, cfg.target_current);
  const double r_ref =
      cfg.r_ref > 0 ? cfg.r_ref : (cfg.supply - vgs_ref) / cfg.target_current;

  std::ostringstream s;
  s << "widlar current source (generated)\n";
  s << "* r_ref=" << num(r_ref) << " r_deg=" << num(cfg.r_emitter_deg)
    << " supply=" << num(cfg.supply) << " ratio=" << num(cfg.mirror_ratio_wl)
    << " target=" << num(cfg.target_current) << "\n";
  s << "VS VDD 0 " << num(cfg.supply) << "\n";
  s << "RREF VDD NB " << num(r_ref) << "\n";
  s << "MW1 NB NB 0 0 MIR W=" << num(cfg.mirror_w) << " L=" << num(cfg.mirror_l)
    << "\n";
  const std::string mgeo = "W=" + num(cfg.mirror_w * cfg.mirror_ratio_wl) +
                           " L=" + num(cfg.mirror_l);
  if (cfg.r_emitter_deg > 0) {
    s << "MCS1 VDD NB E1 0 MIR " << mgeo << "\n";
    s << "RE1 E1 0 " << num(cfg.r_emitter_deg) << "\n";
    s << "MCS2 VDD NB E2 0 MIR " << mgeo << "\n";
    s << "RE2 E2 0 " << num(cfg.r_emitter_deg) << "\n";
  } else {
    s << "MCS1 VDD NB 0 0 MIR " << mgeo << "\n";
    s << "MCS2 VDD NB 0 0 MIR " << mgeo << "\n";
  }
  s << nmos_model_card("MIR", cfg.mirror_model) << "\n";
  s << ".op\n";
  s << ".end\n";
  return parse_or_die(s.str());
}

Netlist build_fixture(FixtureKind kind) {
  std::ostringstream s;
  switch (kind) {
    case FixtureKind::divider:
      s << "divider fixture\n"
        << "V1 1 0 1\n"
        << "R1 1 2 1k\n"
        << "R2 2 0 1k\n"
        << ".op\n"
        << ".end\n";
      break;
    case FixtureKind::diode_connected:
      s << "diode-connected nmos fixture\n"
        << "I1 0 D 100u\n"
        << "M1 D D 0 0 NM W=10u L=1u\n"
        << nmos_model_card("NM", MosfetModel{}) << "\n"
        << ".op\n"
        << ".end\n";
      break;
    case FixtureKind::single_isfet:
      s << "single isfet fixture\n"
        << "VREF NREF 0 1.5\n"
        << "VDS D 0 1\n"
        << "F1 D NREF S 0 ISF W=840u L=18u PH=7\n"
        << "RS S 0 1k\n"
        << isfet_model_card("ISF", IsfetModel{}) << "\n"
        << ".dc VREF 0 3 0.5\n"
        << ".op\n"
        << ".end\n";
      break;
  }
  return parse_or_die(s.str());
}

}  // namespace isim
