// isim: netlist-driven nonlinear DC simulator and ISFET readout analysis.
//
// Subcommands:
//   run     solve the .op point of a netlist and print the node table
//   sweep   run pH/temperature/source sweeps, write the CSV grid
//   metrics compute sensitivity [mV/pH] and TC [ppm/C] from a sweep CSV
//   plot    render V_O vs pH (one polyline per temperature) as SVG
//   gen     emit generated circuits: readout, widlar, fixtures
//
// Exit codes: 0 ok, 1 parse/validation error, 2 non-convergence, 3 I/O.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "isim/analysis.hpp"
#include "isim/builders.hpp"
#include "isim/circuit.hpp"
#include "isim/svg.hpp"

namespace {

using namespace isim;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitNoConverge = 2;
constexpr int kExitIo = 3;

struct CliError : std::runtime_error {
  int code;
  CliError(int code_, const std::string& msg)
      : std::runtime_error(msg), code(code_) {}
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kExitIo, "cannot write '" + path + "'");
  out << content;
  if (!out) throw CliError(kExitIo, "write failed on '" + path + "'");
}

struct Overrides {
  SolverConfig solver;
  std::optional<SweepAxis> ph_axis, temp_axis;
  std::optional<double> fixed_ph, fixed_temp;
  std::optional<Probe> probe;
  std::map<std::string, double> numeric;  // everything else, for gen
  std::string bias;
};

SweepAxis parse_axis(SweepVariable var, const std::string& spec) {
  SweepAxis axis;
  axis.variable = var;
  double vals[3];
  std::stringstream ss(spec);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ':')) {
    if (i >= 3 || !try_parse_value(part, vals[i]))
      throw CliError(kExitParse, "bad range '" + spec + "' (want start:stop:step)");
    ++i;
  }
  if (i != 3)
    throw CliError(kExitParse, "bad range '" + spec + "' (want start:stop:step)");
  axis.start = vals[0];
  axis.stop = vals[1];
  axis.step = vals[2];
  if (axis.step == 0 || (axis.stop - axis.start) / axis.step < 0)
    throw CliError(kExitParse, "bad range '" + spec + "': step sign/zero");
  return axis;
}

Overrides parse_overrides(const std::vector<std::string>& sets) {
  Overrides o;
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CliError(kExitParse, "override '" + kv + "' is not key=value");
    std::string key = kv.substr(0, eq);
    std::string val = kv.substr(eq + 1);
    if (key == "probe") {
      Probe p;
      auto comma = val.find(',');
      if (comma == std::string::npos) {
        p.p = to_upper(val);
      } else {
        p.p = to_upper(val.substr(0, comma));
        p.n = to_upper(val.substr(comma + 1));
      }
      o.probe = p;
    } else if (key == "ph" || key == "temp") {
      const auto var = key == "ph" ? SweepVariable::ph : SweepVariable::temp;
      if (val.find(':') != std::string::npos) {
        (key == "ph" ? o.ph_axis : o.temp_axis) = parse_axis(var, val);
      } else {
        double v;
        if (!try_parse_value(val, v))
          throw CliError(kExitParse, "bad value for " + key + ": '" + val + "'");
        (key == "ph" ? o.fixed_ph : o.fixed_temp) = v;
      }
    } else if (key == "bias") {
      o.bias = val;
    } else {
      double v;
      if (!try_parse_value(val, v))
        throw CliError(kExitParse, "bad value for " + key + ": '" + val + "'");
      if (key == "abstol") o.solver.abstol = v;
      else if (key == "reltol") o.solver.reltol = v;
      else if (key == "vntol") o.solver.vntol = v;
      else if (key == "max_iter") o.solver.max_iter = static_cast<int>(v);
      else if (key == "vstep_limit") o.solver.vstep_limit = v;
      else if (key == "source_steps") o.solver.source_steps = static_cast<int>(v);
      else o.numeric[key] = v;
    }
  }
  return o;
}

void reject_unknown_keys(const Overrides& o,
                         const std::vector<std::string>& allowed) {
  for (const auto& [k, v] : o.numeric) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw CliError(kExitParse, "unknown override key '" + k + "'");
  }
}

Circuit load_circuit(const std::string& path, const Overrides& o) {
  ParseResult pr = parse(slurp(path));
  if (!pr.ok()) {
    for (const auto& d : pr.diagnostics)
      std::cerr << path << ":" << d.line << ": " << d.message << "\n";
    throw CliError(kExitParse, "parse failed");
  }
  ElaborateResult er = elaborate(pr.netlist);
  if (!er.ok()) {
    for (const auto& d : er.diagnostics)
      std::cerr << path << ":" << d.line << ": " << d.message << "\n";
    throw CliError(kExitParse, "elaboration failed");
  }
  Circuit ckt = std::move(er.circuit);
  if (o.fixed_temp) ckt.temp_celsius = *o.fixed_temp;
  if (o.fixed_ph)
    for (auto& f : ckt.isfets) f.ph = *o.fixed_ph;
  return ckt;
}

Probe default_probe(const Circuit& ckt) {
  Probe p;
  if (!ckt.vcvses.empty() && ckt.vcvses.front().out_p != kGroundNode) {
    p.p = ckt.node_names[ckt.vcvses.front().out_p];
  } else if (!ckt.node_names.empty()) {
    p.p = ckt.node_names.front();
  }
  return p;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::cutoff: return "cutoff";
    case Region::triode: return "triode";
    case Region::saturation: return "saturation";
  }
  return "?";
}

int cmd_run(const std::string& path, const Overrides& o) {
  reject_unknown_keys(o, {});
  Circuit ckt = load_circuit(path, o);
  OperatingPoint op;
  try {
    op = newton_dc(ckt, o.solver);
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConverge;
  }
  std::printf("operating point (%s, %d iterations, max residual %.3e A)\n",
              strategy_name(op.strategy), op.iterations, op.max_kcl_residual);
  for (int i = 0; i < ckt.node_count(); ++i)
    std::printf("  v(%s) = %.6e\n", ckt.node_names[i].c_str(),
                op.node_voltages[i]);
  {
    int b = 0;
    for (const auto& v : ckt.vsources)
      std::printf("  i(%s) = %.6e\n", v.name.c_str(), op.branch_currents[b++]);
    for (const auto& e : ckt.vcvses)
      std::printf("  i(%s) = %.6e\n", e.name.c_str(), op.branch_currents[b++]);
  }
  for (const auto& [name, ev] : op.device_evals)
    std::printf("  %s: id=%.6e A gm=%.3e S gds=%.3e S region=%s\n",
                name.c_str(), ev.id, ev.gm, ev.gds, region_name(ev.region));
  const double t_k = celsius_to_kelvin(ckt.temp_celsius);
  for (const auto& f : ckt.isfets) {
    const double psi0 = surface_potential(f.ph, f.model, t_k);
    std::printf("  %s: psi0=%.6e V C_dl=%.3e F\n", f.name.c_str(), psi0,
                double_layer_capacitance(f.model, psi0, t_k, f.w * f.l));
  }
  return kExitOk;
}

std::vector<SweepAxis> resolve_axes(const Circuit& ckt, const Overrides& o) {
  std::vector<SweepAxis> axes;
  for (const auto& a : ckt.analyses) {
    if (a.is_op) continue;
    SweepAxis ax;
    ax.variable = a.variable;
    ax.source_name = a.source_name;
    ax.start = a.start;
    ax.stop = a.stop;
    ax.step = a.step;
    axes.push_back(ax);
  }
  auto replace_or_append = [&](const SweepAxis& ax) {
    for (auto& existing : axes)
      if (existing.variable == ax.variable) { existing = ax; return; }
    axes.push_back(ax);
  };
  if (o.ph_axis) replace_or_append(*o.ph_axis);
  if (o.temp_axis) replace_or_append(*o.temp_axis);
  return axes;
}

int cmd_sweep(const std::string& path, const std::string& out,
              const Overrides& o, int jobs) {
  reject_unknown_keys(o, {});
  Circuit ckt = load_circuit(path, o);
  SweepSpec spec;
  spec.axes = resolve_axes(ckt, o);
  if (spec.axes.empty())
    throw CliError(kExitParse, "no sweep axis: netlist has no .sweep/.dc and no override");
  spec.probe = o.probe ? *o.probe : default_probe(ckt);
  if (ckt.node_index(spec.probe.p) == -2 || ckt.node_index(spec.probe.n) == -2)
    throw CliError(kExitParse, "probe node '" + spec.probe.label() + "' not found");

  const auto t0 = std::chrono::steady_clock::now();
  SweepResult result = run_sweep(ckt, spec, o.solver, jobs);
  const auto dt = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  spill(out, write_csv(result));
  const int failed = result.failed_points();
  const int total = static_cast<int>(result.grid.size());
  std::cerr << "sweep: " << total << " points, " << failed << " failed, "
            << std::fixed << dt << " s\n";
  if (failed * 10 > total) {
    std::cerr << "error: more than 10% of sweep points failed to converge\n";
    return kExitNoConverge;
  }
  return kExitOk;
}

int cmd_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitIo, "cannot open '" + path + "'");
  SweepResult result;
  try {
    result = read_csv(in);
  } catch (const CsvError& e) {
    std::cerr << path << ": row " << e.row << ": " << e.what() << "\n";
    return kExitParse;
  }
  MetricsReport r;
  try {
    r = compute_metrics(result);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  std::printf("sensitivity per temperature slice:\n");
  for (const auto& s : r.sensitivity_per_temp)
    std::printf("  T=%g C: %.4f mV/pH (r2=%.6f)\n", s.temp_c,
                s.slope_v_per_ph * 1e3, s.r2);
  std::printf("temperature coefficient per pH slice:\n");
  for (const auto& t : r.tc_per_ph)
    std::printf("  pH=%g: %.4f ppm/C\n", t.ph, t.tc_ppm);
  std::printf("vo: min=%.6e mean=%.6e max=%.6e V\n", r.vo_min, r.vo_mean,
              r.vo_max);

  // headline sensitivity: the slice nearest 25 C
  const SensitivityEntry* head = nullptr;
  for (const auto& s : r.sensitivity_per_temp)
    if (!head || std::abs(s.temp_c - 25.0) < std::abs(head->temp_c - 25.0))
      head = &s;
  double tc_best = 0.0;
  if (!r.tc_per_ph.empty()) {
    tc_best = r.tc_per_ph.front().tc_ppm;
    for (const auto& t : r.tc_per_ph) tc_best = std::min(tc_best, t.tc_ppm);
  }

  std::printf("---\n");
  if (head) {
    std::printf("sensitivity_mv_per_ph=%.6g\n", head->slope_v_per_ph * 1e3);
    std::printf("sensitivity_r2=%.9g\n", head->r2);
    std::printf("sensitivity_temp_c=%g\n", head->temp_c);
  }
  std::printf("tc_per_ph_worst=%.6g\n", r.tc_per_ph_worst);
  std::printf("tc_per_ph_best=%.6g\n", tc_best);
  std::printf("tc_joint=%.6g\n", r.tc_joint);
  std::printf("vo_min=%.9g\n", r.vo_min);
  std::printf("vo_max=%.9g\n", r.vo_max);
  std::printf("vo_mean=%.9g\n", r.vo_mean);
  return kExitOk;
}

int cmd_plot(const std::string& path, const std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitIo, "cannot open '" + path + "'");
  SweepResult result;
  try {
    result = read_csv(in);
  } catch (const CsvError& e) {
    std::cerr << path << ": row " << e.row << ": " << e.what() << "\n";
    return kExitParse;
  }
  spill(out, render_vo_vs_ph_svg(result));
  return kExitOk;
}

double get_or(const Overrides& o, const std::string& key, double dflt) {
  auto it = o.numeric.find(key);
  return it == o.numeric.end() ? dflt : it->second;
}

ReadoutConfig readout_config_from(const Overrides& o) {
  ReadoutConfig cfg;
  auto mos = [&](MosfetModel& m) {
    m.vto = get_or(o, "vto", m.vto);
    m.kp = get_or(o, "kp", m.kp);
    m.lambda = get_or(o, "lambda", m.lambda);
    m.tcv = get_or(o, "tcv", m.tcv);
    m.mu_exp = get_or(o, "muexp", m.mu_exp);
    m.t_nom = get_or(o, "tnom", m.t_nom);
  };
  mos(cfg.nmos_model);
  mos(cfg.isfet_model.mos);
  cfg.isfet_model.mos.lambda = cfg.nmos_model.lambda;
  cfg.isfet_model.alpha = get_or(o, "alpha", cfg.isfet_model.alpha);
  cfg.isfet_model.ph_pzc = get_or(o, "phpzc", cfg.isfet_model.ph_pzc);
  cfg.isfet_model.e_ref = get_or(o, "eref", cfg.isfet_model.e_ref);
  cfg.isfet_model.de_ref_dt = get_or(o, "ereftc", cfg.isfet_model.de_ref_dt);
  cfg.isfet_model.chi_sol = get_or(o, "chisol", cfg.isfet_model.chi_sol);
  cfg.isfet_model.dphi_lj = get_or(o, "dphilj", cfg.isfet_model.dphi_lj);
  cfg.isfet_model.e0 = get_or(o, "e0", cfg.isfet_model.e0);
  cfg.isfet_model.c_helm = get_or(o, "chelm", cfg.isfet_model.c_helm);
  cfg.isfet_model.c_gouy_n0 = get_or(o, "n0", cfg.isfet_model.c_gouy_n0);
  cfg.w = get_or(o, "w", cfg.w);
  cfg.l = get_or(o, "l", cfg.l);
  cfg.i_bias = get_or(o, "ibias", cfg.i_bias);
  cfg.opamp_gain = get_or(o, "gain", cfg.opamp_gain);
  cfg.v_ref_electrode = get_or(o, "vref", cfg.v_ref_electrode);
  cfg.supplies = get_or(o, "supplies", cfg.supplies);
  cfg.ph = o.fixed_ph.value_or(get_or(o, "ph", cfg.ph));
  cfg.swap_branches = get_or(o, "swap", 0.0) != 0.0;
  cfg.widlar.r_ref = get_or(o, "rref", cfg.widlar.r_ref);
  cfg.widlar.r_emitter_deg = get_or(o, "rdeg", cfg.widlar.r_emitter_deg);
  cfg.widlar.mirror_ratio_wl = get_or(o, "ratio", cfg.widlar.mirror_ratio_wl);
  if (o.bias == "widlar") cfg.bias_mode = BiasMode::widlar;
  else if (!o.bias.empty() && o.bias != "ideal")
    throw CliError(kExitParse, "bias must be ideal or widlar");
  return cfg;
}

int cmd_gen(const std::string& name, const std::string& out,
            const Overrides& o) {
  static const std::vector<std::string> kReadoutKeys = {
      "vto", "kp", "lambda", "tcv", "muexp", "tnom", "alpha", "phpzc",
      "eref", "ereftc", "chisol", "dphilj", "e0", "chelm", "n0", "w", "l",
      "ibias", "gain", "vref", "supplies", "ph", "swap", "rref", "rdeg",
      "ratio", "target", "supply"};
  Netlist nl;
  if (name == "readout") {
    reject_unknown_keys(o, kReadoutKeys);
    nl = build_readout(readout_config_from(o));
  } else if (name == "widlar") {
    reject_unknown_keys(o, kReadoutKeys);
    WidlarConfig cfg;
    cfg.mirror_model.vto = get_or(o, "vto", cfg.mirror_model.vto);
    cfg.mirror_model.kp = get_or(o, "kp", cfg.mirror_model.kp);
    cfg.mirror_model.lambda = get_or(o, "lambda", cfg.mirror_model.lambda);
    cfg.r_ref = get_or(o, "rref", cfg.r_ref);
    cfg.r_emitter_deg = get_or(o, "rdeg", cfg.r_emitter_deg);
    cfg.supply = get_or(o, "supply", cfg.supply);
    cfg.mirror_ratio_wl = get_or(o, "ratio", cfg.mirror_ratio_wl);
    cfg.target_current = get_or(o, "target", cfg.target_current);
    nl = build_widlar(cfg);
  } else if (name == "divider") {
    nl = build_fixture(FixtureKind::divider);
  } else if (name == "diode_connected") {
    nl = build_fixture(FixtureKind::diode_connected);
  } else if (name == "single_isfet") {
    nl = build_fixture(FixtureKind::single_isfet);
  } else {
    std::cerr << "unknown circuit '" << name
              << "'; valid: readout widlar divider diode_connected single_isfet\n";
    return kExitParse;
  }
  spill(out, print(nl));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isim: ISFET readout DC simulator"};
  app.require_subcommand(1);

  std::string input, output;
  std::vector<std::string> sets;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input)
      sub->add_option("input", input, "input file")->required();
    sub->add_option("-o,--output", output, "output file (default stdout)");
    sub->add_option("--set", sets, "override key=value");
  };

  auto* run = app.add_subcommand("run", "solve the DC operating point");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "run parametric sweeps to CSV");
  add_common(sweep, true);
  sweep->add_option("--jobs", jobs, "solver threads");
  auto* metrics = app.add_subcommand("metrics", "metrics from a sweep CSV");
  add_common(metrics, true);
  auto* plot = app.add_subcommand("plot", "render a sweep CSV as SVG");
  add_common(plot, true);
  auto* gen = app.add_subcommand("gen", "emit a generated netlist");
  std::string circuit_name, bias_flag;
  gen->add_option("circuit", circuit_name, "readout|widlar|divider|diode_connected|single_isfet")
      ->required();
  gen->add_option("--bias", bias_flag, "ideal|widlar (readout only)");
  add_common(gen, false);

  CLI11_PARSE(app, argc, argv);

  try {
    Overrides o = parse_overrides(sets);
    if (!bias_flag.empty()) o.bias = bias_flag;
    if (run->parsed()) return cmd_run(input, o);
    if (sweep->parsed()) return cmd_sweep(input, output, o, jobs);
    if (metrics->parsed()) return cmd_metrics(input);
    if (plot->parsed()) return cmd_plot(input, output);
    if (gen->parsed()) return cmd_gen(circuit_name, output, o);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConverge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
