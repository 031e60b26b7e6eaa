#include "isim/solver.hpp"

#include <cmath>

namespace isim {

double OperatingPoint::voltage(const Circuit& circuit,
                               const std::string& label) const {
  int idx = circuit.node_index(label);
  if (idx == kGroundNode) return 0.0;
  if (idx < 0 || idx >= static_cast<int>(node_voltages.size()))
    throw SolverError("unknown node '" + label + "'");
  return node_voltages[idx];
}

const char* strategy_name(SolveStrategy s) {
  switch (s) {
    case SolveStrategy::direct: return "direct";
    case SolveStrategy::gmin: return "gmin";
    case SolveStrategy::source_step: return "source_step";
  }
  return "?";
}

namespace {

double node_v(const std::vector<double>& x, int idx) {
  return idx == kGroundNode ? 0.0 : x[idx];
}

// Square-law devices are symmetric; swap terminals when vds goes negative
// during iteration so the model stays in its vds >= 0 domain.
template <typename Eval>
void stamp_channel(Matrix& jac, std::vector<double>& f,
                   const std::vector<double>& x, int d, int g, int s,
                   Eval&& eval) {
  const double vd = node_v(x, d), vs = node_v(x, s);
  const bool swapped = vd < vs;
  const int dd = swapped ? s : d;
  const int ss = swapped ? d : s;
  const DeviceEval e = eval(dd, ss);
  auto add = [&](int row, int col, double v) {
    if (row != kGroundNode && col != kGroundNode) jac(row, col) += v;
  };
  if (dd != kGroundNode) f[dd] += e.id;
  if (ss != kGroundNode) f[ss] -= e.id;
  add(dd, dd, e.gds);
  add(dd, g, e.gm);
  add(dd, ss, -e.gm - e.gds);
  add(ss, dd, -e.gds);
  add(ss, g, -e.gm);
  add(ss, ss, e.gm + e.gds);
}

}  // namespace

void stamp(const Circuit& circuit, const std::vector<double>& x, double gmin,
           double src_scale, Matrix& jac, std::vector<double>& f) {
  const int n = circuit.unknown_count();
  jac = Matrix(n);
  f.assign(n, 0.0);
  const double t_k = celsius_to_kelvin(circuit.temp_celsius);

  for (const auto& r : circuit.resistors) {
    const double g = 1.0 / r.resistance;
    const double i = g * (node_v(x, r.a) - node_v(x, r.b));
    if (r.a != kGroundNode) {
      f[r.a] += i;
      jac(r.a, r.a) += g;
      if (r.b != kGroundNode) jac(r.a, r.b) -= g;
    }
    if (r.b != kGroundNode) {
      f[r.b] -= i;
      jac(r.b, r.b) += g;
      if (r.a != kGroundNode) jac(r.b, r.a) -= g;
    }
  }

  for (const auto& is : circuit.isources) {
    const double i = is.value * src_scale;
    if (is.p != kGroundNode) f[is.p] += i;
    if (is.n != kGroundNode) f[is.n] -= i;
  }

  for (const auto& vs : circuit.vsources) {
    const int b = vs.branch;
    const double ib = x[b];
    if (vs.p != kGroundNode) { f[vs.p] += ib; jac(vs.p, b) += 1.0; }
    if (vs.n != kGroundNode) { f[vs.n] -= ib; jac(vs.n, b) -= 1.0; }
    f[b] = node_v(x, vs.p) - node_v(x, vs.n) - vs.value * src_scale;
    if (vs.p != kGroundNode) jac(b, vs.p) += 1.0;
    if (vs.n != kGroundNode) jac(b, vs.n) -= 1.0;
  }

  for (const auto& e : circuit.vcvses) {
    const int b = e.branch;
    const double ib = x[b];
    if (e.out_p != kGroundNode) { f[e.out_p] += ib; jac(e.out_p, b) += 1.0; }
    if (e.out_n != kGroundNode) { f[e.out_n] -= ib; jac(e.out_n, b) -= 1.0; }
    f[b] = node_v(x, e.out_p) - node_v(x, e.out_n) -
           e.gain * (node_v(x, e.in_p) - node_v(x, e.in_n));
    if (e.out_p != kGroundNode) jac(b, e.out_p) += 1.0;
    if (e.out_n != kGroundNode) jac(b, e.out_n) -= 1.0;
    if (e.in_p != kGroundNode) jac(b, e.in_p) -= e.gain;
    if (e.in_n != kGroundNode) jac(b, e.in_n) += e.gain;
  }

  for (const auto& m : circuit.mosfets) {
    stamp_channel(jac, f, x, m.d, m.g, m.s, [&](int dd, int ss) {
      return eval_mosfet(m.model, m.w, m.l,
                         node_v(x, m.g) - node_v(x, ss),
                         node_v(x, dd) - node_v(x, ss), t_k);
    });
  }
  for (const auto& fi : circuit.isfets) {
    stamp_channel(jac, f, x, fi.d, fi.ref, fi.s, [&](int dd, int ss) {
      return eval_isfet(fi.model, fi.w, fi.l,
                        node_v(x, fi.ref) - node_v(x, ss),
                        node_v(x, dd) - node_v(x, ss), fi.ph, t_k);
    });
  }

  if (gmin > 0.0) {
    for (int i = 0; i < circuit.node_count(); ++i) {
      f[i] += gmin * x[i];
      jac(i, i) += gmin;
    }
  }
}

namespace {

double max_node_residual(const Circuit& circuit, const std::vector<double>& x,
                         double gmin, double src_scale) {
  Matrix jac(0);
  std::vector<double> f;
  stamp(circuit, x, gmin, src_scale, jac, f);
  double worst = 0.0;
  for (int i = 0; i < circuit.node_count(); ++i)
    worst = std::max(worst, std::abs(f[i]));
  return worst;
}

struct Attempt {
  bool converged = false;
  bool singular = false;
  int iterations = 0;
  int singular_row = -1;
};

Attempt newton_attempt(const Circuit& circuit, const SolverConfig& cfg,
                       double gmin, double src_scale, std::vector<double>& x) {
  Attempt result;
  Matrix jac(0);
  std::vector<double> f;
  const int nodes = circuit.node_count();
  for (int it = 0; it < cfg.max_iter; ++it) {
    stamp(circuit, x, gmin, src_scale, jac, f);
    std::vector<double> rhs(f.size());
    for (size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
    std::vector<double> dx;
    try {
      dx = lu_solve(jac, std::move(rhs));
    } catch (const SingularMatrixError& e) {
      result.singular = true;
      result.singular_row = e.row;
      result.iterations = it;
      return result;
    }
    bool small = true;
    for (size_t i = 0; i < dx.size(); ++i) {
      if (dx[i] > cfg.vstep_limit) dx[i] = cfg.vstep_limit;
      if (dx[i] < -cfg.vstep_limit) dx[i] = -cfg.vstep_limit;
      x[i] += dx[i];
      const double atol = (static_cast<int>(i) < nodes) ? cfg.vntol : cfg.abstol;
      if (std::abs(dx[i]) > cfg.reltol * std::abs(x[i]) + atol) small = false;
    }
    result.iterations = it + 1;
    if (small && max_node_residual(circuit, x, gmin, src_scale) <= cfg.abstol) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

OperatingPoint finish(const Circuit& circuit, const SolverConfig& cfg,
                      std::vector<double> x, SolveStrategy strategy,
                      int iterations) {
  OperatingPoint op;
  op.strategy = strategy;
  op.iterations = iterations;
  op.node_voltages.assign(x.begin(), x.begin() + circuit.node_count());
  op.branch_currents.assign(x.begin() + circuit.node_count(), x.end());
  const double t_k = celsius_to_kelvin(circuit.temp_celsius);
  auto vv = [&](int idx) { return idx == kGroundNode ? 0.0 : x[idx]; };
  for (const auto& m : circuit.mosfets) {
    const bool swapped = vv(m.d) < vv(m.s);
    const int dd = swapped ? m.s : m.d, ss = swapped ? m.d : m.s;
    op.device_evals.emplace_back(
        m.name, eval_mosfet(m.model, m.w, m.l, vv(m.g) - vv(ss),
                            vv(dd) - vv(ss), t_k));
  }
  for (const auto& fi : circuit.isfets) {
    const bool swapped = vv(fi.d) < vv(fi.s);
    const int dd = swapped ? fi.s : fi.d, ss = swapped ? fi.d : fi.s;
    op.device_evals.emplace_back(
        fi.name, eval_isfet(fi.model, fi.w, fi.l, vv(fi.ref) - vv(ss),
                            vv(dd) - vv(ss), fi.ph, t_k));
  }
  op.max_kcl_residual = max_node_residual(circuit, x, 0.0, 1.0);
  return op;
}

std::string worst_residual_node(const Circuit& circuit,
                                const std::vector<double>& x) {
  Matrix jac(0);
  std::vector<double> f;
  stamp(circuit, x, 0.0, 1.0, jac, f);
  int worst = 0;
  for (int i = 1; i < circuit.node_count(); ++i)
    if (std::abs(f[i]) > std::abs(f[worst])) worst = i;
  if (circuit.node_count() == 0) return "(none)";
  return circuit.node_names[worst];
}

}  // namespace

OperatingPoint newton_dc(const Circuit& circuit, const SolverConfig& config,
                         const std::optional<std::vector<double>>& initial_guess) {
  const int n = circuit.unknown_count();
  if (n == 0) throw SolverError("empty circuit");
  std::vector<double> x0(n, 0.0);
  if (initial_guess) {
    if (static_cast<int>(initial_guess->size()) != n)
      throw SolverError("initial guess has wrong dimension");
    x0 = *initial_guess;
  }

  // direct
  {
    std::vector<double> x = x0;
    Attempt a = newton_attempt(circuit, config, 0.0, 1.0, x);
    if (a.converged)
      return finish(circuit, config, std::move(x), SolveStrategy::direct,
                    a.iterations);
  }

  // gmin stepping down the ladder, warm-started level to level
  {
    std::vector<double> x = x0;
    bool ladder_ok = true;
    int iters = 0;
    for (double g : config.gmin_ladder) {
      Attempt a = newton_attempt(circuit, config, g, 1.0, x);
      iters += a.iterations;
      if (!a.converged) { ladder_ok = false; break; }
    }
    if (ladder_ok) {
      Attempt a = newton_attempt(circuit, config, 0.0, 1.0, x);
      iters += a.iterations;
      if (a.converged)
        return finish(circuit, config, std::move(x), SolveStrategy::gmin, iters);
    }
  }

  // source stepping (with a residual gmin so the ramp start is solvable)
  {
    std::vector<double> x(n, 0.0);
    bool ramp_ok = true;
    int iters = 0;
    for (int k = 1; k <= config.source_steps; ++k) {
      const double scale = static_cast<double>(k) / config.source_steps;
      Attempt a = newton_attempt(circuit, config, 1e-12, scale, x);
      iters += a.iterations;
      if (!a.converged) { ramp_ok = false; break; }
    }
    if (ramp_ok) {
      Attempt a = newton_attempt(circuit, config, 0.0, 1.0, x);
      iters += a.iterations;
      if (a.converged)
        return finish(circuit, config, std::move(x), SolveStrategy::source_step,
                      iters);
      if (a.singular && a.singular_row < circuit.node_count())
        throw SolverError("singular system: node '" +
                          circuit.node_names[a.singular_row] +
                          "' has no DC path (floating node?)");
    }
    throw SolverError("no convergence after all strategies; worst residual at node '" +
                      worst_residual_node(circuit, x) + "'");
  }
}

}  // namespace isim
