#pragma once

// Test-only solver oracle: exhaustive 1 mV-lattice search minimizing the
// max KCL residual. Sums device currents directly and shares nothing with
// stamp()/newton_dc(). Handles circuits with <= 2 free node voltages, no
// VCVS, and only ground-referenced voltage sources.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "isim/circuit.hpp"

namespace isim::testing {

inline double oracle_residual(const Circuit& ckt, const std::vector<double>& v,
                              const std::vector<bool>& pinned) {
  std::vector<double> f(ckt.node_count(), 0.0);
  auto at = [&](int idx) { return idx == kGroundNode ? 0.0 : v[idx]; };
  auto add = [&](int idx, double i) {
    if (idx != kGroundNode) f[idx] += i;
  };
  for (const auto& r : ckt.resistors) {
    const double i = (at(r.a) - at(r.b)) / r.resistance;
    add(r.a, i);
    add(r.b, -i);
  }
  for (const auto& is : ckt.isources) {
    add(is.p, is.value);
    add(is.n, -is.value);
  }
  const double t_k = celsius_to_kelvin(ckt.temp_celsius);
  for (const auto& m : ckt.mosfets) {
    int d = m.d, s = m.s;
    if (at(d) < at(s)) std::swap(d, s);
    const double id =
        eval_mosfet(m.model, m.w, m.l, at(m.g) - at(s), at(d) - at(s), t_k).id;
    add(d, id);
    add(s, -id);
  }
  for (const auto& fi : ckt.isfets) {
    int d = fi.d, s = fi.s;
    if (at(d) < at(s)) std::swap(d, s);
    const double id = eval_isfet(fi.model, fi.w, fi.l, at(fi.ref) - at(s),
                                 at(d) - at(s), fi.ph, t_k)
                          .id;
    add(d, id);
    add(s, -id);
  }
  double worst = 0.0;
  for (int i = 0; i < ckt.node_count(); ++i)
    if (!pinned[i]) worst = std::max(worst, std::abs(f[i]));
  return worst;
}

inline std::vector<double> brute_force_solution(const Circuit& ckt, double lo,
                                                double hi) {
  if (!ckt.vcvses.empty())
    throw std::invalid_argument("oracle: VCVS not supported");
  std::vector<double> v(ckt.node_count(), 0.0);
  std::vector<bool> pinned(ckt.node_count(), false);
  for (const auto& vs : ckt.vsources) {
    if (vs.p != kGroundNode && vs.n != kGroundNode)
      throw std::invalid_argument("oracle: vsource must be ground-referenced");
    if (vs.n == kGroundNode) {
      v[vs.p] = vs.value;
      pinned[vs.p] = true;
    } else {
      v[vs.n] = -vs.value;
      pinned[vs.n] = true;
    }
  }
  std::vector<int> free_nodes;
  for (int i = 0; i < ckt.node_count(); ++i)
    if (!pinned[i]) free_nodes.push_back(i);
  if (free_nodes.size() > 2)
    throw std::invalid_argument("oracle: more than 2 free nodes");

  const double step = 1e-3;
  const int points = static_cast<int>(std::lround((hi - lo) / step)) + 1;
  std::vector<double> best = v;
  double best_res = oracle_residual(ckt, v, pinned);
  if (free_nodes.size() == 1) {
    for (int i = 0; i < points; ++i) {
      v[free_nodes[0]] = lo + i * step;
      const double r = oracle_residual(ckt, v, pinned);
      if (r < best_res) { best_res = r; best = v; }
    }
  } else if (free_nodes.size() == 2) {
    for (int i = 0; i < points; ++i) {
      v[free_nodes[0]] = lo + i * step;
      for (int j = 0; j < points; ++j) {
        v[free_nodes[1]] = lo + j * step;
        const double r = oracle_residual(ckt, v, pinned);
        if (r < best_res) { best_res = r; best = v; }
      }
    }
  }
  return best;
}

}  // namespace isim::testing
