#include "isim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <thread>

namespace isim {

int SweepAxis::points() const {
  if (step == 0.0) return 1;
  return static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
}

std::string Probe::label() const { return n == "0" ? p : p + "-" + n; }

int SweepResult::failed_points() const {
  int n = 0;
  for (const auto& p : grid) n += p.converged ? 0 : 1;
  return n;
}

namespace {

void apply_axis(Circuit& ckt, const SweepAxis& axis, double value) {
  switch (axis.variable) {
    case SweepVariable::ph:
      for (auto& f : ckt.isfets) f.ph = value;
      break;
    case SweepVariable::temp:
      ckt.temp_celsius = value;
      break;
    case SweepVariable::source: {
      bool found = false;
      for (auto& v : ckt.vsources)
        if (v.name == axis.source_name) { v.value = value; found = true; }
      for (auto& i : ckt.isources)
        if (i.name == axis.source_name) { i.value = value; found = true; }
      if (!found)
        throw SolverError("sweep source '" + axis.source_name + "' not found");
      break;
    }
  }
}

double default_ph(const Circuit& ckt) {
  return ckt.isfets.empty() ? 7.0 : ckt.isfets.front().ph;
}

}  // namespace

SweepResult run_sweep(const Circuit& circuit, const SweepSpec& spec,
                      const SolverConfig& config, int jobs) {
  if (circuit.node_index(spec.probe.p) == -2)
    throw SolverError("probe node '" + spec.probe.p + "' not found");
  if (circuit.node_index(spec.probe.n) == -2)
    throw SolverError("probe node '" + spec.probe.n + "' not found");

  SweepResult result;
  result.spec = spec;
  std::vector<int> counts;
  long total = 1;
  for (const auto& a : spec.axes) {
    counts.push_back(a.points());
    total *= counts.back();
  }
  if (spec.axes.empty()) total = 1;
  result.grid.resize(total);

  const int inner = spec.axes.empty() ? 1 : counts.back();
  const long outer_total = total / inner;

  auto solve_row = [&](long outer) {
    // decode the outer multi-index
    Circuit base = circuit;
    long rem = outer;
    for (int ax = static_cast<int>(spec.axes.size()) - 2; ax >= 0; --ax) {
      int idx = static_cast<int>(rem % counts[ax]);
      rem /= counts[ax];
      apply_axis(base, spec.axes[ax], spec.axes[ax].at(idx));
    }
    std::optional<std::vector<double>> guess;
    for (int i = 0; i < inner; ++i) {
      Circuit point = base;
      if (!spec.axes.empty())
        apply_axis(point, spec.axes.back(), spec.axes.back().at(i));
      SweepPoint& out = result.grid[outer * inner + i];
      out.ph = default_ph(point);
      out.temp_c = point.temp_celsius;
      try {
        OperatingPoint op = newton_dc(point, config, guess);
        out.vo = op.voltage(point, spec.probe.p) - op.voltage(point, spec.probe.n);
        out.converged = true;
        out.iterations = op.iterations;
        std::vector<double> warm = op.node_voltages;
        warm.insert(warm.end(), op.branch_currents.begin(),
                    op.branch_currents.end());
        guess = std::move(warm);
      } catch (const SolverError&) {
        out.vo = std::nan("");
        out.converged = false;
        guess.reset();  // cold-start the next point
      }
    }
  };

  if (jobs <= 1 || outer_total <= 1) {
    for (long o = 0; o < outer_total; ++o) solve_row(o);
  } else {
    const int nthreads = static_cast<int>(
        std::min<long>(jobs, outer_total));
    std::vector<std::thread> workers;
    for (int w = 0; w < nthreads; ++w) {
      workers.emplace_back([&, w] {
        for (long o = w; o < outer_total; o += nthreads) solve_row(o);
      });
    }
    for (auto& t : workers) t.join();
  }
  return result;
}

LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 points");
  const size_t n = xs.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate xs");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;
  } else {
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
      double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss_res += e * e;
    }
    fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

namespace {

constexpr double kSliceTol = 1e-6;

struct Slice {
  std::vector<double> xs, ys;
};

Slice ph_slice_at_temp(const SweepResult& r, double at_temp_c) {
  Slice s;
  for (const auto& p : r.grid) {
    if (!p.converged) continue;
    if (std::abs(p.temp_c - at_temp_c) <= kSliceTol) {
      s.xs.push_back(p.ph);
      s.ys.push_back(p.vo);
    }
  }
  return s;
}

Slice temp_slice_at_ph(const SweepResult& r, double at_ph) {
  Slice s;
  for (const auto& p : r.grid) {
    if (!p.converged) continue;
    if (std::abs(p.ph - at_ph) <= kSliceTol) {
      s.xs.push_back(p.temp_c);
      s.ys.push_back(p.vo);
    }
  }
  return s;
}

double tc_from_slice(const std::vector<double>& temps,
                     const std::vector<double>& vos) {
  const auto [vmin_it, vmax_it] = std::minmax_element(vos.begin(), vos.end());
  const auto [tmin_it, tmax_it] = std::minmax_element(temps.begin(), temps.end());
  double mean = 0;
  for (double v : vos) mean += v;
  mean /= vos.size();
  if (std::abs(mean) < 1e-15)
    throw std::runtime_error("temperature coefficient undefined: vo_mean = 0");
  const double dt = *tmax_it - *tmin_it;
  if (dt == 0.0) return 0.0;
  return (*vmax_it - *vmin_it) / (std::abs(mean) * dt) * 1e6;
}

std::vector<double> unique_values(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || std::abs(x - out.back()) > kSliceTol) out.push_back(x);
  return out;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

double sensitivity(const SweepResult& result, double at_temp_c) {
  Slice s = ph_slice_at_temp(result, at_temp_c);
  if (s.xs.size() < 2)
    throw std::runtime_error("sensitivity: no pH axis at that temperature");
  return std::abs(linear_fit(s.xs, s.ys).slope);
}

double temperature_coefficient(const SweepResult& result, double at_ph) {
  Slice s = temp_slice_at_ph(result, at_ph);
  if (s.xs.size() < 2)
    throw std::runtime_error("temperature_coefficient: no temperature axis at that pH");
  return tc_from_slice(s.xs, s.ys);
}

double closed_form_vo_general(const MosfetModel& nmos, const IsfetModel& isfet,
                              double i_bias, double w_isfet, double l_isfet,
                              double w_nmos, double l_nmos, double ph,
                              double t_kelvin) {
  if (i_bias <= 0.0)
    throw std::invalid_argument("closed_form_vo: bias current must be > 0 (cutoff)");
  const double beta_n = mosfet_kp_at(nmos, t_kelvin) * (w_nmos / l_nmos);
  const double beta_i = mosfet_kp_at(isfet.mos, t_kelvin) * (w_isfet / l_isfet);
  return std::sqrt(2.0 * i_bias / beta_n) + mosfet_vth_at(nmos, t_kelvin) -
         std::sqrt(2.0 * i_bias / beta_i) - isfet_vth_at(isfet, ph, t_kelvin);
}

double closed_form_vo(const MosfetModel& nmos, const IsfetModel& isfet,
                      double i_bias, double w, double l, double ph,
                      double t_kelvin) {
  return closed_form_vo_general(nmos, isfet, i_bias, w, l, w, l, ph, t_kelvin);
}

std::string write_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "ph,temp_c," << result.spec.probe.label() << ",converged,iterations\n";
  for (const auto& p : result.grid) {
    out << fmt9(p.ph) << "," << fmt9(p.temp_c) << "," << fmt9(p.vo) << ","
        << (p.converged ? 1 : 0) << "," << p.iterations << "\n";
  }
  return out.str();
}

SweepResult read_csv(std::istream& in) {
  SweepResult result;
  std::string line;
  int row = 0;
  if (!std::getline(in, line)) throw CsvError(1, "empty CSV");
  ++row;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.size() != 5 || header[0] != "ph" || header[1] != "temp_c" ||
      header[3] != "converged" || header[4] != "iterations")
    throw CsvError(1, "bad header: expected ph,temp_c,<probe>,converged,iterations");
  result.spec.probe.p = header[2];
  result.spec.probe.n = "0";
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw CsvError(row, "expected 5 fields");
    SweepPoint p;
    char* end = nullptr;
    auto num = [&](const std::string& s, const char* what) {
      double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0')
        throw CsvError(row, std::string("malformed ") + what + " '" + s + "'");
      return v;
    };
    p.ph = num(fields[0], "ph");
    p.temp_c = num(fields[1], "temp_c");
    p.vo = num(fields[2], "voltage");
    p.converged = num(fields[3], "converged") != 0.0;
    p.iterations = static_cast<int>(num(fields[4], "iterations"));
    result.grid.push_back(p);
  }
  return result;
}

MetricsReport compute_metrics(const SweepResult& result) {
  MetricsReport report;
  report.probe_name = result.spec.probe.label();
  std::vector<double> temps, phs, vos;
  for (const auto& p : result.grid) {
    if (!p.converged) continue;
    temps.push_back(p.temp_c);
    phs.push_back(p.ph);
    vos.push_back(p.vo);
  }
  if (vos.empty()) throw std::runtime_error("metrics: no converged points");

  for (double t : unique_values(temps)) {
    Slice s = ph_slice_at_temp(result, t);
    if (unique_values(s.xs).size() < 2) continue;
    LinearFit fit = linear_fit(s.xs, s.ys);
    report.sensitivity_per_temp.push_back({t, std::abs(fit.slope), fit.r2});
  }
  for (double ph : unique_values(phs)) {
    Slice s = temp_slice_at_ph(result, ph);
    if (unique_values(s.xs).size() < 2) continue;
    report.tc_per_ph.push_back({ph, tc_from_slice(s.xs, s.ys)});
  }
  for (const auto& e : report.tc_per_ph)
    report.tc_per_ph_worst = std::max(report.tc_per_ph_worst, e.tc_ppm);

  report.vo_min = *std::min_element(vos.begin(), vos.end());
  report.vo_max = *std::max_element(vos.begin(), vos.end());
  double mean = 0;
  for (double v : vos) mean += v;
  report.vo_mean = mean / vos.size();
  const auto [tmin, tmax] = std::minmax_element(temps.begin(), temps.end());
  if (*tmax == *tmin || report.vo_max == report.vo_min) {
    report.tc_joint = 0.0;
  } else if (std::abs(report.vo_mean) < 1e-15) {
    throw std::runtime_error("tc_joint undefined: vo_mean = 0");
  } else {
    report.tc_joint = (report.vo_max - report.vo_min) /
                      (std::abs(report.vo_mean) * (*tmax - *tmin)) * 1e6;
  }
  return report;
}

}  // namespace isim
