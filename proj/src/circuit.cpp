#include "isim/circuit.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace isim {

int Circuit::node_index(const std::string& label) const {
  std::string u = to_upper(label);
  if (u == "0") return kGroundNode;
  auto it = std::find(node_names.begin(), node_names.end(), u);
  if (it == node_names.end()) return -2;
  return static_cast<int>(it - node_names.begin());
}

namespace {

struct ModelEntry {
  bool is_isfet = false;
  MosfetModel mos;
  IsfetModel isfet;
};

bool apply_mos_key(MosfetModel& m, const std::string& key, double v) {
  if (key == "VTO") m.vto = v;
  else if (key == "KP") m.kp = v;
  else if (key == "LAMBDA") m.lambda = v;
  else if (key == "TCV") m.tcv = v;
  else if (key == "MUEXP") m.mu_exp = v;
  else if (key == "TNOM") m.t_nom = v;
  else return false;
  return true;
}

bool apply_isfet_key(IsfetModel& m, const std::string& key, double v) {
  if (apply_mos_key(m.mos, key, v)) return true;
  if (key == "ALPHA") m.alpha = v;
  else if (key == "PHPZC") m.ph_pzc = v;
  else if (key == "EREF") m.e_ref = v;
  else if (key == "EREFTC") m.de_ref_dt = v;
  else if (key == "CHISOL") m.chi_sol = v;
  else if (key == "DPHILJ") m.dphi_lj = v;
  else if (key == "E0") m.e0 = v;
  else if (key == "CHELM") m.c_helm = v;
  else if (key == "N0") m.c_gouy_n0 = v;
  else return false;
  return true;
}

class Elaborator {
 public:
  explicit Elaborator(const Netlist& nl) : nl_(nl) {}

  ElaborateResult run() {
    collect_models();
    for (const auto& c : nl_.cards) bind_card(c);
    check_connectivity();
    normalize_analyses();
    result_.circuit.title = nl_.title;
    return std::move(result_);
  }

 private:
  void error(int line, std::string msg) {
    result_.diagnostics.push_back({line, std::move(msg)});
  }

  int node(const std::string& label) {
    if (label == "0") return kGroundNode;
    auto& names = result_.circuit.node_names;
    auto it = std::find(names.begin(), names.end(), label);
    if (it != names.end()) return static_cast<int>(it - names.begin());
    names.push_back(label);
    return static_cast<int>(names.size()) - 1;
  }

  void collect_models() {
    for (const auto& c : nl_.cards) {
      if (c.kind != CardKind::model) continue;
      ModelEntry entry;
      entry.is_isfet = (c.model_type == "ISFET");
      // defaults live in the model structs; cards override field by field
      entry.isfet.mos.lambda = 0.0;
      entry.mos.lambda = 0.0;
      bool bad = false;
      for (const auto& [key, v] : c.params) {
        bool ok = entry.is_isfet ? apply_isfet_key(entry.isfet, key, v)
                                 : apply_mos_key(entry.mos, key, v);
        if (!ok) {
          error(c.line, ".model " + c.name + ": unknown key " + key);
          bad = true;
        }
      }
      if (entry.is_isfet) entry.mos = entry.isfet.mos;
      if (entry.mos.kp <= 0) {
        error(c.line, ".model " + c.name + ": KP must be > 0");
        bad = true;
      }
      if (entry.mos.t_nom <= 0) {
        error(c.line, ".model " + c.name + ": TNOM must be > 0");
        bad = true;
      }
      if (entry.is_isfet) {
        if (entry.isfet.alpha < 0 || entry.isfet.alpha > 1) {
          error(c.line, ".model " + c.name + ": ALPHA must be in [0,1]");
          bad = true;
        }
        if (entry.isfet.ph_pzc < 0 || entry.isfet.ph_pzc > 14) {
          error(c.line, ".model " + c.name + ": PHPZC must be in [0,14]");
          bad = true;
        }
      }
      if (!bad) models_[c.name] = entry;
    }
  }

  const ModelEntry* resolve_model(const Card& c, bool want_isfet) {
    auto it = models_.find(c.model_ref);
    if (it == models_.end()) {
      error(c.line, c.name + ": model '" + c.model_ref + "' not found");
      return nullptr;
    }
    if (it->second.is_isfet != want_isfet) {
      error(c.line, c.name + ": model '" + c.model_ref + "' has wrong type");
      return nullptr;
    }
    return &it->second;
  }

  void bind_card(const Card& c) {
    Circuit& ckt = result_.circuit;
    switch (c.kind) {
      case CardKind::resistor: {
        ResistorInst r{c.name, node(c.nodes[0]), node(c.nodes[1]), c.value};
        if (c.value <= 0) {
          error(c.line, c.name + ": resistance must be > 0");
          return;
        }
        ckt.resistors.push_back(r);
        break;
      }
      case CardKind::vsource: {
        VsourceInst v{c.name, node(c.nodes[0]), node(c.nodes[1]), c.value, 0};
        ckt.vsources.push_back(v);
        break;
      }
      case CardKind::isource: {
        IsourceInst i{c.name, node(c.nodes[0]), node(c.nodes[1]), c.value};
        ckt.isources.push_back(i);
        break;
      }
      case CardKind::vcvs: {
        VcvsInst e{c.name, node(c.nodes[0]), node(c.nodes[1]),
                   node(c.nodes[2]), node(c.nodes[3]), c.value, 0};
        ckt.vcvses.push_back(e);
        break;
      }
      case CardKind::mosfet: {
        const ModelEntry* m = resolve_model(c, false);
        if (!m) return;
        MosfetInst inst;
        inst.name = c.name;
        inst.d = node(c.nodes[0]);
        inst.g = node(c.nodes[1]);
        inst.s = node(c.nodes[2]);
        node(c.nodes[3]);  // bulk parsed, ignored (no body effect)
        inst.w = c.params.at("W");
        inst.l = c.params.at("L");
        inst.model = m->mos;
        if (inst.w <= 0 || inst.l <= 0) {
          error(c.line, c.name + ": W and L must be > 0");
          return;
        }
        ckt.mosfets.push_back(inst);
        break;
      }
      case CardKind::isfet: {
        const ModelEntry* m = resolve_model(c, true);
        if (!m) return;
        IsfetInst inst;
        inst.name = c.name;
        inst.d = node(c.nodes[0]);
        inst.ref = node(c.nodes[1]);
        inst.s = node(c.nodes[2]);
        node(c.nodes[3]);  // bulk parsed, ignored
        inst.w = c.params.at("W");
        inst.l = c.params.at("L");
        inst.model = m->isfet;
        if (auto it = c.params.find("PH"); it != c.params.end()) {
          inst.ph = it->second;
          inst.ph_explicit = true;
        }
        if (inst.w <= 0 || inst.l <= 0) {
          error(c.line, c.name + ": W and L must be > 0");
          return;
        }
        ckt.isfets.push_back(inst);
        break;
      }
      case CardKind::directive:
        bind_directive(c);
        break;
      case CardKind::model:
      case CardKind::comment:
        break;
    }
  }

  void bind_directive(const Card& c) {
    Circuit& ckt = result_.circuit;
    if (c.directive == "TEMP") {
      ckt.temp_celsius = c.value;
    } else if (c.directive == "OP") {
      AnalysisSpec a;
      a.is_op = true;
      ckt.analyses.push_back(a);
    } else if (c.directive == "DC") {
      AnalysisSpec a;
      a.variable = SweepVariable::source;
      a.source_name = c.args[0];
      if (!parse_range(c, 1, a)) return;
      pending_source_sweeps_.push_back(c.line);
      ckt.analyses.push_back(a);
    } else if (c.directive == "SWEEP") {
      AnalysisSpec a;
      a.variable = (c.args[0] == "PH") ? SweepVariable::ph : SweepVariable::temp;
      if (!parse_range(c, 1, a)) return;
      ckt.analyses.push_back(a);
    }
  }

  bool parse_range(const Card& c, size_t from, AnalysisSpec& a) {
    double vals[3];
    for (int i = 0; i < 3; ++i) {
      if (!try_parse_value(c.args[from + i], vals[i])) {
        error(c.line, "." + c.directive + ": malformed number '" +
                          c.args[from + i] + "'");
        return false;
      }
    }
    a.start = vals[0];
    a.stop = vals[1];
    a.step = vals[2];
    if (a.step == 0.0) {
      error(c.line, "." + c.directive + ": step must be nonzero");
      return false;
    }
    if ((a.stop - a.start) / a.step < 0.0) {
      error(c.line, "." + c.directive + ": step sign inconsistent with range");
      return false;
    }
    return true;
  }

  void check_connectivity() {
    Circuit& ckt = result_.circuit;
    // branch indices in card order: vsources first, then vcvses
    int b = ckt.node_count();
    for (auto& v : ckt.vsources) v.branch = b++;
    for (auto& e : ckt.vcvses) e.branch = b++;

    // resolve .dc source names now that all sources exist
    for (const auto& a : ckt.analyses) {
      if (a.variable != SweepVariable::source || a.is_op) continue;
      bool found = false;
      for (const auto& v : ckt.vsources) found |= (v.name == a.source_name);
      for (const auto& i : ckt.isources) found |= (i.name == a.source_name);
      if (!found) error(0, ".dc: source '" + a.source_name + "' not found");
    }

    const int n = ckt.node_count();
    if (n == 0) return;
    std::vector<std::set<int>> adj(n);
    std::vector<bool> touches_ground(n, false);
    auto link = [&](int a, int bb) {
      if (a == kGroundNode && bb == kGroundNode) return;
      if (a == kGroundNode) { touches_ground[bb] = true; return; }
      if (bb == kGroundNode) { touches_ground[a] = true; return; }
      adj[a].insert(bb);
      adj[bb].insert(a);
    };
    for (const auto& r : ckt.resistors) link(r.a, r.b);
    for (const auto& v : ckt.vsources) link(v.p, v.n);
    for (const auto& i : ckt.isources) link(i.p, i.n);
    // gates and VCVS inputs carry no current; only conductive paths count
    for (const auto& e : ckt.vcvses) link(e.out_p, e.out_n);
    for (const auto& m : ckt.mosfets) link(m.d, m.s);
    for (const auto& f : ckt.isfets) link(f.d, f.s);
    std::vector<bool> seen(n, false);
    std::vector<int> stack;
    for (int i = 0; i < n; ++i)
      if (touches_ground[i]) { seen[i] = true; stack.push_back(i); }
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) { seen[v] = true; stack.push_back(v); }
    }
    for (int i = 0; i < n; ++i)
      if (!seen[i])
        error(0, "floating node '" + ckt.node_names[i] + "'");
  }

  void normalize_analyses() {}

  const Netlist& nl_;
  ElaborateResult result_;
  std::map<std::string, ModelEntry> models_;
  std::vector<int> pending_source_sweeps_;
};

}  // namespace

ElaborateResult elaborate(const Netlist& netlist) {
  return Elaborator(netlist).run();
}

}  // namespace isim
