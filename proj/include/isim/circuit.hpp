#pragma once

// Elaboration: cards -> a solvable circuit graph with dense node indexing,
// bound model parameters, and normalized analysis specs.

#include <optional>
#include <string>
#include <vector>

#include "isim/devices.hpp"
#include "isim/netlist.hpp"

namespace isim {

inline constexpr int kGroundNode = -1;

struct ResistorInst {
  std::string name;
  int a = kGroundNode, b = kGroundNode;
  double resistance = 0.0;
};

struct VsourceInst {
  std::string name;
  int p = kGroundNode, n = kGroundNode;
  double value = 0.0;
  int branch = 0;  // index into the branch-current unknowns
};

struct IsourceInst {
  std::string name;
  int p = kGroundNode, n = kGroundNode;
  double value = 0.0;  // flows p -> n through the source
};

struct VcvsInst {
  std::string name;
  int out_p = kGroundNode, out_n = kGroundNode;
  int in_p = kGroundNode, in_n = kGroundNode;
  double gain = 0.0;
  int branch = 0;
};

struct MosfetInst {
  std::string name;
  int d = kGroundNode, g = kGroundNode, s = kGroundNode;
  double w = 0.0, l = 0.0;
  MosfetModel model;
};

struct IsfetInst {
  std::string name;
  int d = kGroundNode, ref = kGroundNode, s = kGroundNode;
  double w = 0.0, l = 0.0;
  IsfetModel model;
  double ph = 7.0;
  bool ph_explicit = false;  // PH= given on the card
};

enum class SweepVariable { ph, temp, source };

struct AnalysisSpec {
  SweepVariable variable = SweepVariable::source;
  std::string source_name;  // for source sweeps
  double start = 0.0, stop = 0.0, step = 0.0;
  bool is_op = false;
};

struct Circuit {
  std::string title;
  std::vector<std::string> node_names;  // dense index -> label, ground excluded
  std::vector<ResistorInst> resistors;
  std::vector<VsourceInst> vsources;
  std::vector<IsourceInst> isources;
  std::vector<VcvsInst> vcvses;
  std::vector<MosfetInst> mosfets;
  std::vector<IsfetInst> isfets;
  std::vector<AnalysisSpec> analyses;
  double temp_celsius = 25.0;

  int node_count() const { return static_cast<int>(node_names.size()); }
  int branch_count() const {
    return static_cast<int>(vsources.size() + vcvses.size());
  }
  int unknown_count() const { return node_count() + branch_count(); }
  int node_index(const std::string& label) const;  // -2 if unknown label
};

struct ElaborateResult {
  Circuit circuit;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

ElaborateResult elaborate(const Netlist& netlist);

}  // namespace isim
