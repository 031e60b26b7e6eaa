#pragma once

// SPICE-dialect netlist text format: one card per line, '*'/';' comments,
// '+' continuations, case-insensitive identifiers, node "0" is ground.
//
//   R<name> n+ n- <value>
//   V<name> n+ n- <value>
//   I<name> n+ n- <value>          current flows n+ -> n- through the source
//   M<name> nd ng ns nb <model> W=<v> L=<v>
//   F<name> nd nref ns nb <model> W=<v> L=<v> [PH=<v>]
//   E<name> out+ out- in+ in- <gain>
//   .model <name> NMOS|ISFET (<key=value> ...)
//   .temp <celsius>   .op   .dc <src> <start> <stop> <step>
//   .sweep ph|temp <start> <stop> <step>   .end

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace isim {

enum class CardKind {
  resistor,
  vsource,
  isource,
  mosfet,
  isfet,
  vcvs,
  model,
  directive,
  comment,
};

struct Card {
  CardKind kind = CardKind::comment;
  std::string name;                 // device or model name, upper-cased
  std::vector<std::string> nodes;   // terminal labels in card order
  std::map<std::string, double> params;
  std::string model_ref;            // device cards: referenced model name
  std::string model_type;           // model cards: NMOS or ISFET
  std::string directive;            // directive cards: keyword without dot
  std::vector<std::string> args;    // directive arguments / comment text
  double value = 0.0;               // R/V/I value or VCVS gain
  int line = 0;
};

struct Diagnostic {
  int line = 0;
  std::string message;
};

struct Netlist {
  std::string title;
  std::vector<Card> cards;
};

struct ParseResult {
  Netlist netlist;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Engineering-notation number: optional suffix T/G/MEG/K/M/U/N/P/F
// (longest match, case-insensitive); trailing unit letters ignored.
double parse_value(const std::string& text);
bool try_parse_value(const std::string& text, double& out);

ParseResult parse(const std::string& text);

// Canonical serializer; parse(print(n)) reproduces the same cards.
std::string print(const Netlist& netlist);

std::string to_upper(std::string s);

}  // namespace isim
