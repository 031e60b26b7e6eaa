#include "isim/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace isim {

std::string to_upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

namespace {

const std::map<std::string, double, std::less<>> kSuffixes = {
    {"T", 1e12}, {"G", 1e9}, {"MEG", 1e6}, {"K", 1e3}, {"M", 1e-3},
    {"U", 1e-6}, {"N", 1e-9}, {"P", 1e-12}, {"F", 1e-15}};

bool all_alpha(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalpha(c); });
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == '(' || c == ')') c = ' ';
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

bool try_parse_value(const std::string& text, double& out) {
  if (text.empty()) return false;
  if (std::isspace(static_cast<unsigned char>(text.front()))) return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  double mantissa = std::strtod(begin, &end);
  if (end == begin) return false;
  std::string rest = to_upper(text.substr(end - begin));
  if (!all_alpha(rest)) return false;
  double scale = 1.0;
  if (!rest.empty()) {
    if (rest.rfind("MEG", 0) == 0) {
      scale = 1e6;  // longest match before M
    } else {
      auto it = kSuffixes.find(rest.substr(0, 1));
      if (it == kSuffixes.end()) return false;
      scale = it->second;
    }
  }
  out = mantissa * scale;
  return true;
}

double parse_value(const std::string& text) {
  double v;
  if (!try_parse_value(text, v))
    throw std::invalid_argument("malformed value: '" + text + "'");
  return v;
}

namespace {

struct LogicalLine {
  std::string text;
  int line = 0;
};

// key=value tokens into card params; returns false on malformed token
bool parse_kv(const std::string& tok, std::string& key, double& val) {
  auto eq = tok.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= tok.size()) return false;
  key = to_upper(tok.substr(0, eq));
  return try_parse_value(tok.substr(eq + 1), val);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  ParseResult run() {
    split_lines();
    for (const auto& ll : lines_) parse_card(ll);
    if (!saw_end_) error(last_line_, "missing .end");
    return std::move(result_);
  }

 private:
  void error(int line, std::string msg) {
    result_.diagnostics.push_back({line, std::move(msg)});
  }

  void split_lines() {
    std::istringstream in(text_);
    std::string raw;
    int lineno = 0;
    bool have_title = false;
    while (std::getline(in, raw)) {
      ++lineno;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (!have_title) {
        result_.netlist.title = raw;
        have_title = true;
        continue;
      }
      std::string trimmed = raw;
      auto pos = trimmed.find_first_not_of(" \t");
      if (pos == std::string::npos) continue;
      if (trimmed[pos] == '+') {
        if (lines_.empty()) {
          error(lineno, "continuation line with nothing to continue");
        } else {
          lines_.back().text += " " + trimmed.substr(pos + 1);
        }
        continue;
      }
      lines_.push_back({trimmed.substr(pos), lineno});
    }
    last_line_ = lineno;
  }

  void add_card(Card c) { result_.netlist.cards.push_back(std::move(c)); }

  bool check_unique(CardKind kind, const std::string& name, int line) {
    if (!seen_.insert({static_cast<int>(kind), name}).second) {
      error(line, "duplicate name '" + name + "'");
      return false;
    }
    return true;
  }

  void parse_card(const LogicalLine& ll) {
    const std::string& s = ll.text;
    if (s[0] == '*' || s[0] == ';') {
      Card c;
      c.kind = CardKind::comment;
      c.args.push_back(s.substr(1));
      c.line = ll.line;
      add_card(std::move(c));
      return;
    }
    auto toks = tokenize(s);
    if (toks.empty()) return;
    if (toks[0][0] == '.') {
      parse_directive(toks, ll.line);
      return;
    }
    const char letter = static_cast<char>(std::toupper(
        static_cast<unsigned char>(toks[0][0])));
    switch (letter) {
      case 'R': two_terminal(CardKind::resistor, toks, ll.line); break;
      case 'V': two_terminal(CardKind::vsource, toks, ll.line); break;
      case 'I': two_terminal(CardKind::isource, toks, ll.line); break;
      case 'M': transistor(CardKind::mosfet, toks, ll.line); break;
      case 'F': transistor(CardKind::isfet, toks, ll.line); break;
      case 'E': vcvs(toks, ll.line); break;
      default:
        error(ll.line, std::string("unknown card letter '") + letter + "'");
    }
  }

  void two_terminal(CardKind kind, const std::vector<std::string>& toks, int line) {
    if (toks.size() != 4) {
      error(line, to_upper(toks[0]) + ": expected 2 nodes and a value");
      return;
    }
    Card c;
    c.kind = kind;
    c.name = to_upper(toks[0]);
    c.nodes = {to_upper(toks[1]), to_upper(toks[2])};
    c.line = line;
    if (!try_parse_value(toks[3], c.value)) {
      error(line, c.name + ": malformed value '" + toks[3] + "'");
      return;
    }
    if (check_unique(kind, c.name, line)) add_card(std::move(c));
  }

  void transistor(CardKind kind, const std::vector<std::string>& toks, int line) {
    if (toks.size() < 6) {
      error(line, to_upper(toks[0]) + ": expected 4 nodes and a model");
      return;
    }
    Card c;
    c.kind = kind;
    c.name = to_upper(toks[0]);
    for (int i = 1; i <= 4; ++i) c.nodes.push_back(to_upper(toks[i]));
    c.model_ref = to_upper(toks[5]);
    c.line = line;
    for (size_t i = 6; i < toks.size(); ++i) {
      std::string key;
      double val;
      if (!parse_kv(toks[i], key, val)) {
        error(line, c.name + ": malformed parameter '" + toks[i] + "'");
        return;
      }
      c.params[key] = val;
    }
    if (!c.params.count("W") || !c.params.count("L")) {
      error(line, c.name + ": W= and L= are required");
      return;
    }
    if (check_unique(kind, c.name, line)) add_card(std::move(c));
  }

  void vcvs(const std::vector<std::string>& toks, int line) {
    if (toks.size() != 6) {
      error(line, to_upper(toks[0]) + ": expected 4 nodes and a gain");
      return;
    }
    Card c;
    c.kind = CardKind::vcvs;
    c.name = to_upper(toks[0]);
    for (int i = 1; i <= 4; ++i) c.nodes.push_back(to_upper(toks[i]));
    c.line = line;
    if (!try_parse_value(toks[5], c.value)) {
      error(line, c.name + ": malformed gain '" + toks[5] + "'");
      return;
    }
    if (check_unique(CardKind::vcvs, c.name, line)) add_card(std::move(c));
  }

  void parse_directive(const std::vector<std::string>& toks, int line) {
    const std::string word = to_upper(toks[0].substr(1));
    Card c;
    c.line = line;
    if (word == "MODEL") {
      if (toks.size() < 3) {
        error(line, ".model: expected name and type");
        return;
      }
      c.kind = CardKind::model;
      c.name = to_upper(toks[1]);
      c.model_type = to_upper(toks[2]);
      if (c.model_type != "NMOS" && c.model_type != "ISFET") {
        error(line, ".model " + c.name + ": type must be NMOS or ISFET");
        return;
      }
      for (size_t i = 3; i < toks.size(); ++i) {
        std::string key;
        double val;
        if (!parse_kv(toks[i], key, val)) {
          error(line, ".model " + c.name + ": malformed parameter '" + toks[i] + "'");
          return;
        }
        c.params[key] = val;
      }
      if (check_unique(CardKind::model, c.name, line)) add_card(std::move(c));
      return;
    }
    c.kind = CardKind::directive;
    c.directive = word;
    for (size_t i = 1; i < toks.size(); ++i) c.args.push_back(to_upper(toks[i]));
    if (word == "END") {
      if (saw_end_) {
        error(line, "duplicate .end");
        return;
      }
      saw_end_ = true;
    } else if (word == "TEMP") {
      if (saw_temp_) {
        error(line, "duplicate .temp");
        return;
      }
      saw_temp_ = true;
      if (c.args.size() != 1 || !try_parse_value(c.args[0], c.value)) {
        error(line, ".temp: expected one numeric argument");
        return;
      }
    } else if (word == "OP") {
      // no arguments
    } else if (word == "DC") {
      if (c.args.size() != 4) {
        error(line, ".dc: expected <source> <start> <stop> <step>");
        return;
      }
    } else if (word == "SWEEP") {
      if (c.args.size() != 4 || (c.args[0] != "PH" && c.args[0] != "TEMP")) {
        error(line, ".sweep: expected ph|temp <start> <stop> <step>");
        return;
      }
    } else {
      error(line, "unknown directive ." + word);
      return;
    }
    add_card(std::move(c));
  }

  const std::string& text_;
  ParseResult result_;
  std::vector<LogicalLine> lines_;
  std::set<std::pair<int, std::string>> seen_;
  bool saw_end_ = false;
  bool saw_temp_ = false;
  int last_line_ = 0;
};

}  // namespace

ParseResult parse(const std::string& text) { return Parser(text).run(); }

std::string print(const Netlist& netlist) {
  std::ostringstream out;
  out << netlist.title << "\n";
  for (const auto& c : netlist.cards) {
    switch (c.kind) {
      case CardKind::comment:
        out << "*" << (c.args.empty() ? "" : c.args[0]) << "\n";
        break;
      case CardKind::resistor:
      case CardKind::vsource:
      case CardKind::isource:
        out << c.name << " " << c.nodes[0] << " " << c.nodes[1] << " "
            << fmt(c.value) << "\n";
        break;
      case CardKind::mosfet:
      case CardKind::isfet: {
        out << c.name;
        for (const auto& n : c.nodes) out << " " << n;
        out << " " << c.model_ref;
        for (const auto& [k, v] : c.params) out << " " << k << "=" << fmt(v);
        out << "\n";
        break;
      }
      case CardKind::vcvs:
        out << c.name;
        for (const auto& n : c.nodes) out << " " << n;
        out << " " << fmt(c.value) << "\n";
        break;
      case CardKind::model: {
        out << ".model " << c.name << " " << c.model_type << " (";
        bool first = true;
        for (const auto& [k, v] : c.params) {
          if (!first) out << " ";
          out << k << "=" << fmt(v);
          first = false;
        }
        out << ")\n";
        break;
      }
      case CardKind::directive: {
        out << "." << c.directive;
        for (const auto& a : c.args) out << " " << a;
        out << "\n";
        break;
      }
    }
  }
  return out.str();
}

}  // namespace isim
