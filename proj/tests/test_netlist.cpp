#include "doctest.h"

#include <random>

#include "isim/builders.hpp"
#include "isim/circuit.hpp"
#include "isim/netlist.hpp"

using namespace isim;

TEST_CASE("parse_value suffixes") {
  CHECK(parse_value("1k") == 1000.0);
  CHECK(parse_value("840u") == doctest::Approx(8.4e-4));
  CHECK(parse_value("2meg") == 2e6);
  CHECK(parse_value("2MEG") == 2e6);
  CHECK(parse_value("3M") == doctest::Approx(3e-3));  // longest-match: MEG != M
  CHECK(parse_value("18um") == doctest::Approx(18e-6));  // trailing unit letters
  CHECK(parse_value("1.5e3") == 1500.0);
  CHECK(parse_value("-4.7n") == doctest::Approx(-4.7e-9));
  CHECK(parse_value("100p") == doctest::Approx(1e-10));
  CHECK(parse_value("2f") == doctest::Approx(2e-15));
  CHECK(parse_value("5T") == 5e12);
  CHECK(parse_value("5g") == 5e9);
}

TEST_CASE("parse_value rejects malformed input") {
  double v;
  CHECK(!try_parse_value("", v));
  CHECK(!try_parse_value("abc", v));
  CHECK(!try_parse_value("1k5", v));
  CHECK(!try_parse_value("1x", v));
  CHECK(!try_parse_value("--3", v));
  CHECK_THROWS(parse_value("1q2"));
}

TEST_CASE("parse_value property: mantissa * suffix * trailing letters") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> mant(-1e3, 1e3);
  const std::pair<const char*, double> suffixes[] = {
      {"", 1.0},     {"T", 1e12}, {"G", 1e9},  {"MEG", 1e6}, {"K", 1e3},
      {"M", 1e-3},   {"U", 1e-6}, {"N", 1e-9}, {"P", 1e-12}, {"F", 1e-15}};
  const char* tails[] = {"", "V", "OHM", "HZ"};
  for (int i = 0; i < 500; ++i) {
    const double m = mant(rng);
    const auto& [suf, scale] = suffixes[rng() % 10];
    const char* tail = tails[rng() % 4];
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g%s%s", m, suf, tail);
    // a tail is only ignorable after a suffix; without one it must be empty
    if (suf[0] == '\0' && tail[0] != '\0') continue;
    CHECK(parse_value(buf) == doctest::Approx(m * scale).epsilon(1e-12));
  }
}

TEST_CASE("minimal netlist") {
  auto r = parse("t\nR1 1 0 1k\n.end\n");
  REQUIRE(r.ok());
  CHECK(r.netlist.title == "t");
  REQUIRE(r.netlist.cards.size() == 2);
  CHECK(r.netlist.cards[0].kind == CardKind::resistor);
  CHECK(r.netlist.cards[0].value == 1000.0);
}

TEST_CASE("missing .end") {
  auto r = parse("t\nR1 1 0 1k\n");
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].message == "missing .end");
}

TEST_CASE("comments and continuations") {
  auto r = parse("t\n* hello\nM1 d g s b NM\n+ W=1u L=1u\n"
                 ".model NM NMOS (VTO=0.5)\n.end\n");
  REQUIRE(r.ok());
  CHECK(r.netlist.cards[0].kind == CardKind::comment);
  const Card& m = r.netlist.cards[1];
  CHECK(m.kind == CardKind::mosfet);
  CHECK(m.params.at("W") == doctest::Approx(1e-6));
  CHECK(m.nodes == std::vector<std::string>{"D", "G", "S", "B"});
}

TEST_CASE("error recovery collects one diagnostic per bad card") {
  auto r = parse("t\n"
                 "R1 1 0 notanumber\n"  // bad value
                 "Q1 1 0 2\n"           // unknown letter
                 "R2 1 0 1k\n"
                 "R2 1 0 2k\n"          // duplicate
                 ".end\n");
  CHECK(r.diagnostics.size() == 3);
  CHECK(r.diagnostics[0].line == 2);
  CHECK(r.diagnostics[1].line == 3);
  CHECK(r.diagnostics[2].line == 5);
}

TEST_CASE("readout fixture card census") {
  Netlist nl = build_readout(ReadoutConfig{});
  int devices = 0, models = 0, sweeps = 0;
  for (const auto& c : nl.cards) {
    switch (c.kind) {
      case CardKind::resistor:
      case CardKind::vsource:
      case CardKind::isource:
      case CardKind::mosfet:
      case CardKind::isfet:
      case CardKind::vcvs:
        ++devices;
        break;
      case CardKind::model:
        ++models;
        break;
      case CardKind::directive:
        if (c.directive == "SWEEP") ++sweeps;
        break;
      default:
        break;
    }
  }
  CHECK(devices == 9);
  CHECK(models == 2);
  CHECK(sweeps == 2);
}

TEST_CASE("elaborate divider") {
  auto pr = parse("t\nV1 1 0 1\nR1 1 2 1k\nR2 2 0 1k\n.end\n");
  REQUIRE(pr.ok());
  auto er = elaborate(pr.netlist);
  REQUIRE(er.ok());
  CHECK(er.circuit.node_count() == 2);
  CHECK(er.circuit.resistors.size() == 2);
  CHECK(er.circuit.vsources.size() == 1);
  CHECK(er.circuit.unknown_count() == 3);  // 2 nodes + 1 branch
  CHECK(er.circuit.node_names[0] == "1");  // first-appearance order
}

TEST_CASE("dangling model reference names the device and model") {
  auto pr = parse("t\nM1 1 2 0 0 NX W=1u L=1u\nR1 1 0 1k\n.end\n");
  REQUIRE(pr.ok());
  auto er = elaborate(pr.netlist);
  REQUIRE(er.diagnostics.size() >= 1);
  CHECK(er.diagnostics[0].message.find("NX") != std::string::npos);
  CHECK(er.diagnostics[0].message.find("M1") != std::string::npos);
}

TEST_CASE("sweep step sign validated") {
  auto pr = parse("t\nR1 1 0 1k\nV1 1 0 1\n.sweep temp 100 0 5\n.end\n");
  REQUIRE(pr.ok());
  auto er = elaborate(pr.netlist);
  REQUIRE(er.diagnostics.size() == 1);
  CHECK(er.diagnostics[0].message.find("step sign") != std::string::npos);
}

TEST_CASE("floating node detected") {
  auto pr = parse("t\nV1 1 0 1\nR1 1 2 1k\nR2 2 0 1k\nR3 3 4 1k\n.end\n");
  REQUIRE(pr.ok());
  auto er = elaborate(pr.netlist);
  CHECK(!er.ok());
  CHECK(er.diagnostics[0].message.find("floating") != std::string::npos);
}

TEST_CASE("model defaults filled when card omits fields") {
  auto pr = parse("t\nVR NREF 0 1\nVD D 0 1\nF1 D NREF 0 0 ISF W=1u L=1u\n"
                  ".model ISF ISFET (VTO=0.6)\n.end\n");
  REQUIRE(pr.ok());
  auto er = elaborate(pr.netlist);
  REQUIRE(er.ok());
  const IsfetModel& m = er.circuit.isfets[0].model;
  CHECK(m.mos.vto == 0.6);
  CHECK(m.alpha == 1.0);
  CHECK(m.ph_pzc == doctest::Approx(2.2));
  CHECK(m.e_ref == doctest::Approx(0.205));
  CHECK(m.de_ref_dt == doctest::Approx(-1.4e-4));
  CHECK(m.mos.tcv == doctest::Approx(-1.4e-3));
  CHECK(m.mos.mu_exp == doctest::Approx(-1.5));
  CHECK(m.mos.lambda == 0.0);
  CHECK(m.mos.t_nom == doctest::Approx(298.16));
  CHECK(er.circuit.isfets[0].ph == 7.0);  // default when PH= absent
}

TEST_CASE("invalid model parameters rejected") {
  auto bad_alpha = parse("t\nVR N 0 1\nVD D 0 1\nF1 D N 0 0 I W=1u L=1u\n"
                         ".model I ISFET (ALPHA=1.5)\n.end\n");
  REQUIRE(bad_alpha.ok());
  CHECK(!elaborate(bad_alpha.netlist).ok());
  auto bad_kp = parse("t\nV1 D 0 1\nM1 D D 0 0 N W=1u L=1u\n"
                      ".model N NMOS (KP=0)\n.end\n");
  REQUIRE(bad_kp.ok());
  CHECK(!elaborate(bad_kp.netlist).ok());
}

namespace {

void check_same_elaboration(const Circuit& a, const Circuit& b) {
  CHECK(a.node_names == b.node_names);
  // values go through %.9g on the way out, so compare to 9 digits
  auto near = [](double x, double y) {
    return doctest::Approx(y).epsilon(1e-8) == x;
  };
  REQUIRE(a.resistors.size() == b.resistors.size());
  for (size_t i = 0; i < a.resistors.size(); ++i) {
    CHECK(a.resistors[i].a == b.resistors[i].a);
    CHECK(a.resistors[i].b == b.resistors[i].b);
    CHECK(near(a.resistors[i].resistance, b.resistors[i].resistance));
  }
  REQUIRE(a.mosfets.size() == b.mosfets.size());
  for (size_t i = 0; i < a.mosfets.size(); ++i) {
    CHECK(a.mosfets[i].d == b.mosfets[i].d);
    CHECK(near(a.mosfets[i].model.vto, b.mosfets[i].model.vto));
    CHECK(near(a.mosfets[i].model.kp, b.mosfets[i].model.kp));
    CHECK(near(a.mosfets[i].w, b.mosfets[i].w));
  }
  REQUIRE(a.isfets.size() == b.isfets.size());
  for (size_t i = 0; i < a.isfets.size(); ++i) {
    CHECK(near(a.isfets[i].model.alpha, b.isfets[i].model.alpha));
    CHECK(near(a.isfets[i].model.e_ref, b.isfets[i].model.e_ref));
    CHECK(near(a.isfets[i].ph, b.isfets[i].ph));
  }
  CHECK(a.vsources.size() == b.vsources.size());
  CHECK(a.vcvses.size() == b.vcvses.size());
  CHECK(a.analyses.size() == b.analyses.size());
}

}  // namespace

TEST_CASE("print/parse round-trip preserves elaboration") {
  std::vector<Netlist> fixtures = {
      build_fixture(FixtureKind::divider),
      build_fixture(FixtureKind::diode_connected),
      build_fixture(FixtureKind::single_isfet),
      build_readout(ReadoutConfig{}),
      build_widlar(WidlarConfig{}),
  };
  ReadoutConfig widlar_cfg;
  widlar_cfg.bias_mode = BiasMode::widlar;
  fixtures.push_back(build_readout(widlar_cfg));
  for (const auto& nl : fixtures) {
    auto reparsed = parse(print(nl));
    REQUIRE(reparsed.ok());
    auto a = elaborate(nl);
    auto b = elaborate(reparsed.netlist);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    check_same_elaboration(a.circuit, b.circuit);
  }
}
