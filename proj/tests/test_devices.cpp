#include "doctest.h"

#include <cmath>
#include <random>

#include "isim/devices.hpp"

using namespace isim;

namespace {

IsfetModel plain_isfet() {
  IsfetModel m;
  m.e_ref = 0;
  m.de_ref_dt = 0;
  m.chi_sol = 0;
  m.dphi_lj = 0;
  return m;
}

}  // namespace

TEST_CASE("nernst slope anchors") {
  CHECK(std::abs(nernst_slope(298.16) - 0.05916) < 1e-4);
  CHECK(nernst_slope(0.0) == 0.0);
  CHECK(std::abs(nernst_slope(373.16) - 0.07404) < 5e-5);
  CHECK_THROWS(nernst_slope(-1.0));
}

TEST_CASE("surface potential") {
  IsfetModel m = plain_isfet();
  m.ph_pzc = 2.2;
  m.alpha = 1.0;
  CHECK(surface_potential(2.2, m, 310.0) == 0.0);
  CHECK(std::abs(surface_potential(7.0, m, 298.16) - 0.2840) < 1e-4);
  m.alpha = 0.5;
  CHECK(std::abs(surface_potential(7.0, m, 298.16) - 0.1420) < 1e-4);
  CHECK_THROWS(surface_potential(-0.1, m, 298.16));
  CHECK_THROWS(surface_potential(14.5, m, 298.16));
}

TEST_CASE("surface potential is linear in ph with slope alpha*nernst") {
  IsfetModel m = plain_isfet();
  m.alpha = 0.73;
  m.ph_pzc = 3.0;
  const double t = 330.0;
  const double slope = m.alpha * nernst_slope(t);
  for (double ph = 0.5; ph <= 13.5; ph += 0.5) {
    const double diff =
        surface_potential(ph + 0.5, m, t) - surface_potential(ph, m, t);
    CHECK(diff == doctest::Approx(0.5 * slope).epsilon(1e-12));
  }
}

TEST_CASE("flatband shift") {
  IsfetModel m = plain_isfet();
  m.ph_pzc = 2.2;
  CHECK(flatband_shift(m, 2.2, 298.16) == 0.0);
  m.e_ref = 0.205;
  CHECK(flatband_shift(m, 2.2, 298.16) == doctest::Approx(0.205));
  m.de_ref_dt = -1.4e-4;
  CHECK(flatband_shift(m, 2.2, 348.16) == doctest::Approx(0.198));
}

TEST_CASE("mosfet threshold temperature law") {
  MosfetModel m;
  m.vto = 0.7;
  m.tcv = -1.4e-3;
  CHECK(mosfet_vth_at(m, m.t_nom) == 0.7);
  CHECK(mosfet_vth_at(m, m.t_nom + 100.0) == doctest::Approx(0.56));
  m.tcv = 0.0;
  CHECK(mosfet_vth_at(m, 77.0) == 0.7);
  CHECK(mosfet_vth_at(m, 400.0) == 0.7);
}

TEST_CASE("mosfet kp temperature law") {
  MosfetModel m;
  m.kp = 1e-4;
  m.mu_exp = -1.5;
  CHECK(mosfet_kp_at(m, m.t_nom) == 1e-4);
  CHECK(mosfet_kp_at(m, 4.0 * m.t_nom) == doctest::Approx(1.25e-5));
  m.mu_exp = 0.0;
  CHECK(mosfet_kp_at(m, 500.0) == 1e-4);
}

TEST_CASE("square law regions") {
  MosfetModel m;
  m.vto = 0.7;
  m.kp = 1e-4;
  m.lambda = 0.0;
  const double w = 10e-6, l = 1e-6;  // w/l = 10

  SUBCASE("cutoff") {
    auto e = eval_mosfet(m, w, l, 0.5, 1.0, m.t_nom);
    CHECK(e.id == 0.0);
    CHECK(e.gm == 0.0);
    CHECK(e.region == Region::cutoff);
  }
  SUBCASE("saturation") {
    auto e = eval_mosfet(m, w, l, 1.2, 2.0, m.t_nom);
    CHECK(e.id == doctest::Approx(125e-6));
    CHECK(e.gm == doctest::Approx(0.5e-3));
    CHECK(e.region == Region::saturation);
  }
  SUBCASE("triode") {
    auto e = eval_mosfet(m, w, l, 1.2, 0.2, m.t_nom);
    CHECK(e.id == doctest::Approx(80e-6));
    CHECK(e.region == Region::triode);
  }
  SUBCASE("geometry rejected") {
    CHECK_THROWS(eval_mosfet(m, 0.0, l, 1.2, 0.2, m.t_nom));
    CHECK_THROWS(eval_mosfet(m, w, -1e-6, 1.2, 0.2, m.t_nom));
  }
}

TEST_CASE("current continuity at region boundaries") {
  MosfetModel m;
  m.vto = 0.7;
  m.kp = 1e-4;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lam(0.0, 0.1), vov_d(0.01, 1.5);
  for (int i = 0; i < 200; ++i) {
    m.lambda = lam(rng);
    const double vov = vov_d(rng);
    const double vgs = m.vto + vov;
    const double beta = m.kp * 10.0;
    // both closed forms at vds = vgs - vth
    const double triode =
        beta * (vov * vov - 0.5 * vov * vov) * (1.0 + m.lambda * vov);
    const double sat = 0.5 * beta * vov * vov * (1.0 + m.lambda * vov);
    CHECK(std::abs(triode - sat) <= 1e-15);
    // at vgs = vth the device current vanishes from both sides
    auto below = eval_mosfet(m, 10e-6, 1e-6, m.vto, 1.0, m.t_nom);
    auto above = eval_mosfet(m, 10e-6, 1e-6, m.vto + 1e-300, 1.0, m.t_nom);
    CHECK(std::abs(below.id - above.id) <= 1e-15);
  }
}

TEST_CASE("gm and gds match central finite differences") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> vgs_d(-0.5, 3.0), vds_d(0.0, 3.0),
      t_d(250.0, 400.0), lam(0.0, 0.2);
  MosfetModel m;
  m.vto = 0.7;
  m.kp = 1e-4;
  const double w = 84e-6, l = 18e-6;
  const double h = 1e-6;
  int checked = 0;
  for (int i = 0; i < 2000 && checked < 1000; ++i) {
    m.lambda = lam(rng);
    const double vgs = vgs_d(rng), vds = vds_d(rng), t = t_d(rng);
    const double vth = mosfet_vth_at(m, t);
    // keep clear of region boundaries; derivative is one-sided there
    if (std::abs(vgs - vth) < 1e-3) continue;
    if (std::abs(vds - (vgs - vth)) < 1e-3) continue;
    if (vds < 2 * h) continue;
    ++checked;
    auto e = eval_mosfet(m, w, l, vgs, vds, t);
    const double gm_fd = (eval_mosfet(m, w, l, vgs + h, vds, t).id -
                          eval_mosfet(m, w, l, vgs - h, vds, t).id) /
                         (2 * h);
    const double gds_fd = (eval_mosfet(m, w, l, vgs, vds + h, t).id -
                           eval_mosfet(m, w, l, vgs, vds - h, t).id) /
                          (2 * h);
    CHECK(std::abs(e.gm - gm_fd) <=
          1e-6 * std::max(std::abs(gm_fd), 1.0e-12) + 1e-12);
    CHECK(std::abs(e.gds - gds_fd) <=
          1e-6 * std::max(std::abs(gds_fd), 1.0e-12) + 1e-12);
  }
  CHECK(checked == 1000);
}

TEST_CASE("id is non-decreasing in vgs") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> vgs_d(-0.5, 3.0), vds_d(0.0, 3.0);
  MosfetModel m;
  m.lambda = 0.05;
  for (int i = 0; i < 500; ++i) {
    double a = vgs_d(rng), b = vgs_d(rng);
    if (a > b) std::swap(a, b);
    const double vds = vds_d(rng);
    CHECK(eval_mosfet(m, 1e-5, 1e-6, a, vds, m.t_nom).id <=
          eval_mosfet(m, 1e-5, 1e-6, b, vds, m.t_nom).id);
  }
}

TEST_CASE("isfet threshold") {
  IsfetModel m = plain_isfet();
  m.ph_pzc = 2.2;
  SUBCASE("collapses to mosfet at ph_pzc with zero offsets") {
    CHECK(isfet_vth_at(m, 2.2, m.mos.t_nom) == m.mos.vto);
  }
  SUBCASE("slope per pH unit is the nernst slope at alpha=1") {
    m.alpha = 1.0;
    const double d = isfet_vth_at(m, 8.0, 298.16) - isfet_vth_at(m, 7.0, 298.16);
    CHECK(d == doctest::Approx(nernst_slope(298.16)).epsilon(1e-12));
  }
  SUBCASE("alpha=0 removes ph dependence") {
    m.alpha = 0.0;
    CHECK(isfet_vth_at(m, 1.0, 310.0) == isfet_vth_at(m, 13.0, 310.0));
  }
}

TEST_CASE("isfet eval is mosfet eval shifted by the flatband") {
  IsfetModel m;  // full electrochemical defaults
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> v_d(-1.0, 3.0), vds_d(0.0, 3.0),
      ph_d(0.0, 14.0), t_d(260.0, 380.0);
  for (int i = 0; i < 300; ++i) {
    const double v = v_d(rng), vds = vds_d(rng), ph = ph_d(rng), t = t_d(rng);
    auto a = eval_isfet(m, 84e-5, 18e-6, v, vds, ph, t);
    auto b = eval_mosfet(m.mos, 84e-5, 18e-6, v - flatband_shift(m, ph, t),
                         vds, t);
    CHECK(a.id == b.id);  // bit-for-bit
    CHECK(a.gm == b.gm);
    CHECK(a.gds == b.gds);
    CHECK(a.region == b.region);
  }
}

TEST_CASE("matched pair threshold difference is temperature independent") {
  IsfetModel isfet;
  isfet.de_ref_dt = 0.0;
  isfet.chi_sol = 0.01;
  isfet.dphi_lj = -0.002;
  MosfetModel nmos = isfet.mos;
  const double expected = isfet.e_ref + isfet.chi_sol + isfet.dphi_lj;
  for (double t = 273.16; t <= 373.16; t += 5.0) {
    const double d =
        isfet_vth_at(isfet, isfet.ph_pzc, t) - mosfet_vth_at(nmos, t);
    CHECK(d == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("double layer capacitance") {
  IsfetModel m;
  const double t = 298.16, area = 840e-6 * 18e-6;
  SUBCASE("huge ion concentration: series dominated by helmholtz") {
    m.c_gouy_n0 = 1e40;
    CHECK(double_layer_capacitance(m, 0.0, t, area) ==
          doctest::Approx(m.c_helm * area).epsilon(1e-4));
  }
  SUBCASE("zero-potential value matches the hand-evaluated series form") {
    const double kt = constants::k_boltzmann * t;
    const double q = constants::q_electron;
    const double eps = constants::eps_water_rel * constants::eps0;
    const double cg = std::sqrt(2.0 * m.c_gouy_n0 * eps * q * q / kt) * area;
    const double ch = m.c_helm * area;
    CHECK(double_layer_capacitance(m, 0.0, t, area) ==
          doctest::Approx(ch * cg / (ch + cg)).epsilon(1e-12));
  }
  SUBCASE("rejects bad domain") {
    CHECK_THROWS(double_layer_capacitance(m, 0.0, t, 0.0));
    CHECK_THROWS(double_layer_capacitance(m, 0.0, -1.0, area));
  }
}
