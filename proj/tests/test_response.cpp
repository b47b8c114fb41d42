#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>

#include "xduce/params.hpp"
#include "xduce/response.hpp"

using namespace xduce;
using constants::two_pi;

static TransducerParams P() { return table1_preset(DatasetTag::fig2); }

TEST_CASE("cavity susceptibility magnitude and peak") {
  TransducerParams p = P();
  // on resonance (omega = -Delta): |chi| = 2/kappa
  CHECK(std::abs(chi_cavity(p.kappa_o(), -p.omega_m, p.omega_m)) ==
        doctest::Approx(1.1877234559096668e-7).epsilon(1e-12));
  // |chi| is maximized at omega = -Delta
  double peak = std::abs(chi_cavity(p.kappa_o(), -p.omega_m, p.omega_m));
  for (double w : {0.0, 0.5 * p.omega_m, 1.5 * p.omega_m, 3.0 * p.omega_m})
    CHECK(std::abs(chi_cavity(p.kappa_o(), -p.omega_m, w)) <= peak * (1 + 1e-12));
  CHECK_THROWS_AS(chi_cavity(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("reflection amplitude: overcoupled dip and passivity") {
  TransducerParams p = P();
  // microwave on resonance at the low-power linewidth 1.64 MHz
  double ke = p.kappa_e_min();
  std::complex<double> s = s_ee_reflection(p, ke, p.omega_e);
  CHECK(std::norm(s) == doctest::Approx(0.5353955978584176).epsilon(1e-12));
  CHECK(s.real() > 0);  // overcoupled: phase flip through resonance
  // optical dip
  CHECK(std::norm(s_oo_reflection(p, p.omega_o)) ==
        doctest::Approx(0.3388282468255738).epsilon(1e-12));
  // |S|^2 <= 1 everywhere for a passive cavity
  for (double d = -20e6; d <= 20e6; d += 0.37e6) {
    CHECK(std::norm(s_ee_reflection(p, ke, p.omega_e + two_pi * d)) <= 1.0 + 1e-12);
    CHECK(std::norm(s_oo_reflection(p, p.omega_o + two_pi * d)) <= 1.0 + 1e-12);
  }
  // far off resonance the mirror is a perfect reflector
  CHECK(std::norm(s_oo_reflection(p, p.omega_o + two_pi * 1e12)) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mode mismatch fills in the reflection dip") {
  TransducerParams p = P();
  std::complex<double> s = s_oo_reflection(p, p.omega_o);
  CHECK(power_reflection(s, 0.86) ==
        doctest::Approx(0.4313922922699935).epsilon(1e-12));
  CHECK(power_reflection(s, 1.0) == doctest::Approx(std::norm(s)));
  CHECK(power_reflection(s, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("intracavity photon number") {
  TransducerParams p = P();
  PumpConfig pump;
  pump.P_e = 1e-9;
  pump.Delta_e = -p.omega_m;  // pump below resonance by omega_m
  CHECK(mean_photon_number(pump, p, Mode::microwave) ==
        doctest::Approx(1.5465388856293619e7).epsilon(1e-9));
  // optical pump couples through eps_pc: scaling check
  PumpConfig po;
  po.P_o = 1e-6;
  po.Delta_o = p.omega_m;
  double n1 = mean_photon_number(po, p, Mode::optical);
  TransducerParams q = p;
  q.eps_pc = p.eps_pc / 2.0;
  CHECK(mean_photon_number(po, q, Mode::optical) == doctest::Approx(n1 / 2.0));
  // linear in power
  po.P_o = 2e-6;
  CHECK(mean_photon_number(po, p, Mode::optical) == doctest::Approx(2.0 * n1));
  pump.P_e = -1.0;
  CHECK_THROWS_AS(mean_photon_number(pump, p, Mode::microwave), std::invalid_argument);
}

TEST_CASE("circulating power, lock beam only") {
  TransducerParams p = P();
  PumpConfig pump;  // no science pump
  CHECK(circulating_power(p, pump) ==
        doctest::Approx(2.0789973902271168e-4).epsilon(1e-9));
  // adding pump power adds circulating power
  pump.P_o = 1e-6;
  pump.Delta_o = -p.omega_m;
  CHECK(circulating_power(p, pump) > 2.07e-4);
}
