#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "xduce/cooling.hpp"
#include "xduce/params.hpp"
#include "xduce/technoise.hpp"
#include "xduce/transduction.hpp"

using namespace xduce;
using constants::two_pi;

static TransducerParams P2() { return table1_preset(DatasetTag::fig2); }
static TransducerParams P3() { return table1_preset(DatasetTag::fig3); }

TEST_CASE("microwave effective occupancy is affine in the damping rate") {
  TransducerParams p = P2();
  CHECK(n_eff_microwave(p, two_pi * 100.0) == doctest::Approx(0.768247).epsilon(1e-4));
  CHECK(n_eff_microwave(p, 0.0) == doctest::Approx(0.077));
  TransducerParams q = P3();
  CHECK(n_eff_microwave(q, two_pi * 135.0) ==
        doctest::Approx(1.17e-3 * two_pi * 135.0 + 0.1).epsilon(1e-12));
  CHECK_THROWS_AS(n_eff_microwave(p, -1.0), std::invalid_argument);
}

TEST_CASE("optical effective occupancy from phase noise") {
  TransducerParams p = P2();
  TechDensities C;
  C.c_yy = 1.0;
  CHECK(n_eff_optical(p, C, -p.omega_m) ==
        doctest::Approx(0.09179061719738398).epsilon(1e-10));
  // linear in the density
  C.c_yy = 273.7;
  CHECK(n_eff_optical(p, C, -p.omega_m) ==
        doctest::Approx(273.7 * 0.09179061719738398).epsilon(1e-10));
  // amplitude and phase quadratures couple differently
  TechDensities Cx;
  Cx.c_xx = 1.0;
  CHECK(n_eff_optical(p, Cx, -p.omega_m) != doctest::Approx(0.09179061719738398));
  // invalid correlation rejected
  TechDensities bad;
  bad.c_xx = 1.0;
  bad.c_yy = 1.0;
  bad.c_xy = 1.5;
  CHECK_THROWS_AS(n_eff_optical(p, bad, -p.omega_m), std::invalid_argument);
}

TEST_CASE("densities_from_a_o reproduces the bundled slope") {
  TransducerParams p = P2();
  double Go = two_pi * 300.0;
  TechDensities C = densities_from_a_o(p, Go);
  CHECK(C.c_xx == 0.0);
  CHECK(n_eff_optical(p, C, -p.omega_m) ==
        doctest::Approx(p.tech_noise.a_o * Go).epsilon(1e-10));
}

TEST_CASE("white floors: phase noise leaks asymmetrically around the sidebands") {
  TransducerParams p = P2();
  TechDensities C;
  C.c_yy = 1.0;
  double up = white_floor(p, C, +1, -p.omega_m);
  double lo = white_floor(p, C, -1, -p.omega_m);
  CHECK(up == doctest::Approx(0.26430217715998966).epsilon(1e-10));
  CHECK(lo == doctest::Approx(0.04644920364793313).epsilon(1e-10));
  CHECK(up > lo);  // the upper sideband rides on the brighter noise pedestal
  CHECK(white_floor(p, TechDensities{}, +1, -p.omega_m) == doctest::Approx(0.0));
}

TEST_CASE("sideband spectra: ideal limits and asymmetry") {
  TransducerParams p = P2();
  OperatingPoint op = make_operating_point(p, two_pi * 100.0, two_pi * 300.0);
  std::vector<double> grid;
  for (int i = -50; i <= 50; ++i) grid.push_back(i * op.Gamma_T / 10.0);
  TechDensities C0;  // no technical noise
  SidebandSpectrum su = sideband_spectrum(p, op, C0, Side::upper, grid);
  SidebandSpectrum sl = sideband_spectrum(p, op, C0, Side::lower, grid);
  double n_m = membrane_occupancy(p, op);
  // floors at exactly shot noise, no antisymmetric part
  CHECK(su.floor == doctest::Approx(1.0));
  CHECK(su.antisym == doctest::Approx(0.0));
  // peak ratio encodes the occupancy (sideband asymmetry)
  double K = p.eps_cl * (p.kappa_o_ext / p.kappa_o()) * op.A_o;
  CHECK(su.N_out ==
        doctest::Approx(4.0 * K * (op.Gamma_o / op.Gamma_T) * n_m).epsilon(1e-12));
  CHECK(sl.N_out / su.N_out ==
        doctest::Approx((op.n_min_o / op.A_o) * (n_m + 1.0) / n_m).epsilon(1e-12));
  // model evaluates to floor + Lorentzian on the grid
  CHECK(su.psd[50] == doctest::Approx(su.floor + su.N_out).epsilon(1e-12));
  CHECK(su.model(op.Gamma_T / 2.0) ==
        doctest::Approx(su.floor + su.N_out / 2.0).epsilon(1e-12));

  // with phase noise at the optimal detuning the antisymmetric part is small
  TechDensities C = densities_from_a_o(p, op.Gamma_o);
  SidebandSpectrum su_n = sideband_spectrum(p, op, C, Side::upper, grid);
  CHECK(std::abs(su_n.antisym) < 0.01 * su_n.N_out);
  CHECK(su_n.floor > 1.0);
  // squashing reduces the upper peak relative to the noise-free case
  CHECK(su_n.N_out < su.N_out);
}

TEST_CASE("added noise budget partitions exactly") {
  TransducerParams p = P3();
  OperatingPoint op = make_operating_point(p, two_pi * 135.0, two_pi * 85.0);
  TechDensities C = densities_from_a_o(p, op.Gamma_o);
  NoiseBudget b = added_noise_budget(p, op, C);
  double sum =
      b.n_th + b.n_eff_e + b.n_min_e + b.n_min_o + b.n_eff_o + b.lock + b.white;
  CHECK(b.total == doctest::Approx(sum).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(3.0).epsilon(0.1));
  // every term non-negative
  for (double v : {b.n_th, b.n_eff_e, b.n_min_e, b.n_min_o, b.n_eff_o, b.lock, b.white})
    CHECK(v >= 0.0);
}

TEST_CASE("zero technical coefficients collapse to the ideal added noise") {
  TransducerParams p = P3();
  p.tech_noise.a_o = 0.0;
  p.tech_noise.a_e = 0.0;
  p.tech_noise.b_e = 0.0;
  OperatingPoint op = make_operating_point(p, two_pi * 135.0, two_pi * 85.0);
  TechDensities C0;
  CHECK(added_noise_full(p, op, C0) ==
        doctest::Approx(added_noise_ideal(p, op, Direction::up)).epsilon(1e-12));
}

TEST_CASE("dBc conversions invert each other") {
  double flux = 5.448340002046432e15;  // 1 mW of 277 THz photons
  double c = density_from_dbc(-136.0, flux);
  CHECK(c == doctest::Approx(273.7122265078265).epsilon(1e-10));
  CHECK(dbc_from_density(c, flux) == doctest::Approx(-136.0).epsilon(1e-12));
  TechDensities C = make_densities(-155.0, -136.0, flux,
                                   CorrelationMode::max_positive_correlation);
  CHECK(C.c_xy == doctest::Approx(std::sqrt(C.c_xx * C.c_yy)).epsilon(1e-12));
  C.validate();
  CHECK_THROWS_AS(make_densities(0, 0, flux, CorrelationMode::explicit_densities),
                  std::invalid_argument);
}
