#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "xduce/constants.hpp"
#include "xduce/params.hpp"

using namespace xduce;
using constants::two_pi;

TEST_CASE("bundled presets validate and expose the quoted rates") {
  for (DatasetTag tag : {DatasetTag::fig2, DatasetTag::fig3}) {
    TransducerParams p = table1_preset(tag);
    CHECK(p.omega_m == doctest::Approx(two_pi * 1.451e6));
    CHECK(p.kappa_o() == doctest::Approx(two_pi * 2.68e6));
    CHECK(p.kappa_o_ext == doctest::Approx(two_pi * 2.12e6));
    CHECK(p.kappa_e_ext == doctest::Approx(two_pi * 1.42e6));
    CHECK(p.gamma_m == doctest::Approx(two_pi * 0.113));
    CHECK(p.g_o == doctest::Approx(two_pi * 60.0));
    CHECK(p.g_e == doctest::Approx(two_pi * 1.6));
    // linewidth table spans the measured 1.64 - 2.31 MHz range
    CHECK(p.kappa_e_min() == doctest::Approx(two_pi * 1.64e6));
    CHECK(p.kappa_e_at_power(1e12) == doctest::Approx(two_pi * 2.31e6));
    CHECK(p.lock.backaction_product() == doctest::Approx(two_pi * 40.0));
  }
  CHECK(table1_preset(DatasetTag::fig2).tech_noise.a_e == doctest::Approx(1.1e-3));
  CHECK(table1_preset(DatasetTag::fig3).tech_noise.a_e == doctest::Approx(1.17e-3));
  CHECK(table1_preset(DatasetTag::fig2).lock.gamma_lock == doctest::Approx(two_pi * 5.0));
  CHECK(table1_preset(DatasetTag::fig3).lock.gamma_lock == doctest::Approx(two_pi * 2.0));
}

TEST_CASE("kappa_e_at_power interpolates and clamps") {
  TransducerParams p = table1_preset(DatasetTag::fig2);
  // below the first table entry: clamp to the front
  CHECK(p.kappa_e_at_power(0.0) == doctest::Approx(p.kappa_e_min()));
  // monotone along the table
  double prev = 0.0;
  for (double n = 1e6; n < 2e8; n *= 1.3) {
    double k = p.kappa_e_at_power(n);
    CHECK(k >= prev);
    prev = k;
  }
  // exact at a table node
  auto node = p.kappa_e_int_table[3];
  CHECK(p.kappa_e_at_power(node.first) ==
        doctest::Approx(p.kappa_e_ext + node.second));
}

TEST_CASE("serialize/load round trip is exact") {
  TransducerParams p = table1_preset(DatasetTag::fig3);
  p.tech_noise.c_yy = 273.7;
  TransducerParams q = load_params(serialize_params(p));
  CHECK(q.omega_o == doctest::Approx(p.omega_o).epsilon(1e-15));
  CHECK(q.kappa_o_int == doctest::Approx(p.kappa_o_int).epsilon(1e-15));
  CHECK(q.g_e == doctest::Approx(p.g_e).epsilon(1e-15));
  CHECK(q.tech_noise.c_yy == doctest::Approx(273.7).epsilon(1e-15));
  CHECK(q.lock.backaction_product() ==
        doctest::Approx(p.lock.backaction_product()).epsilon(1e-15));
  CHECK(q.kappa_e_int_table.size() == p.kappa_e_int_table.size());
  CHECK(q.chain.xi_o == doctest::Approx(p.chain.xi_o).epsilon(1e-15));
  CHECK(q.eps_lock == doctest::Approx(p.eps_lock).epsilon(1e-15));
}

TEST_CASE("unknown keys are rejected by name") {
  std::string good = serialize_params(table1_preset(DatasetTag::fig2));
  CHECK_NOTHROW(load_params(good));
  std::string bad = good;
  bad.insert(bad.find("\"n_th\""), "\"kapa_o_ext_hz\": 1.0, ");
  CHECK_THROWS_WITH_AS(load_params(bad),
                       doctest::Contains("kapa_o_ext_hz"), std::invalid_argument);
}

TEST_CASE("schema version is mandatory") {
  CHECK_THROWS_AS(load_params("{\"omega_m_hz\": 1.0}"), std::invalid_argument);
  CHECK_THROWS_AS(load_params("not json"), std::invalid_argument);
}

TEST_CASE("validate names violated invariants") {
  TransducerParams p = table1_preset(DatasetTag::fig2);
  p.eps_pc = 1.5;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("modematchings"),
                       std::invalid_argument);
  p = table1_preset(DatasetTag::fig2);
  p.tech_noise.c_xx = 1.0;
  p.tech_noise.c_yy = 1.0;
  p.tech_noise.c_xy = 2.0;  // violates the Cauchy-Schwarz bound
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = table1_preset(DatasetTag::fig2);
  p.kappa_e_int_table.clear();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("xi_e consistent with the HEMT bound") {
  // 1/(N_HEMT + 1/2) = 1/9 > 0.029, so the preset round-trips
  std::string cfg = serialize_params(table1_preset(DatasetTag::fig2));
  CHECK_NOTHROW(load_params(cfg));
  TransducerParams p = table1_preset(DatasetTag::fig2);
  p.chain.xi_e = 0.5;  // exceeds the HEMT-limited bound
  CHECK_THROWS_AS(load_params(serialize_params(p)), std::invalid_argument);
}
