#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "xduce/cooling.hpp"
#include "xduce/params.hpp"
#include "xduce/rng.hpp"
#include "xduce/synth.hpp"

using namespace xduce;
using constants::two_pi;

static SidebandSpectrum flat_base(int n) {
  SidebandSpectrum s;
  s.Gamma_T = 1.0;
  s.floor = 1.0;
  s.N_out = 0.0;
  for (int i = 0; i < n; ++i) {
    s.delta.push_back(i);
    s.psd.push_back(1.0);
  }
  return s;
}

TEST_CASE("counter rng: determinism and stream independence") {
  CounterRng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) {
    double va = a.uniform();
    CHECK(va == b.uniform());
    CHECK(va > 0.0);
    CHECK(va < 1.0);
  }
  // different stream: decorrelated sequence
  CounterRng a2(42, 7);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a2.uniform() == c.uniform()) ++same;
  CHECK(same == 0);
}

TEST_CASE("periodogram deviate: unit mean, 1/M variance") {
  for (int M : {1, 4, 30, 100, 10000}) {
    double sum = 0, sum2 = 0;
    const int n = M >= 100 ? 4000 : 20000;
    for (int i = 0; i < n; ++i) {
      CounterRng r(11, (uint64_t)M << 32 | (uint64_t)i);
      double v = r.periodogram(M);
      CHECK(v >= 0.0);
      sum += v;
      sum2 += v * v;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(1.0).epsilon(4.0 / std::sqrt((double)n * M)+0.01));
    CHECK(var == doctest::Approx(1.0 / M).epsilon(0.15));
  }
}

TEST_CASE("realize: deterministic per (seed, stream), scales with base psd") {
  SidebandSpectrum base = flat_base(64);
  SynthConfig cfg{base, 100, 5, 1};
  std::vector<double> r1 = realize(cfg);
  std::vector<double> r2 = realize(cfg);
  CHECK(r1 == r2);
  cfg.seed = 6;
  CHECK(realize(cfg) != r1);
  cfg.seed = 5;
  cfg.stream = 2;
  CHECK(realize(cfg) != r1);
  // doubling the base doubles every bin of the same realization
  SynthConfig big = cfg;
  for (double& v : big.base.psd) v *= 2.0;
  std::vector<double> rb = realize(big);
  std::vector<double> rs = realize(cfg);
  for (size_t i = 0; i < rb.size(); ++i)
    CHECK(rb[i] == doctest::Approx(2.0 * rs[i]).epsilon(1e-14));
  SynthConfig bad = cfg;
  bad.M = 0;
  CHECK_THROWS_AS(realize(bad), std::invalid_argument);
}

TEST_CASE("averaging error shrinks as 1/sqrt(M)") {
  SidebandSpectrum base = flat_base(2000);
  auto rms_dev = [&](int M) {
    std::vector<double> r = realize({base, M, 3, 0});
    double s = 0;
    for (double v : r) s += (v - 1.0) * (v - 1.0);
    return std::sqrt(s / r.size());
  };
  double d100 = rms_dev(100);
  double d10000 = rms_dev(10000);
  CHECK(d100 / d10000 == doctest::Approx(10.0).epsilon(0.15));
}

TEST_CASE("detection chain map and its inverse") {
  TransducerParams p = table1_preset(DatasetTag::fig2);
  OperatingPoint op = make_operating_point(p, two_pi * 100.0, two_pi * 300.0);
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(i * op.Gamma_T / 8.0);
  TechDensities C = densities_from_a_o(p, op.Gamma_o);
  SidebandSpectrum s = sideband_spectrum(p, op, C, Side::upper, grid);
  double xi = p.chain.xi_o;
  SidebandSpectrum d = to_detector(s, xi);
  CHECK(d.norm == Normalization::detector_input);
  // affine map: far-from-peak floor pinned at (1 - xi) + xi * floor
  CHECK(d.floor == doctest::Approx((1.0 - xi) + xi * s.floor).epsilon(1e-12));
  CHECK(d.N_out == doctest::Approx(xi * s.N_out).epsilon(1e-12));
  SidebandSpectrum back = from_detector(d, xi);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(back.psd[i] == doctest::Approx(s.psd[i]).epsilon(1e-12));
  // double application rejected
  CHECK_THROWS_AS(to_detector(d, xi), std::invalid_argument);
  CHECK_THROWS_AS(from_detector(s, xi), std::invalid_argument);
  CHECK_THROWS_AS(to_detector(s, 1.5), std::invalid_argument);
}

TEST_CASE("substrate mode interferes coherently") {
  SidebandSpectrum s = flat_base(101);
  for (int i = 0; i <= 100; ++i) s.delta[i] = (i - 50) * 0.5;
  s.N_out = 4.0;
  s.Gamma_T = 2.0;
  for (int i = 0; i <= 100; ++i) s.psd[i] = s.model(s.delta[i]);
  // amplitude 0: unchanged
  SidebandSpectrum same = add_substrate_mode(s, {5.0, 0.0, 0.0, 1.0});
  CHECK(same.psd == s.psd);
  // far-detuned weak mode barely perturbs the main peak
  SidebandSpectrum far = add_substrate_mode(s, {20.0, 0.04, 1.0, 0.5});
  CHECK(far.psd[50] == doctest::Approx(s.psd[50]).epsilon(0.02));
  // in-phase co-located mode adds constructively: exceeds the power sum
  SidebandSpectrum on = add_substrate_mode(s, {0.0, 1.0, 0.0, 2.0});
  CHECK(on.psd[50] > s.psd[50] + 1.0);
  CHECK(on.psd[50] ==
        doctest::Approx(s.floor + std::pow(std::sqrt(4.0) + 1.0, 2)).epsilon(1e-12));
  CHECK_THROWS_AS(add_substrate_mode(s, {0.0, 1.0, 0.0, -1.0}), std::invalid_argument);
}
