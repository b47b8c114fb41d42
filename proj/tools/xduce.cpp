// Command-line front end for the transducer model library: predictions,
// sweeps, synthetic spectra, fits, transfer-matrix runs, and the four-point
// efficiency calibration.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "xduce/constants.hpp"
#include "xduce/cooling.hpp"
#include "xduce/csv.hpp"
#include "xduce/inference.hpp"
#include "xduce/params.hpp"
#include "xduce/response.hpp"
#include "xduce/synth.hpp"
#include "xduce/technoise.hpp"
#include "xduce/tmm.hpp"
#include "xduce/transduction.hpp"

using nlohmann::json;
using namespace xduce;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Global {
  std::string config;          // config file path; empty -> preset
  std::string preset = "fig2";
  uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  bool all_converged = true;   // exit status: 0 iff every fit converged
};

Global g;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

TransducerParams load_config() {
  if (!g.config.empty()) return load_params_file(g.config);
  if (g.preset == "fig2") return table1_preset(DatasetTag::fig2);
  if (g.preset == "fig3") return table1_preset(DatasetTag::fig3);
  throw std::invalid_argument("unknown preset '" + g.preset + "' (fig2|fig3)");
}

std::vector<std::string> manifest(const std::string& command) {
  return {
      "command: " + command,
      "config: " + (g.config.empty() ? "preset:" + g.preset : g.config),
      "seed: " + std::to_string(g.seed),
      "version: " + std::string(kVersion),
      "timestamp: " + timestamp_utc(),
  };
}

// Tables go to --out (or stdout) as CSV or JSON lines.
void emit_table(const std::string& command, const std::vector<std::string>& extra,
                const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  std::vector<std::string> man = manifest(command);
  man.insert(man.end(), extra.begin(), extra.end());
  std::string text;
  if (g.format == "csv") {
    text = format_csv(man, header, rows);
  } else if (g.format == "json-lines") {
    std::string out;
    json m;
    for (auto& line : man) {
      size_t c = line.find(':');
      m[line.substr(0, c)] = line.substr(line.find_first_not_of(' ', c + 1));
    }
    out += m.dump() + "\n";
    for (auto& r : rows) {
      json o;
      for (size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
      out += o.dump() + "\n";
    }
    text = out;
  } else {
    throw std::invalid_argument("unknown format '" + g.format + "' (csv|json-lines)");
  }
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(g.out);
    if (!f) throw std::invalid_argument("cannot write '" + g.out + "'");
    f << text;
  }
}

// Fit reports are structured documents mirroring FitResult, always JSON.
void emit_report(const std::string& command, const FitResult& fit,
                 const json& extra = json::object()) {
  if (!fit.converged) g.all_converged = false;
  for (size_t i = 0; i < fit.names.size(); ++i)
    std::printf("%-12s = %.10g +- %.3g\n", fit.names[i].c_str(),
                fit.estimate[(int)i], fit.sigma[(int)i]);
  std::printf("converged    = %s\n", fit.converged ? "yes" : "no");
  std::printf("iterations   = %d\n", fit.iterations);
  std::printf("residual_sum = %.10g  (dof %d)\n", fit.residual_sum, fit.dof);
  for (auto& [k, v] : extra.items())
    std::printf("%-12s = %s\n", k.c_str(), v.dump().c_str());

  if (g.out.empty()) return;
  json doc;
  for (auto& m : manifest(command)) {
    size_t c = m.find(':');
    doc["manifest"][m.substr(0, c)] = m.substr(m.find_first_not_of(' ', c + 1));
  }
  doc["names"] = fit.names;
  for (int i = 0; i < fit.estimate.size(); ++i) {
    doc["estimate"].push_back(fit.estimate[i]);
    doc["sigma"].push_back(fit.sigma[i]);
  }
  for (int i = 0; i < fit.covariance.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < fit.covariance.cols(); ++j) row.push_back(fit.covariance(i, j));
    doc["covariance"].push_back(row);
  }
  doc["residual_sum"] = fit.residual_sum;
  doc["dof"] = fit.dof;
  doc["converged"] = fit.converged;
  doc["iterations"] = fit.iterations;
  if (!extra.empty()) doc["derived"] = extra;
  std::ofstream f(g.out);
  if (!f) throw std::invalid_argument("cannot write '" + g.out + "'");
  f << doc.dump(2) << "\n";
}

int thread_budget() {
  if (const char* env = std::getenv("XDUCE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? (int)hw : 1;
}

// One prediction row shared by `predict` and `sweep`.
const std::vector<std::string> kPredictHeader = {
    "gamma_e_hz",    "gamma_o_hz",     "eta_t",          "eta_up",
    "eta_down",      "eta_matched",    "zeta_t",         "bandwidth_hz",
    "n_m",           "n_add_up_ideal", "n_add_up",       "n_add_down_ideal",
    "budget_n_th",   "budget_n_eff_e", "budget_n_min_e", "budget_n_min_o",
    "budget_n_eff_o", "budget_lock",   "budget_white"};

std::vector<double> predict_row(const TransducerParams& p, double Ge, double Go) {
  using constants::two_pi;
  OperatingPoint op = make_operating_point(p, Ge, Go);
  EfficiencyReport eff = efficiency(p, op);
  double n_m = membrane_occupancy(p, op);
  std::vector<double> r = {Ge / two_pi,
                           Go / two_pi,
                           eff.eta_bidirectional,
                           eff.eta_up,
                           eff.eta_down,
                           eff.eta_matched,
                           eff.zeta_t,
                           eff.bandwidth / two_pi,
                           n_m};
  if (Ge > 0 && Go > 0) {
    TechDensities C = densities_from_a_o(p, Go);
    NoiseBudget b = added_noise_budget(p, op, C);
    r.insert(r.end(), {added_noise_ideal(p, op, Direction::up), b.total,
                       added_noise_ideal(p, op, Direction::down), b.n_th, b.n_eff_e,
                       b.n_min_e, b.n_min_o, b.n_eff_o, b.lock, b.white});
  } else {
    r.insert(r.end(), 10, kNaN);
  }
  return r;
}

std::vector<SpectrumPoint> read_spectrum(const std::string& path) {
  using constants::two_pi;
  CsvTable t = read_csv(path);
  std::vector<double> det = t.col("detuning_hz");
  std::vector<double> psd =
      t.has("psd") ? t.col("psd") : t.col("psd_photons_per_s_per_hz");
  std::vector<double> sig;
  if (t.has("sigma")) {
    sig = t.col("sigma");
  } else {
    std::cerr << "warning: no sigma column in '" << path << "', using uniform weights\n";
    sig.assign(det.size(), 1.0);
  }
  std::vector<SpectrumPoint> pts(det.size());
  for (size_t i = 0; i < det.size(); ++i)
    pts[i] = {det[i] * two_pi, psd[i], sig[i]};
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  using constants::two_pi;
  CLI::App app{"Membrane electro-optomechanical transducer model"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", g.config, "parameter file (JSON)");
  app.add_option("--preset", g.preset, "bundled parameter set: fig2|fig3")
      ->check(CLI::IsMember({"fig2", "fig3"}));
  app.add_option("--seed", g.seed, "RNG seed for synthesis");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "table format: csv|json-lines")
      ->check(CLI::IsMember({"csv", "json-lines"}));

  // ---- predict ----
  double ge_hz = 0, go_hz = 0;
  auto* predict = app.add_subcommand("predict", "single-point efficiency and noise report");
  predict->add_option("--gamma-e-hz", ge_hz, "electromechanical damping / 2pi")->required();
  predict->add_option("--gamma-o-hz", go_hz, "optomechanical damping / 2pi")->required();
  predict->callback([&] {
    TransducerParams p = load_config();
    std::vector<double> r = predict_row(p, ge_hz * two_pi, go_hz * two_pi);
    for (size_t i = 0; i < kPredictHeader.size(); ++i)
      std::printf("%-16s = %.10g\n", kPredictHeader[i].c_str(), r[i]);
    if (!g.out.empty()) emit_table("predict", {}, kPredictHeader, {r});
  });

  // ---- sweep ----
  std::string sw_var, sw_scale = "lin";
  double sw_min = 0, sw_max = 0, sw_fixed = 0;
  int sw_points = 0;
  auto* sweepc = app.add_subcommand("sweep", "prediction rows over a damping-rate grid");
  sweepc->add_option("--var", sw_var, "swept variable: gamma_e|gamma_o")
      ->required()
      ->check(CLI::IsMember({"gamma_e", "gamma_o"}));
  sweepc->add_option("--min-hz", sw_min)->required();
  sweepc->add_option("--max-hz", sw_max)->required();
  sweepc->add_option("--points", sw_points)->required()->check(CLI::PositiveNumber);
  sweepc->add_option("--scale", sw_scale)->check(CLI::IsMember({"lin", "log"}));
  sweepc->add_option("--fixed-hz", sw_fixed, "value of the other damping rate")->required();
  sweepc->callback([&] {
    TransducerParams p = load_config();
    if (sw_max < sw_min) throw std::invalid_argument("sweep: max < min");
    if (sw_scale == "log" && sw_min <= 0)
      throw std::invalid_argument("sweep: log scale needs min > 0");
    std::vector<double> grid(sw_points);
    for (int i = 0; i < sw_points; ++i) {
      double f = sw_points == 1 ? 0.0 : (double)i / (sw_points - 1);
      grid[i] = sw_scale == "log"
                    ? sw_min * std::pow(sw_max / sw_min, f)
                    : sw_min + (sw_max - sw_min) * f;
    }
    std::vector<std::vector<double>> rows(sw_points);
    int nthreads = std::min(thread_budget(), sw_points);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (int i = next++; i < sw_points; i = next++) {
          double Ge = sw_var == "gamma_e" ? grid[i] * two_pi : sw_fixed * two_pi;
          double Go = sw_var == "gamma_o" ? grid[i] * two_pi : sw_fixed * two_pi;
          rows[i] = predict_row(p, Ge, Go);
        }
      });
    for (auto& th : pool) th.join();
    emit_table("sweep", {"axis: " + sw_var + " " + sw_scale}, kPredictHeader, rows);
  });

  // ---- synth ----
  double sy_ge = 0, sy_go = 0, sy_span = 0;
  int sy_points = 401, sy_m = 1;
  uint64_t sy_stream = 0;
  std::string sy_side = "upper";
  bool sy_transducer = false;
  double sub_off = 0, sub_amp = 0, sub_phase = 0, sub_width = 0;
  auto* synth = app.add_subcommand("synth", "synthetic averaged heterodyne spectrum");
  synth->add_option("--gamma-e-hz", sy_ge)->required();
  synth->add_option("--gamma-o-hz", sy_go)->required();
  synth->add_option("--side", sy_side)->check(CLI::IsMember({"upper", "lower"}));
  synth->add_option("--span-hz", sy_span, "grid full span (default 20 linewidths)");
  synth->add_option("--points", sy_points)->check(CLI::PositiveNumber);
  synth->add_option("--m", sy_m, "periodogram averaging count")->check(CLI::PositiveNumber);
  synth->add_option("--stream", sy_stream, "RNG stream id");
  synth->add_flag("--transducer-normalized", sy_transducer,
                  "skip the detection-chain map");
  synth->add_option("--substrate-offset-hz", sub_off, "nearby substrate mode offset");
  synth->add_option("--substrate-amp", sub_amp);
  synth->add_option("--substrate-phase", sub_phase);
  synth->add_option("--substrate-width-hz", sub_width);
  synth->callback([&] {
    TransducerParams p = load_config();
    OperatingPoint op = make_operating_point(p, sy_ge * two_pi, sy_go * two_pi);
    double span = sy_span > 0 ? sy_span * two_pi : 20.0 * op.Gamma_T;
    std::vector<double> grid(sy_points);
    for (int i = 0; i < sy_points; ++i)
      grid[i] = -span / 2.0 + span * (sy_points == 1 ? 0.5 : (double)i / (sy_points - 1));
    TechDensities C = densities_from_a_o(p, op.Gamma_o);
    SidebandSpectrum base = sideband_spectrum(
        p, op, C, sy_side == "upper" ? Side::upper : Side::lower, grid);
    if (sub_amp != 0.0)
      base = add_substrate_mode(base, {sub_off * two_pi, sub_amp, sub_phase,
                                       sub_width * two_pi});
    if (!sy_transducer) base = to_detector(base, p.chain.xi_o);
    std::vector<double> psd = realize({base, sy_m, g.seed, sy_stream});
    std::vector<std::vector<double>> rows(sy_points);
    for (int i = 0; i < sy_points; ++i)
      rows[i] = {grid[i] / two_pi, psd[i]};
    emit_table("synth",
               {"side: " + sy_side, "M: " + std::to_string(sy_m),
                "stream: " + std::to_string(sy_stream),
                std::string("normalization: ") +
                    (sy_transducer ? "transducer_output" : "detector_input"),
                "gamma_t_hz: " + num(op.Gamma_T / two_pi)},
               {"detuning_hz", "psd_photons_per_s_per_hz"}, rows);
  });

  // ---- fit-spectrum ----
  std::string fs_in, fs_model = "single";
  bool fs_antisym = false;
  auto* fspec = app.add_subcommand("fit-spectrum", "Lorentzian peak + floor fit");
  fspec->add_option("--in", fs_in, "spectrum CSV (detuning_hz, psd[, sigma])")->required();
  fspec->add_option("--model", fs_model)->check(CLI::IsMember({"single", "double"}));
  fspec->add_flag("--antisym", fs_antisym, "include an antisymmetric component");
  fspec->callback([&] {
    std::vector<SpectrumPoint> pts = read_spectrum(fs_in);
    FitResult fit = fit_lorentzian(
        pts, fs_model == "single" ? LorentzModel::single : LorentzModel::coherent_double,
        fs_antisym);
    json extra;
    extra["center_hz"] = fit.get("center") / two_pi;
    extra["width_hz"] = fit.get("width") / two_pi;
    extra["area"] = fit.get("amplitude") * fit.get("width");  // N * Gamma_T (rad/s)
    emit_report("fit-spectrum", fit, extra);
  });

  // ---- fit-cooling ----
  std::string fc_in, fc_mode = "optical";
  auto* fcool = app.add_subcommand("fit-cooling", "occupancy vs damping-rate fit");
  fcool->add_option("--in", fc_in, "CSV (gamma_e_hz, gamma_o_hz, value, sigma)")->required();
  fcool->add_option("--mode", fc_mode)->check(CLI::IsMember({"optical", "electro"}));
  fcool->callback([&] {
    TransducerParams p = load_config();
    CsvTable t = read_csv(fc_in);
    std::vector<double> ge = t.col("gamma_e_hz"), go = t.col("gamma_o_hz"),
                        v = t.col("value");
    std::vector<double> sg =
        t.has("sigma") ? t.col("sigma") : std::vector<double>(v.size(), 1.0);
    if (!t.has("sigma"))
      std::cerr << "warning: no sigma column, using uniform weights\n";
    std::vector<CoolingCurvePoint> pts(v.size());
    for (size_t i = 0; i < v.size(); ++i)
      pts[i] = {ge[i] * two_pi, go[i] * two_pi, v[i], sg[i]};
    FitResult fit = fit_cooling_curve(
        pts, fc_mode == "optical" ? CoolingMode::optical_only : CoolingMode::electro_optical,
        p);
    emit_report("fit-cooling", fit);
  });

  // ---- fit-efficiency ----
  std::string fe_in, fe_mode = "eta";
  auto* feff = app.add_subcommand("fit-efficiency", "matched-efficiency fit");
  feff->add_option("--in", fe_in, "CSV (gamma_e_hz, gamma_o_hz, value, sigma)")->required();
  feff->add_option("--mode", fe_mode, "eta: fit eta_M; zeta: divide out kappa_e_ext/kappa_e")
      ->check(CLI::IsMember({"eta", "zeta"}));
  feff->callback([&] {
    TransducerParams p = load_config();
    CsvTable t = read_csv(fe_in);
    std::vector<double> ge = t.col("gamma_e_hz"), go = t.col("gamma_o_hz"),
                        v = t.col("value");
    std::vector<double> sg =
        t.has("sigma") ? t.col("sigma") : std::vector<double>(v.size(), 1.0);
    if (!t.has("sigma"))
      std::cerr << "warning: no sigma column, using uniform weights\n";
    std::vector<EfficiencyPoint> pts(v.size());
    for (size_t i = 0; i < v.size(); ++i)
      pts[i] = {ge[i] * two_pi, go[i] * two_pi, v[i], sg[i]};
    FitResult fit = fit_efficiency_curve(
        pts, fe_mode == "eta" ? EfficiencyFitMode::eta_m : EfficiencyFitMode::zeta_m, p);
    emit_report("fit-efficiency", fit);
  });

  // ---- fit-addednoise ----
  std::string fa_in;
  double fa_go = 0, fa_eval_ge = 0;
  auto* fadd = app.add_subcommand("fit-addednoise",
                                  "upper-sideband amplitude vs damping fit");
  fadd->add_option("--in", fa_in, "CSV (gamma_e_hz, value, sigma)")->required();
  fadd->add_option("--gamma-o-hz", fa_go, "fixed optomechanical damping / 2pi")->required();
  fadd->add_option("--eval-gamma-e-hz", fa_eval_ge,
                   "also report implied input-referred added noise here");
  fadd->callback([&] {
    TransducerParams p = load_config();
    CsvTable t = read_csv(fa_in);
    std::vector<double> ge = t.col("gamma_e_hz"), v = t.col("value");
    std::vector<double> sg =
        t.has("sigma") ? t.col("sigma") : std::vector<double>(v.size(), 1.0);
    if (!t.has("sigma"))
      std::cerr << "warning: no sigma column, using uniform weights\n";
    std::vector<AddedNoisePoint> pts(v.size());
    for (size_t i = 0; i < v.size(); ++i) pts[i] = {ge[i] * two_pi, v[i], sg[i]};
    FitResult fit = fit_added_noise_curve(pts, fa_go * two_pi, p);
    json extra;
    if (fa_eval_ge > 0)
      extra["n_add_up"] =
          added_noise_from_fit(fit, fa_eval_ge * two_pi, fa_go * two_pi, p);
    emit_report("fit-addednoise", fit, extra);
  });

  // ---- fit-tempsweep ----
  std::string ft_in;
  double ft_ge = 0, ft_go = 0, ft_ag = -1, ft_bg = -1;
  std::vector<int> ft_excl;
  auto* ftemp = app.add_subcommand("fit-tempsweep",
                                   "sideband area vs base temperature calibration");
  ftemp->add_option("--in", ft_in, "CSV (t_k, area[, sigma][, gamma_t_hz])")->required();
  ftemp->add_option("--gamma-e-hz", ft_ge)->required();
  ftemp->add_option("--gamma-o-hz", ft_go)->required();
  ftemp->add_option("--a-gamma-hz", ft_ag, "gamma_m(T) slope / 2pi (Hz/K); fit from data if omitted");
  ftemp->add_option("--b-gamma-hz", ft_bg, "gamma_m(T) intercept / 2pi (Hz)");
  ftemp->add_option("--exclude", ft_excl, "0-based point indices to exclude");
  ftemp->callback([&] {
    TransducerParams p = load_config();
    CsvTable t = read_csv(ft_in);
    std::vector<double> T = t.col("t_k"), area = t.col("area");
    std::vector<double> sg =
        t.has("sigma") ? t.col("sigma") : std::vector<double>(T.size(), 1.0);
    if (!t.has("sigma"))
      std::cerr << "warning: no sigma column, using uniform weights\n";
    double ag = ft_ag * two_pi, bg = ft_bg * two_pi;
    json extra;
    if (ft_ag < 0 || ft_bg < 0) {
      if (!t.has("gamma_t_hz"))
        throw std::invalid_argument(
            "fit-tempsweep: pass --a-gamma-hz/--b-gamma-hz or include a gamma_t_hz column");
      std::vector<double> gm = t.col("gamma_t_hz");
      std::vector<GammaTempPoint> gp(T.size());
      for (size_t i = 0; i < T.size(); ++i) gp[i] = {T[i], gm[i] * two_pi, 1.0};
      FitResult lf = fit_gamma_vs_temperature(gp);
      if (!lf.converged) g.all_converged = false;
      ag = lf.get("a_gamma");
      bg = lf.get("b_gamma");
      extra["a_gamma_hz"] = ag / two_pi;
      extra["b_gamma_hz"] = bg / two_pi;
    }
    std::vector<TemperaturePoint> pts(T.size());
    for (size_t i = 0; i < T.size(); ++i) pts[i] = {T[i], area[i], sg[i]};
    OperatingPoint op = make_operating_point(p, ft_ge * two_pi, ft_go * two_pi);
    TempSweepResult r = fit_temperature_sweep(pts, ag, bg, ft_excl, p, op);
    extra["xi_from_a"] = r.xi_from_a;
    extra["xi_from_b"] = r.xi_from_b;
    extra["t_eq_k"] = r.T_eq;
    emit_report("fit-tempsweep", r.fit, extra);
  });

  // ---- fit-ringdown ----
  std::string fr_in;
  auto* fring = app.add_subcommand("fit-ringdown", "mechanical damping from ringdowns");
  fring->add_option("--in", fr_in, "CSV (t_s, amp, p_e_w); traces grouped by p_e_w")
      ->required();
  fring->callback([&] {
    TransducerParams p = load_config();
    CsvTable t = read_csv(fr_in);
    std::vector<double> ts = t.col("t_s"), amp = t.col("amp");
    std::vector<double> pe =
        t.has("p_e_w") ? t.col("p_e_w") : std::vector<double>(ts.size(), 0.0);
    std::vector<RingdownTrace> traces;
    for (size_t i = 0; i < ts.size(); ++i) {
      if (traces.empty() || traces.back().P_e != pe[i])
        traces.push_back({pe[i], {}, {}});
      traces.back().t.push_back(ts[i]);
      traces.back().amplitude.push_back(amp[i]);
    }
    RingdownResult r = fit_ringdown(traces, p);
    for (size_t i = 0; i < traces.size(); ++i)
      std::printf("trace %zu: P_e = %.4g W, Gamma_T/2pi = %.10g Hz\n", i,
                  traces[i].P_e, r.Gamma_T[i] / two_pi);
    std::printf("gamma_m_hz   = %.10g +- %.3g\n", r.gamma_m / two_pi,
                r.gamma_m_sigma / two_pi);
    std::printf("slope        = %.10g (rad/s)/W\n", r.slope);
    std::printf("g_e_hz       = %.10g\n", r.g_e / two_pi);
    if (!g.out.empty()) {
      std::vector<std::vector<double>> rows;
      for (size_t i = 0; i < traces.size(); ++i)
        rows.push_back({traces[i].P_e, r.Gamma_T[i] / two_pi});
      emit_table("fit-ringdown",
                 {"gamma_m_hz: " + num(r.gamma_m / two_pi),
                  "gamma_m_sigma_hz: " + num(r.gamma_m_sigma / two_pi),
                  "g_e_hz: " + num(r.g_e / two_pi)},
                 {"p_e_w", "gamma_t_hz"}, rows);
    }
  });

  // ---- tmm ----
  std::string tm_stack;
  double tm_min = 0, tm_max = 0, tm_lambda = 0;
  int tm_points = 201;
  auto* tmmc = app.add_subcommand("tmm", "transfer-matrix cavity sweep / analysis");
  tmmc->add_option("--stack", tm_stack, "layer-stack JSON (default bundled geometry)");
  tmmc->add_option("--lambda-min-nm", tm_min);
  tmmc->add_option("--lambda-max-nm", tm_max);
  tmmc->add_option("--points", tm_points)->check(CLI::PositiveNumber);
  tmmc->add_option("--analyze-nm", tm_lambda,
                   "analyze a single re-locked resonance instead of sweeping");
  tmmc->callback([&] {
    TransducerParams p = load_config();
    LayerStack s = tm_stack.empty()
                       ? default_stack(p.cavity_length, p.membrane_gap)
                       : load_stack_file(tm_stack);
    constexpr double x_fm = 1e-15;  // report G_o per femtometre of motion
    if (tm_lambda > 0) {
      double lam = tm_lambda * 1e-9;
      ResonanceAnalysis a = analyze_resonance(s, lam, lock_offset_for(s, lam));
      std::printf("lambda_nm    = %.10g\n", a.lambda * 1e9);
      std::printf("Go_hz_per_fm = %.10g\n", a.G_o / two_pi * x_fm);
      std::printf("kappa_hz     = %.10g\n", a.kappa_total / two_pi);
      std::printf("kext_hz      = %.10g\n", a.kappa_ext / two_pi);
      std::printf("kback_hz     = %.10g\n", a.kappa_back / two_pi);
      if (!g.out.empty())
        emit_table("tmm", {},
                   {"wavelength_nm", "Go_hz_per_fm", "kappa_hz", "kext_hz", "kback_hz"},
                   {{a.lambda * 1e9, a.G_o / two_pi * x_fm, a.kappa_total / two_pi,
                     a.kappa_ext / two_pi, a.kappa_back / two_pi}});
      return;
    }
    if (tm_min <= 0 || tm_max <= tm_min)
      throw std::invalid_argument("tmm: need --lambda-min-nm < --lambda-max-nm");
    TmmSweepResult r = sweep(s, tm_min * 1e-9, tm_max * 1e-9, tm_points);
    std::vector<std::string> extra;
    std::string res = "resonant_wavelengths_nm:";
    for (double w : r.resonant_wavelengths) res += " " + num(w * 1e9);
    extra.push_back(res);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < r.wavelength.size(); ++i) {
      const ResonanceAnalysis& a = r.at[i];
      rows.push_back({r.wavelength[i] * 1e9, std::abs(a.G_o) / two_pi * x_fm,
                      a.kappa_total / two_pi, a.kappa_ext / two_pi,
                      a.kappa_back / two_pi});
    }
    emit_table("tmm", extra,
               {"wavelength_nm", "Go_hz_per_fm", "kappa_hz", "kext_hz", "kback_hz"},
               rows);
  });

  // ---- effcal ----
  FourPointMeasurement fp;
  double ec_ge = 0, ec_go = 0, ec_gain = 0;
  auto* effcal = app.add_subcommand("effcal", "four-point efficiency calibration");
  effcal->add_option("--s-oe", fp.s_oe, "on-resonance up-conversion power product")->required();
  effcal->add_option("--s-eo", fp.s_eo, "on-resonance down-conversion power product")->required();
  effcal->add_option("--s-ee-off", fp.s_ee_off, "off-resonance microwave reflection")->required();
  effcal->add_option("--s-oo-off", fp.s_oo_off, "off-resonance optical reflection")->required();
  effcal->add_option("--gamma-e-hz", ec_ge, "damping for the A_e A_o gain product");
  effcal->add_option("--gamma-o-hz", ec_go);
  effcal->add_option("--gain-product", ec_gain, "A_e*A_o directly (overrides damping rates)");
  effcal->callback([&] {
    TransducerParams p = load_config();
    double gain = ec_gain;
    if (gain <= 0) {
      if (ec_ge <= 0 || ec_go <= 0)
        throw std::invalid_argument(
            "effcal: pass --gain-product or both --gamma-e-hz/--gamma-o-hz");
      OperatingPoint op = make_operating_point(p, ec_ge * two_pi, ec_go * two_pi);
      gain = op.A_e * op.A_o;
    }
    double eta = efficiency_four_point(fp, p.eps_pl, gain);
    std::printf("eta_t        = %.10g\n", eta);
    std::printf("gain_product = %.10g\n", gain);
    if (!g.out.empty())
      emit_table("effcal", {}, {"eta_t", "gain_product"}, {{eta, gain}});
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return g.all_converged ? 0 : 1;
}
