#include "xduce/inference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "xduce/levmar.hpp"

namespace xduce {

namespace {

FitResult pack(const std::vector<std::string>& names, const LevMarResult& lm,
               int n_points) {
  FitResult r;
  r.names = names;
  r.estimate = lm.params;
  r.covariance = lm.covariance;
  r.sigma = lm.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  r.residual_sum = lm.residual_sum;
  r.dof = n_points - (int)names.size();
  r.converged = lm.converged;
  r.iterations = lm.iterations;
  return r;
}

}  // namespace

double FitResult::get(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return estimate[(int)i];
  throw std::invalid_argument("no fit parameter named " + name);
}

double FitResult::get_sigma(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return sigma[(int)i];
  throw std::invalid_argument("no fit parameter named " + name);
}

FitResult fit_lorentzian(const std::vector<SpectrumPoint>& pts, LorentzModel model,
                         bool antisym) {
  if (pts.size() < 8) throw std::invalid_argument("fit_lorentzian: need >= 8 points");

  // Seed from the peak bin and half-max crossings.
  size_t ipk = 0;
  double floor0 = pts[0].psd;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].psd > pts[ipk].psd) ipk = i;
    floor0 = std::min(floor0, pts[i].psd);
  }
  double amp0 = std::max(pts[ipk].psd - floor0, 1e-12);
  double c0 = pts[ipk].delta;
  double half = floor0 + amp0 / 2.0;
  double lo = pts.front().delta, hi = pts.back().delta;
  for (size_t i = ipk; i < pts.size(); ++i)
    if (pts[i].psd < half) { hi = pts[i].delta; break; }
  for (size_t i = ipk + 1; i-- > 0;)
    if (pts[i].psd < half) { lo = pts[i].delta; break; }
  double width0 = std::max(hi - lo, (pts[1].delta - pts[0].delta));
  double span = pts.back().delta - pts.front().delta;
  if (span < 3.0 * width0 / 2.0)
    throw std::invalid_argument("fit_lorentzian: grid spans < 3 linewidths");

  std::vector<std::string> names = {"floor", "amplitude", "center", "width"};
  Eigen::VectorXd p0(4 + (antisym ? 1 : 0) +
                     (model == LorentzModel::coherent_double ? 4 : 0));
  p0[0] = floor0;
  p0[1] = amp0;
  p0[2] = c0;
  p0[3] = width0;
  int ia = -1, i2 = -1;
  if (antisym) {
    ia = 4;
    names.push_back("antisym");
    p0[ia] = 0.0;
  }
  if (model == LorentzModel::coherent_double) {
    i2 = antisym ? 5 : 4;
    names.insert(names.end(), {"amplitude2", "center2", "width2", "phase"});
    p0[i2] = amp0 * 0.1;
    p0[i2 + 1] = c0 - 0.5 * span / 4.0;
    p0[i2 + 2] = width0;
    p0[i2 + 3] = 0.0;
  }

  auto resid = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(pts.size());
    double h = std::abs(q[3]) / 2.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      double d = pts[i].delta - q[2];
      double m;
      if (model == LorentzModel::single) {
        m = q[0] + q[1] * h * h / (h * h + d * d);
      } else {
        double h2 = std::abs(q[i2 + 2]) / 2.0;
        double d2 = pts[i].delta - q[i2 + 1];
        std::complex<double> a1 =
            std::sqrt(std::max(q[1], 0.0)) * h / std::complex<double>(h, -d);
        std::complex<double> a2 = std::sqrt(std::max(q[i2], 0.0)) *
                                  std::exp(std::complex<double>(0, q[i2 + 3])) * h2 /
                                  std::complex<double>(h2, -d2);
        m = q[0] + std::norm(a1 + a2);
      }
      if (ia >= 0) m += q[ia] * d * h / (h * h + d * d);
      r[(int)i] = (m - pts[i].psd) / pts[i].sigma;
    }
    return r;
  };

  LevMarResult lm = levmar(resid, p0);
  lm.params[3] = std::abs(lm.params[3]);
  if (i2 >= 0) lm.params[i2 + 2] = std::abs(lm.params[i2 + 2]);
  if (!lm.converged) throw std::runtime_error("fit_lorentzian: did not converge");
  double spacing = pts[1].delta - pts[0].delta;
  if (lm.params[3] < spacing)
    throw std::runtime_error("fit_lorentzian: width collapsed to grid spacing");
  return pack(names, lm, (int)pts.size());
}

SidebandPair unsquash(const SidebandPair& N_det, const SidebandPair& S_tilde_det,
                      const TransducerParams& p, const OperatingPoint& op) {
  TechDensities unit;
  unit.c_yy = 1.0;  // everything is linear in C_yy
  NoiseSusceptibilities s = optical_susceptibilities(p, -p.omega_m);
  double ko = p.kappa_o();
  double pref = p.eps_cl * p.eps_pc * (p.kappa_o_ext / ko) * ko * ko * op.A_o *
                (op.Gamma_o / op.Gamma_T);
  SidebandPair out;
  double corr[2];
  int k = 0;
  for (int sign : {+1, -1}) {
    double dpeak_dcyy = pref * std::real(s.B_tilde(sign, p.omega_m, unit));
    double dfloor_dcyy = white_floor(p, unit, sign, -p.omega_m);
    double S_meas = sign > 0 ? S_tilde_det.upper : S_tilde_det.lower;
    corr[k++] = dfloor_dcyy != 0.0
                    ? (sign > 0 ? 1.0 : -1.0) * dpeak_dcyy / dfloor_dcyy * S_meas
                    : 0.0;
  }
  out.upper = N_det.upper + corr[0];
  out.lower = N_det.lower + corr[1];
  if (out.upper < 0 || out.lower < 0)
    throw std::runtime_error("unsquash: corrected amplitude negative (unphysical input)");
  return out;
}

double asymmetry_ratio(double n_m, double n_min) {
  if (n_m <= 0) throw std::invalid_argument("asymmetry_ratio: n_m must be > 0");
  return (n_min / (n_min + 1.0)) * ((n_m + 1.0) / n_m);
}

double occupancy_from_asymmetry(double r, double n_min) {
  double asymptote = n_min / (n_min + 1.0);
  if (r <= asymptote)
    throw std::invalid_argument(
        "occupancy_from_asymmetry: ratio at or below the high-temperature asymptote");
  return 1.0 / (r * (n_min + 1.0) / n_min - 1.0);
}

FitResult fit_cooling_curve(const std::vector<CoolingCurvePoint>& pts,
                            CoolingMode mode, const TransducerParams& p) {
  if (pts.size() < 4) throw std::invalid_argument("fit_cooling_curve: need >= 4 points");

  auto model = [&](double n_th, double a_o, double n_eff_e,
                   const CoolingCurvePoint& pt) {
    OperatingPoint op = make_operating_point(p, pt.Gamma_e, pt.Gamma_o);
    double num = p.gamma_m * n_th + pt.Gamma_o * (op.n_min_o + a_o * pt.Gamma_o) +
                 pt.Gamma_e * (op.n_min_e + n_eff_e) + op.lock_backaction;
    return num / op.Gamma_T;
  };

  if (mode == CoolingMode::optical_only) {
    Eigen::VectorXd p0(2);
    p0 << std::max(p.n_th, 1.0), std::max(p.tech_noise.a_o, 1e-8);
    auto resid = [&](const Eigen::VectorXd& q) {
      Eigen::VectorXd r(pts.size());
      for (size_t i = 0; i < pts.size(); ++i)
        r[(int)i] = (model(q[0], q[1], 0.0, pts[i]) - pts[i].n_m) / pts[i].sigma;
      return r;
    };
    LevMarResult lm = levmar(resid, p0);
    if (!lm.converged) throw std::runtime_error("fit_cooling_curve: non-convergence");
    return pack({"n_th", "a_o"}, lm, (int)pts.size());
  }

  Eigen::VectorXd p0(1);
  p0 << 1.0;
  auto resid = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
      r[(int)i] =
          (model(p.n_th, p.tech_noise.a_o, q[0], pts[i]) - pts[i].n_m) / pts[i].sigma;
    return r;
  };
  LevMarResult lm = levmar(resid, p0);
  if (!lm.converged) throw std::runtime_error("fit_cooling_curve: non-convergence");
  return pack({"n_eff_e"}, lm, (int)pts.size());
}

FitResult fit_efficiency_curve(const std::vector<EfficiencyPoint>& pts,
                               EfficiencyFitMode mode, const TransducerParams& p) {
  if (pts.size() < 3)
    throw std::invalid_argument("fit_efficiency_curve: need >= 3 points");
  Eigen::VectorXd p0(1);
  p0 << 0.5;
  auto resid = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      OperatingPoint op = make_operating_point(p, pts[i].Gamma_e, pts[i].Gamma_o);
      double lorentz = 4.0 * pts[i].Gamma_e * pts[i].Gamma_o / (op.Gamma_T * op.Gamma_T);
      double value = pts[i].eta;
      double sig = pts[i].sigma;
      if (mode == EfficiencyFitMode::zeta_m) {
        double ratio = p.kappa_e_ext / op.kappa_e;
        value /= ratio;
        sig /= ratio;
      }
      r[(int)i] = (q[0] * lorentz - value) / sig;
    }
    return r;
  };
  LevMarResult lm = levmar(resid, p0);
  if (!lm.converged) throw std::runtime_error("fit_efficiency_curve: non-convergence");
  return pack({mode == EfficiencyFitMode::eta_m ? "eta_M" : "zeta_M"}, lm,
              (int)pts.size());
}

namespace {

double nout_model(const TransducerParams& p, double Gamma_e, double Gamma_o,
                  double a_e, double b_e, double n_th) {
  OperatingPoint op = make_operating_point(p, Gamma_e, Gamma_o);
  double num = p.gamma_m * n_th + Gamma_e * (op.n_min_e + a_e * Gamma_e + b_e) +
               Gamma_o * (op.n_min_o + p.tech_noise.a_o * Gamma_o) +
               op.lock_backaction;
  return 4.0 * p.eps_cl * op.A_o * (p.kappa_o_ext / p.kappa_o()) * Gamma_o * num /
         (op.Gamma_T * op.Gamma_T);
}

}  // namespace

FitResult fit_added_noise_curve(const std::vector<AddedNoisePoint>& pts,
                                double Gamma_o, const TransducerParams& p) {
  if (pts.size() < 4)
    throw std::invalid_argument("fit_added_noise_curve: need >= 4 points");
  Eigen::VectorXd p0(3);
  p0 << std::max(p.tech_noise.a_e, 1e-5), std::max(p.tech_noise.b_e, 1e-3),
      std::max(p.n_th, 1.0);
  auto resid = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
      r[(int)i] = (nout_model(p, pts[i].Gamma_e, Gamma_o, q[0], q[1], q[2]) -
                   pts[i].N_out_plus) /
                  pts[i].sigma;
    return r;
  };
  LevMarResult lm = levmar(resid, p0);
  if (!lm.converged)
    throw std::runtime_error("fit_added_noise_curve: non-convergence");
  FitResult out = pack({"a_e", "b_e", "n_th"}, lm, (int)pts.size());
  return out;
}

double added_noise_from_fit(const FitResult& fit, double Gamma_e, double Gamma_o,
                            const TransducerParams& p) {
  double nout = nout_model(p, Gamma_e, Gamma_o, fit.get("a_e"), fit.get("b_e"),
                           fit.get("n_th"));
  OperatingPoint op = make_operating_point(p, Gamma_e, Gamma_o);
  EfficiencyReport eff = efficiency(p, op);
  return nout / (op.A_e * op.A_o * eff.eta_up);
}

TempSweepResult fit_temperature_sweep(const std::vector<TemperaturePoint>& pts,
                                      double a_gamma, double b_gamma,
                                      const std::vector<int>& excluded,
                                      const TransducerParams& p,
                                      const OperatingPoint& op) {
  std::vector<TemperaturePoint> used;
  for (size_t i = 0; i < pts.size(); ++i)
    if (std::find(excluded.begin(), excluded.end(), (int)i) == excluded.end())
      used.push_back(pts[i]);
  if (used.size() < 4)
    throw std::invalid_argument("fit_temperature_sweep: need >= 4 included points");

  Eigen::VectorXd p0(2);
  p0 << 1.0, 1.0;
  auto shape = [&](double T) { return a_gamma * T * T + b_gamma * T; };
  auto resid = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(used.size());
    for (size_t i = 0; i < used.size(); ++i)
      r[(int)i] = (q[0] * shape(used[i].T) + q[1] - used[i].area) / used[i].sigma;
    return r;
  };
  LevMarResult lm = levmar(resid, p0);
  if (!lm.converged)
    throw std::runtime_error("fit_temperature_sweep: non-convergence");

  TempSweepResult out;
  out.fit = pack({"a_xi", "b_xi"}, lm, (int)used.size());

  double pref = 4.0 * p.eps_cl * (p.kappa_o_ext / p.kappa_o()) * op.A_o *
                (op.Gamma_o / op.Gamma_T);
  double a_xi = out.fit.get("a_xi");
  double b_xi = out.fit.get("b_xi");
  out.xi_from_a = a_xi / (pref * constants::kB / (constants::hbar * p.omega_m));
  double lock_term = op.lock_backaction + op.Gamma_o * op.n_min_o;
  out.xi_from_b = lock_term > 0 ? b_xi / (pref * lock_term) : 0.0;

  // Base-temperature measured area: the coldest point (included or not).
  const TemperaturePoint* base = &pts[0];
  for (const auto& pt : pts)
    if (pt.T < base->T) base = &pt;
  // Solve a_xi*(a_g T^2 + b_g T) + b_xi = base->area on the T > 0 branch.
  double A = a_xi * a_gamma, B = a_xi * b_gamma, Cc = b_xi - base->area;
  if (std::abs(A) < 1e-300) {
    out.T_eq = -Cc / B;
  } else {
    double disc = B * B - 4.0 * A * Cc;
    if (disc < 0) throw std::runtime_error("fit_temperature_sweep: no T_eq root");
    out.T_eq = (-B + std::sqrt(disc)) / (2.0 * A);
  }
  return out;
}

RingdownResult fit_ringdown(const std::vector<RingdownTrace>& traces,
                            const TransducerParams& p) {
  if (traces.size() < 2)
    throw std::invalid_argument("fit_ringdown: need traces at >= 2 powers");
  RingdownResult out;
  for (const auto& tr : traces) {
    if (tr.t.size() < 10 || tr.t.size() != tr.amplitude.size())
      throw std::invalid_argument("fit_ringdown: need >= 10 samples per trace");
    // log-linear fit: ln A = ln A0 - (Gamma_T/2) t
    int n = (int)tr.t.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      if (tr.amplitude[i] <= 0)
        throw std::invalid_argument("fit_ringdown: non-positive amplitude sample");
      double y = std::log(tr.amplitude[i]);
      sx += tr.t[i];
      sy += y;
      sxx += tr.t[i] * tr.t[i];
      sxy += tr.t[i] * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icept = (sy - slope * sx) / n;
    // Exponentiality check on the log residuals.
    double ss = 0, scale = 0;
    for (int i = 0; i < n; ++i) {
      double res = std::log(tr.amplitude[i]) - (icept + slope * tr.t[i]);
      ss += res * res;
      scale += std::abs(slope * tr.t[i]) + 1.0;
    }
    if (std::sqrt(ss / n) > 0.2)
      throw std::runtime_error("fit_ringdown: trace is not exponential");
    out.Gamma_T.push_back(-2.0 * slope);
  }
  // Linear fit Gamma_T vs P_e.
  int n = (int)traces.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += traces[i].P_e;
    sy += out.Gamma_T[i];
    sxx += traces[i].P_e * traces[i].P_e;
    sxy += traces[i].P_e * out.Gamma_T[i];
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.gamma_m = (sy - out.slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    double res = out.Gamma_T[i] - (out.gamma_m + out.slope * traces[i].P_e);
    ss += res * res;
  }
  double var = n > 2 ? ss / (n - 2) : 0.0;
  out.gamma_m_sigma = std::sqrt(var * sxx / (n * sxx - sx * sx));

  // Implied vacuum coupling: Gamma_e = g_e^2 (n_bar/P) F(kappa_e) P at low power.
  double kappa = p.kappa_e_min();
  double wp = p.omega_e + p.omega_m;
  double n_per_watt =
      (1.0 / (constants::hbar * wp)) * p.kappa_e_ext /
      (kappa * kappa / 4.0 + p.omega_m * p.omega_m);
  double F = damping_kernel(kappa, -p.omega_m, p.omega_m);
  if (out.slope > 0) out.g_e = std::sqrt(out.slope / (n_per_watt * F));
  return out;
}

FitResult fit_gamma_vs_temperature(const std::vector<GammaTempPoint>& pts) {
  if (pts.size() < 2)
    throw std::invalid_argument("fit_gamma_vs_temperature: need >= 2 points");
  double tmin = pts[0].T, tmax = pts[0].T;
  for (const auto& pt : pts) {
    tmin = std::min(tmin, pt.T);
    tmax = std::max(tmax, pt.T);
  }
  if (tmax - tmin <= 0)
    throw std::invalid_argument("fit_gamma_vs_temperature: degenerate abscissa");
  Eigen::VectorXd p0(2);
  p0 << (pts.back().gamma - pts.front().gamma) / (tmax - tmin), pts.front().gamma;
  auto resid = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
      r[(int)i] = (q[0] * pts[i].T + q[1] - pts[i].gamma) / pts[i].sigma;
    return r;
  };
  LevMarResult lm = levmar(resid, p0);
  return pack({"a_gamma", "b_gamma"}, lm, (int)pts.size());
}

double efficiency_four_point(const FourPointMeasurement& m, double eps_pl,
                             double gain_product) {
  if (m.s_oe <= 0 || m.s_eo <= 0 || m.s_ee_off <= 0 || m.s_oo_off <= 0)
    throw std::invalid_argument("efficiency_four_point: all measurements must be > 0");
  return std::sqrt(eps_pl) / gain_product *
         std::sqrt((m.s_oe * m.s_eo) / (m.s_ee_off * m.s_oo_off));
}

}  // namespace xduce
