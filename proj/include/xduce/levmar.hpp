#pragma once

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

// Damped Gauss-Newton (Levenberg-style trust parameter) for whitened
// residuals r(p) = (model - data)/sigma. Deterministic: identical inputs give
// identical iterates. Residual is monotone non-increasing over accepted steps.
namespace xduce {

struct FitOptions {
  int max_iters = 500;
  double step_tol = 1e-10;  // relative step
  double grad_tol = 1e-10;
  double fd_step = 1e-7;    // relative finite-difference step for the Jacobian
};

struct LevMarResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // (J^T J)^-1 at the optimum
  double residual_sum = 0.0;   // sum of squared whitened residuals
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& r0, double rel_step) {
  Eigen::MatrixXd J(r0.size(), p.size());
  for (int j = 0; j < p.size(); ++j) {
    double h = rel_step * std::max(std::abs(p[j]), 1e-30);
    Eigen::VectorXd pp = p, pm = p;
    pp[j] += h;
    pm[j] -= h;
    J.col(j) = (f(pp) - f(pm)) / (2.0 * h);
  }
  return J;
}

inline LevMarResult levmar(const ResidualFn& f, Eigen::VectorXd p,
                           const FitOptions& opt = {}) {
  LevMarResult out;
  Eigen::VectorXd r = f(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixXd J;
  bool need_jacobian = true;

  for (out.iterations = 0; out.iterations < opt.max_iters; ++out.iterations) {
    if (need_jacobian) {
      J = numeric_jacobian(f, p, r, opt.fd_step);
      need_jacobian = false;
    }
    Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < opt.grad_tol * std::max(1.0, std::sqrt(cost))) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd H = J.transpose() * J;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::MatrixXd A = H;
      for (int k = 0; k < A.rows(); ++k)
        A(k, k) += lambda * std::max(H(k, k), 1e-300);
      Eigen::VectorXd step = A.ldlt().solve(-g);
      Eigen::VectorXd p_try = p + step;
      Eigen::VectorXd r_try;
      try {
        r_try = f(p_try);
      } catch (const std::exception&) {
        lambda *= 10.0;
        continue;
      }
      double cost_try = r_try.squaredNorm();
      if (cost_try <= cost && std::isfinite(cost_try)) {
        double rel = 0.0;
        for (int k = 0; k < p.size(); ++k)
          rel = std::max(rel, std::abs(step[k]) / std::max(std::abs(p[k]), 1e-30));
        p = p_try;
        r = r_try;
        cost = cost_try;
        lambda = std::max(lambda / 3.0, 1e-14);
        need_jacobian = true;
        accepted = true;
        if (rel < opt.step_tol) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || out.converged) {
      if (!accepted) out.converged = true;  // no downhill step exists
      break;
    }
  }
  out.params = p;
  out.residual_sum = cost;
  if (need_jacobian) J = numeric_jacobian(f, p, r, opt.fd_step);
  Eigen::MatrixXd H = J.transpose() * J;
  // Tiny ridge guards exactly singular fits; uncertainties there are not
  // authoritative (converged flag tells the caller).
  for (int k = 0; k < H.rows(); ++k) H(k, k) += 1e-300;
  out.covariance = H.inverse();
  return out;
}

}  // namespace xduce
