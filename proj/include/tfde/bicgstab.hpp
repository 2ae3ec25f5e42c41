#pragma once

#include <cmath>

#include "tfde/types.hpp"

namespace tfde {

struct BicgstabResult {
  double iterations = 0.0;  // half-iteration granularity, MATLAB-style
  bool converged = false;
  bool breakdown = false;
  double final_relres = 0.0;
};

/// Right-preconditioned BiCGSTAB with zero initial guess: solves
/// A M^{-1} y = b, x = M^{-1} y, so the monitored residual is the true
/// residual b - A x. Stops when ||r||_2 <= tol ||b||_2. Convergence after
/// the first half-step counts 0.5. rho or omega collapsing below 1e-300 is
/// reported as breakdown, never silently.
template <class Op, class Prec>
BicgstabResult bicgstab(Op&& apply_A, Prec&& apply_Minv, const VectorXd& b, VectorXd& x,
                        double tol, Index maxit) {
  constexpr double kBreakdown = 1e-300;
  BicgstabResult res;
  const Index n = b.size();
  x = VectorXd::Zero(n);

  const double nb = b.norm();
  if (nb == 0.0) {
    res.converged = true;
    return res;
  }

  VectorXd r = b;
  const VectorXd rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  VectorXd v = VectorXd::Zero(n), p = VectorXd::Zero(n);

  for (Index i = 1; i <= maxit; ++i) {
    const double rho_new = rhat.dot(r);
    if (std::abs(rho_new) < kBreakdown) {
      res.breakdown = true;
      res.final_relres = r.norm() / nb;
      return res;
    }
    if (i == 1) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
    }
    const VectorXd phat = apply_Minv(p);
    v = apply_A(phat);
    const double rv = rhat.dot(v);
    if (std::abs(rv) < kBreakdown) {
      res.breakdown = true;
      res.final_relres = r.norm() / nb;
      return res;
    }
    alpha = rho_new / rv;
    const VectorXd s = r - alpha * v;
    x += alpha * phat;
    if (s.norm() <= tol * nb) {
      res.iterations = static_cast<double>(i) - 0.5;
      res.converged = true;
      res.final_relres = s.norm() / nb;
      return res;
    }
    const VectorXd shat = apply_Minv(s);
    const VectorXd t = apply_A(shat);
    const double tt = t.dot(t);
    if (tt < kBreakdown) {
      res.breakdown = true;
      res.iterations = static_cast<double>(i) - 0.5;
      res.final_relres = s.norm() / nb;
      return res;
    }
    omega = t.dot(s) / tt;
    x += omega * shat;
    r = s - omega * t;
    res.iterations = static_cast<double>(i);
    res.final_relres = r.norm() / nb;
    if (r.norm() <= tol * nb) {
      res.converged = true;
      return res;
    }
    if (std::abs(omega) < kBreakdown) {
      res.breakdown = true;
      return res;
    }
    rho = rho_new;
  }
  return res;  // cap reached, converged stays false
}

}  // namespace tfde
