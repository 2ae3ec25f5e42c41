#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tfde/types.hpp"

namespace tfde {

/// Continuous problem data: domain, order, tempering, coefficients,
/// source and initial condition. alpha and lambda are defaulted by the
/// catalog and overridden per experiment cell.
struct ProblemSpec {
  std::string name;
  double a = -1.0;
  double b = 1.0;
  double T = 1.0;
  double alpha = 1.5;
  double lambda = 0.0;
  std::function<double(double)> d_plus;
  std::function<double(double)> d_minus;
  std::function<double(double, double, double)> f;      // (u, x, t)
  std::function<double(double, double, double)> df_du;  // empty -> finite differences
  std::function<double(double)> u0;
  double lipschitz_L = 0.0;

  /// df/du at (u, x, t); central finite differences with step
  /// sqrt(eps)*(1+|u|) when no derivative was supplied.
  double source_derivative(double u, double x, double t) const;
};

/// Uniform space-time mesh: x_i = a + i h (i = 0..N, h = (b-a)/N),
/// t_j = j tau (j = 0..M, tau = T/M).
struct Mesh {
  Index N = 0;
  Index M = 0;
  double a = -1.0;
  double b = 1.0;
  double T = 1.0;

  double h() const { return (b - a) / static_cast<double>(N); }
  double tau() const { return T / static_cast<double>(M); }
  double x(Index i) const { return a + static_cast<double>(i) * h(); }
  double t(Index j) const { return static_cast<double>(j) * tau(); }
  Index interior() const { return N - 1; }

  VectorXd interior_nodes() const {
    VectorXd xs(N - 1);
    for (Index i = 1; i < N; ++i) xs[i - 1] = x(i);
    return xs;
  }
};

/// Catalog entries: example1, example1_cubic (source-term variant kept for
/// sensitivity checks), example2. Unknown names throw std::out_of_range.
ProblemSpec catalog(const std::string& name);

Mesh build_mesh(const ProblemSpec& spec, Index N, Index M);

/// Pre-solve diagnostics: d_pm > 0 (hard error if violated), d_plus >= d_minus
/// at interior nodes, |u0| at the endpoints, tau*L < 1. Returns one line per
/// violated soft condition.
std::vector<std::string> check_problem_on_mesh(const ProblemSpec& spec, const Mesh& mesh);

}  // namespace tfde
