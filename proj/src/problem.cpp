#include "tfde/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tfde {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

ProblemSpec example1_base() {
  ProblemSpec p;
  p.a = -1.0;
  p.b = 1.0;
  p.T = 1.0;
  p.u0 = [](double x) { return (std::cos(M_PI * x) - 1.0) * std::sin(M_PI * x); };
  p.d_plus = [](double x) { return 1.5 * std::exp(-x); };
  p.d_minus = [](double x) { return std::exp(x); };
  return p;
}

}  // namespace

double ProblemSpec::source_derivative(double u, double x, double t) const {
  if (df_du) return df_du(u, x, t);
  const double delta = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(u));
  return (f(u + delta, x, t) - f(u - delta, x, t)) / (2.0 * delta);
}

ProblemSpec catalog(const std::string& name) {
  if (name == "example1") {
    // Source printed as "u - 3u", taken literally as -2u. The cubic
    // reading lives in example1_cubic.
    ProblemSpec p = example1_base();
    p.name = "example1";
    p.f = [](double u, double, double) { return -2.0 * u; };
    p.df_du = [](double, double, double) { return -2.0; };
    p.lipschitz_L = 2.0;
    return p;
  }
  if (name == "example1_cubic") {
    ProblemSpec p = example1_base();
    p.name = "example1_cubic";
    p.f = [](double u, double, double) { return u - 3.0 * u * u * u; };
    p.df_du = [](double u, double, double) { return 1.0 - 9.0 * u * u; };
    p.lipschitz_L = 2.0;
    return p;
  }
  if (name == "example2") {
    ProblemSpec p;
    p.name = "example2";
    p.a = -1.0;
    p.b = 1.0;
    p.T = 1.0;
    p.u0 = [](double x) {
      const double e = std::exp(10.0 * x);
      return 4.0 * e / ((e + 1.0) * (e + 1.0));
    };
    p.f = [](double u, double, double) { return -u * (1.0 - u); };
    p.df_du = [](double u, double, double) { return -1.0 + 2.0 * u; };
    // Branch conditions exactly as printed: x < 0 vs 0 <= x.
    p.d_plus = [](double x) { return x < 0.0 ? 1.5 * std::exp(-x) : 2.0 * sech(x); };
    p.d_minus = [](double x) { return x < 0.0 ? std::exp(x) : 0.1 + sech(-x); };
    p.lipschitz_L = 3.0;
    return p;
  }
  throw std::out_of_range("catalog: unknown problem '" + name + "'");
}

Mesh build_mesh(const ProblemSpec& spec, Index N, Index M) {
  if (N < 2) throw std::domain_error("build_mesh: N must be >= 2");
  if (M < 1) throw std::domain_error("build_mesh: M must be >= 1");
  Mesh m;
  m.N = N;
  m.M = M;
  m.a = spec.a;
  m.b = spec.b;
  m.T = spec.T;
  return m;
}

std::vector<std::string> check_problem_on_mesh(const ProblemSpec& spec, const Mesh& mesh) {
  std::vector<std::string> warnings;

  Index worst = -1;
  double worst_gap = 0.0;
  for (Index i = 1; i < mesh.N; ++i) {
    const double x = mesh.x(i);
    const double dp = spec.d_plus(x);
    const double dm = spec.d_minus(x);
    if (!(dp > 0.0) || !(dm > 0.0))
      throw std::domain_error("problem check: d_pm must be positive at x = " +
                              std::to_string(x));
    if (dp < dm && dm - dp > worst_gap) {
      worst_gap = dm - dp;
      worst = i;
    }
  }
  if (worst >= 0) {
    std::ostringstream os;
    os << "d_plus >= d_minus violated at " << spec.name << " node x = "
       << mesh.x(worst) << " (gap " << worst_gap
       << "); stability theory assumes d_plus >= d_minus";
    warnings.push_back(os.str());
  }

  const double ua = std::abs(spec.u0(spec.a));
  const double ub = std::abs(spec.u0(spec.b));
  if (ua > 1e-12 || ub > 1e-12) {
    std::ostringstream os;
    os << "u0 incompatible with homogeneous Dirichlet data: |u0(a)| = " << ua
       << ", |u0(b)| = " << ub;
    warnings.push_back(os.str());
  }

  if (spec.lipschitz_L > 0.0 && mesh.tau() * spec.lipschitz_L >= 1.0) {
    std::ostringstream os;
    os << "tau*L = " << mesh.tau() * spec.lipschitz_L
       << " >= 1: the nonlinear-scheme stability hypothesis fails on this mesh";
    warnings.push_back(os.str());
  }
  return warnings;
}

}  // namespace tfde
