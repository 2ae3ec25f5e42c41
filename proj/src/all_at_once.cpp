#include "tfde/all_at_once.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <sstream>

#include "tfde/bicgstab.hpp"

namespace tfde {

AllAtOnceSystem::AllAtOnceSystem(const ProblemSpec& spec, const Mesh& mesh)
    : spec_(spec), mesh_(mesh), op_(spec, mesh) {
  u0_.resize(op_.size());
  for (Index i = 0; i < op_.size(); ++i) u0_[i] = spec.u0(mesh.x(i + 1));
}

VectorXd AllAtOnceSystem::block_matvec(const VectorXd& u) const {
  if (u.size() != dim()) throw ShapeError("all-at-once matvec: length mismatch");
  const Index n = op_.size();
  VectorXd out(dim());
  for (Index j = 0; j < mesh_.M; ++j) {
    VectorXd block = op_.apply(u.segment(j * n, n));
    if (j > 0) block -= u.segment((j - 1) * n, n);
    out.segment(j * n, n) = block;
  }
  return out;
}

VectorXd AllAtOnceSystem::residual(const VectorXd& u) const {
  if (u.size() != dim()) throw ShapeError("all-at-once residual: length mismatch");
  const Index n = op_.size();
  const double tau = mesh_.tau();
  VectorXd out = block_matvec(u);
  for (Index j = 0; j < mesh_.M; ++j) {
    const double t = mesh_.t(j + 1);
    auto block = out.segment(j * n, n);
    for (Index i = 0; i < n; ++i) {
      const double fv = spec_.f(u[j * n + i], mesh_.x(i + 1), t);
      if (!std::isfinite(fv))
        throw std::runtime_error("all-at-once residual: non-finite source value");
      block[i] -= tau * fv;
    }
  }
  out.head(n) -= u0_;
  return out;
}

VectorXd AllAtOnceSystem::jacobian_apply(const VectorXd& u_current, const VectorXd& x) const {
  if (u_current.size() != dim() || x.size() != dim())
    throw ShapeError("jacobian apply: length mismatch");
  const Index n = op_.size();
  const double tau = mesh_.tau();
  VectorXd out = block_matvec(x);
  for (Index j = 0; j < mesh_.M; ++j) {
    const double t = mesh_.t(j + 1);
    auto block = out.segment(j * n, n);
    for (Index i = 0; i < n; ++i)
      block[i] -= tau * spec_.source_derivative(u_current[j * n + i], mesh_.x(i + 1), t) *
                  x[j * n + i];
  }
  return out;
}

MatrixXd AllAtOnceSystem::dense_jacobian(const VectorXd& u_current, Index cap) const {
  if (dim() > cap)
    throw ResourceLimitError("dense Jacobian over cap (" + std::to_string(dim()) + ")");
  const Index n = op_.size();
  const double tau = mesh_.tau();
  MatrixXd out = MatrixXd::Zero(dim(), dim());
  for (Index j = 0; j < mesh_.M; ++j) {
    const double t = mesh_.t(j + 1);
    for (Index i = 0; i < n; ++i)
      for (Index jc = 0; jc < n; ++jc) out(j * n + i, j * n + jc) = op_.entry(i, jc, n);
    for (Index i = 0; i < n; ++i)
      out(j * n + i, j * n + i) -=
          tau * spec_.source_derivative(u_current[j * n + i], mesh_.x(i + 1), t);
    if (j > 0)
      for (Index i = 0; i < n; ++i) out(j * n + i, (j - 1) * n + i) -= 1.0;
  }
  return out;
}

MatrixXd AllAtOnceSystem::dense_preconditioner(Index ell, Index cap) const {
  if (dim() > cap)
    throw ResourceLimitError("dense preconditioner over cap (" + std::to_string(dim()) + ")");
  const Index n = op_.size();
  const Index ell_eff = std::min(ell, n);
  MatrixXd out = MatrixXd::Zero(dim(), dim());
  for (Index j = 0; j < mesh_.M; ++j) {
    for (Index i = 0; i < n; ++i)
      for (Index jc = 0; jc < n; ++jc) out(j * n + i, j * n + jc) = op_.entry(i, jc, ell_eff);
    if (j > 0)
      for (Index i = 0; i < n; ++i) out(j * n + i, (j - 1) * n + i) -= 1.0;
  }
  return out;
}

SchemeSolution AllAtOnceSystem::unpack(const VectorXd& u) const {
  const Index n = op_.size();
  SchemeSolution sol;
  sol.mesh = mesh_;
  sol.values = MatrixXd::Zero(mesh_.M + 1, mesh_.N + 1);
  for (Index i = 0; i < n; ++i) sol.values(0, i + 1) = u0_[i];
  for (Index j = 1; j <= mesh_.M; ++j)
    sol.values.row(j).segment(1, n) = u.segment((j - 1) * n, n);
  return sol;
}

VectorXd AllAtOnceSystem::pack(const SchemeSolution& sol) const {
  const Index n = op_.size();
  VectorXd u(dim());
  for (Index j = 1; j <= mesh_.M; ++j)
    u.segment((j - 1) * n, n) = sol.values.row(j).segment(1, n);
  return u;
}

Preconditioner::Preconditioner(const AllAtOnceSystem& sys, Index ell)
    : ell_(std::min(ell, sys.block_size())),
      n_(sys.block_size()),
      M_(sys.mesh().M),
      factor_(banded_lu(sys.space_operator().truncated(std::min(ell, sys.block_size())))) {
  if (ell <= 2) throw std::domain_error("preconditioner: ell must exceed 2");
  margins_ = gershgorin_check(sys.space_operator(), ell_).margins;
}

VectorXd Preconditioner::apply(const VectorXd& r) const {
  if (r.size() != n_ * M_) throw ShapeError("preconditioner apply: length mismatch");
  VectorXd z(r.size());
  VectorXd block = r.head(n_);
  factor_.solve_in_place(block);
  z.head(n_) = block;
  for (Index j = 1; j < M_; ++j) {
    block = r.segment(j * n_, n_) + z.segment((j - 1) * n_, n_);
    factor_.solve_in_place(block);
    z.segment(j * n_, n_) = block;
  }
  return z;
}

Preconditioner precond_build(const AllAtOnceSystem& sys, Index ell) {
  return Preconditioner(sys, ell);
}

GershgorinReport gershgorin_check(const SpaceOperator& op, Index ell) {
  const Index n = op.size();
  const Index ell_eff = std::min(ell, n);
  const auto& g = op.weights().g;
  double off_sum = 0.0;  // sum of g_k for k = 0..ell, k != 1
  for (Index k = 0; k <= ell_eff; ++k)
    if (k != 1) off_sum += g[k];

  GershgorinReport rep;
  rep.margins.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double dsum = op.d_plus()[i] + op.d_minus()[i];
    const double ddiff = op.d_plus()[i] - op.d_minus()[i];
    const double center = 1.0 - op.w1() * dsum * g[1] + op.w2() * ddiff;
    const double radius = op.w1() * dsum * off_sum + op.w2() * ddiff;
    rep.margins[i] = center - radius - 1.0;
  }
  rep.min_margin = rep.margins.minCoeff();
  rep.all_positive = rep.min_margin > 0.0;
  return rep;
}

GershgorinReport gershgorin_check(const AllAtOnceSystem& sys, const Preconditioner& P) {
  return gershgorin_check(sys.space_operator(), P.ell());
}

std::string SolveReport::marker() const {
  switch (status) {
    case Status::KrylovCap:
    case Status::Breakdown:
      return "‡";  // ‡
    case Status::MaxitReached:
      return "*";
    default:
      return "";
  }
}

VectorXd coarse_initial_guess(const ProblemSpec& spec, const Mesh& fine_mesh, Index coarse_N,
                              Index coarse_M) {
  const Mesh coarse = build_mesh(spec, coarse_N, coarse_M);
  SchemeOptions opts;  // coarse solve is tiny, defaults are fine
  const SchemeSolution coarse_sol = liess_run(spec, coarse, opts);
  // coarse_sol.values covers the full rectangle: boundary columns zero
  // (including the corners), row 0 = u0 at the interior nodes
  const MatrixXd& grid = coarse_sol.values;

  const double H = coarse.h();
  const double TAU = coarse.tau();
  const Index n = fine_mesh.interior();
  VectorXd out(fine_mesh.M * n);
  for (Index j = 1; j <= fine_mesh.M; ++j) {
    const double t = fine_mesh.t(j);
    Index q = std::min<Index>(static_cast<Index>(t / TAU), coarse_M - 1);
    const double s = (t - coarse.t(q)) / TAU;
    for (Index i = 1; i < fine_mesh.N; ++i) {
      const double x = fine_mesh.x(i);
      Index p = std::min<Index>(static_cast<Index>((x - coarse.a) / H), coarse_N - 1);
      const double r = (x - coarse.x(p)) / H;
      out[(j - 1) * n + (i - 1)] =
          grid(q, p) * (1.0 - r) * (1.0 - s) + grid(q, p + 1) * r * (1.0 - s) +
          grid(q + 1, p) * (1.0 - r) * s + grid(q + 1, p + 1) * r * s;
    }
  }
  return out;
}

std::pair<SchemeSolution, SolveReport> newton_solve(const AllAtOnceSystem& sys,
                                                    const NewtonConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  SolveReport report;
  report.warnings = check_problem_on_mesh(sys.problem(), sys.mesh());

  VectorXd u = coarse_initial_guess(sys.problem(), sys.mesh(), config.coarse_N, config.coarse_M);

  std::optional<Preconditioner> precond;
  if (config.inner == NewtonConfig::Inner::Preconditioned)
    precond.emplace(sys, config.ell);

  std::optional<Eigen::PartialPivLU<MatrixXd>> dense_lu;  // DenseDirect, J refactored per step

  int k = 0;
  for (k = 1; k <= config.maxit; ++k) {
    const VectorXd b = -sys.residual(u);
    report.residual_norms.push_back(b.norm());
    VectorXd z;
    if (config.inner == NewtonConfig::Inner::DenseDirect) {
      if (sys.dim() > config.dense_direct_cap)
        throw ResourceLimitError("dense-direct Newton: dimension " +
                                 std::to_string(sys.dim()) + " over cap " +
                                 std::to_string(config.dense_direct_cap));
      dense_lu.emplace(sys.dense_jacobian(u, config.dense_direct_cap));
      z = dense_lu->solve(b);
      report.inner_iterations.push_back(0.0);
    } else {
      auto apply_J = [&](const VectorXd& x) { return sys.jacobian_apply(u, x); };
      auto apply_P = [&](const VectorXd& r) {
        return precond ? precond->apply(r) : r;
      };
      BicgstabResult inner =
          bicgstab(apply_J, apply_P, b, z, config.krylov_tol, config.krylov_maxit);
      report.inner_iterations.push_back(inner.iterations);
      if (!inner.converged) {
        report.status = inner.breakdown ? SolveReport::Status::Breakdown
                                        : SolveReport::Status::KrylovCap;
        u += z;
        report.step_norms.push_back(z.norm());
        break;
      }
    }
    u += z;
    const double zn = z.norm();
    report.step_norms.push_back(zn);
    if (zn <= config.tol_out) {
      report.converged = true;
      break;
    }
  }
  if (k > config.maxit) {
    k = static_cast<int>(config.maxit);
    report.status = SolveReport::Status::MaxitReached;
  }

  report.iter1 = k;
  double sum = 0.0;
  for (double it : report.inner_iterations) sum += it;
  report.iter2 = report.inner_iterations.empty()
                     ? 0.0
                     : sum / static_cast<double>(report.inner_iterations.size());
  report.wall_time_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  return {sys.unpack(u), report};
}

}  // namespace tfde
