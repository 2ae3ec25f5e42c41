#include "tfde/schemes.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "tfde/banded.hpp"
#include "tfde/bicgstab.hpp"

namespace tfde {

namespace {

SchemeSolution make_solution(const ProblemSpec& spec, const Mesh& mesh) {
  SchemeSolution sol;
  sol.mesh = mesh;
  sol.values = MatrixXd::Zero(mesh.M + 1, mesh.N + 1);
  for (Index i = 1; i < mesh.N; ++i) sol.values(0, i) = spec.u0(mesh.x(i));
  return sol;
}

bool use_dense(const SchemeOptions& opts, Index N) {
  switch (opts.solver) {
    case StepSolver::Dense: return true;
    case StepSolver::Krylov: return false;
    default: return N <= opts.dense_cap;
  }
}

VectorXd source_at(const ProblemSpec& spec, const VectorXd& u, const VectorXd& xs, double t) {
  VectorXd out(u.size());
  for (Index i = 0; i < u.size(); ++i) out[i] = spec.f(u[i], xs[i], t);
  if (!out.allFinite())
    throw std::runtime_error("scheme: source evaluation produced non-finite values");
  return out;
}

VectorXd source_derivative_at(const ProblemSpec& spec, const VectorXd& u, const VectorXd& xs,
                              double t) {
  VectorXd out(u.size());
  for (Index i = 0; i < u.size(); ++i) out[i] = spec.source_derivative(u[i], xs[i], t);
  return out;
}

// Per-step linear solver: dense LU of A, or PBiCGSTAB with the banded
// A_ell factor. The Jacobian diagonal shift (NL-IES Newton) reuses the same
// machinery with an extra diagonal term.
class StepSolverImpl {
 public:
  StepSolverImpl(const SpaceOperator& op, const SchemeOptions& opts, bool dense)
      : op_(op), opts_(opts), dense_(dense) {
    if (dense_) {
      dense_A_ = op.dense(std::max<Index>(op.size(), opts.dense_cap));
    } else {
      factor_.emplace(banded_lu(op.truncated(opts_.ell)));
    }
  }

  // Solve (A - tau diag(shift)) z = rhs; empty shift means plain A.
  VectorXd solve(const VectorXd& rhs, double tau, const VectorXd* shift, Index step) const {
    if (dense_) {
      if (shift == nullptr) {
        if (!lu_) lu_ = std::make_unique<Eigen::PartialPivLU<MatrixXd>>(dense_A_);
        return lu_->solve(rhs);
      }
      MatrixXd J = dense_A_;
      J.diagonal() -= tau * *shift;
      return Eigen::PartialPivLU<MatrixXd>(std::move(J)).solve(rhs);
    }
    auto apply = [&](const VectorXd& x) {
      VectorXd y = op_.apply(x);
      if (shift != nullptr) y -= tau * shift->cwiseProduct(x);
      return y;
    };
    auto precond = [&](const VectorXd& r) { return factor_->solve(r); };
    VectorXd z;
    BicgstabResult res = bicgstab(apply, precond, rhs, z, opts_.krylov_tol, opts_.krylov_maxit);
    if (!res.converged) {
      std::ostringstream os;
      os << "per-step Krylov solve failed at step " << step << ": "
         << (res.breakdown ? "breakdown" : "iteration cap") << " after "
         << res.iterations << " iterations, relres " << res.final_relres;
      throw SolverFailure(os.str());
    }
    return z;
  }

 private:
  const SpaceOperator& op_;
  const SchemeOptions& opts_;
  bool dense_;
  MatrixXd dense_A_;
  mutable std::unique_ptr<Eigen::PartialPivLU<MatrixXd>> lu_;
  std::optional<BandedFactor<double>> factor_;
};

}  // namespace

SchemeSolution liess_run(const ProblemSpec& spec, const Mesh& mesh, const SchemeOptions& opts) {
  auto warnings = check_problem_on_mesh(spec, mesh);
  if (opts.warnings)
    opts.warnings->insert(opts.warnings->end(), warnings.begin(), warnings.end());

  const SpaceOperator op = assemble_space_operator(spec, mesh);
  StepSolverImpl solver(op, opts, use_dense(opts, mesh.N));
  const VectorXd xs = mesh.interior_nodes();
  const double tau = mesh.tau();

  SchemeSolution sol = make_solution(spec, mesh);
  VectorXd u = sol.interior(0);
  for (Index j = 1; j <= mesh.M; ++j) {
    const double t_prev = mesh.t(j - 1);
    const VectorXd rhs = u + tau * source_at(spec, u, xs, t_prev);
    u = solver.solve(rhs, tau, nullptr, j);
    sol.values.row(j).segment(1, mesh.N - 1) = u;
  }
  if (!sol.values.allFinite())
    throw std::runtime_error("liess: solution contains non-finite values");
  return sol;
}

SchemeSolution nlies_step_run(const ProblemSpec& spec, const Mesh& mesh,
                              const SchemeOptions& opts, std::vector<int>* iters) {
  auto warnings = check_problem_on_mesh(spec, mesh);
  if (opts.warnings)
    opts.warnings->insert(opts.warnings->end(), warnings.begin(), warnings.end());

  const SpaceOperator op = assemble_space_operator(spec, mesh);
  StepSolverImpl solver(op, opts, use_dense(opts, mesh.N));
  const VectorXd xs = mesh.interior_nodes();
  const double tau = mesh.tau();

  SchemeSolution sol = make_solution(spec, mesh);
  VectorXd u = sol.interior(0);
  for (Index j = 1; j <= mesh.M; ++j) {
    const double t = mesh.t(j);
    const VectorXd rhs = u;  // u^{j-1}
    const double res_tol = 1e-10 * (1.0 + rhs.lpNorm<Eigen::Infinity>());

    VectorXd uj = u;  // initial iterate u^{j-1}
    int it = 0;
    bool converged = false;
    while (it < opts.newton_maxit) {
      const VectorXd residual = rhs + tau * source_at(spec, uj, xs, t) - op.apply(uj);
      if (residual.lpNorm<Eigen::Infinity>() <= res_tol) {
        converged = true;
        break;
      }
      const VectorXd dfu = source_derivative_at(spec, uj, xs, t);
      const VectorXd z = solver.solve(residual, tau, &dfu, j);
      uj += z;
      ++it;
      if (z.norm() <= opts.newton_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "per-step Newton failed to converge at step " << j << " after " << it
         << " iterations";
      throw SolverFailure(os.str());
    }
    if (iters) iters->push_back(it);
    u = uj;
    sol.values.row(j).segment(1, mesh.N - 1) = u;
  }
  if (!sol.values.allFinite())
    throw std::runtime_error("nlies: solution contains non-finite values");
  return sol;
}

}  // namespace tfde
