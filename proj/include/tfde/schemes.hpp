#pragma once

#include <string>
#include <vector>

#include "tfde/problem.hpp"
#include "tfde/space_operator.hpp"
#include "tfde/types.hpp"

namespace tfde {

/// Full space-time solution grid: values(j, i) = u_i^j for j = 0..M and
/// i = 0..N. Boundary columns are identically zero; row 0 samples u0 at the
/// interior nodes.
struct SchemeSolution {
  Mesh mesh;
  MatrixXd values;  // (M+1) x (N+1)

  VectorXd interior(Index j) const { return values.row(j).segment(1, mesh.N - 1); }
};

/// How per-step linear systems are solved. Auto picks Dense for
/// N <= 512 and the A_ell-preconditioned Krylov path above.
enum class StepSolver { Auto, Dense, Krylov };

struct SchemeOptions {
  StepSolver solver = StepSolver::Auto;
  Index dense_cap = 512;         // Auto: dense LU up to this N
  double krylov_tol = 1e-12;     // per-step relative residual
  Index krylov_maxit = 1000;
  Index ell = 8;                 // preconditioner bandwidth parameter
  double newton_tol = 1e-12;     // per-step Newton step-norm tolerance
  Index newton_maxit = 50;
  std::vector<std::string>* warnings = nullptr;  // optional sink for mesh checks
};

/// Linearized implicit Euler scheme: for j = 1..M solve
///   A u^j = u^{j-1} + tau f(u^{j-1}, x, t_{j-1}).
SchemeSolution liess_run(const ProblemSpec& spec, const Mesh& mesh,
                         const SchemeOptions& opts = {});

/// Nonlinear implicit Euler scheme, stepped sequentially: for j = 1..M solve
///   A u^j - tau f(u^j, x, t_j) = u^{j-1}
/// by Newton iteration started from u^{j-1}. Serves as the sequential
/// reference the all-at-once solver is cross-validated against.
/// Returns the per-step Newton iteration counts through `iters` if given.
SchemeSolution nlies_step_run(const ProblemSpec& spec, const Mesh& mesh,
                              const SchemeOptions& opts = {},
                              std::vector<int>* iters = nullptr);

}  // namespace tfde
