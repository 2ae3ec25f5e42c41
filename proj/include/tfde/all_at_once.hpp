#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfde/banded.hpp"
#include "tfde/problem.hpp"
#include "tfde/schemes.hpp"
#include "tfde/space_operator.hpp"
#include "tfde/types.hpp"

namespace tfde {

/// The stacked nonlinear system coupling all M time levels,
///   F(u) = 𝒜 u - tau f(u) - v = 0,
/// with 𝒜 = blktridiag(-I, A, 0) and v = [u^0; 0; ...; 0]. Unknowns are
/// stacked time-major: u = [u^1; ...; u^M], each block of length N-1.
class AllAtOnceSystem {
 public:
  AllAtOnceSystem(const ProblemSpec& spec, const Mesh& mesh);

  const ProblemSpec& problem() const { return spec_; }
  const Mesh& mesh() const { return mesh_; }
  const SpaceOperator& space_operator() const { return op_; }
  Index block_size() const { return op_.size(); }
  Index dim() const { return mesh_.M * op_.size(); }
  const VectorXd& anchor() const { return u0_; }

  /// 𝒜 u: block j gets A u^j - u^{j-1}.
  VectorXd block_matvec(const VectorXd& u) const;

  /// F(u) = 𝒜 u - tau f(u) - v.
  VectorXd residual(const VectorXd& u) const;

  /// (𝒜 - tau diag(df/du at u_current)) x, matrix-free.
  VectorXd jacobian_apply(const VectorXd& u_current, const VectorXd& x) const;

  /// Dense Jacobian at u_current (for oracles and matrix dumps).
  MatrixXd dense_jacobian(const VectorXd& u_current, Index cap = 2048) const;

  /// Dense blktridiag(-I, A_ell, 0) (the preconditioner as a matrix).
  MatrixXd dense_preconditioner(Index ell, Index cap = 2048) const;

  /// Pack a stacked vector into a full solution grid.
  SchemeSolution unpack(const VectorXd& u) const;

  /// Stack the interior of a solution grid (rows 1..M).
  VectorXd pack(const SchemeSolution& sol) const;

 private:
  ProblemSpec spec_;
  Mesh mesh_;
  SpaceOperator op_;
  VectorXd u0_;  // interior initial data
};

/// Block preconditioner P_ell = blktridiag(-I, A_ell, 0). One banded
/// factorization of A_ell is shared by all M diagonal blocks; it depends
/// only on (mesh, problem, ell), never on the Newton iterate, so it is
/// factored once per solve. Application is block forward substitution and
/// is inherently sequential across time levels.
class Preconditioner {
 public:
  Preconditioner(const AllAtOnceSystem& sys, Index ell);

  Index ell() const { return ell_; }
  const BandedFactor<double>& factor() const { return factor_; }
  const VectorXd& gershgorin_margins() const { return margins_; }

  /// Solve P_ell z = r: A_ell z^1 = r^1, then A_ell z^j = r^j + z^{j-1}.
  VectorXd apply(const VectorXd& r) const;

 private:
  Index ell_;
  Index n_, M_;
  BandedFactor<double> factor_;
  VectorXd margins_;
};

Preconditioner precond_build(const AllAtOnceSystem& sys, Index ell);

inline VectorXd precond_apply(const Preconditioner& P, const VectorXd& r) {
  return P.apply(r);
}

/// Row margins of the nonsingularity inequality behind the preconditioner:
/// with center_i = 1 - w1 (d+,i + d-,i) g_1 + w2 (d+,i - d-,i) and the
/// proof's radius bound r_i = w1 (d+,i + d-,i) sum_{k<=ell, k!=1} g_k
/// + w2 (d+,i - d-,i), margin_i = center_i - r_i - 1. Positivity is
/// equivalent to the partial-sum property S_ell < 0 of the weights.
struct GershgorinReport {
  VectorXd margins;
  bool all_positive = false;
  double min_margin = 0.0;
};

GershgorinReport gershgorin_check(const SpaceOperator& op, Index ell);
GershgorinReport gershgorin_check(const AllAtOnceSystem& sys, const Preconditioner& P);

/// Newton/Krylov controls, defaults per the experimental protocol:
/// outer cap 100, step tolerance 1e-12, Krylov relative residual 1e-6 with
/// cap 1000 and zero initial guess, 16x16 coarse initialization, ell = 8.
struct NewtonConfig {
  Index maxit = 100;
  double tol_out = 1e-12;
  double krylov_tol = 1e-6;
  Index krylov_maxit = 1000;
  Index coarse_N = 16;
  Index coarse_M = 16;
  Index ell = 8;
  enum class Inner { Preconditioned, Unpreconditioned, DenseDirect } inner =
      Inner::Preconditioned;
  Index dense_direct_cap = 4096;  // stacked dimension allowed for DenseDirect
};

/// Outcome of one all-at-once solve. iter2 is the average Krylov count per
/// outer step (sum of Iter2(m) over m, divided by Iter1).
struct SolveReport {
  int iter1 = 0;
  double iter2 = 0.0;
  double wall_time_seconds = 0.0;
  bool converged = false;
  enum class Status { Ok, KrylovCap, Breakdown, MaxitReached } status = Status::Ok;
  std::vector<double> inner_iterations;  // per outer step
  std::vector<double> step_norms;        // ||z||_2 per outer step
  std::vector<double> residual_norms;    // ||F(u)||_2 entering each outer step
  std::vector<std::string> warnings;

  /// Table marker: "" when clean, "‡" for Krylov non-convergence.
  std::string marker() const;
};

/// L-IES on the coarse mesh, padded with its boundary columns and initial
/// row, then bilinearly interpolated in (x,t) onto the fine interior nodes,
/// stacked time-major.
VectorXd coarse_initial_guess(const ProblemSpec& spec, const Mesh& fine_mesh,
                              Index coarse_N = 16, Index coarse_M = 16);

/// Newton's method on F(u) = 0 with PBiCGSTAB inner solves: initial guess
/// from the coarse grid, per step solve J z = -F(u), u <- u + z, stop when
/// ||z||_2 <= tol_out. No damping or line search. Wall time spans the whole
/// call including the coarse initialization.
std::pair<SchemeSolution, SolveReport> newton_solve(const AllAtOnceSystem& sys,
                                                    const NewtonConfig& config = {});

}  // namespace tfde
