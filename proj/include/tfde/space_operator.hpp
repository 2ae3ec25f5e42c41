#pragma once

#include "tfde/banded.hpp"
#include "tfde/problem.hpp"
#include "tfde/toeplitz.hpp"
#include "tfde/types.hpp"
#include "tfde/weights.hpp"

namespace tfde {

/// The implicit-Euler spatial operator on the interior nodes,
///
///   A = I - w1 (D+ G + D- G^T) + w2 (D+ - D-) B,
///
/// with w1 = tau/h^alpha, w2 = alpha lambda^{alpha-1} tau / h and
/// B = tridiag(-1, 1, 0). Kept in structured form: matvecs run through the
/// FFT Toeplitz kernels, dense/banded views are assembled entry-wise from
/// one shared formula. For lambda = 0 the limit w2 = 0 is set explicitly
/// (alpha - 1 > 0), never evaluating 0^{alpha-1} through pow.
class SpaceOperator {
 public:
  SpaceOperator(const ProblemSpec& spec, const Mesh& mesh);

  Index size() const { return n_; }
  double w1() const { return w1_; }
  double w2() const { return w2_; }
  const VectorXd& d_plus() const { return d_plus_; }
  const VectorXd& d_minus() const { return d_minus_; }
  const TemperedWeights<double>& weights() const { return weights_; }
  const LowerHessenbergToeplitz& toeplitz() const { return G_; }
  const Mesh& mesh() const { return mesh_; }

  /// A*x via two FFT Toeplitz products; O(N log N).
  VectorXd apply(const VectorXd& x) const;

  /// Entry (i,j) of the band-truncated operator A_ell (ell = size() gives A
  /// itself). Single source of truth for every dense/banded assembly.
  double entry(Index i, Index j, Index ell) const;

  /// Banded A_ell with half-bandwidth ell - 1 on each side. Requires ell > 2;
  /// values of ell above size() are clamped to size().
  BandedMatrix<double> truncated(Index ell) const;

  /// Dense A (n <= cap guards accidental huge assemblies).
  MatrixXd dense(Index cap = 2048) const;

 private:
  Mesh mesh_;
  Index n_;
  double w1_, w2_;
  VectorXd d_plus_, d_minus_;
  TemperedWeights<double> weights_;
  LowerHessenbergToeplitz G_;
};

SpaceOperator assemble_space_operator(const ProblemSpec& spec, const Mesh& mesh);

}  // namespace tfde
