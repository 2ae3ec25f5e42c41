#pragma once

// Test-only reference implementations. Everything here is deliberately
// written from the defining formulas (product forms, index loops, dense
// assemblies) and shares no code with the library paths it checks.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "tfde/problem.hpp"
#include "tfde/types.hpp"

namespace oracles {

using tfde::Index;
using tfde::MatrixXd;
using tfde::VectorXd;

// (-1)^k C(alpha, k) by the direct product form prod_{j=1..k} (j-1-alpha)/j.
inline VectorXd binomial_weights_product(double alpha, Index K) {
  VectorXd g(K + 1);
  g[0] = 1.0;
  for (Index k = 1; k <= K; ++k)
    g[k] = g[k - 1] * ((static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k));
  return g;
}

// Tempered sequence straight from the case formula.
inline VectorXd tempered_weights_direct(double alpha, double lambda, double h, Index K) {
  const VectorXd gt = binomial_weights_product(alpha, K >= 1 ? K : 1);
  VectorXd g(K + 1);
  for (Index k = 0; k <= K; ++k) {
    if (k == 1) {
      g[k] = gt[1] - std::exp(h * lambda) * std::pow(1.0 - std::exp(-h * lambda), alpha);
    } else {
      g[k] = gt[k] * std::exp(-(static_cast<double>(k) - 1.0) * h * lambda);
    }
  }
  return g;
}

// Dense lower-Hessenberg Toeplitz from a weight sequence: (i,j) holds
// g_{i-j+1}, one superdiagonal g_0.
inline MatrixXd dense_toeplitz(const VectorXd& g, Index n) {
  MatrixXd G = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const Index k = i - j + 1;
      if (k >= 0 && k < g.size()) G(i, j) = g[k];
    }
  return G;
}

inline VectorXd dense_matvec(const MatrixXd& A, const VectorXd& x) {
  VectorXd y = VectorXd::Zero(A.rows());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) y[i] += A(i, j) * x[j];
  return y;
}

// The spatial operator assembled by walking the scheme's sums index by
// index: row i collects -w1 d+ g_k at column i-k+1 and -w1 d- g_k at
// column i+k-1, plus the identity and the advection correction.
inline MatrixXd dense_space_operator_indexform(const tfde::ProblemSpec& spec,
                                               const tfde::Mesh& mesh) {
  const Index n = mesh.N - 1;
  const double h = mesh.h();
  const double tau = mesh.tau();
  const double w1 = tau / std::pow(h, spec.alpha);
  const double w2 = spec.lambda == 0.0
                        ? 0.0
                        : spec.alpha * std::pow(spec.lambda, spec.alpha - 1.0) * tau / h;
  const VectorXd g = tempered_weights_direct(spec.alpha, spec.lambda, h, mesh.N);

  MatrixXd A = MatrixXd::Zero(n, n);
  for (Index row = 1; row <= n; ++row) {  // 1-based interior indices
    const double x = mesh.x(row);
    const double dp = spec.d_plus(x);
    const double dm = spec.d_minus(x);
    A(row - 1, row - 1) += 1.0;
    for (Index k = 0; k <= row + 1; ++k) {
      const Index col = row - k + 1;
      if (col >= 1 && col <= n) A(row - 1, col - 1) -= w1 * dp * g[k];
    }
    for (Index k = 0; k <= mesh.N - row + 1; ++k) {
      const Index col = row + k - 1;
      if (col >= 1 && col <= n) A(row - 1, col - 1) -= w1 * dm * g[k];
    }
    A(row - 1, row - 1) += w2 * (dp - dm);
    if (row >= 2) A(row - 1, row - 2) -= w2 * (dp - dm);
  }
  return A;
}

// Dense all-at-once block matrix blktridiag(-I, A, 0) from a dense A.
inline MatrixXd dense_block_bidiagonal(const MatrixXd& A, Index M) {
  const Index n = A.rows();
  MatrixXd out = MatrixXd::Zero(M * n, M * n);
  for (Index j = 0; j < M; ++j) {
    out.block(j * n, j * n, n, n) = A;
    if (j > 0) out.block(j * n, (j - 1) * n, n, n) = -MatrixXd::Identity(n, n);
  }
  return out;
}

inline VectorXd dense_solve(const MatrixXd& A, const VectorXd& b) {
  return Eigen::FullPivLU<MatrixXd>(A).solve(b);
}

inline std::mt19937& rng() {
  static std::mt19937 gen(0x51f0a1);
  return gen;
}

inline VectorXd random_vector(Index n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng());
  return v;
}

inline double rel_err(const VectorXd& got, const VectorXd& want) {
  const double scale = want.norm();
  return scale == 0.0 ? (got - want).norm() : (got - want).norm() / scale;
}

inline double rel_err(const MatrixXd& got, const MatrixXd& want) {
  const double scale = want.norm();
  return scale == 0.0 ? (got - want).norm() : (got - want).norm() / scale;
}

}  // namespace oracles
