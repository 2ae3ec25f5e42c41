#pragma once

#include <cassert>

#include "tfde/fft.hpp"
#include "tfde/types.hpp"
#include "tfde/weights.hpp"

namespace tfde {

/// Lower-Hessenberg Toeplitz operator: entry (i,j) = g_{i-j+1} whenever
/// i >= j-1, else 0. First column carries g_1..g_n, the single
/// superdiagonal carries g_0. Products with it (and its transpose) run
/// through a circulant embedding of power-of-two size >= 2n, so a matvec
/// costs O(n log n).
class LowerHessenbergToeplitz {
 public:
  LowerHessenbergToeplitz(VectorXd first_col, double super_diag)
      : n_(first_col.size()), first_col_(std::move(first_col)), super_(super_diag) {
    if (n_ < 1) throw std::domain_error("toeplitz: dimension must be >= 1");
    fft_size_ = next_pow2_at_least(2 * n_);
    build_symbols();
  }

  /// The leading n x n block of the operator generated by weights g_0..g_K
  /// (requires K >= n).
  static LowerHessenbergToeplitz from_weights(const TemperedWeights<double>& w, Index n) {
    if (w.count() < n + 1)
      throw std::domain_error("toeplitz: weight sequence too short for dimension");
    return LowerHessenbergToeplitz(w.g.segment(1, n), w.g[0]);
  }

  Index rows() const { return n_; }
  Index fft_size() const { return fft_size_; }
  double super_diag() const { return super_; }
  const VectorXd& first_col() const { return first_col_; }

  double entry(Index i, Index j) const {
    const Index d = i - j;
    if (d == -1) return super_;
    if (d >= 0) return first_col_[d];
    return 0.0;
  }

  /// G*x, or G^T*x with transpose set.
  VectorXd apply(const VectorXd& x, bool transpose = false) const {
    if (x.size() != n_) throw ShapeError("toeplitz matvec: length mismatch");
    VectorXd padded = VectorXd::Zero(fft_size_);
    padded.head(n_) = x;
    VectorXcd spectrum;
    fft_forward(padded, spectrum);
    spectrum.array() *= (transpose ? symbol_t_ : symbol_).array();
    VectorXd full;
    fft_inverse(spectrum, full);
    return full.head(n_);
  }

  MatrixXd dense() const {
    MatrixXd out(n_, n_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = 0; j < n_; ++j) out(i, j) = entry(i, j);
    return out;
  }

 private:
  void build_symbols() {
    // Circulant first column c with c[d] = entry on diagonal d;
    // the single superdiagonal wraps to the last slot. fft_size_ >= 2n
    // keeps the wrapped entries away from the first n outputs.
    VectorXd c = VectorXd::Zero(fft_size_);
    c[0] = first_col_[0];
    for (Index k = 1; k < n_; ++k) c[k] = first_col_[k];
    c[fft_size_ - 1] = super_;
    fft_forward(c, symbol_);

    VectorXd ct = VectorXd::Zero(fft_size_);
    ct[0] = first_col_[0];
    ct[1] = super_;
    for (Index k = 1; k < n_; ++k) ct[fft_size_ - k] = first_col_[k];
    fft_forward(ct, symbol_t_);
  }

  Index n_;
  VectorXd first_col_;
  double super_;
  Index fft_size_;
  VectorXcd symbol_, symbol_t_;
};

inline VectorXd toeplitz_matvec(const LowerHessenbergToeplitz& G, const VectorXd& x,
                                bool transpose = false) {
  return G.apply(x, transpose);
}

}  // namespace tfde
