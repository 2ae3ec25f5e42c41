#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "tfde/toeplitz.hpp"
#include "tfde/types.hpp"

namespace tfde {

/// Band storage, one row per diagonal (LAPACK layout): bands(upper + i - j, j)
/// holds entry (i,j) for j - upper <= i <= j + lower.
template <typename Scalar = double>
class BandedMatrix {
 public:
  BandedMatrix(Index n, Index lower_bw, Index upper_bw)
      : n_(n), lower_(lower_bw), upper_(upper_bw),
        bands_(Matrix<Scalar>::Zero(lower_bw + upper_bw + 1, n)) {
    if (n < 1) throw std::domain_error("banded: dimension must be >= 1");
  }

  Index rows() const { return n_; }
  Index lower_bw() const { return lower_; }
  Index upper_bw() const { return upper_; }

  bool in_band(Index i, Index j) const {
    return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= upper_ && i - j <= lower_;
  }

  Scalar& at(Index i, Index j) {
    assert(in_band(i, j));
    return bands_(upper_ + i - j, j);
  }

  Scalar entry(Index i, Index j) const {
    return in_band(i, j) ? bands_(upper_ + i - j, j) : Scalar(0);
  }

  Vector<Scalar> apply(const Vector<Scalar>& x) const {
    if (x.size() != n_) throw ShapeError("banded matvec: length mismatch");
    Vector<Scalar> y = Vector<Scalar>::Zero(n_);
    for (Index j = 0; j < n_; ++j) {
      const Index ilo = std::max<Index>(0, j - upper_);
      const Index ihi = std::min<Index>(n_ - 1, j + lower_);
      for (Index i = ilo; i <= ihi; ++i) y[i] += bands_(upper_ + i - j, j) * x[j];
    }
    return y;
  }

  Matrix<Scalar> dense() const {
    Matrix<Scalar> out = Matrix<Scalar>::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = std::max<Index>(0, i - lower_);
           j <= std::min<Index>(n_ - 1, i + upper_); ++j)
        out(i, j) = entry(i, j);
    return out;
  }

 private:
  Index n_, lower_, upper_;
  Matrix<Scalar> bands_;
};

/// LU factors of a banded matrix with partial pivoting. Row swaps can fill
/// lower_bw extra superdiagonals, so the factored band holds
/// 2*lower_bw + upper_bw + 1 diagonals.
template <typename Scalar = double>
class BandedFactor {
 public:
  explicit BandedFactor(const BandedMatrix<Scalar>& A)
      : n_(A.rows()), kl_(A.lower_bw()), ku_(A.upper_bw() + A.lower_bw()),
        lu_(Matrix<Scalar>::Zero(2 * A.lower_bw() + A.upper_bw() + 1, A.rows())),
        piv_(A.rows()) {
    for (Index j = 0; j < n_; ++j) {
      const Index ilo = std::max<Index>(0, j - A.upper_bw());
      const Index ihi = std::min<Index>(n_ - 1, j + kl_);
      for (Index i = ilo; i <= ihi; ++i) lu_(ku_ + i - j, j) = A.entry(i, j);
    }
    factorize();
  }

  Index rows() const { return n_; }

  Vector<Scalar> solve(const Vector<Scalar>& b) const {
    if (b.size() != n_) throw ShapeError("banded solve: length mismatch");
    Vector<Scalar> x = b;
    solve_in_place(x);
    return x;
  }

  void solve_in_place(Vector<Scalar>& x) const {
    for (Index j = 0; j < n_ - 1; ++j) {
      if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
      const Index ihi = std::min<Index>(n_ - 1, j + kl_);
      for (Index i = j + 1; i <= ihi; ++i) x[i] -= lu_(ku_ + i - j, j) * x[j];
    }
    for (Index j = n_ - 1; j >= 0; --j) {
      x[j] /= lu_(ku_, j);
      const Index ilo = std::max<Index>(0, j - ku_);
      for (Index i = ilo; i < j; ++i) x[i] -= lu_(ku_ + i - j, j) * x[j];
    }
  }

 private:
  void factorize() {
    for (Index j = 0; j < n_; ++j) {
      const Index ihi = std::min<Index>(n_ - 1, j + kl_);
      Index p = j;
      for (Index i = j + 1; i <= ihi; ++i)
        if (std::abs(lu_(ku_ + i - j, j)) > std::abs(lu_(ku_ + p - j, j))) p = i;
      piv_[j] = p;
      if (lu_(ku_ + p - j, j) == Scalar(0))
        throw SingularMatrixError("banded LU: exactly singular pivot at column " +
                                  std::to_string(j));
      const Index jhi = std::min<Index>(n_ - 1, j + ku_);
      if (p != j)
        for (Index jc = j; jc <= jhi; ++jc)
          std::swap(lu_(ku_ + p - jc, jc), lu_(ku_ + j - jc, jc));
      const Scalar pivot = lu_(ku_, j);
      for (Index i = j + 1; i <= ihi; ++i) {
        const Scalar m = lu_(ku_ + i - j, j) / pivot;
        lu_(ku_ + i - j, j) = m;
        for (Index jc = j + 1; jc <= jhi; ++jc)
          lu_(ku_ + i - jc, jc) -= m * lu_(ku_ + j - jc, jc);
      }
    }
  }

  Index n_, kl_, ku_;
  Matrix<Scalar> lu_;
  std::vector<Index> piv_;
};

template <typename Scalar>
BandedFactor<Scalar> banded_lu(const BandedMatrix<Scalar>& A) {
  return BandedFactor<Scalar>(A);
}

template <typename Scalar>
Vector<Scalar> banded_solve(const BandedFactor<Scalar>& F, const Vector<Scalar>& b) {
  return F.solve(b);
}

/// G_ell: the Toeplitz operator rebuilt from weights g_0..g_ell only
/// (lower bandwidth ell - 1, upper bandwidth 1). Bandwidth parameters of 2
/// or less are rejected; the preconditioner theory needs ell > 2.
inline BandedMatrix<double> band_truncate(const LowerHessenbergToeplitz& G, Index ell) {
  const Index n = G.rows();
  if (ell <= 2) throw std::domain_error("band_truncate: ell must exceed 2");
  if (ell > n) throw std::domain_error("band_truncate: ell must be <= n");
  BandedMatrix<double> out(n, ell - 1, 1);
  for (Index i = 0; i < n; ++i) {
    const Index jlo = std::max<Index>(0, i - (ell - 1));
    const Index jhi = std::min<Index>(n - 1, i + 1);
    for (Index j = jlo; j <= jhi; ++j) out.at(i, j) = G.entry(i, j);
  }
  return out;
}

}  // namespace tfde
