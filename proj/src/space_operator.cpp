#include "tfde/space_operator.hpp"

#include <cmath>

namespace tfde {

SpaceOperator::SpaceOperator(const ProblemSpec& spec, const Mesh& mesh)
    : mesh_(mesh),
      n_(mesh.interior()),
      weights_(cached_weights(spec.alpha, spec.lambda, mesh.h(), mesh.N)),
      G_(LowerHessenbergToeplitz::from_weights(weights_, mesh.interior())) {
  const double h = mesh.h();
  const double tau = mesh.tau();
  w1_ = tau / std::pow(h, spec.alpha);
  w2_ = spec.lambda == 0.0
            ? 0.0
            : spec.alpha * std::pow(spec.lambda, spec.alpha - 1.0) * tau / h;
  d_plus_.resize(n_);
  d_minus_.resize(n_);
  for (Index i = 0; i < n_; ++i) {
    const double x = mesh.x(i + 1);
    d_plus_[i] = spec.d_plus(x);
    d_minus_[i] = spec.d_minus(x);
  }
}

VectorXd SpaceOperator::apply(const VectorXd& x) const {
  if (x.size() != n_) throw ShapeError("space operator: length mismatch");
  VectorXd y = x - w1_ * (d_plus_.cwiseProduct(G_.apply(x)) +
                          d_minus_.cwiseProduct(G_.apply(x, true)));
  if (w2_ != 0.0) {
    VectorXd bx = x;
    bx.tail(n_ - 1) -= x.head(n_ - 1);
    y += w2_ * (d_plus_ - d_minus_).cwiseProduct(bx);
  }
  return y;
}

double SpaceOperator::entry(Index i, Index j, Index ell) const {
  const auto& g = weights_.g;
  const Index k_sub = i - j + 1;  // G index
  const Index k_sup = j - i + 1;  // G^T index
  double v = i == j ? 1.0 : 0.0;
  const double Gij = (k_sub >= 0 && k_sub <= ell) ? g[k_sub] : 0.0;
  const double GTij = (k_sup >= 0 && k_sup <= ell) ? g[k_sup] : 0.0;
  v -= w1_ * (d_plus_[i] * Gij + d_minus_[i] * GTij);
  if (w2_ != 0.0) {
    if (i == j) v += w2_ * (d_plus_[i] - d_minus_[i]);
    if (j == i - 1) v -= w2_ * (d_plus_[i] - d_minus_[i]);
  }
  return v;
}

BandedMatrix<double> SpaceOperator::truncated(Index ell) const {
  if (ell <= 2) throw std::domain_error("space operator: ell must exceed 2");
  ell = std::min(ell, n_);
  const Index bw = std::max<Index>(ell - 1, 1);
  BandedMatrix<double> out(n_, bw, bw);
  for (Index i = 0; i < n_; ++i) {
    const Index jlo = std::max<Index>(0, i - bw);
    const Index jhi = std::min<Index>(n_ - 1, i + bw);
    for (Index j = jlo; j <= jhi; ++j) out.at(i, j) = entry(i, j, ell);
  }
  return out;
}

MatrixXd SpaceOperator::dense(Index cap) const {
  if (n_ > cap)
    throw ResourceLimitError("space operator: dense assembly over cap (" +
                             std::to_string(n_) + " > " + std::to_string(cap) + ")");
  MatrixXd out(n_, n_);
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j) out(i, j) = entry(i, j, n_);
  return out;
}

SpaceOperator assemble_space_operator(const ProblemSpec& spec, const Mesh& mesh) {
  return SpaceOperator(spec, mesh);
}

}  // namespace tfde
