#include "dsfa/linear_sfa.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dsfa/geneig.hpp"
#include "dsfa/segment.hpp"

namespace dsfa {
namespace {

void check_pair(const Matrix& X, const Matrix& Y, const char* what) {
  if (X.rows() == 0 || X.cols() == 0)
    throw std::invalid_argument(std::string(what) + ": empty input");
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw std::invalid_argument(std::string(what) + ": X and Y shapes differ");
}

std::pair<Matrix, Matrix> matrices_impl(const Matrix& X, const Matrix& Y,
                                        const Vector* weights) {
  check_pair(X, Y, "sfa_matrices");
  const Index n = X.cols();
  Matrix A, B;
  if (weights == nullptr) {
    const Matrix D = X - Y;
    A = (D * D.transpose()) / static_cast<double>(n);
    B = (X * X.transpose() + Y * Y.transpose()) / (2.0 * static_cast<double>(n));
  } else {
    const Vector& w = *weights;
    if (w.size() != n)
      throw std::invalid_argument("sfa_matrices: weights length must equal pixel count");
    if ((w.array() < 0.0).any() || (w.array() > 1.0).any())
      throw std::invalid_argument("sfa_matrices: weights must lie in [0,1]");
    const double sw = w.sum();
    if (sw <= 0.0) throw std::invalid_argument("sfa_matrices: all-zero weights");
    const Matrix D = X - Y;
    A = (D * w.asDiagonal() * D.transpose()) / sw;
    B = (X * w.asDiagonal() * X.transpose() + Y * w.asDiagonal() * Y.transpose()) / (2.0 * sw);
  }
  A = 0.5 * (A + A.transpose());
  B = 0.5 * (B + B.transpose());
  return {std::move(A), std::move(B)};
}

// Per-band weighted population variance of D, then the per-pixel chi-square
// statistic over the non-degenerate bands. All-degenerate D (for example two
// identical dates) yields zeros: no evidence of change anywhere.
Vector weighted_chi2(const Matrix& D, const Vector& w) {
  const Index m = D.rows();
  const Index n = D.cols();
  const double sw = w.sum();
  Vector t = Vector::Zero(n);
  for (Index b = 0; b < m; ++b) {
    const double mean = D.row(b).dot(w) / sw;
    const double var = (D.row(b).transpose().array() - mean).square().matrix().dot(w) / sw;
    if (var == 0.0) continue;
    t += D.row(b).transpose().array().square().matrix() / var;
  }
  return t;
}

}  // namespace

std::pair<Matrix, Matrix> sfa_matrices(const Matrix& X, const Matrix& Y) {
  return matrices_impl(X, Y, nullptr);
}

std::pair<Matrix, Matrix> sfa_matrices(const Matrix& X, const Matrix& Y, const Vector& weights) {
  return matrices_impl(X, Y, &weights);
}

SfaModel solve_sfa(const Matrix& A, const Matrix& B) {
  GenEigResult ge;
  try {
    ge = gen_eig(A, B);
  } catch (const NotPositiveDefiniteError&) {
    const double ridge = 1e-10 * B.trace() / static_cast<double>(B.rows());
    Matrix Br = B + ridge * Matrix::Identity(B.rows(), B.cols());
    ge = gen_eig(A, Br);
    SfaModel model;
    model.eigenvalues = std::move(ge.eigenvalues);
    model.w_hat = std::move(ge.eigenvectors);
    for (Index j = 0; j < model.w_hat.cols(); ++j)
      model.w_hat.col(j) /= std::sqrt(model.w_hat.col(j).dot(Br * model.w_hat.col(j)));
    return model;
  }
  SfaModel model;
  model.eigenvalues = std::move(ge.eigenvalues);
  model.w_hat = std::move(ge.eigenvectors);
  for (Index j = 0; j < model.w_hat.cols(); ++j)
    model.w_hat.col(j) /= std::sqrt(model.w_hat.col(j).dot(B * model.w_hat.col(j)));
  return model;
}

SfaModel fit_sfa(const Matrix& X, const Matrix& Y) {
  auto [A, B] = sfa_matrices(X, Y);
  return solve_sfa(A, B);
}

SfaModel fit_sfa(const Matrix& X, const Matrix& Y, const Vector& weights) {
  auto [A, B] = sfa_matrices(X, Y, weights);
  return solve_sfa(A, B);
}

Matrix transform_diff(const SfaModel& model, const Matrix& X, const Matrix& Y) {
  check_pair(X, Y, "transform_diff");
  if (model.w_hat.rows() != X.rows())
    throw std::invalid_argument("transform_diff: band count does not match model");
  return model.w_hat.transpose() * (X - Y);
}

IsfaResult fit_isfa(const Matrix& X, const Matrix& Y, int max_iter, double tol) {
  check_pair(X, Y, "fit_isfa");
  if (max_iter < 1) throw std::invalid_argument("fit_isfa: max_iter must be >= 1");
  const Index m = X.rows();
  const Index n = X.cols();

  Vector w = Vector::Ones(n);
  IsfaResult out;
  out.model = fit_sfa(X, Y);
  for (int k = 1; k <= max_iter; ++k) {
    const Matrix D = transform_diff(out.model, X, Y);
    const Vector t = weighted_chi2(D, w);
    Vector w_new(n);
    for (Index i = 0; i < n; ++i) w_new(i) = chi2_survival(t(i), static_cast<int>(m));
    if (w_new.maxCoeff() < 1e-12)
      throw std::runtime_error("fit_isfa: all pixels classified changed");
    const double delta = (w_new - w).cwiseAbs().maxCoeff();
    w = std::move(w_new);
    out.model = fit_sfa(X, Y, w);
    out.iterations = k;
    if (delta < tol) break;
  }
  out.weights = std::move(w);
  return out;
}

}  // namespace dsfa
