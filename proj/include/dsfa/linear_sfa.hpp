#pragma once

#include <utility>

#include "dsfa/types.hpp"

namespace dsfa {

// Projection learned by slow feature analysis. Columns of w_hat are scaled so
// that w^T B w = 1 and are mutually B-orthogonal; eigenvalues are ascending,
// so the slowest (least changing) feature comes first.
struct SfaModel {
  Matrix w_hat;
  Vector eigenvalues;
};

struct IsfaResult {
  SfaModel model;
  Vector weights;  // per-pixel no-change probabilities in [0,1]
  int iterations = 0;
};

// A = sum_i w_i (x_i-y_i)(x_i-y_i)^T / sum w, B = sum_i w_i (x_i x_i^T +
// y_i y_i^T) / (2 sum w). The unweighted overload is the w_i = 1 case.
std::pair<Matrix, Matrix> sfa_matrices(const Matrix& X, const Matrix& Y);
std::pair<Matrix, Matrix> sfa_matrices(const Matrix& X, const Matrix& Y,
                                       const Vector& weights);

// Generalized eigenproblem A W = B W Lambda followed by the unit-B-variance
// rescaling of each column. If B's factorization fails, a single ridge of
// 1e-10 * tr(B)/m is added before retrying; standardized real rasters can be
// rank-deficient.
SfaModel solve_sfa(const Matrix& A, const Matrix& B);

SfaModel fit_sfa(const Matrix& X, const Matrix& Y);
SfaModel fit_sfa(const Matrix& X, const Matrix& Y, const Vector& weights);

// D = w_hat^T X - w_hat^T Y
Matrix transform_diff(const SfaModel& model, const Matrix& X, const Matrix& Y);

// Iteratively reweighted SFA: refit with per-pixel weights equal to the
// chi-square survival probability of each pixel's variance-normalized squared
// difference, until the weights move less than tol or max_iter is reached.
IsfaResult fit_isfa(const Matrix& X, const Matrix& Y, int max_iter = 50,
                    double tol = 1e-6);

}  // namespace dsfa
