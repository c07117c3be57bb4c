#pragma once

#include <stdexcept>
#include <string>

#include "dsfa/types.hpp"

namespace dsfa {

struct NotPositiveDefiniteError : std::runtime_error {
  NotPositiveDefiniteError(const std::string& msg, Index pivot_1based)
      : std::runtime_error(msg), pivot(pivot_1based) {}
  Index pivot;  // 1-based index of the failing pivot
};

struct SymEigResult {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal, column j pairs with eigenvalue j
};

struct GenEigResult {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column j solves A w = lambda_j B w; W^T B W = I
};

// Lower-triangular L with L L^T = B. B must be symmetric within 1e-10;
// a non-positive pivot raises NotPositiveDefiniteError naming the pivot.
Matrix cholesky(const Matrix& B);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues come back ascending; each eigenvector is scaled so its
// largest-magnitude entry is positive, which makes the output deterministic.
SymEigResult sym_eig(const Matrix& C);

// Symmetric-definite generalized problem A W = B W Lambda, reduced through
// B = L L^T to the ordinary problem C = L^-1 A L^-T and mapped back with
// W = L^-T V.
GenEigResult gen_eig(const Matrix& A, const Matrix& B);

}  // namespace dsfa
