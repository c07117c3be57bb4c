#include "dsfa/geneig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dsfa {
namespace {

void check_square(const Matrix& M, const char* name) {
  if (M.rows() == 0 || M.rows() != M.cols())
    throw std::invalid_argument(std::string(name) + " must be square and non-empty");
}

void check_symmetric(const Matrix& M, const char* name) {
  check_square(M, name);
  const double tol = 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff());
  const double skew = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (skew > tol)
    throw std::invalid_argument(std::string(name) + " is not symmetric (max skew " +
                                std::to_string(skew) + ")");
}

// Largest-magnitude entry of each column made positive.
void fix_column_signs(Matrix& V) {
  for (Index j = 0; j < V.cols(); ++j) {
    Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
  }
}

double max_offdiag(const Matrix& A) {
  const Index d = A.rows();
  double off = 0.0;
  for (Index p = 0; p < d; ++p)
    for (Index q = p + 1; q < d; ++q) off = std::max(off, std::abs(A(p, q)));
  return off;
}

}  // namespace

Matrix cholesky(const Matrix& B) {
  check_symmetric(B, "B");
  const Index d = B.rows();
  Matrix L = Matrix::Zero(d, d);
  for (Index j = 0; j < d; ++j) {
    const double diag = B(j, j) - L.row(j).head(j).squaredNorm();
    if (diag <= 0.0)
      throw NotPositiveDefiniteError(
          "cholesky: matrix not positive definite at pivot " + std::to_string(j + 1), j + 1);
    L(j, j) = std::sqrt(diag);
    for (Index i = j + 1; i < d; ++i)
      L(i, j) = (B(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return L;
}

SymEigResult sym_eig(const Matrix& C) {
  check_symmetric(C, "C");
  const Index d = C.rows();
  Matrix A = 0.5 * (C + C.transpose());  // kill round-off skew before rotating
  Matrix V = Matrix::Identity(d, d);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double stop = 1e-15 * scale;

  constexpr int kMaxSweeps = 64;
  bool converged = (d == 1) || max_offdiag(A) <= stop;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (Index p = 0; p < d; ++p) {
      for (Index q = p + 1; q < d; ++q) {
        if (std::abs(A(p, q)) <= stop) continue;
        Eigen::JacobiRotation<double> rot;
        rot.makeJacobi(A, p, q);
        A.applyOnTheLeft(p, q, rot.adjoint());
        A.applyOnTheRight(p, q, rot);
        V.applyOnTheRight(p, q, rot);
      }
    }
    converged = max_offdiag(A) <= stop;
  }
  if (!converged)
    throw std::runtime_error("sym_eig: Jacobi sweep budget exhausted; off-diagonal max " +
                             std::to_string(max_offdiag(A)));

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return A(a, a) < A(b, b); });

  SymEigResult out;
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d, d);
  for (Index j = 0; j < d; ++j) {
    out.eigenvalues(j) = A(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
    out.eigenvectors.col(j) = V.col(order[static_cast<std::size_t>(j)]);
  }
  fix_column_signs(out.eigenvectors);
  return out;
}

GenEigResult gen_eig(const Matrix& A, const Matrix& B) {
  check_symmetric(A, "A");
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("gen_eig: A and B must have matching shapes");
  const Matrix L = cholesky(B);
  const auto Ltri = L.triangularView<Eigen::Lower>();

  // C = L^-1 A L^-T; the inner solve transposes A's symmetric image.
  Matrix C = Ltri.solve(Ltri.solve(A).transpose());
  SymEigResult se = sym_eig(0.5 * (C + C.transpose()));

  GenEigResult out;
  out.eigenvalues = std::move(se.eigenvalues);
  out.eigenvectors = L.transpose().triangularView<Eigen::Upper>().solve(se.eigenvectors);
  fix_column_signs(out.eigenvectors);
  return out;
}

}  // namespace dsfa
