#include "dsfa/predetect.hpp"

#include <stdexcept>
#include <string>

#include "dsfa/geneig.hpp"
#include "dsfa/rng.hpp"

namespace dsfa {
namespace {

void check_pair(const Matrix& X, const Matrix& Y, const char* what) {
  if (X.rows() == 0 || X.cols() == 0)
    throw std::invalid_argument(std::string(what) + ": empty input");
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw std::invalid_argument(std::string(what) + ": X and Y shapes differ");
}

}  // namespace

Vector cva_magnitude(const Matrix& X, const Matrix& Y) {
  check_pair(X, Y, "cva_magnitude");
  return (X - Y).colwise().norm().transpose();
}

KmeansResult kmeans_1d(const Vector& values, std::uint64_t /*seed*/) {
  const Index n = values.size();
  if (n < 2) throw std::invalid_argument("kmeans_1d: need at least 2 values");
  double lo = values.minCoeff();
  double hi = values.maxCoeff();
  if (!(hi > lo)) throw std::invalid_argument("kmeans_1d: constant input");

  BinaryMask assign(n);
  assign.setConstant(false);
  for (int iter = 0; iter < 1000; ++iter) {
    bool moved = false;
    double sum_lo = 0.0, sum_hi = 0.0;
    Index n_lo = 0, n_hi = 0;
    for (Index i = 0; i < n; ++i) {
      const double v = values(i);
      const bool to_hi = std::abs(v - hi) < std::abs(v - lo);  // ties stay low
      if (to_hi != assign(i)) {
        assign(i) = to_hi;
        moved = true;
      }
      if (to_hi) {
        sum_hi += v;
        ++n_hi;
      } else {
        sum_lo += v;
        ++n_lo;
      }
    }
    lo = sum_lo / static_cast<double>(n_lo);
    hi = sum_hi / static_cast<double>(n_hi);
    if (!moved) break;
  }
  return {std::move(assign), lo, hi};
}

SampleSet select_samples(const Matrix& X, const Matrix& Y, const BinaryMask& unchanged_mask,
                         int count, std::uint64_t seed, SampleStrategy strategy) {
  check_pair(X, Y, "select_samples");
  const Index n = X.cols();
  if (strategy != SampleStrategy::Random && unchanged_mask.size() != n)
    throw std::invalid_argument("select_samples: mask length must equal pixel count");
  if (count < 1) throw std::invalid_argument("select_samples: count must be positive");

  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const bool eligible = strategy == SampleStrategy::Random ||
                          (strategy == SampleStrategy::Negative ? !unchanged_mask(i)
                                                                : unchanged_mask(i));
    if (eligible) pool.push_back(i);
  }
  if (static_cast<std::size_t>(count) > pool.size())
    throw std::invalid_argument("select_samples: count " + std::to_string(count) +
                                " exceeds eligible pool of " + std::to_string(pool.size()));

  // Partial Fisher-Yates over the pool.
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const std::size_t j =
        static_cast<std::size_t>(i) + rng.below(pool.size() - static_cast<std::size_t>(i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));

  SampleSet out;
  out.strategy = strategy;
  out.indices = std::move(pool);
  out.xs.resize(X.rows(), count);
  out.ys.resize(Y.rows(), count);
  for (int i = 0; i < count; ++i) {
    out.xs.col(i) = X.col(out.indices[static_cast<std::size_t>(i)]);
    out.ys.col(i) = Y.col(out.indices[static_cast<std::size_t>(i)]);
  }
  return out;
}

Vector pca_diff(const Matrix& X, const Matrix& Y, int k) {
  check_pair(X, Y, "pca_diff");
  const Index m = X.rows();
  const Index n = X.cols();
  if (k < 1 || k > m) throw std::invalid_argument("pca_diff: k must lie in [1, band count]");

  const Matrix D = X - Y;
  const Vector mean = D.rowwise().mean();
  const Matrix Dc = D.colwise() - mean;
  const Matrix C = (Dc * Dc.transpose()) / static_cast<double>(n);

  const SymEigResult se = sym_eig(0.5 * (C + C.transpose()));
  // Eigenvalues are ascending; the top-k components are the trailing columns.
  const Matrix P = se.eigenvectors.rightCols(k);
  return (P.transpose() * D).colwise().squaredNorm().transpose();
}

}  // namespace dsfa
