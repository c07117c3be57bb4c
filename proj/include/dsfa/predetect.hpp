#pragma once

#include <cstdint>
#include <vector>

#include "dsfa/types.hpp"

namespace dsfa {

enum class SampleStrategy { Cva, GroundTruth, Random, Negative };

struct KmeansResult {
  BinaryMask mask;  // true = assigned to the larger centroid (changed)
  double centroid_low = 0.0;
  double centroid_high = 0.0;
};

struct SampleSet {
  Matrix xs;
  Matrix ys;
  std::vector<Index> indices;
  SampleStrategy strategy = SampleStrategy::Cva;
};

// Per-pixel Euclidean norm of the spectral difference.
Vector cva_magnitude(const Matrix& X, const Matrix& Y);

// Two-cluster Lloyd iterations on scalars, centroids initialized at the min
// and max. Equidistant points join the lower cluster, so the result is
// deterministic and the seed is only a tie-break reserve.
KmeansResult kmeans_1d(const Vector& values, std::uint64_t seed);

// Uniform sample without replacement, deterministic under seed. The mask
// marks unchanged pixels; the pool is mask for Cva/GroundTruth, its
// complement for Negative, and every pixel for Random.
SampleSet select_samples(const Matrix& X, const Matrix& Y, const BinaryMask& unchanged_mask,
                         int count, std::uint64_t seed, SampleStrategy strategy);

// Projects the raw difference X-Y onto the top-k principal directions of its
// covariance; intensity is the squared projection norm.
Vector pca_diff(const Matrix& X, const Matrix& Y, int k);

}  // namespace dsfa
