#pragma once

#include "dsfa/eval.hpp"
#include "dsfa/types.hpp"

namespace dsfa {

// Per-pixel chi-square change intensity with its degrees of freedom (the
// number of bands that actually contributed).
struct IntensityMap {
  Vector values;
  int dof = 0;
};

enum class Criterion { Oa, Kappa, F1 };

struct BestThresholdResult {
  double threshold = 0.0;
  double criterion_value = 0.0;
  ConfusionCounts counts;
  MetricBundle metrics;
};

// chi2_i = sum_j D_ji^2 / var_j with var_j the population variance of band j
// over all pixels. Zero-variance bands are skipped and dof reduced; throws if
// every band is degenerate.
IntensityMap chi2_intensity(const Matrix& D);

// Upper-tail probability P(chi^2_dof > x) via the regularized incomplete
// gamma function: series expansion for x < dof+1, continued fraction above.
// Absolute error is below 1e-10.
double chi2_survival(double x, int dof);

// 256-bin histogram threshold maximizing between-class variance. Ties break
// toward the lower threshold; returns the upper edge of the winning bin.
double otsu_threshold(const Vector& values);

// mask_i = values_i > threshold; boundary pixels count as unchanged.
BinaryMask binarize(const Vector& values, double threshold);

// Evaluates the criterion at every distinct value as a candidate threshold
// and returns the argmax, ties toward the lower threshold.
BestThresholdResult best_threshold(const Vector& values, const GroundTruth& gt,
                                   Criterion criterion);

}  // namespace dsfa
