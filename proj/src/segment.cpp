#include "dsfa/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dsfa {
namespace {

// Regularized lower incomplete gamma P(a,x) by series expansion.
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by modified Lentz continued
// fraction.
double gamma_q_contfrac(double a, double x) {
  const double eps = 1e-16;
  const double fpmin = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double pick(const MetricBundle& m, Criterion c) {
  switch (c) {
    case Criterion::Oa: return m.oa;
    case Criterion::Kappa: return m.kappa;
    case Criterion::F1: return m.f1;
  }
  throw std::logic_error("unknown criterion");
}

}  // namespace

IntensityMap chi2_intensity(const Matrix& D) {
  if (D.cols() < 2) throw std::invalid_argument("chi2_intensity: need at least 2 pixels");
  const Index m = D.rows();
  const Index n = D.cols();
  IntensityMap out;
  out.values = Vector::Zero(n);
  for (Index b = 0; b < m; ++b) {
    const double mean = D.row(b).mean();
    const double var = (D.row(b).array() - mean).square().sum() / static_cast<double>(n);
    if (var == 0.0) continue;
    ++out.dof;
    out.values += (D.row(b).array().square() / var).matrix().transpose();
  }
  if (out.dof == 0) throw std::runtime_error("chi2_intensity: all bands degenerate");
  return out;
}

double chi2_survival(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi2_survival: dof must be positive");
  if (x <= 0.0) return 1.0;
  const double a = 0.5 * dof;
  const double xh = 0.5 * x;
  if (x < static_cast<double>(dof) + 1.0) return 1.0 - gamma_p_series(a, xh);
  return gamma_q_contfrac(a, xh);
}

double otsu_threshold(const Vector& values) {
  const Index n = values.size();
  if (n < 2) throw std::invalid_argument("otsu_threshold: need at least 2 values");
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (!(hi > lo)) throw std::invalid_argument("otsu_threshold: constant input");

  constexpr int kBins = 256;
  std::array<std::int64_t, kBins> hist{};
  for (Index i = 0; i < n; ++i) {
    const int bin = std::min(kBins - 1,
                             static_cast<int>((values(i) - lo) / (hi - lo) * kBins));
    ++hist[static_cast<std::size_t>(bin)];
  }

  double sum_total = 0.0;
  for (int k = 0; k < kBins; ++k) sum_total += static_cast<double>(k) * static_cast<double>(hist[static_cast<std::size_t>(k)]);

  double w0 = 0.0, sum0 = 0.0, best_var = -1.0;
  int best_k = 0;
  for (int k = 0; k < kBins - 1; ++k) {
    w0 += static_cast<double>(hist[static_cast<std::size_t>(k)]);
    sum0 += static_cast<double>(k) * static_cast<double>(hist[static_cast<std::size_t>(k)]);
    const double w1 = static_cast<double>(n) - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_total - sum0) / w1;
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_k = k;
    }
  }
  const double width = (hi - lo) / kBins;
  return lo + static_cast<double>(best_k + 1) * width;
}

BinaryMask binarize(const Vector& values, double threshold) {
  return values.array() > threshold;
}

BestThresholdResult best_threshold(const Vector& values, const GroundTruth& gt,
                                   Criterion criterion) {
  const Index n = values.size();
  if (static_cast<std::size_t>(n) != gt.size())
    throw std::invalid_argument("best_threshold: values and ground truth lengths differ");
  std::int64_t changed = 0, unchanged = 0;
  for (Label l : gt) {
    if (l == Label::Changed) ++changed;
    if (l == Label::Unchanged) ++unchanged;
  }
  if (changed == 0 || unchanged == 0)
    throw std::invalid_argument("best_threshold: degenerate ground truth, need both classes sampled");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return values(a) > values(b); });

  // Walk candidates in descending order; counts hold positives = {v > t}.
  ConfusionCounts c;
  c.fn = changed;
  c.tn = unchanged;
  BestThresholdResult best;
  best.criterion_value = -std::numeric_limits<double>::infinity();

  std::size_t i = 0;
  while (i < order.size()) {
    const double t = values(order[i]);
    const double crit = pick(metrics(c), criterion);
    if (crit >= best.criterion_value) {  // >= so ties land on the lower threshold
      best.criterion_value = crit;
      best.threshold = t;
      best.counts = c;
    }
    while (i < order.size() && values(order[i]) == t) {
      switch (gt[static_cast<std::size_t>(order[i])]) {
        case Label::Changed:
          --c.fn;
          ++c.tp;
          break;
        case Label::Unchanged:
          --c.tn;
          ++c.fp;
          break;
        case Label::Unsampled:
          break;
      }
      ++i;
    }
  }
  best.metrics = metrics(best.counts);
  return best;
}

}  // namespace dsfa
