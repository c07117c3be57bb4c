#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dsfa/types.hpp"

namespace dsfa {

// Tri-state reference map; metrics ignore Unsampled pixels.
enum class Label : std::uint8_t { Unsampled = 0, Unchanged = 1, Changed = 2 };

using GroundTruth = std::vector<Label>;

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t sampled() const { return tp + tn + fp + fn; }
};

struct MetricBundle {
  double oa_chg = 0.0;  // accuracy over sampled changed pixels
  double oa_un = 0.0;   // accuracy over sampled unchanged pixels
  double oa = 0.0;      // accuracy over all sampled pixels
  double kappa = 0.0;
  double f1 = 0.0;      // changed is the positive class
};

// Counts over sampled pixels only; throws if nothing is sampled.
ConfusionCounts confusion(const BinaryMask& pred, const GroundTruth& gt);

// Throws naming the metric when a zero denominator makes it undefined.
MetricBundle metrics(const ConfusionCounts& c);

// Flat object: the five metrics plus raw counts.
nlohmann::ordered_json metrics_json(const MetricBundle& m, const ConfusionCounts& c);

}  // namespace dsfa
