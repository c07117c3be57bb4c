#include "dsfa/eval.hpp"

#include <stdexcept>

namespace dsfa {

ConfusionCounts confusion(const BinaryMask& pred, const GroundTruth& gt) {
  if (static_cast<std::size_t>(pred.size()) != gt.size())
    throw std::invalid_argument("confusion: prediction and ground truth lengths differ");
  ConfusionCounts c;
  for (Index i = 0; i < pred.size(); ++i) {
    switch (gt[static_cast<std::size_t>(i)]) {
      case Label::Changed:
        pred(i) ? ++c.tp : ++c.fn;
        break;
      case Label::Unchanged:
        pred(i) ? ++c.fp : ++c.tn;
        break;
      case Label::Unsampled:
        break;
    }
  }
  if (c.sampled() == 0) throw std::invalid_argument("confusion: no sampled pixels");
  return c;
}

MetricBundle metrics(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double N = tp + tn + fp + fn;
  if (N <= 0.0) throw std::invalid_argument("metrics: no sampled pixels");

  MetricBundle m;
  if (tp + fn <= 0.0) throw std::invalid_argument("metrics: oa_chg undefined, no sampled changed pixels");
  if (tn + fp <= 0.0) throw std::invalid_argument("metrics: oa_un undefined, no sampled unchanged pixels");
  m.oa_chg = tp / (tp + fn);
  m.oa_un = tn / (tn + fp);
  m.oa = (tp + tn) / N;

  const double pe = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (N * N);
  if (1.0 - pe == 0.0) throw std::invalid_argument("metrics: kappa undefined, chance agreement is 1");
  m.kappa = (m.oa - pe) / (1.0 - pe);

  if (2.0 * tp + fp + fn <= 0.0) throw std::invalid_argument("metrics: f1 undefined");
  m.f1 = 2.0 * tp / (2.0 * tp + fp + fn);
  return m;
}

nlohmann::ordered_json metrics_json(const MetricBundle& m, const ConfusionCounts& c) {
  nlohmann::ordered_json j;
  j["oa_chg"] = m.oa_chg;
  j["oa_un"] = m.oa_un;
  j["oa"] = m.oa;
  j["kappa"] = m.kappa;
  j["f1"] = m.f1;
  j["tp"] = c.tp;
  j["tn"] = c.tn;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  return j;
}

}  // namespace dsfa
