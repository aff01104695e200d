#pragma once

// Shared evaluation utilities: confusion-matrix metrics, precision-recall
// curves with area-under-curve, MAE, and reliability binning.
//
// Conventions (pinned so results are comparable across scenarios):
//   - A score is flagged positive when score >= threshold.
//   - Precision with zero positive predictions is defined as 0.
//   - F1 = 2pr/(p+r) when p+r > 0, else 0.
//   - PR-AUC integrates precision over recall: a step from recall 0 at the
//     top-scored point's precision, then trapezoids between successive
//     distinct-threshold curve points.
//   - Best-F1 threshold ties resolve to the lower threshold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dml {

struct BinaryMetrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
};

inline BinaryMetrics binary_metrics(const std::vector<double>& scores,
                                    const std::vector<int>& labels,
                                    double threshold) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("binary_metrics: length mismatch");
  }
  BinaryMetrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool flag = scores[i] >= threshold;
    const bool pos = labels[i] != 0;
    if (flag && pos) ++m.tp;
    else if (flag && !pos) ++m.fp;
    else if (!flag && pos) ++m.fn;
    else ++m.tn;
  }
  m.precision = (m.tp + m.fp) > 0
                    ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp)
                    : 0.0;
  m.recall = (m.tp + m.fn) > 0
                 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                 : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.accuracy = scores.empty()
                   ? 0.0
                   : static_cast<double>(m.tp + m.tn) /
                         static_cast<double>(scores.size());
  return m;
}

struct PrPoint {
  double threshold = 0.0, precision = 0.0, recall = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // descending threshold, non-decreasing recall
  double auc = 0.0;
  double best_threshold = 0.0;
  BinaryMetrics best;  // metrics at best_threshold
};

inline PrCurve pr_curve_auc(const std::vector<double>& scores,
                            const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("pr_curve_auc: length mismatch");
  }
  std::size_t positives = 0;
  for (int l : labels) positives += (l != 0) ? 1 : 0;
  if (positives == 0) {
    throw std::invalid_argument("pr_curve_auc: no positive labels");
  }

  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  PrCurve curve;
  double best_f1 = -1.0;
  for (double t : thresholds) {
    BinaryMetrics m = binary_metrics(scores, labels, t);
    curve.points.push_back({t, m.precision, m.recall});
    // Ties resolve to the lower threshold: on equal F1, the later
    // (lower-threshold) point replaces the earlier one.
    if (m.f1 >= best_f1) {
      best_f1 = m.f1;
      curve.best_threshold = t;
      curve.best = m;
    }
  }

  double auc = curve.points.front().recall * curve.points.front().precision;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const PrPoint& a = curve.points[i - 1];
    const PrPoint& b = curve.points[i];
    auc += (b.recall - a.recall) * 0.5 * (a.precision + b.precision);
  }
  curve.auc = auc;
  return curve;
}

inline double mae(const std::vector<double>& predictions,
                  const std::vector<double>& truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("mae: length mismatch");
  }
  if (predictions.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += std::abs(predictions[i] - truths[i]);
  }
  return total / static_cast<double>(predictions.size());
}

// Full evaluation summary for one scenario run: headline confusion-matrix
// numbers, the PR curve behind them, MAE where a regression target exists,
// and scenario-specific extras (ordered so serialization is deterministic).
struct MetricsReport {
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
  PrCurve pr_curve;
  double pr_auc = 0.0;
  double mae = 0.0;
  std::map<std::string, double> extras;
};

struct ReliabilityBin {
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  double accuracy = std::numeric_limits<double>::quiet_NaN();   // NaN when empty
  double mean_conf = std::numeric_limits<double>::quiet_NaN();  // NaN when empty
};

// Bin k covers [k/n, (k+1)/n); confidence 1.0 lands in the last bin.
inline std::vector<ReliabilityBin> reliability_bins(
    const std::vector<double>& confidences, const std::vector<int>& correct,
    std::size_t nbins = 10) {
  if (confidences.size() != correct.size()) {
    throw std::invalid_argument("reliability_bins: length mismatch");
  }
  if (nbins == 0) throw std::invalid_argument("reliability_bins: zero bins");
  std::vector<ReliabilityBin> bins(nbins);
  std::vector<std::size_t> hits(nbins, 0);
  std::vector<double> conf_sum(nbins, 0.0);
  for (std::size_t k = 0; k < nbins; ++k) {
    bins[k].lo = static_cast<double>(k) / static_cast<double>(nbins);
    bins[k].hi = static_cast<double>(k + 1) / static_cast<double>(nbins);
  }
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    auto k = static_cast<std::size_t>(confidences[i] * static_cast<double>(nbins));
    if (k >= nbins) k = nbins - 1;
    ++bins[k].count;
    hits[k] += (correct[i] != 0) ? 1 : 0;
    conf_sum[k] += confidences[i];
  }
  for (std::size_t k = 0; k < nbins; ++k) {
    if (bins[k].count > 0) {
      bins[k].accuracy =
          static_cast<double>(hits[k]) / static_cast<double>(bins[k].count);
      bins[k].mean_conf = conf_sum[k] / static_cast<double>(bins[k].count);
    }
  }
  return bins;
}

}  // namespace dml
