#ifndef AE2LSTM_METRICS_HPP
#define AE2LSTM_METRICS_HPP

#include <cstddef>
#include <vector>

#include "ae2lstm/volume.hpp"

namespace ae2lstm {

// Binary-classification metrics over one prediction set. Label 1 ("poor
// outcome") is the positive class throughout. Rates whose denominator is
// empty (e.g. sensitivity without any positive ground truth) are reported
// as quiet NaN, never silently zero; AUC is NaN when either class is
// absent.
struct MetricsReport {
  double auc = 0.0;
  double mae = 0.0;       // mean |p - y| on continuous probabilities
  double mae_hard = 0.0;  // same on thresholded classes (secondary)
  double accuracy = 0.0;
  double specificity = 0.0;
  double sensitivity = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
  std::size_t n = 0;
  long tp = 0, tn = 0, fp = 0, fn = 0;
};

// probs in [0,1], labels in {0,1}, equal non-empty lengths (usage errors
// otherwise). Thresholding maps p >= threshold to class 1. AUC is the
// Mann-Whitney rank statistic with ties contributing one half.
MetricsReport compute_metrics(const std::vector<double>& probs,
                              const std::vector<int>& labels,
                              double threshold = 0.5);

// Sanity floor: predicts the positive-class rate as the probability for
// every patient. Usage error when the cohort has a single class.
MetricsReport majority_baseline(const Cohort& cohort);

}  // namespace ae2lstm

#endif
