#include "ae2lstm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ae2lstm/error.hpp"

namespace ae2lstm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Rank-statistic AUC: average ranks over the pooled sorted sample, tied
// groups sharing their mean rank, then the Mann-Whitney U of the positive
// class normalized by the pair count.
double rank_auc(const std::vector<double>& probs, const std::vector<int>& labels,
                std::size_t n_pos, std::size_t n_neg) {
  const std::size_t n = probs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && probs[order[j]] == probs[order[i]]) ++j;
    // ranks are 1-based; the tied block [i, j) shares the mean rank
    const double mean_rank = 0.5 * (double(i + 1) + double(j));
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += mean_rank;
    i = j;
  }

  const double u = rank_sum_pos - double(n_pos) * (double(n_pos) + 1.0) / 2.0;
  return u / (double(n_pos) * double(n_neg));
}

}  // namespace

MetricsReport compute_metrics(const std::vector<double>& probs,
                              const std::vector<int>& labels,
                              double threshold) {
  if (probs.empty()) throw_usage("compute_metrics: empty prediction set");
  if (probs.size() != labels.size())
    throw_usage("compute_metrics: got " + std::to_string(probs.size()) +
                " probabilities but " + std::to_string(labels.size()) + " labels");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
      throw_usage("compute_metrics: probability out of [0,1] at index " +
                  std::to_string(i));
    if (labels[i] != 0 && labels[i] != 1)
      throw_usage("compute_metrics: label not in {0,1} at index " + std::to_string(i));
  }

  MetricsReport r;
  r.threshold = threshold;
  r.n = probs.size();

  double abs_err = 0.0, abs_err_hard = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int pred = probs[i] >= threshold ? 1 : 0;  // tie goes to positive
    const int y = labels[i];
    if (pred == 1 && y == 1) ++r.tp;
    else if (pred == 0 && y == 0) ++r.tn;
    else if (pred == 1 && y == 0) ++r.fp;
    else ++r.fn;
    abs_err += std::abs(probs[i] - double(y));
    abs_err_hard += std::abs(double(pred - y));
  }

  const std::size_t n_pos = std::size_t(r.tp + r.fn);
  const std::size_t n_neg = std::size_t(r.tn + r.fp);

  r.mae = abs_err / double(r.n);
  r.mae_hard = abs_err_hard / double(r.n);
  r.accuracy = double(r.tp + r.tn) / double(r.n);
  r.sensitivity = n_pos ? double(r.tp) / double(n_pos) : kNan;
  r.specificity = n_neg ? double(r.tn) / double(n_neg) : kNan;
  r.f1 = n_pos ? 2.0 * double(r.tp) / double(2 * r.tp + r.fp + r.fn) : kNan;
  r.auc = (n_pos && n_neg) ? rank_auc(probs, labels, n_pos, n_neg) : kNan;
  return r;
}

MetricsReport majority_baseline(const Cohort& cohort) {
  if (cohort.patients.empty()) throw_usage("majority_baseline: empty cohort");
  const int n_poor = cohort.count_label(1);
  const int n_good = cohort.count_label(0);
  if (n_poor == 0 || n_good == 0)
    throw_usage("majority_baseline: cohort has a single class");

  const double rate = double(n_poor) / double(cohort.patients.size());
  std::vector<double> probs(cohort.patients.size(), rate);
  std::vector<int> labels;
  labels.reserve(cohort.patients.size());
  for (const auto& p : cohort.patients) labels.push_back(p.binary_label);
  return compute_metrics(probs, labels);
}

}  // namespace ae2lstm
