#ifndef AE2LSTM_GRAD_CHECK_HPP
#define AE2LSTM_GRAD_CHECK_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ae2lstm/param.hpp"

namespace ae2lstm {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t entries_checked = 0;
  std::size_t nonfinite_comparisons = 0;
  std::string worst_param;
  Eigen::Index worst_row = -1, worst_col = -1;
  double worst_analytic = 0.0, worst_numeric = 0.0;
};

// Central-difference check of the analytic gradients of a scalar loss.
//
// loss_fn must recompute the loss from the current parameter values and, as
// a side effect of its backward pass, accumulate gradients into params.
// Meant to be instantiated with S = double; the model math itself runs in
// float, so checking in the model precision would drown in rounding noise.
//
// Checks up to max_entries_per_param entries of each parameter (all of them
// when the parameter is small), sampled with rng.
template <typename S>
GradCheckReport gradient_check(const std::function<S()>& loss_fn,
                               const ParamList<S>& params, double step,
                               Rng& rng,
                               std::size_t max_entries_per_param = 64) {
  GradCheckReport report;

  // One full pass for the analytic gradients.
  for (auto* p : params) p->zero_grad();
  (void)loss_fn();
  std::vector<MatX<S>> analytic;
  analytic.reserve(params.size());
  for (auto* p : params) analytic.push_back(p->grad);

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto* p = params[pi];
    const std::size_t total = std::size_t(p->values.size());
    std::vector<std::size_t> entries;
    if (total <= max_entries_per_param) {
      entries.resize(total);
      for (std::size_t i = 0; i < total; ++i) entries[i] = i;
    } else {
      entries.reserve(max_entries_per_param);
      for (std::size_t i = 0; i < max_entries_per_param; ++i)
        entries.push_back(std::size_t(rng.below(total)));
    }

    for (std::size_t flat : entries) {
      const Eigen::Index r = Eigen::Index(flat % std::size_t(p->rows()));
      const Eigen::Index c = Eigen::Index(flat / std::size_t(p->rows()));
      const S saved = p->values(r, c);

      p->values(r, c) = saved + S(step);
      for (auto* q : params) q->zero_grad();
      const double loss_plus = double(loss_fn());

      p->values(r, c) = saved - S(step);
      for (auto* q : params) q->zero_grad();
      const double loss_minus = double(loss_fn());

      p->values(r, c) = saved;

      const double numeric = (loss_plus - loss_minus) / (2.0 * step);
      const double analytic_g = double(analytic[pi](r, c));
      ++report.entries_checked;

      if (!std::isfinite(numeric) || !std::isfinite(analytic_g)) {
        ++report.nonfinite_comparisons;
        continue;
      }
      const double denom =
          std::max({1e-8, std::abs(numeric), std::abs(analytic_g)});
      const double rel = std::abs(numeric - analytic_g) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = p->name;
        report.worst_row = r;
        report.worst_col = c;
        report.worst_analytic = analytic_g;
        report.worst_numeric = numeric;
      }
    }
  }

  // Leave the analytic gradients in place for the caller.
  for (std::size_t pi = 0; pi < params.size(); ++pi)
    params[pi]->grad = analytic[pi];
  return report;
}

}  // namespace ae2lstm

#endif
