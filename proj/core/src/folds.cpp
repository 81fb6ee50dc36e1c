#include "ae2lstm/folds.hpp"

#include <string>

#include "ae2lstm/error.hpp"
#include "ae2lstm/rng.hpp"

namespace ae2lstm {

FoldPlan make_folds(const Cohort& cohort, int k, std::uint64_t seed,
                    bool stratified) {
  const std::size_t n = cohort.patients.size();
  if (k < 2) throw_usage("make_folds: k must be >= 2, got " + std::to_string(k));
  if (std::size_t(k) > n)
    throw_usage("make_folds: k=" + std::to_string(k) + " exceeds cohort size " +
                std::to_string(n));
  cohort.check_unique_ids();

  Rng rng(Rng::derive(seed, 0xf01d));

  // Groups to deal round-robin: one per class when stratified, otherwise
  // the whole cohort as a single group.
  std::vector<std::vector<std::size_t>> groups;
  if (stratified) {
    groups.resize(2);
    for (std::size_t i = 0; i < n; ++i)
      groups[std::size_t(cohort.patients[i].binary_label)].push_back(i);
  } else {
    groups.resize(1);
    for (std::size_t i = 0; i < n; ++i) groups[0].push_back(i);
  }

  std::vector<std::vector<std::size_t>> test_sets(static_cast<std::size_t>(k));
  std::size_t next_fold = 0;  // carried across groups to keep fold sizes even
  for (auto& g : groups) {
    rng.shuffle(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      test_sets[next_fold].push_back(g[i]);
      next_fold = (next_fold + 1) % std::size_t(k);
    }
  }

  FoldPlan plan;
  plan.k = k;
  plan.stratified = stratified;
  plan.folds.resize(std::size_t(k));
  std::vector<int> fold_of(n, -1);
  for (int f = 0; f < k; ++f)
    for (std::size_t idx : test_sets[std::size_t(f)]) fold_of[idx] = f;

  for (int f = 0; f < k; ++f) {
    auto& fold = plan.folds[std::size_t(f)];
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == f)
        fold.test_ids.push_back(cohort.patients[i].id);
      else
        fold.train_ids.push_back(cohort.patients[i].id);
    }
  }
  return plan;
}

}  // namespace ae2lstm
