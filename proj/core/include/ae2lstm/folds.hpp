#ifndef AE2LSTM_FOLDS_HPP
#define AE2LSTM_FOLDS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ae2lstm/volume.hpp"

namespace ae2lstm {

struct Fold {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct FoldPlan {
  int k = 5;
  bool stratified = true;
  std::vector<Fold> folds;  // test sets are disjoint and cover the cohort
};

// Cross-validation split, deterministic per seed. Stratified mode shuffles
// each class separately and deals round-robin, so per-fold class counts
// differ from the ideal proportion by at most one patient. Usage errors on
// k < 2 or k > cohort size.
FoldPlan make_folds(const Cohort& cohort, int k, std::uint64_t seed,
                    bool stratified = true);

}  // namespace ae2lstm

#endif
