#ifndef AE2LSTM_FEATURES_HPP
#define AE2LSTM_FEATURES_HPP

#include <string>
#include <vector>

#include "ae2lstm/param.hpp"

namespace ae2lstm {

// One patient as seen by the sequence classifier: per-slice fused feature
// vectors in inferior-to-superior order, plus the binary outcome label
// (0 good, 1 poor). Sequences vary in length across patients.
template <typename S>
struct FeatureSequence {
  std::string patient_id;
  std::vector<VecX<S>> steps;
  int label = 0;
};

}  // namespace ae2lstm

#endif
