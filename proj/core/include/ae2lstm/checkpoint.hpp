#ifndef AE2LSTM_CHECKPOINT_HPP
#define AE2LSTM_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ae2lstm/features.hpp"
#include "ae2lstm/fusion.hpp"
#include "ae2lstm/lstm.hpp"
#include "ae2lstm/sparse_ae.hpp"

namespace ae2lstm {

// Checkpoint container: magic "AE2L", u32 format version, u32 model kind,
// a kind-specific hyperparameter block, then parameter matrices, each as
// u32 rows + u32 cols + row-major little-endian f32 payload. Everything is
// little-endian on disk regardless of host. Loading a checkpoint written
// by the same build reproduces every weight bit-exactly (weights are f32
// in production and stored as f32). Unknown versions and kind mismatches
// are rejected with compatibility errors.
enum class CheckpointKind : std::uint32_t {
  sparse_ae = 1,
  fusion = 2,
  lstm = 3,
  feature_cache = 4,
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

const char* to_string(CheckpointKind k);

// Reads just the header; parse/compat errors as in the full loaders.
CheckpointKind peek_checkpoint_kind(const std::string& path);

void save_sparse_ae(const std::string& path, const SparseAe<float>& ae);
SparseAe<float> load_sparse_ae(const std::string& path);

void save_fusion(const std::string& path, const FusionStack<float>& stack);
FusionStack<float> load_fusion(const std::string& path);

void save_lstm(const std::string& path, const LstmModel<float>& model);
LstmModel<float> load_lstm(const std::string& path);

// Feature cache: the encoded sequences of one cohort, so LSTM-side sweeps
// can skip AE inference. All sequences must share the feature dimension.
void save_features(const std::string& path,
                   const std::vector<FeatureSequence<float>>& seqs);
std::vector<FeatureSequence<float>> load_features(const std::string& path);

}  // namespace ae2lstm

#endif
