#ifndef AE2LSTM_COMMANDS_HPP
#define AE2LSTM_COMMANDS_HPP

#include <string>

#include "ae2lstm/config.hpp"

namespace ae2lstm {

// Implementations of the CLI subcommands. Each either succeeds or throws
// an Error whose line() form the binary prints to stderr. All artifacts
// are deterministic functions of the options (no timestamps, relative
// paths inside manifests), so rerunning a command reproduces its outputs
// byte for byte.

// Writes one NIfTI-1 volume per patient per modality plus manifest.tsv.
struct GenSynthOptions {
  PipelineConfig config;
  std::string out_dir = "out";
};
void cmd_gen_synth(const GenSynthOptions& opts);

// Trains the fusion stack on all patients' slices, encodes the cohort,
// then trains the LSTM with a stratified validation carve-out. Artifacts:
// fusion.ae2l, lstm.ae2l, train_report.txt, optionally features.ae2l.
struct TrainOptions {
  PipelineConfig config;
  std::string out_dir = "out";
  std::string reuse_fusion;  // path: load this fusion checkpoint, skip AE training
  std::string features_in;   // path: load cached sequences, skip fusion entirely
  bool cache_features = false;  // also write features.ae2l
};
void cmd_train(const TrainOptions& opts);

// Applies saved checkpoints to the manifest's patients; emits one
// "id<TAB>probability<TAB>class" line per patient in manifest order, to
// out_path when set, stdout otherwise.
struct PredictOptions {
  std::string fusion_path;
  std::string lstm_path;
  std::string manifest_path;
  std::string out_path;
  bool slice_filter = false;  // must match the training-time setting
};
void cmd_predict(const PredictOptions& opts);

// Repeated cross-validated pipeline runs; writes summary.txt and
// summary.json into out_dir.
struct EvaluateOptions {
  PipelineConfig config;
  std::string out_dir = "out";
};
void cmd_evaluate(const EvaluateOptions& opts);

}  // namespace ae2lstm

#endif
