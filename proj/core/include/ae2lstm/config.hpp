#ifndef AE2LSTM_CONFIG_HPP
#define AE2LSTM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ae2lstm/lstm.hpp"
#include "ae2lstm/optimizer.hpp"
#include "ae2lstm/sparse_ae.hpp"

namespace ae2lstm {

// Everything the pipeline commands need, with defaults matching the study
// configuration: d=1000, nh=500, lr=1e-4, 400 AE epochs, 1000 LSTM epochs,
// batch 32, 5 folds, 10 runs. Loaded from a key=value file and overridable
// per-field by command-line flags of the same name (flag wins). Field names
// below use dashes exactly as they appear in files and flags.
struct PipelineConfig {
  // cohort source: a manifest path, or synthetic generation when empty
  std::string manifest;
  int patients = 119;
  int nx = 32, ny = 32, nz = 12;  // synthetic volume dims (desk scale)
  double poor_fraction = 0.34;

  // model sizes
  int d = 1000;
  int d_final = 0;  // 0 means "same as d"
  int nh = 500;

  // training
  OptimizerKind ae_optimizer = OptimizerKind::sgd;
  OptimizerKind optimizer = OptimizerKind::adam;  // LSTM stage
  double lr = 1e-4;
  int ae_epochs = 400;
  int lstm_epochs = 1000;
  int batch = 32;
  int patience = 20;
  double val_fraction = 0.2;
  double rho = 0.05;
  double beta = 4.0;
  double lambda = 0.004;

  // protocol
  int folds = 5;
  int runs = 10;
  std::uint64_t seed = 0;
  bool stratified = true;
  bool slice_filter = false;  // drop near-empty slices when encoding

  int resolved_d_final() const { return d_final == 0 ? d : d_final; }

  // Range-checks every field; config error naming the offending key.
  void validate() const;

  SparseAeHyper<float> ae_hyper() const;
  AeTrainConfig<float> ae_train(std::uint64_t stage_seed) const;
  LstmTrainConfig<float> lstm_train(std::uint64_t stage_seed) const;
};

// Assigns one field by its file/flag key. Unknown keys and unparsable
// values raise config errors naming the key.
void set_config_field(PipelineConfig& config, const std::string& key,
                      const std::string& value);

// key = value lines; '#' starts a comment; blank lines ignored. Starts
// from defaults. Errors cite the line number.
PipelineConfig parse_config_file(const std::string& path);
PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& origin = "config");

// Canonical "key = value" listing of every field, stable across runs
// (used by reports and the introspection tests).
std::string format_config(const PipelineConfig& config);

}  // namespace ae2lstm

#endif
