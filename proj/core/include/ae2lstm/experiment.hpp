#ifndef AE2LSTM_EXPERIMENT_HPP
#define AE2LSTM_EXPERIMENT_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ae2lstm/config.hpp"
#include "ae2lstm/features.hpp"
#include "ae2lstm/fusion.hpp"
#include "ae2lstm/metrics.hpp"
#include "ae2lstm/volume.hpp"

namespace ae2lstm {

// Pooled slice matrices for the listed patients, one matrix per modality
// (slice_dim x total slices), index-aligned across modalities. Patients
// appear in cohort order, slices in ascending z.
std::array<MatX<float>, kNumModalities> pool_slices(
    const Cohort& cohort, const std::vector<std::string>& ids);

// Encodes the listed patients in cohort order.
std::vector<FeatureSequence<float>> encode_patients(
    const FusionStack<float>& stack, const Cohort& cohort,
    const std::vector<std::string>& ids, bool drop_empty);

// Stratified train/validation split of encoded sequences, deterministic
// per seed; both parts end up non-empty (usage error when impossible).
void split_train_val(const std::vector<FeatureSequence<float>>& all,
                     double val_fraction, std::uint64_t seed,
                     std::vector<FeatureSequence<float>>& train,
                     std::vector<FeatureSequence<float>>& val);

// Pooled cross-validation predictions of one pipeline execution.
struct PipelineResult {
  std::vector<std::string> ids;
  std::vector<double> probs;
  std::vector<int> labels;
};

// One full pipeline execution: per fold, train the fusion stack on the
// training patients' slices, encode everyone, train the LSTM (with a
// stratified validation carve-out for early stopping), predict the held-out
// patients; fold predictions are pooled. All randomness derives from
// run_seed.
PipelineResult run_once(const Cohort& cohort, const PipelineConfig& config,
                        std::uint64_t run_seed);

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

MetricStats mean_std(const std::vector<double>& values);

struct RunSummary {
  std::vector<MetricsReport> runs;
  MetricsReport mean;    // field-wise mean over runs
  MetricsReport stddev;  // field-wise population std over runs
  MetricsReport baseline;  // majority baseline on the same cohort
};

using RunFn = std::function<PipelineResult(
    const Cohort&, const PipelineConfig&, std::uint64_t run_seed)>;

// Repeats the pipeline n_runs times, run r seeded with base_seed + r, and
// aggregates the per-run metrics. run_fn defaults to run_once and exists so
// tests can stub the pipeline. Errors inside a run are rethrown with the
// run index attached. Usage error when the cohort lacks a class.
RunSummary run_experiment(const Cohort& cohort, const PipelineConfig& config,
                          int n_runs, std::uint64_t base_seed,
                          RunFn run_fn = {});

// Delimited text table: one row per metric with per-run values, mean, and
// population std. Stable formatting, no timestamps.
std::string format_run_summary_text(const RunSummary& summary);

// Machine-readable form. Schema: {"n_runs": N, "std": "population",
// "metrics": {name: {"runs": [...], "mean": x, "std": y}},
// "baseline": {name: value}}; non-finite values serialize as null.
std::string format_run_summary_json(const RunSummary& summary);

}  // namespace ae2lstm

#endif
