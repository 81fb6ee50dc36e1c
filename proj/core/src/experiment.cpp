#include "ae2lstm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ae2lstm/error.hpp"
#include "ae2lstm/folds.hpp"
#include "ae2lstm/lstm.hpp"
#include "ae2lstm/rng.hpp"
#include "json.hpp"

namespace ae2lstm {

namespace {

std::size_t index_of(const Cohort& cohort, const std::string& id) {
  for (std::size_t i = 0; i < cohort.patients.size(); ++i)
    if (cohort.patients[i].id == id) return i;
  throw_usage("patient id '" + id + "' not in cohort");
}

// Cohort-order indices for an id list.
std::vector<std::size_t> resolve_ids(const Cohort& cohort,
                                     const std::vector<std::string>& ids) {
  std::vector<std::size_t> idx;
  idx.reserve(ids.size());
  for (const auto& id : ids) idx.push_back(index_of(cohort, id));
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct MetricField {
  const char* name;
  double MetricsReport::* member;
};

constexpr MetricField kMetricFields[] = {
    {"auc", &MetricsReport::auc},
    {"mae", &MetricsReport::mae},
    {"mae_hard", &MetricsReport::mae_hard},
    {"accuracy", &MetricsReport::accuracy},
    {"specificity", &MetricsReport::specificity},
    {"sensitivity", &MetricsReport::sensitivity},
    {"f1", &MetricsReport::f1},
};

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::array<MatX<float>, kNumModalities> pool_slices(
    const Cohort& cohort, const std::vector<std::string>& ids) {
  if (ids.empty()) throw_usage("pool_slices: no patients listed");
  const std::vector<std::size_t> idx = resolve_ids(cohort, ids);

  const Volume& first = cohort.patients[idx[0]].volumes[0];
  const Eigen::Index dim = Eigen::Index(first.slice_size());
  Eigen::Index total = 0;
  for (std::size_t i : idx) {
    const PatientRecord& rec = cohort.patients[i];
    rec.check_consistent();
    if (Eigen::Index(rec.volumes[0].slice_size()) != dim)
      throw_data("patient " + rec.id + " has " +
                 std::to_string(rec.volumes[0].slice_size()) +
                 " pixels per slice, expected " + std::to_string(dim));
    total += rec.volumes[0].nz;
  }

  std::array<MatX<float>, kNumModalities> pooled;
  for (auto& m : pooled) m.resize(dim, total);

  Eigen::Index col = 0;
  for (std::size_t i : idx) {
    const PatientRecord& rec = cohort.patients[i];
    for (int z = 0; z < rec.volumes[0].nz; ++z, ++col)
      for (Modality m : kAllModalities) {
        const float* src = rec.volumes[std::size_t(m)].slice(z);
        for (Eigen::Index k = 0; k < dim; ++k)
          pooled[std::size_t(m)](k, col) = src[k];
      }
  }
  return pooled;
}

std::vector<FeatureSequence<float>> encode_patients(
    const FusionStack<float>& stack, const Cohort& cohort,
    const std::vector<std::string>& ids, bool drop_empty) {
  const std::vector<std::size_t> idx = resolve_ids(cohort, ids);
  std::vector<FeatureSequence<float>> seqs;
  seqs.reserve(idx.size());
  for (std::size_t i : idx)
    seqs.push_back(stack.encode_patient(cohort.patients[i], drop_empty));
  return seqs;
}

void split_train_val(const std::vector<FeatureSequence<float>>& all,
                     double val_fraction, std::uint64_t seed,
                     std::vector<FeatureSequence<float>>& train,
                     std::vector<FeatureSequence<float>>& val) {
  if (all.size() < 2)
    throw_usage("need at least 2 sequences to carve a validation split");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw_usage("val_fraction must lie in (0,1)");

  train.clear();
  val.clear();
  Rng rng(Rng::derive(seed, 0x5b117));

  std::array<std::vector<std::size_t>, 2> by_label;
  for (std::size_t i = 0; i < all.size(); ++i)
    by_label[all[i].label == 1 ? 1 : 0].push_back(i);

  std::vector<bool> in_val(all.size(), false);
  for (auto& group : by_label) {
    if (group.empty()) continue;
    rng.shuffle(group);
    std::size_t take = std::size_t(std::lround(val_fraction * double(group.size())));
    if (group.size() >= 2) take = std::max<std::size_t>(1, std::min(take, group.size() - 1));
    else take = 0;  // a singleton class stays in training
    for (std::size_t k = 0; k < take; ++k) in_val[group[k]] = true;
  }

  // Degenerate cohorts (all classes singletons) still need a non-empty
  // validation side; move one sequence over.
  if (std::none_of(in_val.begin(), in_val.end(), [](bool b) { return b; }))
    in_val[all.size() - 1] = true;

  for (std::size_t i = 0; i < all.size(); ++i)
    (in_val[i] ? val : train).push_back(all[i]);
  if (train.empty())
    throw_usage("validation split consumed every sequence");
}

PipelineResult run_once(const Cohort& cohort, const PipelineConfig& config,
                        std::uint64_t run_seed) {
  config.validate();
  const Eigen::Index d = config.d;
  const Eigen::Index d_final = config.resolved_d_final();

  const FoldPlan plan =
      make_folds(cohort, config.folds, run_seed, config.stratified);

  PipelineResult result;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const Fold& fold = plan.folds[f];

    const auto slices = pool_slices(cohort, fold.train_ids);
    FusionConfig<float> fusion_cfg;
    fusion_cfg.hyper = config.ae_hyper();
    fusion_cfg.train = config.ae_train(Rng::derive(run_seed, 100 + f));
    const FusionStack<float> stack =
        train_fusion(slices, d, d_final, fusion_cfg);

    const auto train_seqs =
        encode_patients(stack, cohort, fold.train_ids, config.slice_filter);
    const auto test_seqs =
        encode_patients(stack, cohort, fold.test_ids, config.slice_filter);

    std::vector<FeatureSequence<float>> tr, va;
    split_train_val(train_seqs, config.val_fraction,
                    Rng::derive(run_seed, 200 + f), tr, va);

    LstmModel<float> model(d_final, config.nh);
    Rng init_rng(Rng::derive(run_seed, 300 + f));
    model.init(init_rng);
    model.train(tr, va, config.lstm_train(Rng::derive(run_seed, 400 + f)));

    for (const auto& seq : test_seqs) {
      const auto pred = model.predict(seq);
      result.ids.push_back(seq.patient_id);
      result.probs.push_back(double(pred.probability));
      result.labels.push_back(seq.label);
    }
  }
  return result;
}

MetricStats mean_std(const std::vector<double>& values) {
  if (values.empty()) throw_usage("mean_std: no values");
  MetricStats s;
  for (double v : values) s.mean += v;
  s.mean /= double(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(acc / double(values.size()));
  return s;
}

RunSummary run_experiment(const Cohort& cohort, const PipelineConfig& config,
                          int n_runs, std::uint64_t base_seed, RunFn run_fn) {
  if (n_runs < 1) throw_usage("run_experiment: n_runs must be >= 1");
  if (cohort.count_label(0) == 0 || cohort.count_label(1) == 0)
    throw_usage("run_experiment: cohort has a single outcome class");
  if (!run_fn)
    run_fn = [](const Cohort& c, const PipelineConfig& cf, std::uint64_t s) {
      return run_once(c, cf, s);
    };

  RunSummary summary;
  summary.baseline = majority_baseline(cohort);
  for (int r = 0; r < n_runs; ++r) {
    const std::uint64_t run_seed = base_seed + std::uint64_t(r);
    try {
      const PipelineResult pr = run_fn(cohort, config, run_seed);
      summary.runs.push_back(compute_metrics(pr.probs, pr.labels));
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "run " + std::to_string(r) + ": " + e.what());
    }
  }

  for (const MetricField& f : kMetricFields) {
    std::vector<double> values;
    values.reserve(summary.runs.size());
    for (const auto& run : summary.runs) values.push_back(run.*(f.member));
    const MetricStats s = mean_std(values);
    summary.mean.*(f.member) = s.mean;
    summary.stddev.*(f.member) = s.stddev;
  }
  summary.mean.n = summary.runs.front().n;
  summary.stddev.n = summary.runs.front().n;
  return summary;
}

std::string format_run_summary_text(const RunSummary& summary) {
  std::ostringstream out;
  out << "# pooled cross-validation metrics over " << summary.runs.size()
      << " run(s); std is the population standard deviation\n";
  out << "metric\tmean\tstd\truns\n";
  for (const MetricField& f : kMetricFields) {
    out << f.name << '\t' << fmt6(summary.mean.*(f.member)) << '\t'
        << fmt6(summary.stddev.*(f.member)) << '\t';
    for (std::size_t r = 0; r < summary.runs.size(); ++r) {
      if (r) out << ' ';
      out << fmt6(summary.runs[r].*(f.member));
    }
    out << '\n';
  }
  out << "# majority baseline (predicts the positive-class rate)\n";
  for (const MetricField& f : kMetricFields)
    out << "baseline." << f.name << '\t' << fmt6(summary.baseline.*(f.member))
        << '\n';
  return out.str();
}

std::string format_run_summary_json(const RunSummary& summary) {
  nlohmann::json root;
  root["n_runs"] = summary.runs.size();
  root["std"] = "population";
  nlohmann::json metrics = nlohmann::json::object();
  for (const MetricField& f : kMetricFields) {
    nlohmann::json entry;
    std::vector<double> runs;
    for (const auto& run : summary.runs) runs.push_back(run.*(f.member));
    entry["runs"] = runs;
    entry["mean"] = summary.mean.*(f.member);
    entry["std"] = summary.stddev.*(f.member);
    metrics[f.name] = entry;
  }
  root["metrics"] = metrics;
  nlohmann::json baseline = nlohmann::json::object();
  for (const MetricField& f : kMetricFields)
    baseline[f.name] = summary.baseline.*(f.member);
  root["baseline"] = baseline;
  return root.dump(2) + "\n";
}

}  // namespace ae2lstm
