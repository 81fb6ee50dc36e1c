#include "ae2lstm/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ae2lstm/checkpoint.hpp"
#include "ae2lstm/cohort_io.hpp"
#include "ae2lstm/error.hpp"
#include "ae2lstm/experiment.hpp"
#include "ae2lstm/rng.hpp"
#include "ae2lstm/synthetic.hpp"

namespace fs = std::filesystem;

namespace ae2lstm {

namespace {

// Attaches the pipeline stage to propagated errors.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

Cohort load_or_generate(const PipelineConfig& config) {
  if (!config.manifest.empty())
    return stage("cohort", [&] { return load_cohort(config.manifest); });
  return stage("cohort", [&] {
    return generate_synthetic_cohort(config.patients, config.nx, config.ny,
                                     config.nz, config.seed,
                                     config.poor_fraction);
  });
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_io("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw_io("write failed for " + path);
}

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> all_ids(const Cohort& cohort) {
  std::vector<std::string> ids;
  ids.reserve(cohort.patients.size());
  for (const auto& p : cohort.patients) ids.push_back(p.id);
  return ids;
}

}  // namespace

void cmd_gen_synth(const GenSynthOptions& opts) {
  opts.config.validate();
  if (!opts.config.manifest.empty())
    throw_usage("gen-synth generates a cohort; the manifest option does not apply");
  const Cohort cohort = load_or_generate(opts.config);
  const std::string manifest = write_cohort(cohort, opts.out_dir);
  std::cout << "wrote " << cohort.patients.size() << " patients ("
            << cohort.count_label(0) << " good, " << cohort.count_label(1)
            << " poor) to " << manifest << "\n";
}

void cmd_train(const TrainOptions& opts) {
  const PipelineConfig& config = opts.config;
  config.validate();
  if (!opts.features_in.empty() && !opts.reuse_fusion.empty())
    throw_usage("--features makes --reuse-fusion redundant; pass one of them");
  ensure_dir(opts.out_dir);

  std::ostringstream report;
  report << "# training report\n\n## config\n" << format_config(config);

  std::vector<FeatureSequence<float>> seqs;
  if (!opts.features_in.empty()) {
    seqs = stage("features", [&] { return load_features(opts.features_in); });
    report << "\n## fusion\nreused cached features (" << seqs.size()
           << " sequences)\n";
  } else {
    const Cohort cohort = load_or_generate(config);
    const std::vector<std::string> ids = all_ids(cohort);

    FusionStack<float> fusion;
    if (!opts.reuse_fusion.empty()) {
      fusion = stage("fusion", [&] { return load_fusion(opts.reuse_fusion); });
      const Eigen::Index have = Eigen::Index(cohort.patients[0].volumes[0].slice_size());
      if (fusion.slice_dim() != have)
        throw_compat("fusion checkpoint expects " +
                     std::to_string(fusion.slice_dim()) +
                     " pixels per slice but the cohort has " +
                     std::to_string(have));
      report << "\n## fusion\nreused checkpoint " << fs::path(opts.reuse_fusion).filename().string() << "\n";
    } else {
      FusionTrainTrace<float> trace;
      fusion = stage("fusion", [&] {
        const auto slices = pool_slices(cohort, ids);
        FusionConfig<float> fc;
        fc.hyper = config.ae_hyper();
        fc.train = config.ae_train(Rng::derive(config.seed, 1));
        return train_fusion(slices, config.d, config.resolved_d_final(), fc,
                            &trace);
      });
      report << "\n## fusion\n";
      for (Modality m : kAllModalities)
        report << "l1." << to_string(m) << " final_loss = "
               << fmt6(trace.level1[std::size_t(m)].loss_trace.back()) << "\n";
      report << "l2 final_loss = " << fmt6(trace.level2.loss_trace.back())
             << "\n";
    }
    stage("fusion", [&] {
      save_fusion((fs::path(opts.out_dir) / "fusion.ae2l").string(), fusion);
      return 0;
    });
    seqs = stage("encode", [&] {
      return encode_patients(fusion, cohort, ids, config.slice_filter);
    });
  }

  if (opts.cache_features)
    stage("features", [&] {
      save_features((fs::path(opts.out_dir) / "features.ae2l").string(), seqs);
      return 0;
    });

  const Eigen::Index feat_dim = seqs.front().steps.front().size();
  std::vector<FeatureSequence<float>> tr, va;
  stage("lstm", [&] {
    split_train_val(seqs, config.val_fraction, Rng::derive(config.seed, 2), tr,
                    va);
    return 0;
  });

  LstmModel<float> model(feat_dim, config.nh);
  Rng init_rng(Rng::derive(config.seed, 3));
  model.init(init_rng);
  const LstmTrainResult lstm_result = stage("lstm", [&] {
    return model.train(tr, va, config.lstm_train(Rng::derive(config.seed, 4)));
  });
  stage("lstm", [&] {
    save_lstm((fs::path(opts.out_dir) / "lstm.ae2l").string(), model);
    return 0;
  });

  report << "\n## lstm\nstopped_epoch = " << lstm_result.stopped_epoch
         << "\nbest_epoch = " << lstm_result.best_epoch
         << "\nepoch\ttrain\tval\n";
  for (std::size_t e = 0; e < lstm_result.train_trace.size(); ++e)
    report << (e + 1) << '\t' << fmt6(lstm_result.train_trace[e]) << '\t'
           << fmt6(lstm_result.val_trace[e]) << '\n';

  stage("report", [&] {
    write_text((fs::path(opts.out_dir) / "train_report.txt").string(),
               report.str());
    return 0;
  });
  std::cout << "training complete: " << opts.out_dir << "/lstm.ae2l ("
            << lstm_result.stopped_epoch << " epochs, best "
            << lstm_result.best_epoch << ")\n";
}

void cmd_predict(const PredictOptions& opts) {
  if (opts.manifest_path.empty()) throw_usage("predict needs a manifest");
  const FusionStack<float> fusion =
      stage("fusion checkpoint", [&] { return load_fusion(opts.fusion_path); });
  const LstmModel<float> model =
      stage("lstm checkpoint", [&] { return load_lstm(opts.lstm_path); });

  if (model.input_dim() != fusion.d_final())
    throw_compat("lstm checkpoint expects feature length " +
                 std::to_string(model.input_dim()) +
                 " but the fusion checkpoint produces " +
                 std::to_string(fusion.d_final()));

  const Cohort cohort =
      stage("cohort", [&] { return load_cohort(opts.manifest_path); });
  const Eigen::Index have =
      Eigen::Index(cohort.patients[0].volumes[0].slice_size());
  if (fusion.slice_dim() != have)
    throw_compat("fusion checkpoint expects " +
                 std::to_string(fusion.slice_dim()) +
                 " pixels per slice but the cohort has " +
                 std::to_string(have));

  std::ostringstream out;
  out << "# id\tprobability\tclass\n";
  for (const PatientRecord& rec : cohort.patients) {
    const auto seq = stage("encode", [&] {
      return fusion.encode_patient(rec, opts.slice_filter);
    });
    const auto pred = model.predict(seq);
    out << rec.id << '\t' << fmt6(double(pred.probability)) << '\t'
        << pred.hard_class << '\n';
  }

  if (opts.out_path.empty())
    std::cout << out.str();
  else
    write_text(opts.out_path, out.str());
}

void cmd_evaluate(const EvaluateOptions& opts) {
  const PipelineConfig& config = opts.config;
  config.validate();
  ensure_dir(opts.out_dir);
  const Cohort cohort = load_or_generate(config);

  const RunSummary summary = stage("evaluate", [&] {
    return run_experiment(cohort, config, config.runs, config.seed);
  });

  stage("report", [&] {
    write_text((fs::path(opts.out_dir) / "summary.txt").string(),
               format_run_summary_text(summary));
    write_text((fs::path(opts.out_dir) / "summary.json").string(),
               format_run_summary_json(summary));
    return 0;
  });
  std::cout << "evaluation complete over " << summary.runs.size()
            << " run(s): auc " << fmt6(summary.mean.auc) << " +- "
            << fmt6(summary.stddev.auc) << ", accuracy "
            << fmt6(summary.mean.accuracy) << " +- "
            << fmt6(summary.stddev.accuracy) << "\n";
}

}  // namespace ae2lstm
