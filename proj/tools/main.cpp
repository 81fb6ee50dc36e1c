// ae2lstm: stroke-outcome prediction from multimodal MRI via stacked sparse
// autoencoders and a two-layer LSTM.
//
//   ae2lstm gen-synth --out data            synthesize a cohort + manifest
//   ae2lstm train     --config run.cfg      fusion + LSTM checkpoints
//   ae2lstm predict   --fusion f --lstm l --manifest m
//   ae2lstm evaluate  --config run.cfg      repeated cross-validated runs
//
// Any config-file key can be passed as a flag of the same name; flags win
// over the file. Exit code 0 on success; failures print one line of the
// form "error: <kind>: <message>" to stderr.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ae2lstm/commands.hpp"
#include "ae2lstm/error.hpp"

namespace {

using ae2lstm::PipelineConfig;

// Registers one string option per config key so the file parser's
// validation (and its error wording) applies to flags too.
class ConfigCli {
 public:
  void attach(CLI::App* app) {
    app->add_option("--config", config_path_, "key = value config file");
    static const char* keys[] = {
        "manifest", "patients", "nx", "ny", "nz", "poor-fraction",
        "d", "d-final", "nh", "ae-optimizer", "optimizer", "lr",
        "ae-epochs", "lstm-epochs", "batch", "patience", "val-fraction",
        "rho", "beta", "lambda", "folds", "runs", "seed", "stratified",
        "slice-filter",
    };
    for (const char* key : keys) {
      auto& slot = values_[key];  // stable reference (node-based map)
      options_.emplace_back(key,
                            app->add_option("--" + std::string(key), slot,
                                            "config key '" + std::string(key) + "'"));
    }
  }

  PipelineConfig resolve() const {
    PipelineConfig config = config_path_.empty()
                                ? PipelineConfig{}
                                : ae2lstm::parse_config_file(config_path_);
    for (const auto& [key, opt] : options_)
      if (opt->count() > 0)
        ae2lstm::set_config_field(config, key, values_.at(key));
    config.validate();
    return config;
  }

 private:
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stroke-outcome prediction with stacked sparse AEs + LSTM"};
  app.require_subcommand(1);

  ConfigCli gen_cfg, train_cfg, eval_cfg;
  ae2lstm::GenSynthOptions gen_opts;
  ae2lstm::TrainOptions train_opts;
  ae2lstm::PredictOptions predict_opts;
  ae2lstm::EvaluateOptions eval_opts;

  CLI::App* gen = app.add_subcommand("gen-synth", "write a synthetic cohort");
  gen_cfg.attach(gen);
  gen->add_option("--out", gen_opts.out_dir, "output directory");

  CLI::App* train = app.add_subcommand("train", "train fusion stack + LSTM");
  train_cfg.attach(train);
  train->add_option("--out", train_opts.out_dir, "output directory");
  train->add_option("--reuse-fusion", train_opts.reuse_fusion,
                    "fusion checkpoint to reuse (skips AE training)");
  train->add_option("--features", train_opts.features_in,
                    "feature cache to train from (skips the fusion stage)");
  train->add_flag("--cache-features", train_opts.cache_features,
                  "also write features.ae2l");

  CLI::App* predict = app.add_subcommand("predict", "apply saved checkpoints");
  predict->add_option("--fusion", predict_opts.fusion_path, "fusion checkpoint")
      ->required();
  predict->add_option("--lstm", predict_opts.lstm_path, "lstm checkpoint")
      ->required();
  predict->add_option("--manifest", predict_opts.manifest_path,
                      "cohort manifest")
      ->required();
  predict->add_option("--out", predict_opts.out_path,
                      "output file (stdout when omitted)");
  predict->add_flag("--slice-filter", predict_opts.slice_filter,
                    "drop near-empty slices (match the training setting)");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "repeated cross-validated runs");
  eval_cfg.attach(evaluate);
  evaluate->add_option("--out", eval_opts.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      gen_opts.config = gen_cfg.resolve();
      ae2lstm::cmd_gen_synth(gen_opts);
    } else if (train->parsed()) {
      train_opts.config = train_cfg.resolve();
      ae2lstm::cmd_train(train_opts);
    } else if (predict->parsed()) {
      ae2lstm::cmd_predict(predict_opts);
    } else if (evaluate->parsed()) {
      eval_opts.config = eval_cfg.resolve();
      ae2lstm::cmd_evaluate(eval_opts);
    }
  } catch (const ae2lstm::Error& e) {
    std::cerr << e.line() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
