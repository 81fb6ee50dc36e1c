#include "ae2lstm/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ae2lstm/error.hpp"

namespace ae2lstm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw_config(key + ": '" + value + "' is not an integer");
  }
  if (used != value.size())
    throw_config(key + ": '" + value + "' is not an integer");
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw_config(key + ": '" + value + "' is not a number");
  }
  if (used != value.size())
    throw_config(key + ": '" + value + "' is not a number");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw_config(key + ": '" + value + "' is not a boolean (true/false)");
}

OptimizerKind parse_optimizer(const std::string& key, const std::string& value) {
  if (value == "sgd") return OptimizerKind::sgd;
  if (value == "adam") return OptimizerKind::adam;
  throw_config(key + ": '" + value + "' is not an optimizer (sgd/adam)");
}

std::string format_real(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void PipelineConfig::validate() const {
  if (manifest.empty()) {
    if (patients < 2) throw_config("patients must be >= 2");
    if (nx < 4 || ny < 4 || nz < 4)
      throw_config("nx/ny/nz must each be >= 4 for synthetic cohorts");
    if (!(poor_fraction > 0.0 && poor_fraction < 1.0))
      throw_config("poor-fraction must lie in (0, 1)");
  }
  if (d < 1) throw_config("d must be >= 1");
  if (d_final < 0) throw_config("d-final must be >= 0 (0 tracks d)");
  if (nh < 1) throw_config("nh must be >= 1");
  if (!(lr > 0.0)) throw_config("lr must be > 0");
  if (ae_epochs < 1) throw_config("ae-epochs must be >= 1");
  if (lstm_epochs < 1) throw_config("lstm-epochs must be >= 1");
  if (batch < 1) throw_config("batch must be >= 1");
  if (patience < 1) throw_config("patience must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw_config("val-fraction must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0)) throw_config("rho must lie in (0, 1)");
  if (beta < 0.0) throw_config("beta must be >= 0");
  if (lambda < 0.0) throw_config("lambda must be >= 0");
  if (folds < 2) throw_config("folds must be >= 2");
  if (runs < 1) throw_config("runs must be >= 1");
}

SparseAeHyper<float> PipelineConfig::ae_hyper() const {
  SparseAeHyper<float> h;
  h.rho = float(rho);
  h.beta = float(beta);
  h.lambda = float(lambda);
  return h;
}

AeTrainConfig<float> PipelineConfig::ae_train(std::uint64_t stage_seed) const {
  AeTrainConfig<float> c;
  c.max_epochs = ae_epochs;
  c.batch_size = batch;
  c.optimizer = ae_optimizer;
  c.learning_rate = float(lr);
  c.seed = stage_seed;
  return c;
}

LstmTrainConfig<float> PipelineConfig::lstm_train(std::uint64_t stage_seed) const {
  LstmTrainConfig<float> c;
  c.optimizer = optimizer;
  c.learning_rate = float(lr);
  c.max_epochs = lstm_epochs;
  c.batch_size = batch;
  c.patience = patience;
  c.val_fraction = val_fraction;
  c.seed = stage_seed;
  return c;
}

void set_config_field(PipelineConfig& config, const std::string& key,
                      const std::string& value) {
  if (key == "manifest") config.manifest = value;
  else if (key == "patients") config.patients = int(parse_int(key, value));
  else if (key == "nx") config.nx = int(parse_int(key, value));
  else if (key == "ny") config.ny = int(parse_int(key, value));
  else if (key == "nz") config.nz = int(parse_int(key, value));
  else if (key == "poor-fraction") config.poor_fraction = parse_real(key, value);
  else if (key == "d") config.d = int(parse_int(key, value));
  else if (key == "d-final") config.d_final = int(parse_int(key, value));
  else if (key == "nh") config.nh = int(parse_int(key, value));
  else if (key == "ae-optimizer") config.ae_optimizer = parse_optimizer(key, value);
  else if (key == "optimizer") config.optimizer = parse_optimizer(key, value);
  else if (key == "lr") config.lr = parse_real(key, value);
  else if (key == "ae-epochs") config.ae_epochs = int(parse_int(key, value));
  else if (key == "lstm-epochs") config.lstm_epochs = int(parse_int(key, value));
  else if (key == "batch") config.batch = int(parse_int(key, value));
  else if (key == "patience") config.patience = int(parse_int(key, value));
  else if (key == "val-fraction") config.val_fraction = parse_real(key, value);
  else if (key == "rho") config.rho = parse_real(key, value);
  else if (key == "beta") config.beta = parse_real(key, value);
  else if (key == "lambda") config.lambda = parse_real(key, value);
  else if (key == "folds") config.folds = int(parse_int(key, value));
  else if (key == "runs") config.runs = int(parse_int(key, value));
  else if (key == "seed")
    config.seed = std::uint64_t(parse_int(key, value));
  else if (key == "stratified") config.stratified = parse_bool(key, value);
  else if (key == "slice-filter") config.slice_filter = parse_bool(key, value);
  else throw_config("unknown config key '" + key + "'");
}

PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& origin) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw_config(origin + " line " + std::to_string(line_no) +
                   ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw_config(origin + " line " + std::to_string(line_no) + ": empty key");
    try {
      set_config_field(config, key, value);
    } catch (const Error& e) {
      throw Error(e.kind(), origin + " line " + std::to_string(line_no) +
                                ": " + e.what());
    }
  }
  return config;
}

PipelineConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "manifest = " << c.manifest << "\n";
  out << "patients = " << c.patients << "\n";
  out << "nx = " << c.nx << "\n";
  out << "ny = " << c.ny << "\n";
  out << "nz = " << c.nz << "\n";
  out << "poor-fraction = " << format_real(c.poor_fraction) << "\n";
  out << "d = " << c.d << "\n";
  out << "d-final = " << c.d_final << "\n";
  out << "nh = " << c.nh << "\n";
  out << "ae-optimizer = " << to_string(c.ae_optimizer) << "\n";
  out << "optimizer = " << to_string(c.optimizer) << "\n";
  out << "lr = " << format_real(c.lr) << "\n";
  out << "ae-epochs = " << c.ae_epochs << "\n";
  out << "lstm-epochs = " << c.lstm_epochs << "\n";
  out << "batch = " << c.batch << "\n";
  out << "patience = " << c.patience << "\n";
  out << "val-fraction = " << format_real(c.val_fraction) << "\n";
  out << "rho = " << format_real(c.rho) << "\n";
  out << "beta = " << format_real(c.beta) << "\n";
  out << "lambda = " << format_real(c.lambda) << "\n";
  out << "folds = " << c.folds << "\n";
  out << "runs = " << c.runs << "\n";
  out << "seed = " << c.seed << "\n";
  out << "stratified = " << (c.stratified ? "true" : "false") << "\n";
  out << "slice-filter = " << (c.slice_filter ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace ae2lstm
