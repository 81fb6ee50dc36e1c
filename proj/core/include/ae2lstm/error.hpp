#ifndef AE2LSTM_ERROR_HPP
#define AE2LSTM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ae2lstm {

// Failure categories surfaced by the pipeline. Each maps to one
// machine-readable error line on the CLI: "error: <kind>: <message>".
enum class ErrKind {
  shape,     // dimension mismatch between tensors
  state,     // operation called out of order (e.g. backward before forward)
  usage,     // caller violated a documented precondition
  data,      // inconsistent or malformed input data
  training,  // non-finite loss/gradients during optimization
  parse,     // malformed file content (NIfTI, manifest, checkpoint)
  config,    // invalid configuration field
  compat,    // incompatible checkpoints
  io,        // filesystem failure
};

inline const char* to_string(ErrKind k) {
  switch (k) {
    case ErrKind::shape: return "shape";
    case ErrKind::state: return "state";
    case ErrKind::usage: return "usage";
    case ErrKind::data: return "data";
    case ErrKind::training: return "training";
    case ErrKind::parse: return "parse";
    case ErrKind::config: return "config";
    case ErrKind::compat: return "compat";
    case ErrKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrKind kind() const { return kind_; }

  // Single-line form used by the CLI.
  std::string line() const {
    return std::string("error: ") + to_string(kind_) + ": " + what();
  }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void throw_shape(const std::string& msg) { throw Error(ErrKind::shape, msg); }
[[noreturn]] inline void throw_state(const std::string& msg) { throw Error(ErrKind::state, msg); }
[[noreturn]] inline void throw_usage(const std::string& msg) { throw Error(ErrKind::usage, msg); }
[[noreturn]] inline void throw_data(const std::string& msg) { throw Error(ErrKind::data, msg); }
[[noreturn]] inline void throw_training(const std::string& msg) { throw Error(ErrKind::training, msg); }
[[noreturn]] inline void throw_parse(const std::string& msg) { throw Error(ErrKind::parse, msg); }
[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrKind::config, msg); }
[[noreturn]] inline void throw_compat(const std::string& msg) { throw Error(ErrKind::compat, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrKind::io, msg); }

}  // namespace ae2lstm

#endif
