#ifndef AE2LSTM_OPTIMIZER_HPP
#define AE2LSTM_OPTIMIZER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ae2lstm/error.hpp"
#include "ae2lstm/param.hpp"

namespace ae2lstm {

enum class OptimizerKind { sgd, adam };

inline const char* to_string(OptimizerKind k) {
  return k == OptimizerKind::sgd ? "sgd" : "adam";
}

inline OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  throw_config("unknown optimizer '" + s + "' (expected sgd or adam)");
}

// Plain SGD or bias-corrected Adam over a fixed set of parameters.
// Gradients are validated finite, applied, and zeroed on every step.
template <typename S>
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, S learning_rate, ParamList<S> params)
      : kind_(kind), lr_(learning_rate), params_(std::move(params)) {
    if (kind_ == OptimizerKind::adam) {
      m_.reserve(params_.size());
      v_.reserve(params_.size());
      for (auto* p : params_) {
        m_.push_back(MatX<S>::Zero(p->rows(), p->cols()));
        v_.push_back(MatX<S>::Zero(p->rows(), p->cols()));
      }
    }
  }

  OptimizerKind kind() const { return kind_; }
  S learning_rate() const { return lr_; }
  std::uint64_t step_count() const { return step_; }

  void step() {
    for (auto* p : params_)
      if (!p->grad.allFinite())
        throw_training("non-finite gradient in parameter " + p->name);

    ++step_;
    if (kind_ == OptimizerKind::sgd) {
      for (auto* p : params_) p->values -= lr_ * p->grad;
    } else {
      const S b1 = S(0.9), b2 = S(0.999), eps = S(1e-8);
      const S corr1 = S(1) - S(std::pow(double(b1), double(step_)));
      const S corr2 = S(1) - S(std::pow(double(b2), double(step_)));
      for (std::size_t i = 0; i < params_.size(); ++i) {
        auto* p = params_[i];
        m_[i] = b1 * m_[i] + (S(1) - b1) * p->grad;
        v_[i] = b2 * v_[i] + (S(1) - b2) * p->grad.cwiseProduct(p->grad);
        auto m_hat = m_[i].array() / corr1;
        auto v_hat = v_[i].array() / corr2;
        p->values.array() -= lr_ * m_hat / (v_hat.sqrt() + eps);
      }
    }

    for (auto* p : params_) {
      if (!p->values.allFinite())
        throw_training("non-finite values in parameter " + p->name +
                       " after update");
      p->zero_grad();
    }
  }

 private:
  OptimizerKind kind_;
  S lr_;
  ParamList<S> params_;
  std::vector<MatX<S>> m_;  // adam first moment, aligned with params_
  std::vector<MatX<S>> v_;  // adam second moment
  std::uint64_t step_ = 0;
};

}  // namespace ae2lstm

#endif
