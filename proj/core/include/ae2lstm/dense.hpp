#ifndef AE2LSTM_DENSE_HPP
#define AE2LSTM_DENSE_HPP

#include <string>

#include "ae2lstm/param.hpp"

namespace ae2lstm {

enum class Activation { identity, sigmoid, tanh };

template <typename S>
MatX<S> apply_activation(Activation a, const MatX<S>& z) {
  switch (a) {
    case Activation::identity:
      return z;
    case Activation::sigmoid:
      return (S(1) / (S(1) + (-z.array()).exp())).matrix();
    case Activation::tanh:
      return z.array().tanh().matrix();
  }
  return z;
}

// Derivative expressed through the activation output.
template <typename S>
MatX<S> activation_grad_from_output(Activation a, const MatX<S>& out) {
  switch (a) {
    case Activation::identity:
      return MatX<S>::Ones(out.rows(), out.cols());
    case Activation::sigmoid:
      return (out.array() * (S(1) - out.array())).matrix();
    case Activation::tanh:
      return (S(1) - out.array().square()).matrix();
  }
  return out;
}

// Fully connected layer, activation(W*x + b). Columns of a batch matrix are
// independent samples; the single-vector entry points are the one-column
// case. forward caches input and output for the following backward.
template <typename S>
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::string name, Eigen::Index in_dim, Eigen::Index out_dim,
             Activation act)
      : W(name + ".W", out_dim, in_dim),
        b(name + ".b", out_dim, 1),
        act_(act) {}

  void init(Rng& rng) {
    W.init_glorot(rng, W.cols(), W.rows());
    b.values.setZero();
  }

  Eigen::Index in_dim() const { return W.cols(); }
  Eigen::Index out_dim() const { return W.rows(); }
  Activation activation() const { return act_; }

  // Pure evaluation, no cache. Safe for concurrent callers.
  MatX<S> eval(const MatX<S>& x) const {
    check_input(x);
    MatX<S> z = W.values * x;
    z.colwise() += VecX<S>(b.values.col(0));
    return apply_activation(act_, z);
  }

  VecX<S> eval_vec(const VecX<S>& x) const { return eval(MatX<S>(x)).col(0); }

  MatX<S> forward(const MatX<S>& x) {
    check_input(x);
    cached_input_ = x;
    MatX<S> z = W.values * x;
    z.colwise() += VecX<S>(b.values.col(0));
    cached_output_ = apply_activation(act_, z);
    has_cache_ = true;
    return cached_output_;
  }

  // Accumulates dL/dW and dL/db, returns dL/dx. upstream is dL/d(output),
  // one column per sample of the cached batch.
  MatX<S> backward(const MatX<S>& upstream) {
    if (!has_cache_)
      throw_state("dense backward called without a cached forward pass (" +
                  W.name + ")");
    if (upstream.rows() != cached_output_.rows() ||
        upstream.cols() != cached_output_.cols())
      throw_shape("dense backward: upstream is " +
                  shape_str(upstream.rows(), upstream.cols()) +
                  " but cached output is " +
                  shape_str(cached_output_.rows(), cached_output_.cols()));
    MatX<S> delta =
        upstream.cwiseProduct(activation_grad_from_output(act_, cached_output_));
    W.grad.noalias() += delta * cached_input_.transpose();
    b.grad.col(0) += delta.rowwise().sum();
    return W.values.transpose() * delta;
  }

  void clear_cache() { has_cache_ = false; }

  ParamList<S> params() { return {&W, &b}; }

  ParamMatrix<S> W;
  ParamMatrix<S> b;

 private:
  static std::string shape_str(Eigen::Index r, Eigen::Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
  }

  void check_input(const MatX<S>& x) const {
    if (x.rows() != W.cols())
      throw_shape("dense forward: input has " + std::to_string(x.rows()) +
                  " rows but " + W.name + " has " + std::to_string(W.cols()) +
                  " columns");
  }

  Activation act_ = Activation::identity;
  MatX<S> cached_input_;
  MatX<S> cached_output_;
  bool has_cache_ = false;
};

}  // namespace ae2lstm

#endif
