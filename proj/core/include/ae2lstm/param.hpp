#ifndef AE2LSTM_PARAM_HPP
#define AE2LSTM_PARAM_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ae2lstm/error.hpp"
#include "ae2lstm/rng.hpp"

namespace ae2lstm {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// One trainable weight matrix (or bias vector) together with its gradient
// accumulator. values and grad always share a shape.
template <typename S>
struct ParamMatrix {
  std::string name;
  MatX<S> values;
  MatX<S> grad;

  ParamMatrix() = default;
  ParamMatrix(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        values(MatX<S>::Zero(rows, cols)),
        grad(MatX<S>::Zero(rows, cols)) {}

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  void zero_grad() { grad.setZero(); }

  // Glorot-style uniform init in [-r, r], r = sqrt(6/(fan_in+fan_out)).
  // Entries are drawn in row-major order so the stream layout is fixed.
  void init_glorot(Rng& rng, Eigen::Index fan_in, Eigen::Index fan_out) {
    const double r = std::sqrt(6.0 / double(fan_in + fan_out));
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      for (Eigen::Index j = 0; j < values.cols(); ++j)
        values(i, j) = S(rng.uniform(-r, r));
  }

  void fill(S v) { values.setConstant(v); }
};

template <typename S>
using ParamList = std::vector<ParamMatrix<S>*>;

}  // namespace ae2lstm

#endif
