#ifndef AE2LSTM_LSTM_HPP
#define AE2LSTM_LSTM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "ae2lstm/dense.hpp"
#include "ae2lstm/features.hpp"
#include "ae2lstm/optimizer.hpp"

namespace ae2lstm {

// One LSTM layer, no peepholes. Gate order in parameter listings is fixed:
// input, forget, candidate, output. Forget-gate biases start at 1.0.
template <typename S>
class LstmLayer {
 public:
  struct StepCache {
    VecX<S> x, i, f, g, o, c, tanh_c, h;
  };

  LstmLayer() = default;
  LstmLayer(std::string name, Eigen::Index input_dim, Eigen::Index hidden_dim)
      : Wi(name + ".W_i", hidden_dim, input_dim),
        Wf(name + ".W_f", hidden_dim, input_dim),
        Wg(name + ".W_g", hidden_dim, input_dim),
        Wo(name + ".W_o", hidden_dim, input_dim),
        Ui(name + ".U_i", hidden_dim, hidden_dim),
        Uf(name + ".U_f", hidden_dim, hidden_dim),
        Ug(name + ".U_g", hidden_dim, hidden_dim),
        Uo(name + ".U_o", hidden_dim, hidden_dim),
        bi(name + ".b_i", hidden_dim, 1),
        bf(name + ".b_f", hidden_dim, 1),
        bg(name + ".b_g", hidden_dim, 1),
        bo(name + ".b_o", hidden_dim, 1) {}

  Eigen::Index input_dim() const { return Wi.cols(); }
  Eigen::Index hidden_dim() const { return Wi.rows(); }

  void init(Rng& rng) {
    for (auto* w : {&Wi, &Wf, &Wg, &Wo}) w->init_glorot(rng, input_dim(), hidden_dim());
    for (auto* u : {&Ui, &Uf, &Ug, &Uo}) u->init_glorot(rng, hidden_dim(), hidden_dim());
    for (auto* b : {&bi, &bg, &bo}) b->values.setZero();
    bf.values.setConstant(S(1));
  }

  // Runs the recurrence over the whole sequence with zero initial h and c.
  // Returns the h_t stream. When cache is non-null the per-step gate values
  // are stored for backward.
  std::vector<VecX<S>> run(const std::vector<VecX<S>>& xs,
                           std::vector<StepCache>* cache) const {
    const Eigen::Index nh = hidden_dim();
    std::vector<VecX<S>> hs(xs.size());
    if (cache) cache->resize(xs.size());
    VecX<S> h = VecX<S>::Zero(nh);
    VecX<S> c = VecX<S>::Zero(nh);
    for (std::size_t t = 0; t < xs.size(); ++t) {
      const VecX<S>& x = xs[t];
      if (x.size() != input_dim())
        throw_shape("lstm step input has length " + std::to_string(x.size()) +
                    " but layer expects " + std::to_string(input_dim()));
      VecX<S> i = sigmoid(Wi.values * x + Ui.values * h + bi.values.col(0));
      VecX<S> f = sigmoid(Wf.values * x + Uf.values * h + bf.values.col(0));
      VecX<S> g = (Wg.values * x + Ug.values * h + bg.values.col(0)).array().tanh();
      VecX<S> o = sigmoid(Wo.values * x + Uo.values * h + bo.values.col(0));
      c = f.cwiseProduct(c) + i.cwiseProduct(g);
      VecX<S> tanh_c = c.array().tanh();
      h = o.cwiseProduct(tanh_c);
      hs[t] = h;
      if (cache) {
        auto& sc = (*cache)[t];
        sc.x = x; sc.i = i; sc.f = f; sc.g = g; sc.o = o;
        sc.c = c; sc.tanh_c = tanh_c; sc.h = h;
      }
    }
    return hs;
  }

  // Full backpropagation through time. d_h_upstream holds dL/dh_t for every
  // step (zero vectors where the loss does not touch h_t). Accumulates
  // parameter gradients and returns dL/dx_t per step.
  std::vector<VecX<S>> backward(const std::vector<StepCache>& cache,
                                const std::vector<VecX<S>>& d_h_upstream) {
    const Eigen::Index nh = hidden_dim();
    const std::size_t steps = cache.size();
    std::vector<VecX<S>> d_xs(steps);
    VecX<S> d_h_next = VecX<S>::Zero(nh);
    VecX<S> d_c_next = VecX<S>::Zero(nh);
    for (std::size_t ti = steps; ti-- > 0;) {
      const auto& sc = cache[ti];
      const VecX<S> c_prev = ti > 0 ? cache[ti - 1].c : VecX<S>::Zero(nh);
      const VecX<S> h_prev = ti > 0 ? cache[ti - 1].h : VecX<S>::Zero(nh);

      const VecX<S> d_h = d_h_upstream[ti] + d_h_next;
      const VecX<S> d_o = d_h.cwiseProduct(sc.tanh_c);
      const VecX<S> d_c =
          d_c_next.array() +
          d_h.array() * sc.o.array() * (S(1) - sc.tanh_c.array().square());
      const VecX<S> d_i = d_c.cwiseProduct(sc.g);
      const VecX<S> d_g = d_c.cwiseProduct(sc.i);
      const VecX<S> d_f = d_c.cwiseProduct(c_prev);
      d_c_next = d_c.cwiseProduct(sc.f);

      const VecX<S> dz_i = d_i.array() * sc.i.array() * (S(1) - sc.i.array());
      const VecX<S> dz_f = d_f.array() * sc.f.array() * (S(1) - sc.f.array());
      const VecX<S> dz_g = d_g.array() * (S(1) - sc.g.array().square());
      const VecX<S> dz_o = d_o.array() * sc.o.array() * (S(1) - sc.o.array());

      Wi.grad.noalias() += dz_i * sc.x.transpose();
      Wf.grad.noalias() += dz_f * sc.x.transpose();
      Wg.grad.noalias() += dz_g * sc.x.transpose();
      Wo.grad.noalias() += dz_o * sc.x.transpose();
      Ui.grad.noalias() += dz_i * h_prev.transpose();
      Uf.grad.noalias() += dz_f * h_prev.transpose();
      Ug.grad.noalias() += dz_g * h_prev.transpose();
      Uo.grad.noalias() += dz_o * h_prev.transpose();
      bi.grad.col(0) += dz_i;
      bf.grad.col(0) += dz_f;
      bg.grad.col(0) += dz_g;
      bo.grad.col(0) += dz_o;

      d_xs[ti] = Wi.values.transpose() * dz_i + Wf.values.transpose() * dz_f +
                 Wg.values.transpose() * dz_g + Wo.values.transpose() * dz_o;
      d_h_next = Ui.values.transpose() * dz_i + Uf.values.transpose() * dz_f +
                 Ug.values.transpose() * dz_g + Uo.values.transpose() * dz_o;
    }
    return d_xs;
  }

  ParamList<S> params() {
    return {&Wi, &Wf, &Wg, &Wo, &Ui, &Uf, &Ug, &Uo, &bi, &bf, &bg, &bo};
  }
  std::vector<const ParamMatrix<S>*> params() const {
    return {&Wi, &Wf, &Wg, &Wo, &Ui, &Uf, &Ug, &Uo, &bi, &bf, &bg, &bo};
  }

  ParamMatrix<S> Wi, Wf, Wg, Wo;
  ParamMatrix<S> Ui, Uf, Ug, Uo;
  ParamMatrix<S> bi, bf, bg, bo;

 private:
  static VecX<S> sigmoid(const VecX<S>& z) {
    return (S(1) / (S(1) + (-z.array()).exp())).matrix();
  }
};

// Half-mean-squared-error: (1/(2N)) * sum (p_i - y_i)^2.
template <typename S>
S half_mse(const std::vector<S>& predictions, const std::vector<int>& labels) {
  if (predictions.empty()) throw_usage("half_mse: empty prediction list");
  if (predictions.size() != labels.size())
    throw_usage("half_mse: " + std::to_string(predictions.size()) +
                " predictions vs " + std::to_string(labels.size()) + " labels");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = double(predictions[i]) - double(labels[i]);
    acc += d * d;
  }
  return S(acc / (2.0 * double(predictions.size())));
}

template <typename S>
struct LstmTrainConfig {
  OptimizerKind optimizer = OptimizerKind::adam;
  S learning_rate = S(1e-4);
  int max_epochs = 1000;
  int batch_size = 32;
  int patience = 20;          // early-stopping window on validation loss
  double val_fraction = 0.2;  // used by callers that carve the split
  std::uint64_t seed = 0;

  void validate() const {
    if (max_epochs < 1) throw_config("lstm max_epochs must be >= 1");
    if (batch_size < 1) throw_config("lstm batch_size must be >= 1");
    if (patience < 1) throw_config("lstm patience must be >= 1");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
      throw_config("lstm val_fraction must lie in (0,1)");
    if (!(learning_rate > S(0))) throw_config("lstm learning_rate must be > 0");
  }
};

struct LstmTrainResult {
  std::vector<double> train_trace;  // per-epoch half-MSE on the training set
  std::vector<double> val_trace;    // per-epoch half-MSE on the validation set
  int stopped_epoch = 0;            // number of epochs actually run
  int best_epoch = 0;               // epoch whose weights were restored
};

// Two stacked LSTM layers plus a dense sigmoid head read at the final step.
// Output p in (0,1) is the probability of the poor-outcome class; the hard
// class is 1 iff p >= 0.5 (ties go to poor).
template <typename S>
class LstmModel {
 public:
  LstmModel() = default;
  LstmModel(Eigen::Index input_dim, Eigen::Index hidden_dim)
      : layer1_("lstm1", input_dim, hidden_dim),
        layer2_("lstm2", hidden_dim, hidden_dim),
        head_("head", hidden_dim, 1, Activation::sigmoid) {}

  Eigen::Index input_dim() const { return layer1_.input_dim(); }
  Eigen::Index hidden_dim() const { return layer1_.hidden_dim(); }

  void init(Rng& rng) {
    layer1_.init(rng);
    layer2_.init(rng);
    head_.init(rng);
  }

  // p = sigma(head(h_T of layer 2)). Sequences are processed one at a time,
  // each to its own final step, so a prediction never depends on what else
  // sits in a batch.
  S forward(const std::vector<VecX<S>>& steps) const {
    if (steps.empty()) throw_usage("lstm forward: empty sequence");
    const auto h1 = layer1_.run(steps, nullptr);
    const auto h2 = layer2_.run(h1, nullptr);
    return head_.eval_vec(h2.back())(0);
  }

  S forward(const FeatureSequence<S>& seq) const { return forward(seq.steps); }

  struct Prediction {
    S probability;
    int hard_class;
  };

  Prediction predict(const std::vector<VecX<S>>& steps) const {
    const S p = forward(steps);
    return {p, p >= S(0.5) ? 1 : 0};
  }
  Prediction predict(const FeatureSequence<S>& seq) const {
    return predict(seq.steps);
  }

  // One training pass over a single sequence: forward with caches, then
  // full BPTT of the half-MSE contribution (p - y)/batch_count through the
  // head and both layers. Gradients accumulate; returns p.
  S train_step(const FeatureSequence<S>& seq, S batch_count) {
    if (seq.steps.empty()) throw_usage("lstm forward: empty sequence");
    std::vector<typename LstmLayer<S>::StepCache> cache1, cache2;
    const auto h1 = layer1_.run(seq.steps, &cache1);
    const auto h2 = layer2_.run(h1, &cache2);
    const MatX<S> p_mat = head_.forward(MatX<S>(h2.back()));
    const S p = p_mat(0, 0);

    MatX<S> d_p(1, 1);
    d_p(0, 0) = (p - S(seq.label)) / batch_count;
    const MatX<S> d_h2_last = head_.backward(d_p);
    std::vector<VecX<S>> d_h2(seq.steps.size(), VecX<S>::Zero(hidden_dim()));
    d_h2.back() = d_h2_last.col(0);
    const auto d_h1 = layer2_.backward(cache2, d_h2);
    layer1_.backward(cache1, d_h1);
    return p;
  }

  // Mini-batch training with early stopping on validation half-MSE. Each
  // batch accumulates per-sequence BPTT gradients before one optimizer
  // step; the loss uses only each sequence's final-step prediction. Stops
  // once validation loss has not improved for cfg.patience epochs and
  // restores the best-validation weights.
  LstmTrainResult train(const std::vector<FeatureSequence<S>>& train_set,
                        const std::vector<FeatureSequence<S>>& val_set,
                        const LstmTrainConfig<S>& cfg) {
    cfg.validate();
    if (train_set.empty()) throw_usage("lstm train: empty training set");
    if (val_set.empty()) throw_usage("lstm train: empty validation set");

    Rng shuffle_rng(Rng::derive(cfg.seed, 2));
    Optimizer<S> opt(cfg.optimizer, cfg.learning_rate, params());

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t(0));

    LstmTrainResult result;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<MatX<S>> best_weights = snapshot();
    int epochs_since_best = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
      shuffle_rng.shuffle(order);
      double train_sq = 0.0;
      for (std::size_t start = 0; start < order.size();
           start += std::size_t(cfg.batch_size)) {
        const std::size_t count =
            std::min(std::size_t(cfg.batch_size), order.size() - start);
        for (std::size_t k = 0; k < count; ++k) {
          const auto& seq = train_set[order[start + k]];
          const S p_value = train_step(seq, S(count));
          const double d = double(p_value) - double(seq.label);
          train_sq += d * d;
        }
        opt.step();
      }
      const double train_loss = train_sq / (2.0 * double(train_set.size()));
      const double val_loss = eval_loss(val_set);
      if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
        throw_training("non-finite lstm loss at epoch " + std::to_string(epoch));
      result.train_trace.push_back(train_loss);
      result.val_trace.push_back(val_loss);
      result.stopped_epoch = epoch;

      if (val_loss < best_val) {
        best_val = val_loss;
        best_weights = snapshot();
        result.best_epoch = epoch;
        epochs_since_best = 0;
      } else {
        ++epochs_since_best;
        if (epochs_since_best >= cfg.patience) break;
      }
    }

    restore(best_weights);
    return result;
  }

  double eval_loss(const std::vector<FeatureSequence<S>>& set) const {
    double sq = 0.0;
    for (const auto& seq : set) {
      const double d = double(forward(seq)) - double(seq.label);
      sq += d * d;
    }
    return sq / (2.0 * double(set.size()));
  }

  ParamList<S> params() {
    ParamList<S> all = layer1_.params();
    for (auto* p : layer2_.params()) all.push_back(p);
    all.push_back(&head_.W);
    all.push_back(&head_.b);
    return all;
  }
  std::vector<const ParamMatrix<S>*> params() const {
    std::vector<const ParamMatrix<S>*> all = layer1_.params();
    for (const auto* p : layer2_.params()) all.push_back(p);
    all.push_back(&head_.W);
    all.push_back(&head_.b);
    return all;
  }

  LstmLayer<S>& layer1() { return layer1_; }
  LstmLayer<S>& layer2() { return layer2_; }
  DenseLayer<S>& head() { return head_; }
  const LstmLayer<S>& layer1() const { return layer1_; }
  const LstmLayer<S>& layer2() const { return layer2_; }
  const DenseLayer<S>& head() const { return head_; }

  std::vector<MatX<S>> snapshot() {
    std::vector<MatX<S>> out;
    for (auto* p : params()) out.push_back(p->values);
    return out;
  }

  void restore(const std::vector<MatX<S>>& weights) {
    auto ps = params();
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->values = weights[i];
  }

 private:
  LstmLayer<S> layer1_;
  LstmLayer<S> layer2_;
  DenseLayer<S> head_;
};

}  // namespace ae2lstm

#endif
