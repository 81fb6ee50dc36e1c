#ifndef AE2LSTM_SPARSE_AE_HPP
#define AE2LSTM_SPARSE_AE_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ae2lstm/dense.hpp"
#include "ae2lstm/optimizer.hpp"

namespace ae2lstm {

// Regularization hyperparameters of one sparse autoencoder.
template <typename S>
struct SparseAeHyper {
  S rho = S(0.05);     // target mean activation per code unit
  S beta = S(4);       // weight of the KL sparsity penalty
  S lambda = S(0.004); // L2 weight decay (biases excluded)
};

template <typename S>
struct AeLossParts {
  S total = S(0);
  S mse = S(0);
  S l2 = S(0);
  S kl = S(0);
};

template <typename S>
struct AeTrainConfig {
  int max_epochs = 400;
  int batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::sgd;
  S learning_rate = S(1e-4);
  std::uint64_t seed = 0;  // init + shuffle stream

  void validate() const {
    if (max_epochs < 1) throw_config("ae max_epochs must be >= 1");
    if (batch_size < 1) throw_config("ae batch_size must be >= 1");
    if (!(learning_rate > S(0))) throw_config("ae learning_rate must be > 0");
  }
};

template <typename S>
struct AeTrainResult {
  std::vector<double> loss_trace;  // one total-loss entry per epoch
};

// Single-hidden-layer sparse autoencoder: sigmoid encoder and decoder,
// objective  mse + lambda*l2 + beta*kl  where
//   mse = (1/(N*input_dim)) * sum ||x - r||^2
//   l2  = 1/2 * sum of squared encoder+decoder weights (no biases)
//   kl  = sum_j rho*ln(rho/rho_hat_j) + (1-rho)*ln((1-rho)/(1-rho_hat_j)),
// rho_hat_j the batch-mean activation of code unit j, clamped to
// [1e-7, 1-1e-7]. Batch matrices hold one sample per column.
template <typename S>
class SparseAe {
 public:
  SparseAe() = default;
  SparseAe(Eigen::Index input_dim, Eigen::Index code_dim,
           SparseAeHyper<S> hyper, std::string name = "ae")
      : hyper_(hyper),
        enc_(name + ".enc", input_dim, code_dim, Activation::sigmoid),
        dec_(name + ".dec", code_dim, input_dim, Activation::sigmoid) {
    if (input_dim < 1 || code_dim < 1)
      throw_config("autoencoder dimensions must be >= 1");
    if (!(hyper.rho > S(0) && hyper.rho < S(1)))
      throw_config("sparsity proportion rho must lie in (0,1)");
    if (hyper.beta < S(0)) throw_config("sparsity weight beta must be >= 0");
    if (hyper.lambda < S(0)) throw_config("l2 weight lambda must be >= 0");
  }

  Eigen::Index input_dim() const { return enc_.in_dim(); }
  Eigen::Index code_dim() const { return enc_.out_dim(); }
  const SparseAeHyper<S>& hyper() const { return hyper_; }

  void init(Rng& rng) {
    enc_.init(rng);
    dec_.init(rng);
  }

  // h = sigma(W_e x + b_e). Pure; safe for concurrent callers.
  MatX<S> encode(const MatX<S>& x) const { return enc_.eval(x); }
  VecX<S> encode(const VecX<S>& x) const { return enc_.eval_vec(x); }

  // r = sigma(W_d h + b_d). Pure.
  MatX<S> decode(const MatX<S>& code) const { return dec_.eval(code); }
  VecX<S> decode(const VecX<S>& code) const { return dec_.eval_vec(code); }

  AeLossParts<S> loss(const MatX<S>& batch) const {
    check_batch(batch);
    const MatX<S> code = enc_.eval(batch);
    const MatX<S> recon = dec_.eval(code);
    return loss_parts(batch, code, recon);
  }

  // Loss plus gradient accumulation into the parameters. The KL term is
  // differentiated through the batch-mean activations: each sample's hidden
  // delta picks up beta/N * (-rho/rho_hat + (1-rho)/(1-rho_hat)), with the
  // derivative cut where the clamp is active.
  AeLossParts<S> loss_and_backward(const MatX<S>& batch) {
    check_batch(batch);
    const Eigen::Index n = batch.cols();
    const MatX<S> code = enc_.forward(batch);
    const MatX<S> recon = dec_.forward(code);
    const AeLossParts<S> parts = loss_parts(batch, code, recon);

    const S mse_scale = S(2) / (S(n) * S(input_dim()));
    const MatX<S> d_recon = mse_scale * (recon - batch);
    MatX<S> d_code = dec_.backward(d_recon);

    const VecX<S> rho_hat_raw = code.rowwise().mean();
    const S lo = S(1e-7), hi = S(1) - S(1e-7);
    VecX<S> kl_delta(code_dim());
    for (Eigen::Index j = 0; j < code_dim(); ++j) {
      const S raw = rho_hat_raw(j);
      if (raw <= lo || raw >= hi) {
        kl_delta(j) = S(0);  // clamped: locally constant in rho_hat
      } else {
        kl_delta(j) = hyper_.beta / S(n) *
                      (-hyper_.rho / raw + (S(1) - hyper_.rho) / (S(1) - raw));
      }
    }
    d_code.colwise() += kl_delta;

    enc_.backward(d_code);

    enc_.W.grad += hyper_.lambda * enc_.W.values;
    dec_.W.grad += hyper_.lambda * dec_.W.values;
    return parts;
  }

  // Mini-batch gradient descent over ae_loss. Deterministic per seed: the
  // shuffle order is drawn from config.seed, so two runs with the same seed
  // produce bit-identical weights.
  AeTrainResult<S> train(const MatX<S>& dataset, const AeTrainConfig<S>& cfg) {
    cfg.validate();
    check_batch(dataset);
    const Eigen::Index n = dataset.cols();

    Rng shuffle_rng(Rng::derive(cfg.seed, 1));
    Optimizer<S> opt(cfg.optimizer, cfg.learning_rate, params());

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index(0));

    AeTrainResult<S> result;
    result.loss_trace.reserve(std::size_t(cfg.max_epochs));
    MatX<S> batch;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
      shuffle_rng.shuffle(order);
      double epoch_loss = 0.0;
      for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
        const Eigen::Index count = std::min<Eigen::Index>(cfg.batch_size, n - start);
        batch.resize(input_dim(), count);
        for (Eigen::Index k = 0; k < count; ++k)
          batch.col(k) = dataset.col(order[std::size_t(start + k)]);
        const AeLossParts<S> parts = loss_and_backward(batch);
        if (!std::isfinite(double(parts.total)))
          throw_training("non-finite autoencoder loss at epoch " +
                         std::to_string(epoch));
        opt.step();
        epoch_loss += double(parts.total) * double(count);
      }
      result.loss_trace.push_back(epoch_loss / double(n));
    }
    return result;
  }

  ParamList<S> params() {
    return {&enc_.W, &enc_.b, &dec_.W, &dec_.b};
  }

  const ParamMatrix<S>& encoder_w() const { return enc_.W; }
  const ParamMatrix<S>& encoder_b() const { return enc_.b; }
  const ParamMatrix<S>& decoder_w() const { return dec_.W; }
  const ParamMatrix<S>& decoder_b() const { return dec_.b; }
  ParamMatrix<S>& encoder_w() { return enc_.W; }
  ParamMatrix<S>& encoder_b() { return enc_.b; }
  ParamMatrix<S>& decoder_w() { return dec_.W; }
  ParamMatrix<S>& decoder_b() { return dec_.b; }

 private:
  void check_batch(const MatX<S>& batch) const {
    if (batch.cols() == 0) throw_usage("autoencoder batch is empty");
    if (batch.rows() != input_dim())
      throw_shape("autoencoder input has length " +
                  std::to_string(batch.rows()) + " but input_dim is " +
                  std::to_string(input_dim()));
  }

  AeLossParts<S> loss_parts(const MatX<S>& batch, const MatX<S>& code,
                            const MatX<S>& recon) const {
    const Eigen::Index n = batch.cols();
    AeLossParts<S> parts;
    parts.mse = (batch - recon).squaredNorm() / (S(n) * S(input_dim()));
    parts.l2 = S(0.5) * (enc_.W.values.squaredNorm() +
                         dec_.W.values.squaredNorm());
    const VecX<S> rho_hat = code.rowwise()
                                .mean()
                                .cwiseMax(S(1e-7))
                                .cwiseMin(S(1) - S(1e-7));
    const S rho = hyper_.rho;
    S kl = S(0);
    for (Eigen::Index j = 0; j < code_dim(); ++j) {
      kl += rho * std::log(rho / rho_hat(j)) +
            (S(1) - rho) * std::log((S(1) - rho) / (S(1) - rho_hat(j)));
    }
    parts.kl = kl;
    parts.total = parts.mse + hyper_.lambda * parts.l2 + hyper_.beta * parts.kl;
    return parts;
  }

  SparseAeHyper<S> hyper_;
  DenseLayer<S> enc_;
  DenseLayer<S> dec_;
};

}  // namespace ae2lstm

#endif
