#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "ae2lstm/error.hpp"
#include "ae2lstm/grad_check.hpp"
#include "ae2lstm/sparse_ae.hpp"

using ae2lstm::AeTrainConfig;
using ae2lstm::Error;
using ae2lstm::ErrKind;
using ae2lstm::MatX;
using ae2lstm::OptimizerKind;
using ae2lstm::Rng;
using ae2lstm::SparseAe;
using ae2lstm::SparseAeHyper;
using ae2lstm::VecX;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

template <typename S>
MatX<S> random_batch(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  return MatX<S>::NullaryExpr(rows, cols, [&](Eigen::Index, Eigen::Index) {
    return S(rng.uniform(0, 1));
  });
}

}  // namespace

TEST_CASE("zero-weight encoder and decoder both emit one-half everywhere") {
  SparseAe<float> ae(6, 3, {});
  VecX<float> x = VecX<float>::NullaryExpr(6, [](Eigen::Index i) {
    return 0.1f * float(i);
  });
  VecX<float> h = ae.encode(x);
  REQUIRE(h.size() == 3);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(h(j) == 0.5f);
  VecX<float> r = ae.decode(h);
  REQUIRE(r.size() == 6);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(r(i) == 0.5f);
}

TEST_CASE("encode and decode reject vectors of the wrong length") {
  SparseAe<float> ae(5, 2, {});
  const VecX<float> short_in = VecX<float>::Zero(4);
  const VecX<float> long_code = VecX<float>::Zero(5);
  CHECK_THROWS_AS((void)ae.encode(short_in), Error);
  CHECK_THROWS_AS((void)ae.decode(long_code), Error);
  try {
    (void)ae.encode(short_in);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::shape);
  }
}

TEST_CASE("encode matches an independent scalar evaluation") {
  Rng rng(17);
  SparseAe<double> ae(4, 3, {});
  ae.init(rng);
  VecX<double> x(4);
  x << 0.2, 0.9, 0.4, 0.05;
  VecX<double> h = ae.encode(x);
  for (Eigen::Index j = 0; j < 3; ++j) {
    double z = ae.encoder_b().values(j, 0);
    for (Eigen::Index i = 0; i < 4; ++i)
      z += ae.encoder_w().values(j, i) * x(i);
    CHECK(h(j) == doctest::Approx(sigmoid(z)).epsilon(1e-14));
  }
}

TEST_CASE("batch encode equals per-vector encode") {
  Rng rng(8);
  SparseAe<float> ae(6, 4, {});
  ae.init(rng);
  MatX<float> batch = random_batch<float>(rng, 6, 5);
  MatX<float> codes = ae.encode(batch);
  for (Eigen::Index c = 0; c < 5; ++c) {
    VecX<float> one = ae.encode(VecX<float>(batch.col(c)));
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(codes(j, c) == one(j));
  }
}

TEST_CASE("codes stay strictly inside the open unit interval") {
  Rng rng(402);
  SparseAe<float> ae(10, 7, {});
  ae.init(rng);
  MatX<float> codes = ae.encode(random_batch<float>(rng, 10, 20));
  CHECK((codes.array() > 0.0f).all());
  CHECK((codes.array() < 1.0f).all());
}

TEST_CASE("invalid hyperparameters and configs are config errors") {
  CHECK_THROWS_AS(SparseAe<float>(0, 3, {}), Error);
  SparseAeHyper<float> bad_rho;
  bad_rho.rho = 1.5f;
  CHECK_THROWS_AS(SparseAe<float>(4, 3, bad_rho), Error);
  SparseAeHyper<float> neg_beta;
  neg_beta.beta = -1.0f;
  CHECK_THROWS_AS(SparseAe<float>(4, 3, neg_beta), Error);
  AeTrainConfig<float> cfg;
  cfg.max_epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.learning_rate = 0.0f;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("zero-weight model on an all-0.5 input has zero mse and l2") {
  SparseAe<double> ae(4, 2, {});
  MatX<double> batch = MatX<double>::Constant(4, 3, 0.5);
  auto parts = ae.loss(batch);
  CHECK(parts.mse == 0.0);
  CHECK(parts.l2 == 0.0);
  // Only the sparsity term is live: rho_hat = 0.5 on both units.
  CHECK(parts.total == doctest::Approx(4.0 * parts.kl).epsilon(1e-14));
}

TEST_CASE("single unit at mean activation 0.5 reproduces the closed-form kl") {
  SparseAe<double> ae(3, 1, {});  // zero weights: code is exactly 0.5
  MatX<double> batch = MatX<double>::Constant(3, 4, 0.25);
  auto parts = ae.loss(batch);
  const double want = 0.05 * std::log(0.05 / 0.5) +
                      0.95 * std::log(0.95 / 0.5);
  // Same value, expanded the way a reader might: 0.05 ln(0.1) + 0.95 ln(1.9).
  CHECK(want == doctest::Approx(0.05 * std::log(0.1) + 0.95 * std::log(1.9))
                    .epsilon(1e-15));
  CHECK(parts.kl == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("kl vanishes when the mean activation hits the target exactly") {
  SparseAeHyper<double> hyper;
  hyper.rho = 0.05;
  SparseAe<double> ae(3, 2, hyper);
  // Zero weights plus a logit(rho) encoder bias pin every code to rho.
  const double logit = std::log(hyper.rho / (1.0 - hyper.rho));
  ae.encoder_b().values.setConstant(logit);
  auto parts = ae.loss(MatX<double>::Constant(3, 5, 0.7));
  CHECK(std::abs(parts.kl) < 1e-12);
}

TEST_CASE("kl is non-negative for arbitrary models") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    SparseAe<double> ae(5, 3, {});
    ae.init(rng);
    ae.encoder_b().values.setConstant(rng.uniform(-2, 2));
    auto parts = ae.loss(random_batch<double>(rng, 5, 6));
    CHECK(parts.kl >= 0.0);
  }
}

TEST_CASE("total is exactly mse + lambda*l2 + beta*kl") {
  Rng rng(6);
  SparseAeHyper<double> hyper;
  hyper.rho = 0.05;
  hyper.beta = 4.0;
  hyper.lambda = 0.004;
  SparseAe<double> ae(6, 4, hyper);
  ae.init(rng);
  auto parts = ae.loss(random_batch<double>(rng, 6, 7));
  CHECK(parts.total ==
        doctest::Approx(parts.mse + 0.004 * parts.l2 + 4.0 * parts.kl)
            .epsilon(1e-14));
  CHECK(parts.mse > 0.0);
  CHECK(parts.l2 > 0.0);
}

TEST_CASE("an empty batch is a usage error") {
  SparseAe<float> ae(4, 2, {});
  try {
    (void)ae.loss(MatX<float>(4, 0));
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::usage);
  }
}

TEST_CASE("a saturated code clamps rho_hat and keeps everything finite") {
  SparseAeHyper<double> hyper;
  SparseAe<double> ae(4, 2, hyper);
  ae.encoder_b().values.setConstant(-60.0);  // sigmoid ~ 1e-26, below the clamp
  MatX<double> batch = MatX<double>::Constant(4, 3, 0.5);
  auto parts = ae.loss(batch);
  const double per_unit = 0.05 * std::log(0.05 / 1e-7) +
                          0.95 * std::log(0.95 / (1.0 - 1e-7));
  CHECK(parts.kl == doctest::Approx(2.0 * per_unit).epsilon(1e-12));
  // Backward through the clamp must not blow up.
  auto bw = ae.loss_and_backward(batch);
  CHECK(std::isfinite(bw.total));
  for (auto* p : ae.params()) CHECK(p->grad.allFinite());
}

TEST_CASE("full loss gradient passes the finite-difference check") {
  Rng rng(314);
  SparseAeHyper<double> hyper;
  hyper.rho = 0.05;
  hyper.beta = 4.0;
  hyper.lambda = 0.004;
  SparseAe<double> ae(7, 4, hyper);
  ae.init(rng);
  MatX<double> batch = random_batch<double>(rng, 7, 5);
  auto loss = [&]() { return ae.loss_and_backward(batch).total; };
  Rng pick(55);
  auto report = ae2lstm::gradient_check<double>(loss, ae.params(), 1e-5, pick);
  CHECK(report.max_rel_error < 1e-4);
  CHECK(report.nonfinite_comparisons == 0);
}

TEST_CASE("a single sample is memorized to below 1e-3 mse") {
  Rng rng(121);
  SparseAeHyper<float> hyper;
  hyper.beta = 0.0f;
  hyper.lambda = 0.0f;
  SparseAe<float> ae(8, 5, hyper);
  ae.init(rng);
  MatX<float> data(8, 1);
  data.col(0) << 0.2f, 0.7f, 0.35f, 0.8f, 0.5f, 0.25f, 0.6f, 0.45f;
  AeTrainConfig<float> cfg;
  cfg.max_epochs = 400;
  cfg.batch_size = 1;
  cfg.optimizer = OptimizerKind::adam;
  cfg.learning_rate = 0.05f;
  cfg.seed = 7;
  ae.train(data, cfg);
  CHECK(double(ae.loss(data).mse) < 1e-3);
}

TEST_CASE("full-batch sgd descends monotonically at a small step size") {
  Rng rng(5150);
  SparseAeHyper<double> hyper;  // default penalty weights, smooth everywhere
  SparseAe<double> ae(6, 3, hyper);
  ae.init(rng);
  MatX<double> data = random_batch<double>(rng, 6, 10);
  AeTrainConfig<double> cfg;
  cfg.max_epochs = 10;
  cfg.batch_size = 10;  // one deterministic batch per epoch
  cfg.optimizer = OptimizerKind::sgd;
  cfg.learning_rate = 1e-3;
  auto result = ae.train(data, cfg);
  REQUIRE(result.loss_trace.size() == 10);
  for (std::size_t e = 1; e < result.loss_trace.size(); ++e)
    CHECK(result.loss_trace[e] <= result.loss_trace[e - 1] + 1e-12);
}

TEST_CASE("training is bit-identical given the same seed") {
  auto run = []() {
    Rng rng(2u);
    SparseAe<float> ae(10, 4, {});
    ae.init(rng);
    Rng data_rng(33);
    MatX<float> data = random_batch<float>(data_rng, 10, 12);
    AeTrainConfig<float> cfg;
    cfg.max_epochs = 5;
    cfg.batch_size = 4;
    cfg.seed = 90210;
    ae.train(data, cfg);
    return ae;
  };
  SparseAe<float> a = run();
  SparseAe<float> b = run();
  CHECK(a.encoder_w().values == b.encoder_w().values);
  CHECK(a.encoder_b().values == b.encoder_b().values);
  CHECK(a.decoder_w().values == b.decoder_w().values);
  CHECK(a.decoder_b().values == b.decoder_b().values);
}

TEST_CASE("a poisoned weight turns into a training error naming the epoch") {
  SparseAe<float> ae(4, 2, {});
  ae.encoder_w().values(0, 0) = std::numeric_limits<float>::infinity();
  MatX<float> data = MatX<float>::Constant(4, 3, 0.5f);
  AeTrainConfig<float> cfg;
  try {
    ae.train(data, cfg);
    FAIL("expected a training error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::training);
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}

TEST_CASE("strong sparsity pressure pulls mean activations toward rho") {
  Rng rng(777);
  SparseAeHyper<float> hyper;
  hyper.rho = 0.05f;
  hyper.beta = 40.0f;  // ten times the usual weight
  hyper.lambda = 0.0f;
  SparseAe<float> ae(16, 4, hyper);
  ae.init(rng);
  MatX<float> data = random_batch<float>(rng, 16, 32);
  AeTrainConfig<float> cfg;
  cfg.max_epochs = 300;
  cfg.batch_size = 32;
  cfg.optimizer = OptimizerKind::adam;
  cfg.learning_rate = 0.01f;
  cfg.seed = 4;
  ae.train(data, cfg);
  VecX<float> rho_hat = ae.encode(data).rowwise().mean();
  for (Eigen::Index j = 0; j < rho_hat.size(); ++j)
    CHECK(std::abs(double(rho_hat(j)) - 0.05) <= 0.05);
}

TEST_CASE("reconstruction improves on a toy dataset over training") {
  Rng rng(246);
  SparseAeHyper<float> hyper;
  hyper.beta = 0.1f;
  hyper.lambda = 1e-4f;
  SparseAe<float> ae(12, 6, hyper);
  ae.init(rng);
  MatX<float> data = random_batch<float>(rng, 12, 24);
  const double before = double(ae.loss(data).mse);
  AeTrainConfig<float> cfg;
  cfg.max_epochs = 200;
  cfg.batch_size = 8;
  cfg.optimizer = OptimizerKind::adam;
  cfg.learning_rate = 0.01f;
  cfg.seed = 11;
  auto result = ae.train(data, cfg);
  REQUIRE(result.loss_trace.size() == 200);
  CHECK(double(ae.loss(data).mse) < before);
  CHECK(result.loss_trace.back() < result.loss_trace.front());
}
