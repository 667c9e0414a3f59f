#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "dgc/classifier.hpp"
#include "dgc/experiments.hpp"
#include "test_support.hpp"

using namespace dgc;
namespace fs = std::filesystem;

namespace {

struct Problem {
  Matrix x;
  Labels y;
  std::size_t classes = 0;
  NodeMask train, val, test;
};

Problem random_problem(std::size_t n, std::size_t d, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Problem p;
  p.x = test::random_matrix(n, d, rng);
  p.classes = c;
  p.y.resize(n);
  p.train.assign(n, false);
  p.val.assign(n, false);
  p.test.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    p.y[i] = static_cast<std::int32_t>(i % c);
    (i % 5 < 3 ? p.train : i % 5 == 3 ? p.val : p.test)[i] = true;
  }
  return p;
}

}  // namespace

TEST_CASE("forward at zero weights is uniform") {
  const SoftmaxModel m = SoftmaxModel::zeros(4, 3);
  std::mt19937_64 rng(1);
  const Matrix p = forward(m, test::random_matrix(5, 4, rng));
  for (double v : p.values()) CHECK(std::abs(v - 1.0 / 3.0) <= 1e-15);
}

TEST_CASE("forward is stable for huge logits") {
  SoftmaxModel m = SoftmaxModel::zeros(1, 2);
  m.theta(0, 0) = 1000.0;
  const Matrix p = forward(m, Matrix(1, 1, 1.0));
  CHECK(all_finite(p));
  CHECK(p(0, 0) == 1.0);
  CHECK(p(0, 1) < 1e-300);
}

TEST_CASE("loss at zero weights is ln C") {
  for (std::size_t c : {2u, 3u, 7u}) {
    const Problem p = random_problem(20, 3, c, c);
    const auto lg = loss_and_grad(SoftmaxModel::zeros(3, c), p.x, p.y, p.train, 1e-3);
    CHECK(std::abs(lg.loss - std::log(static_cast<double>(c))) <= 1e-14);
  }
}

TEST_CASE("weight decay adds half the squared norm and skips the bias") {
  const Problem p = random_problem(12, 2, 2, 3);
  SoftmaxModel m = SoftmaxModel::zeros(2, 2);
  m.theta(0, 0) = 0.5;
  m.theta(1, 1) = -1.0;
  m.bias = {3.0, -3.0};
  const auto plain = loss_and_grad(m, p.x, p.y, p.train, 0.0);
  const auto decayed = loss_and_grad(m, p.x, p.y, p.train, 0.1);
  CHECK(decayed.loss - plain.loss == doctest::Approx(0.05 * 1.25));
  CHECK(decayed.grad_bias == plain.grad_bias);
  CHECK(decayed.grad_theta(1, 1) - plain.grad_theta(1, 1) == doctest::Approx(-0.1));
}

TEST_CASE("analytic gradients match central differences") {
  CHECK(gradient_check(50, 99) <= 1e-6);
}

TEST_CASE("gradient descent decreases the loss monotonically") {
  // Separable two-node toy, no weight decay.
  {
    const Matrix x(4, 1, std::vector<double>{1.0, -1.0, 1.0, -1.0});
    const Labels y{0, 1, 0, 1};
    const NodeMask train_nodes{true, true, false, false};
    const NodeMask val{false, false, true, false};
    const NodeMask test{false, false, false, true};
    TrainConfig cfg;
    cfg.optimizer = Optimizer::Gd;
    cfg.learning_rate = 0.1;
    cfg.epochs = 200;
    const auto r = train(x, y, 2, train_nodes, val, test, cfg);
    for (std::size_t e = 1; e < r.report.train_loss.size(); ++e)
      CHECK(r.report.train_loss[e] < r.report.train_loss[e - 1]);
    CHECK(r.report.final_test_acc == 1.0);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = random_problem(40, 5, 3, seed);
    TrainConfig cfg;
    cfg.optimizer = Optimizer::Gd;
    cfg.learning_rate = 0.01;
    cfg.weight_decay = 1e-3;
    cfg.epochs = 100;
    const auto r = train(p.x, p.y, p.classes, p.train, p.val, p.test, cfg);
    for (std::size_t e = 1; e < r.report.train_loss.size(); ++e)
      CHECK(r.report.train_loss[e] < r.report.train_loss[e - 1]);
  }
}

TEST_CASE("evaluate") {
  const Problem p = random_problem(10, 2, 2, 4);
  const NodeMask all(10, true);
  // Zero weights: every node predicted as class 0, half the labels match.
  CHECK(evaluate(SoftmaxModel::zeros(2, 2), p.x, p.y, all) == 0.5);

  // One-hot features with a diagonal theta: all correct.
  Matrix onehot(10, 2);
  for (std::size_t i = 0; i < 10; ++i) onehot(i, p.y[i]) = 1.0;
  SoftmaxModel m = SoftmaxModel::zeros(2, 2);
  m.theta(0, 0) = m.theta(1, 1) = 1.0;
  CHECK(evaluate(m, onehot, p.y, all) == 1.0);

  // Shifting every logit by the same constant changes nothing.
  std::mt19937_64 rng(5);
  SoftmaxModel r = SoftmaxModel::zeros(2, 2);
  r.theta = test::random_matrix(2, 2, rng);
  const double before = evaluate(r, p.x, p.y, all);
  for (double& b : r.bias) b += 17.25;
  CHECK(evaluate(r, p.x, p.y, all) == before);

  CHECK_ERRC(evaluate(m, onehot, p.y, NodeMask(10, false)), Errc::EmptyMask);
}

TEST_CASE("training is deterministic") {
  const Problem p = random_problem(60, 6, 4, 6);
  TrainConfig cfg;
  cfg.weight_decay = 5e-4;
  const auto a = train(p.x, p.y, p.classes, p.train, p.val, p.test, cfg);
  const auto b = train(p.x, p.y, p.classes, p.train, p.val, p.test, cfg);
  CHECK(a.model.theta == b.model.theta);
  CHECK(a.model.bias == b.model.bias);
  CHECK(a.report.train_loss == b.report.train_loss);
  CHECK(a.report.val_acc == b.report.val_acc);
  CHECK(a.report.final_test_acc == b.report.final_test_acc);
  CHECK(a.report.train_loss.size() == 100);
}

TEST_CASE("train rejects inconsistent inputs") {
  Problem p = random_problem(10, 2, 2, 7);
  const TrainConfig cfg;
  NodeMask overlap = p.test;
  overlap[0] = true;
  CHECK_ERRC(train(p.x, p.y, 2, p.train, p.val, overlap, cfg), Errc::MaskOverlap);
  CHECK_ERRC(train(p.x, p.y, 2, NodeMask(10, false), p.val, p.test, cfg), Errc::EmptyMask);
  p.y[3] = 2;
  CHECK_ERRC(train(p.x, p.y, 2, p.train, p.val, p.test, cfg), Errc::LabelOutOfRange);
  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_ERRC(validate(bad), Errc::InvalidArgument);
}

TEST_CASE("no-bias models keep a zero bias") {
  const Problem p = random_problem(30, 3, 3, 8);
  TrainConfig cfg;
  cfg.use_bias = false;
  const auto r = train(p.x, p.y, p.classes, p.train, p.val, p.test, cfg);
  for (double b : r.model.bias) CHECK(b == 0.0);
}

TEST_CASE("checkpoint round trip") {
  const fs::path dir = fs::temp_directory_path() / "dgc_test_ckpt";
  fs::create_directories(dir);
  const Problem p = random_problem(30, 3, 3, 9);
  const auto r = train(p.x, p.y, p.classes, p.train, p.val, p.test, TrainConfig{});
  write_checkpoint(dir / "m.dgcm", r.model);
  const SoftmaxModel back = read_checkpoint(dir / "m.dgcm");
  CHECK(back.theta == r.model.theta);
  CHECK(back.bias == r.model.bias);
  CHECK(back.use_bias == r.model.use_bias);

  CHECK_ERRC(read_checkpoint(dir / "absent.dgcm"), Errc::MissingFile);
  std::ofstream(dir / "junk.dgcm", std::ios::binary) << "NOPE1234";
  CHECK_ERRC(read_checkpoint(dir / "junk.dgcm"), Errc::SchemaViolation);
  fs::remove_all(dir);
}

TEST_CASE("report json layout") {
  const Problem p = random_problem(20, 2, 2, 10);
  const auto r = train(p.x, p.y, p.classes, p.train, p.val, p.test, TrainConfig{});
  const auto j = report_to_json(r.report);
  CHECK(j.at("traces").at("train_loss").size() == 100);
  CHECK(j.at("config").at("learning_rate").get<double>() == 0.2);
  CHECK(j.contains("timings_ms"));
  CHECK(j.at("final_test_acc").get<double>() == r.report.final_test_acc);
}
