#include "stealix/surrogate.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace stealix {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (learning_rate <= 0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (momentum < 0 || momentum >= 1)
    throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
  if (weight_decay < 0) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
  if (schedule != "cosine" && schedule != "constant")
    throw std::invalid_argument("TrainConfig: schedule must be 'cosine' or 'constant'");
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const Eigen::ArrayXd shifted = (z.array() - z.maxCoeff()).exp();
  return (shifted / shifted.sum()).matrix();
}

Eigen::VectorXd target_of(const TrainingExample& ex, LabelMode mode, int classes) {
  if (mode == LabelMode::soft) {
    if (ex.soft.size() != classes)
      throw std::invalid_argument("train: soft label size does not match class count");
    return ex.soft;
  }
  if (ex.label < 0 || ex.label >= classes)
    throw std::invalid_argument("train: label out of range");
  Eigen::VectorXd t = Eigen::VectorXd::Zero(classes);
  t(ex.label) = 1.0;
  return t;
}

}  // namespace

CeGrad cross_entropy_loss_grad(const AttackerModel& model,
                               const std::vector<TrainingExample>& batch, LabelMode mode,
                               double weight_decay) {
  if (batch.empty()) throw std::invalid_argument("cross_entropy_loss_grad: empty batch");
  const int K = model.classes();
  CeGrad out;
  out.dw = Eigen::MatrixXd::Zero(model.weights.rows(), model.weights.cols());
  out.db = Eigen::VectorXd::Zero(K);
  for (const TrainingExample& ex : batch) {
    if (ex.feature.size() != model.weights.cols())
      throw std::invalid_argument("cross_entropy_loss_grad: feature dimension mismatch");
    const Eigen::VectorXd p = softmax(model.weights * ex.feature + model.bias);
    const Eigen::VectorXd q = target_of(ex, mode, K);
    // CE = -sum q log p; clamp keeps the loss finite when p underflows.
    out.loss -= (q.array() * p.array().max(1e-300).log()).sum();
    const Eigen::VectorXd delta = p - q;
    out.dw += delta * ex.feature.transpose();
    out.db += delta;
  }
  const double n = static_cast<double>(batch.size());
  out.loss /= n;
  out.dw /= n;
  out.db /= n;
  out.dw += weight_decay * model.weights;
  return out;
}

TrainResult train_attacker(const std::vector<TrainingExample>& data, int classes, int dim,
                           const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  if (classes < 2) throw std::invalid_argument("train_attacker: need at least 2 classes");
  if (dim < 1) throw std::invalid_argument("train_attacker: dim must be >= 1");
  if (data.empty()) throw std::invalid_argument("train_attacker: empty training set");

  TrainResult res;
  res.model.weights = Eigen::MatrixXd::Zero(classes, dim);
  res.model.bias = Eigen::VectorXd::Zero(classes);

  std::set<ClassId> present;
  for (const TrainingExample& ex : data) present.insert(ex.label);
  res.degenerate_coverage = present.size() < 2;

  const auto full_loss = [&] {
    return cross_entropy_loss_grad(res.model, data, cfg.label_mode, 0.0).loss;
  };
  res.epoch_losses.push_back(full_loss());

  Eigen::MatrixXd vel_w = Eigen::MatrixXd::Zero(classes, dim);
  Eigen::VectorXd vel_b = Eigen::VectorXd::Zero(classes);
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double lr = cfg.learning_rate;
    if (cfg.schedule == "cosine")
      lr *= 0.5 * (1.0 + std::cos(3.14159265358979323846 * epoch / cfg.epochs));

    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)));
      std::swap(order[i - 1], order[j]);
    }

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::vector<TrainingExample> batch;
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.reserve(end - start);
      for (std::size_t k = start; k < end; ++k)
        batch.push_back(data[static_cast<std::size_t>(order[k])]);
      const CeGrad g = cross_entropy_loss_grad(res.model, batch, cfg.label_mode,
                                               cfg.weight_decay);
      vel_w = cfg.momentum * vel_w + g.dw;
      vel_b = cfg.momentum * vel_b + g.db;
      res.model.weights -= lr * vel_w;
      res.model.bias -= lr * vel_b;
    }
    res.epoch_losses.push_back(full_loss());
  }
  return res;
}

double evaluate_accuracy(const AttackerModel& model, const std::vector<LabeledSample>& testset) {
  if (testset.empty()) throw std::invalid_argument("evaluate_accuracy: empty test set");
  int correct = 0;
  for (const LabeledSample& s : testset) {
    const Eigen::VectorXd z = model.weights * s.feature + model.bias;
    int arg = 0;
    for (int c = 1; c < z.size(); ++c)
      if (z(c) > z(arg)) arg = c;
    if (arg == s.predicted) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(testset.size());
}

}  // namespace stealix
