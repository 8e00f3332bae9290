#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "stealix/rng.hpp"
#include "stealix/types.hpp"

// Attacker-side student: linear softmax classifier trained by mini-batch
// gradient descent with momentum on the victim's labels.  Ground-truth
// labels are never used for training, only for the final test accuracy.

namespace stealix {

enum class LabelMode { hard, soft };

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-2;
  std::string schedule = "cosine";  // "cosine" | "constant"
  LabelMode label_mode = LabelMode::hard;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// One harvested training row.  `soft` is the victim's score vector and may
// be empty unless the trainer runs in soft mode.
struct TrainingExample {
  FeatureVec feature;
  ClassId label = 0;
  Eigen::VectorXd soft;
};

struct AttackerModel {
  Eigen::MatrixXd weights;  // K x d
  Eigen::VectorXd bias;     // K

  int classes() const { return static_cast<int>(weights.rows()); }
};

struct CeGrad {
  double loss = 0.0;
  Eigen::MatrixXd dw;
  Eigen::VectorXd db;
};

// Mean cross-entropy over the batch against one-hot or soft targets, with
// the exact gradient; the coupled L2 penalty enters the gradient only.
CeGrad cross_entropy_loss_grad(const AttackerModel& model,
                               const std::vector<TrainingExample>& batch, LabelMode mode,
                               double weight_decay);

struct TrainResult {
  AttackerModel model;
  std::vector<double> epoch_losses;  // index 0 is the loss at initialization
  bool degenerate_coverage = false;  // fewer than two classes present in the data
};

TrainResult train_attacker(const std::vector<TrainingExample>& data, int classes, int dim,
                           const TrainConfig& cfg, Rng& rng);

// Fraction of test samples whose argmax score matches the stored label;
// ties resolve to the lowest class index.
double evaluate_accuracy(const AttackerModel& model, const std::vector<LabeledSample>& testset);

}  // namespace stealix
