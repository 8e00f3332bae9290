#pragma once

#include <functional>

#include "stealix/types.hpp"
#include "stealix/world.hpp"

namespace stealix {

struct RefineConfig {
  int steps = 100;            // projected-gradient steps s
  double learning_rate = 0.1; // gamma
  int prompt_length = 16;     // tokens L

  void validate() const;
  bool operator==(const RefineConfig&) const = default;
};

// Per-step instrumentation.  eval_point is the quantized prompt the
// gradient was computed at; soft_before/soft_after bracket the optimizer
// update of the continuous prompt.
struct RefineStepInfo {
  int step;
  double loss;
  const Eigen::MatrixXd& eval_point;
  const Eigen::MatrixXd& soft_before;
  const Eigen::MatrixXd& soft_after;
};
using RefineObserver = std::function<void(const RefineStepInfo&)>;

// Straight-through discrete prompt optimization.  Starting from uniformly
// drawn tokens, each step projects the continuous prompt onto the
// vocabulary, computes the triplet loss gradient at that projected point,
// and applies an adaptive-moment update to the un-projected prompt.
// Optimizer state is fresh on every call.  The final projection is the
// returned hard prompt.  Samples are pulled from the bank: slots whose
// victim label equals the bank's target class attract, the rest repel.
HardPrompt refine_prompt(const World& world, const ImageBank& bank, const Triplet& triplet,
                         const RefineConfig& cfg, Rng& rng,
                         const RefineObserver& observer = {});

}  // namespace stealix
