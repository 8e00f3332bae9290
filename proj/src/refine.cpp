#include "stealix/refine.hpp"

#include <stdexcept>

namespace stealix {

void RefineConfig::validate() const {
  if (steps < 0) throw std::invalid_argument("RefineConfig: steps must be >= 0");
  if (learning_rate <= 0) throw std::invalid_argument("RefineConfig: learning_rate must be > 0");
  if (prompt_length < 1) throw std::invalid_argument("RefineConfig: prompt_length must be >= 1");
}

HardPrompt refine_prompt(const World& world, const ImageBank& bank, const Triplet& triplet,
                         const RefineConfig& cfg, Rng& rng, const RefineObserver& observer) {
  cfg.validate();
  if (!triplet.seed.has_value())
    throw std::invalid_argument("refine_prompt: triplet must have the seed slot filled");

  std::vector<TripletSample> samples;
  for (const auto& slot : {triplet.seed, triplet.positive, triplet.negative})
    if (slot.has_value()) {
      const LabeledSample& s = bank.sample(*slot);
      samples.push_back({s.feature, s.predicted == bank.target()});
    }

  SoftPrompt soft;
  soft.rows.resize(cfg.prompt_length, world.vocab.dim());
  for (int i = 0; i < cfg.prompt_length; ++i)
    soft.rows.row(i) = world.vocab.embeddings.row(rng.uniform_int(world.vocab.size()));

  OptimizerState opt = OptimizerState::make(cfg.prompt_length, world.vocab.dim(),
                                            cfg.learning_rate);
  for (int step = 0; step < cfg.steps; ++step) {
    const Projection proj = project_to_vocab(soft, world.vocab);
    const LossGrad lg = triplet_loss_and_grad(world, proj.projected, samples);
    if (observer) {
      const Eigen::MatrixXd before = soft.rows;
      adam_step(opt, soft, lg.grad);
      observer({step, lg.loss, proj.projected.rows, before, soft.rows});
    } else {
      adam_step(opt, soft, lg.grad);
    }
  }
  return project_to_vocab(soft, world.vocab).hard;
}

}  // namespace stealix
