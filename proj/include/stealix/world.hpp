#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "stealix/embed.hpp"
#include "stealix/rng.hpp"
#include "stealix/types.hpp"

// Synthetic closed world: images are vectors in R^d, class prototypes are
// orthonormal directions, a distractor direction contaminates the operator
// seeds, the victim is a cosine-score classifier, and the text-to-image
// generator is a linear map plus Gaussian noise.

namespace stealix {

struct WorldConfig {
  int dim = 16;                       // feature dimension d
  int classes = 4;                    // victim classes K (requires dim >= classes)
  int vocab_size = 128;               // token count
  int prompt_length = 16;             // tokens per prompt
  double generator_noise = 0.1;       // sigma_g, per-coordinate
  double victim_noise = 0.3;          // sigma_v around class prototypes
  double distractor_strength = 0.5;   // alpha, seed contamination along nu
  double softmax_temperature = 10.0;  // tau in softmax(scores / tau)
  int train_per_class = 200;          // victim reference data per class
  int test_per_class = 500;           // held-out evaluation data per class
  std::uint64_t rng_seed = 0;  // 0 = derive from the run seed at resolve time

  void validate() const;
  bool operator==(const WorldConfig&) const = default;
};

struct World {
  WorldConfig cfg;
  Vocabulary vocab;
  Eigen::MatrixXd text_map;    // W_T, d x d
  Eigen::MatrixXd image_map;   // M_I, d x d
  Eigen::MatrixXd gen_map;     // A_G, d x d
  Eigen::VectorXd gen_offset;  // b_G
  Eigen::MatrixXd prototypes;  // K x d, orthonormal rows mu_c
  Eigen::VectorXd distractor;  // nu, unit, orthogonal to prototypes when d > K
  std::vector<LabeledSample> victim_train;  // predicted holds the true class
  std::vector<LabeledSample> victim_test;
  std::vector<LabeledSample> seeds;  // one victim-correct seed per class
};

struct VictimResponse {
  ClassId hard = 0;
  Eigen::VectorXd soft;      // softmax over cosine scores / tau
  bool degenerate = false;   // zero input vector
};

enum class Split { train, test };

// Cosine-score classifier with softmax soft output.  Ties and the zero
// vector resolve to the lowest class index.
VictimResponse victim_predict(const World& world, const FeatureVec& x);

// Identity hook: the victim is linear, so its penultimate features are the
// input vectors themselves.  A nonlinear victim would replace this.
inline FeatureVec victim_features(const World&, const FeatureVec& x) { return x; }

// Renders a hard prompt to an image: A_G * t_raw(prompt) + b_G + noise,
// where t_raw is the pre-normalization text encoding.
FeatureVec generate(const World& world, const HardPrompt& prompt, Rng& rng);

// Gaussian class clouds around the prototypes, labeled with the true class.
// Train and test derive disjoint substreams from the same base seed.
std::vector<LabeledSample> sample_victim_data(const World& world, int per_class, Split split,
                                              std::uint64_t base_seed);

World build_world(const WorldConfig& cfg);

// Exact binary snapshot for replay; doubles round-trip bit-for-bit.
void save_world(const World& world, const std::string& path);
World load_world(const std::string& path);

// Convenience wrappers binding the world's linear maps.
template <typename Derived>
Encoded encode_text(const World& world, const Eigen::MatrixBase<Derived>& rows) {
  return encode_text(world.text_map, rows);
}

inline Encoded encode_image(const World& world, const FeatureVec& x) {
  return encode_image(world.image_map, x);
}

inline LossGrad triplet_loss_and_grad(const World& world, const SoftPrompt& soft,
                                      const std::vector<TripletSample>& samples) {
  return triplet_loss_and_grad(world.text_map, world.image_map, soft, samples);
}

}  // namespace stealix
