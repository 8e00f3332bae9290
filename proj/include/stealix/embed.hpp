#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stealix/types.hpp"

// Shared CLIP-like embedding space: token rows, text/image encoders, the
// contrastive triplet loss with its exact gradient, nearest-neighbor
// projection onto the vocabulary, and the adaptive-moment optimizer used by
// prompt refinement.  Everything here is pure Eigen math with no dependency
// on the synthetic world.

namespace stealix {

// Token embedding table; row i is the embedding of token i.
struct Vocabulary {
  Eigen::MatrixXd embeddings;  // V x d

  int size() const { return static_cast<int>(embeddings.rows()); }
  int dim() const { return static_cast<int>(embeddings.cols()); }

  void validate() const {
    if (embeddings.rows() < 2) throw std::invalid_argument("Vocabulary: need at least 2 tokens");
    if (!embeddings.allFinite()) throw std::invalid_argument("Vocabulary: non-finite embedding");
    for (Eigen::Index i = 0; i < embeddings.rows(); ++i)
      if (embeddings.row(i).norm() == 0.0)
        throw std::invalid_argument("Vocabulary: zero-norm token row");
  }
};

// Continuous prompt, one row per token position.
struct SoftPrompt {
  Eigen::MatrixXd rows;  // L x d

  int length() const { return static_cast<int>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
};

// Discrete prompt: token indices into a Vocabulary.
struct HardPrompt {
  std::vector<int> tokens;

  bool operator==(const HardPrompt&) const = default;
};

struct Encoded {
  FeatureVec feature;        // unit norm, or a basis-vector fallback
  bool degenerate = false;   // true when the pre-normalization vector was zero
};

namespace detail {
inline Encoded normalize_or_fallback(FeatureVec v) {
  const double n = v.norm();
  if (n == 0.0) {
    FeatureVec e0 = FeatureVec::Zero(v.size());
    if (v.size() > 0) e0(0) = 1.0;
    return {std::move(e0), true};
  }
  v /= n;
  return {std::move(v), false};
}
}  // namespace detail

// Pre-normalization text encoding: linear map applied to the mean token row.
template <typename Derived>
FeatureVec text_encoding_raw(const Eigen::MatrixXd& text_map,
                             const Eigen::MatrixBase<Derived>& prompt_rows) {
  if (prompt_rows.rows() < 1) throw std::invalid_argument("text encoding: empty prompt");
  if (text_map.cols() != prompt_rows.cols())
    throw std::invalid_argument("text encoding: map/prompt dimension mismatch");
  const FeatureVec mean = prompt_rows.colwise().mean().transpose();
  return text_map * mean;
}

template <typename Derived>
Encoded encode_text(const Eigen::MatrixXd& text_map,
                    const Eigen::MatrixBase<Derived>& prompt_rows) {
  return detail::normalize_or_fallback(text_encoding_raw(text_map, prompt_rows));
}

inline Encoded encode_image(const Eigen::MatrixXd& image_map, const FeatureVec& x) {
  if (image_map.cols() != x.size())
    throw std::invalid_argument("image encoding: map/input dimension mismatch");
  return detail::normalize_or_fallback(image_map * x);
}

// Rows of the vocabulary selected by a hard prompt, in token order.
inline Eigen::MatrixXd prompt_rows(const Vocabulary& vocab, const HardPrompt& prompt) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(prompt.tokens.size()), vocab.dim());
  for (std::size_t i = 0; i < prompt.tokens.size(); ++i) {
    const int t = prompt.tokens[i];
    if (t < 0 || t >= vocab.size()) throw std::invalid_argument("prompt_rows: token out of range");
    rows.row(static_cast<Eigen::Index>(i)) = vocab.embeddings.row(t);
  }
  return rows;
}

// Contrastive per-sample loss on unit-normalized encodings: pull the prompt
// toward images the victim assigns to the target class, push it away from
// the rest (hinged at zero).
inline double similarity_loss(const FeatureVec& image_feat, const FeatureVec& text_feat,
                              bool is_target) {
  if (image_feat.size() != text_feat.size())
    throw std::invalid_argument("similarity_loss: dimension mismatch");
  if (!image_feat.allFinite() || !text_feat.allFinite())
    throw std::invalid_argument("similarity_loss: non-finite input");
  const double cos = std::clamp(image_feat.dot(text_feat), -1.0, 1.0);
  return is_target ? 1.0 - cos : std::max(0.0, cos);
}

// A raw image vector paired with its loss branch (victim label == target?).
struct TripletSample {
  FeatureVec feature;
  bool is_target = true;
};

struct LossGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad;      // L x d, d loss / d soft rows
  bool degenerate = false;   // text encoding was zero before normalization
};

// Sum of similarity losses over the present triplet samples, with the exact
// gradient with respect to the soft prompt rows.  The loss depends on the
// rows only through their mean, so every row of the gradient is identical.
inline LossGrad triplet_loss_and_grad(const Eigen::MatrixXd& text_map,
                                      const Eigen::MatrixXd& image_map, const SoftPrompt& soft,
                                      const std::vector<TripletSample>& samples) {
  const Eigen::Index L = soft.rows.rows();
  const Eigen::Index d = soft.rows.cols();
  if (L < 1) throw std::invalid_argument("triplet loss: empty soft prompt");
  if (!soft.rows.allFinite()) throw std::invalid_argument("triplet loss: non-finite soft prompt");

  const FeatureVec u = text_encoding_raw(text_map, soft.rows);
  const double nu = u.norm();
  const Encoded text = detail::normalize_or_fallback(u);

  LossGrad out;
  out.grad = Eigen::MatrixXd::Zero(L, d);
  out.degenerate = text.degenerate;

  FeatureVec g_u = FeatureVec::Zero(u.size());
  for (const TripletSample& s : samples) {
    const Encoded img = encode_image(image_map, s.feature);
    const double cos = std::clamp(img.feature.dot(text.feature), -1.0, 1.0);
    double dloss_dcos;
    if (s.is_target) {
      out.loss += 1.0 - cos;
      dloss_dcos = -1.0;
    } else {
      out.loss += std::max(0.0, cos);
      dloss_dcos = cos > 0.0 ? 1.0 : 0.0;  // zero subgradient on the flat branch
    }
    if (!text.degenerate && dloss_dcos != 0.0)
      g_u += dloss_dcos * (img.feature - cos * text.feature) / nu;
  }

  if (!text.degenerate) {
    const FeatureVec g_mean = text_map.transpose() * g_u;
    out.grad.rowwise() = (g_mean / static_cast<double>(L)).transpose();
  }
  return out;
}

struct Projection {
  SoftPrompt projected;  // each row replaced by its nearest vocabulary row
  HardPrompt hard;
};

// Nearest-neighbor quantization under cosine similarity.  Ties (including
// the all-zero row, which scores 0 against every token) resolve to the
// lowest token index, which makes the projection idempotent.
inline Projection project_to_vocab(const SoftPrompt& soft, const Vocabulary& vocab) {
  if (soft.dim() != vocab.dim())
    throw std::invalid_argument("project_to_vocab: prompt/vocabulary dimension mismatch");
  const Eigen::MatrixXd unit = vocab.embeddings.rowwise().normalized();
  Projection out;
  out.projected.rows.resize(soft.rows.rows(), soft.rows.cols());
  out.hard.tokens.resize(static_cast<std::size_t>(soft.rows.rows()));
  for (Eigen::Index i = 0; i < soft.rows.rows(); ++i) {
    const double n = soft.rows.row(i).norm();
    Eigen::VectorXd scores;
    if (n == 0.0)
      scores = Eigen::VectorXd::Zero(unit.rows());
    else
      scores = unit * (soft.rows.row(i).transpose() / n);
    int best = 0;
    for (int t = 1; t < scores.size(); ++t)
      if (scores(t) > scores(best)) best = t;
    out.hard.tokens[static_cast<std::size_t>(i)] = best;
    out.projected.rows.row(i) = vocab.embeddings.row(best);
  }
  return out;
}

// Adaptive-moment estimation with bias correction and decoupled weight
// decay fixed at zero.
struct OptimizerState {
  Eigen::MatrixXd m;  // first-moment accumulator
  Eigen::MatrixXd v;  // second-moment accumulator
  long step = 0;
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerState make(int length, int dim, double learning_rate) {
    OptimizerState s;
    s.m = Eigen::MatrixXd::Zero(length, dim);
    s.v = Eigen::MatrixXd::Zero(length, dim);
    s.lr = learning_rate;
    return s;
  }
};

// One optimizer step in place.  A non-finite gradient skips the update and
// returns false, leaving state and prompt untouched.
inline bool adam_step(OptimizerState& state, SoftPrompt& soft, const Eigen::MatrixXd& grad) {
  if (grad.rows() != soft.rows.rows() || grad.cols() != soft.rows.cols())
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  if (!grad.allFinite()) return false;
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const Eigen::ArrayXXd m_hat = state.m.array() / bc1;
  const Eigen::ArrayXXd v_hat = state.v.array() / bc2;
  soft.rows.array() -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
  return true;
}

}  // namespace stealix
