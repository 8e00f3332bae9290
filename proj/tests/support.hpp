#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stealix/embed.hpp"
#include "stealix/rng.hpp"
#include "stealix/surrogate.hpp"
#include "stealix/types.hpp"

// Brute-force oracles and finite-difference probes shared by the unit and
// acceptance binaries.  Everything here is an independent reimplementation:
// no call forwards to the library code path it is meant to check.

namespace testsupport {

// Nearest vocabulary row by cosine via a plain linear scan; ties (and the
// all-zero row, which scores 0 everywhere) keep the lowest token index.
inline std::vector<int> brute_nearest_tokens(const stealix::SoftPrompt& soft,
                                             const stealix::Vocabulary& vocab) {
  std::vector<int> tokens;
  for (Eigen::Index i = 0; i < soft.rows.rows(); ++i) {
    const Eigen::VectorXd row = soft.rows.row(i).transpose();
    const double rn = row.norm();
    int best = 0;
    double best_score = rn == 0.0 ? 0.0 : row.dot(vocab.embeddings.row(0).transpose()) /
                                              (rn * vocab.embeddings.row(0).norm());
    for (int t = 1; t < vocab.size(); ++t) {
      const Eigen::VectorXd v = vocab.embeddings.row(t).transpose();
      const double score = rn == 0.0 ? 0.0 : row.dot(v) / (rn * v.norm());
      if (score > best_score) {
        best_score = score;
        best = t;
      }
    }
    tokens.push_back(best);
  }
  return tokens;
}

// O(n^2) recall: per generated point, full sort of the distances to every
// other generated point gives the k-th neighbor radius.
inline double brute_knn_recall(const std::vector<stealix::FeatureVec>& real_set,
                               const std::vector<stealix::FeatureVec>& gen, int k) {
  const int g = static_cast<int>(gen.size());
  std::vector<double> radius(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    std::vector<double> d;
    for (int j = 0; j < g; ++j)
      if (j != i)
        d.push_back((gen[static_cast<std::size_t>(i)] - gen[static_cast<std::size_t>(j)]).norm());
    std::sort(d.begin(), d.end());
    radius[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(k - 1)];
  }
  int hit = 0;
  for (const auto& r : real_set) {
    bool covered = false;
    for (int i = 0; i < g && !covered; ++i)
      covered = (r - gen[static_cast<std::size_t>(i)]).norm() <=
                radius[static_cast<std::size_t>(i)];
    if (covered) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(real_set.size());
}

// Average rank by exhaustive counting: the tie group at value v occupies
// 1-based positions (#smaller + 1) .. (#smaller + #equal).
inline std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int less = 0;
    int equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    r[i] = static_cast<double>(less) + 0.5 * static_cast<double>(equal + 1);
  }
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double va = 0.0, vb = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
    cov += (a[i] - ma) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

inline double brute_spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
  return pearson(brute_ranks(xs), brute_ranks(ys));
}

inline int brute_argmax(const std::vector<double>& fitness) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(fitness.size()); ++i)
    if (fitness[static_cast<std::size_t>(i)] > fitness[static_cast<std::size_t>(best)]) best = i;
  return best;
}

// One random smooth instance of the contrastive loss: no sample sits near
// the hinge kink or the cosine clamp, so central differences are valid.
struct TripletInstance {
  Eigen::MatrixXd text_map;
  Eigen::MatrixXd image_map;
  stealix::SoftPrompt soft;
  std::vector<stealix::TripletSample> samples;
};

inline TripletInstance make_triplet_instance(stealix::Rng& rng) {
  for (;;) {
    TripletInstance inst;
    const int d = 4 + rng.uniform_int(29);  // 4..32
    const int L = 1 + rng.uniform_int(16);  // 1..16
    inst.text_map = rng.normal_matrix(d, d);
    inst.image_map = rng.normal_matrix(d, d);
    inst.soft.rows = rng.normal_matrix(L, d);
    const int count = 1 + rng.uniform_int(3);
    for (int i = 0; i < count; ++i)
      inst.samples.push_back({rng.normal_vector(d), rng.uniform01() < 0.5});

    const stealix::Encoded text = stealix::encode_text(inst.text_map, inst.soft.rows);
    if (text.degenerate) continue;
    bool smooth = true;
    for (const auto& s : inst.samples) {
      const stealix::Encoded img = stealix::encode_image(inst.image_map, s.feature);
      const double cos = img.feature.dot(text.feature);
      if (std::fabs(cos) < 1e-3 || std::fabs(cos) > 0.999) smooth = false;
    }
    if (smooth) return inst;
  }
}

// Max deviation between the analytic gradient and central finite
// differences over every coordinate, scaled by max(1, largest |fd|).
inline double triplet_grad_fd_rel_err(const TripletInstance& inst, double h = 1e-5) {
  const stealix::LossGrad lg =
      stealix::triplet_loss_and_grad(inst.text_map, inst.image_map, inst.soft, inst.samples);
  stealix::SoftPrompt probe = inst.soft;
  double max_abs_fd = 0.0;
  double max_dev = 0.0;
  for (Eigen::Index r = 0; r < probe.rows.rows(); ++r)
    for (Eigen::Index c = 0; c < probe.rows.cols(); ++c) {
      const double keep = probe.rows(r, c);
      probe.rows(r, c) = keep + h;
      const double up =
          stealix::triplet_loss_and_grad(inst.text_map, inst.image_map, probe, inst.samples).loss;
      probe.rows(r, c) = keep - h;
      const double dn =
          stealix::triplet_loss_and_grad(inst.text_map, inst.image_map, probe, inst.samples).loss;
      probe.rows(r, c) = keep;
      const double fd = (up - dn) / (2.0 * h);
      max_abs_fd = std::max(max_abs_fd, std::fabs(fd));
      max_dev = std::max(max_dev, std::fabs(fd - lg.grad(r, c)));
    }
  return max_dev / std::max(1.0, max_abs_fd);
}

struct CeInstance {
  stealix::AttackerModel model;
  std::vector<stealix::TrainingExample> batch;
  stealix::LabelMode mode = stealix::LabelMode::hard;
};

inline CeInstance make_ce_instance(stealix::Rng& rng) {
  CeInstance inst;
  const int K = 2 + rng.uniform_int(5);  // 2..6
  const int d = 2 + rng.uniform_int(15); // 2..16
  inst.model.weights = rng.normal_matrix(K, d);
  inst.model.bias = rng.normal_vector(K);
  inst.mode = rng.uniform01() < 0.5 ? stealix::LabelMode::hard : stealix::LabelMode::soft;
  const int count = 1 + rng.uniform_int(8);
  for (int i = 0; i < count; ++i) {
    stealix::TrainingExample ex;
    ex.feature = rng.normal_vector(d);
    ex.label = rng.uniform_int(K);
    Eigen::VectorXd w(K);
    for (int k = 0; k < K; ++k) w(k) = rng.uniform01() + 1e-3;
    ex.soft = w / w.sum();
    inst.batch.push_back(std::move(ex));
  }
  return inst;
}

// The weight-decay term enters the gradient only, so the probe runs at
// decay zero where gradient and loss are consistent.
inline double ce_grad_fd_rel_err(const CeInstance& inst, double h = 1e-5) {
  const stealix::CeGrad g =
      stealix::cross_entropy_loss_grad(inst.model, inst.batch, inst.mode, 0.0);
  stealix::AttackerModel probe = inst.model;
  double max_abs_fd = 0.0;
  double max_dev = 0.0;
  const auto bump = [&](double& slot, double analytic) {
    const double keep = slot;
    slot = keep + h;
    const double up = stealix::cross_entropy_loss_grad(probe, inst.batch, inst.mode, 0.0).loss;
    slot = keep - h;
    const double dn = stealix::cross_entropy_loss_grad(probe, inst.batch, inst.mode, 0.0).loss;
    slot = keep;
    const double fd = (up - dn) / (2.0 * h);
    max_abs_fd = std::max(max_abs_fd, std::fabs(fd));
    max_dev = std::max(max_dev, std::fabs(fd - analytic));
  };
  for (Eigen::Index r = 0; r < probe.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < probe.weights.cols(); ++c) bump(probe.weights(r, c), g.dw(r, c));
  for (Eigen::Index k = 0; k < probe.bias.size(); ++k) bump(probe.bias(k), g.db(k));
  return max_dev / std::max(1.0, max_abs_fd);
}

// FNV-1a over the id pattern of a population, for golden-trace freezing.
inline std::uint64_t hash_population(const stealix::Population& pop) {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(pop.generation));
  for (const auto& t : pop.triplets)
    for (const auto& slot : {t.seed, t.positive, t.negative})
      mix(slot.has_value() ? static_cast<std::uint64_t>(*slot) + 1 : 0);
  return h;
}

}  // namespace testsupport
