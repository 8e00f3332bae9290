#pragma once

#include <Eigen/Core>
#include <vector>

#include "stealix/types.hpp"

namespace stealix {

// L2 distance between the mean feature vectors of two non-empty sets.
double l2_mean_feature_distance(const std::vector<FeatureVec>& generated,
                                const std::vector<FeatureVec>& reference);

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
  bool defined = false;  // false when either input has zero rank variance
};

// Rank correlation with average ranks for ties.  The two-sided p-value
// comes from the exact Student-t tail of t = rho * sqrt((n-2)/(1-rho^2)).
CorrelationResult spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Regularized incomplete beta I_x(a, b), exposed for the p-value tail.
double regularized_incomplete_beta(double a, double b, double x);

// Manifold coverage: the fraction of real points that fall inside at least
// one generated point's k-NN ball, where each ball's radius is the
// distance to the k-th nearest other generated point.  Requires
// |generated| > k.
double knn_recall(const std::vector<FeatureVec>& real_set,
                  const std::vector<FeatureVec>& generated, int k);

}  // namespace stealix
