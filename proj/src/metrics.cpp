#include "stealix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stealix {

double l2_mean_feature_distance(const std::vector<FeatureVec>& generated,
                                const std::vector<FeatureVec>& reference) {
  if (generated.empty() || reference.empty())
    throw std::invalid_argument("l2_mean_feature_distance: empty set");
  FeatureVec mg = FeatureVec::Zero(generated.front().size());
  for (const FeatureVec& v : generated) mg += v;
  mg /= static_cast<double>(generated.size());
  FeatureVec mr = FeatureVec::Zero(reference.front().size());
  for (const FeatureVec& v : reference) mr += v;
  mr /= static_cast<double>(reference.size());
  if (mg.size() != mr.size())
    throw std::invalid_argument("l2_mean_feature_distance: dimension mismatch");
  return (mg - mr).norm();
}

namespace {

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (v[a] != v[b]) return v[a] < v[b];
    return a < b;
  });
  std::vector<double> ranks(v.size());
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (int k = i; k <= j; ++k) ranks[static_cast<std::size_t>(idx[k])] = shared;
    i = j + 1;
  }
  return ranks;
}

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("regularized_incomplete_beta: parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

CorrelationResult spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("spearman: need at least 3 pairs");

  CorrelationResult out;
  out.n = static_cast<int>(xs.size());

  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  const double n = static_cast<double>(out.n);
  const double mean = (n + 1.0) / 2.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return out;  // constant ranks: undefined

  out.defined = true;
  out.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  const double nu = n - 2.0;
  if (std::fabs(out.rho) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t2 = out.rho * out.rho * nu / (1.0 - out.rho * out.rho);
    // P(|T| > t) for T ~ Student-t(nu).
    out.p_value = regularized_incomplete_beta(nu / 2.0, 0.5, nu / (nu + t2));
  }
  return out;
}

double knn_recall(const std::vector<FeatureVec>& real_set,
                  const std::vector<FeatureVec>& generated, int k) {
  if (k < 1) throw std::invalid_argument("knn_recall: k must be >= 1");
  if (real_set.empty()) throw std::invalid_argument("knn_recall: empty real set");
  if (static_cast<int>(generated.size()) <= k)
    throw std::invalid_argument("knn_recall: need more than k generated points");

  const int g = static_cast<int>(generated.size());
  std::vector<double> radius(static_cast<std::size_t>(g));
  std::vector<double> dists;
  for (int i = 0; i < g; ++i) {
    dists.clear();
    for (int j = 0; j < g; ++j)
      if (j != i)
        dists.push_back((generated[static_cast<std::size_t>(i)] -
                         generated[static_cast<std::size_t>(j)])
                            .norm());
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    radius[static_cast<std::size_t>(i)] = dists[static_cast<std::size_t>(k - 1)];
  }

  int covered = 0;
  for (const FeatureVec& r : real_set) {
    for (int i = 0; i < g; ++i) {
      if ((r - generated[static_cast<std::size_t>(i)]).norm() <=
          radius[static_cast<std::size_t>(i)]) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(real_set.size());
}

}  // namespace stealix
