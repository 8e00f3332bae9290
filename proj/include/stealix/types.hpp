#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <vector>

namespace stealix {

using ClassId = int;
using FeatureVec = Eigen::VectorXd;
using SampleId = int;

// An image together with the label the victim assigned to it.  Images in
// this framework are feature vectors; no pixel representation exists.
struct LabeledSample {
  FeatureVec feature;
  ClassId predicted = 0;
};

// Genome of the genetic search: up to one sample id per role.  Ids refer
// into the per-class ImageBank, which keeps genomes cheap to copy.
struct Triplet {
  std::optional<SampleId> seed;
  std::optional<SampleId> positive;
  std::optional<SampleId> negative;

  bool operator==(const Triplet&) const = default;
};

struct Population {
  std::vector<Triplet> triplets;
  int generation = 0;
};

// Fitness of the evaluated prefix of a population, aligned by index.
using FitnessScores = std::vector<double>;

// Per-class store of all victim-labeled samples harvested so far.  Samples
// are appended by value and never removed, so a SampleId (index into
// store) stays valid for the lifetime of the bank.
class ImageBank {
 public:
  ImageBank(ClassId target, int dim) : target_(target), dim_(dim) {
    if (dim <= 0) throw std::invalid_argument("ImageBank: dim must be positive");
  }

  ClassId target() const { return target_; }
  int dim() const { return dim_; }

  // Seeds are victim-correct examples of the target class supplied by the
  // operator, not harvested with the query budget.
  SampleId add_seed(LabeledSample sample) {
    check(sample);
    if (sample.predicted != target_)
      throw std::invalid_argument("ImageBank: seed must be classified as the target class");
    const SampleId id = static_cast<SampleId>(store_.size());
    store_.push_back(std::move(sample));
    seed_ids_.push_back(id);
    return id;
  }

  // Routes by the victim's label: target class -> positives, otherwise
  // negatives.
  SampleId insert(LabeledSample sample) {
    check(sample);
    const SampleId id = static_cast<SampleId>(store_.size());
    (sample.predicted == target_ ? positive_ids_ : negative_ids_).push_back(id);
    store_.push_back(std::move(sample));
    return id;
  }

  const LabeledSample& sample(SampleId id) const {
    if (id < 0 || id >= static_cast<SampleId>(store_.size()))
      throw std::invalid_argument("ImageBank: unknown sample id");
    return store_[static_cast<std::size_t>(id)];
  }

  const std::vector<SampleId>& seed_ids() const { return seed_ids_; }
  const std::vector<SampleId>& positive_ids() const { return positive_ids_; }
  const std::vector<SampleId>& negative_ids() const { return negative_ids_; }
  std::size_t size() const { return store_.size(); }

 private:
  void check(const LabeledSample& sample) const {
    if (sample.feature.size() != dim_)
      throw std::invalid_argument("ImageBank: sample dimension does not match bank dimension");
    if (!sample.feature.allFinite())
      throw std::invalid_argument("ImageBank: sample feature must be finite");
  }

  ClassId target_;
  int dim_;
  std::vector<LabeledSample> store_;
  std::vector<SampleId> seed_ids_;
  std::vector<SampleId> positive_ids_;
  std::vector<SampleId> negative_ids_;
};

// Hard cap on victim queries for one class.  charge() grants as much of the
// request as the remaining budget allows, so the final batch shrinks and
// consumption terminates at exactly the cap.
class BudgetLedger {
 public:
  explicit BudgetLedger(int cap) : cap_(cap) {
    if (cap < 0) throw std::invalid_argument("BudgetLedger: cap must be non-negative");
  }

  int charge(int requested) {
    if (requested <= 0) throw std::invalid_argument("BudgetLedger: requested must be positive");
    const int granted = std::min(requested, cap_ - consumed_);
    consumed_ += granted;
    return granted;
  }

  int cap() const { return cap_; }
  int consumed() const { return consumed_; }
  int remaining() const { return cap_ - consumed_; }
  bool exhausted() const { return consumed_ >= cap_; }

 private:
  int cap_;
  int consumed_ = 0;
};

}  // namespace stealix
