#pragma once

#include <vector>

#include "stealix/rng.hpp"
#include "stealix/types.hpp"

// Genetic search over triplets.  All tie-breaks resolve to the lowest
// population index so that reproduction is a pure function of
// (population, fitness, bank, rng state).

namespace stealix {

struct EvolveConfig {
  int population = 10;        // N
  int parents = 5;            // N_p tournament winners per generation
  int tournament_size = 5;    // k draws per tournament, with replacement
  double mutation_prob = 0.6; // p_m per slot

  void validate() const;
  bool operator==(const EvolveConfig&) const = default;
};

// Index of the best evaluated triplet; ties resolve to the lowest index.
int select_elite_index(const FitnessScores& fitness);

const Triplet& select_elite(const Population& pop, const FitnessScores& fitness);

// N_p tournaments of k uniform draws (with replacement) over the evaluated
// prefix.  When `draws` is given, the drawn indices of each tournament are
// recorded for instrumentation.
std::vector<Triplet> tournament_select(const Population& pop, const FitnessScores& fitness,
                                       const EvolveConfig& cfg, Rng& rng,
                                       std::vector<std::vector<int>>* draws = nullptr);

// Single-point slot crossover with split r drawn uniformly from {1, 2}:
// the child takes a's slots before r and b's slots from r on, so the seed
// always comes from a and the negative always from b.
Triplet crossover(const Triplet& a, const Triplet& b, Rng& rng);

// Per-slot reroll: with probability p_m the slot is replaced by a uniform
// draw from the bank set of its role; an empty set empties the slot.
Triplet mutate(const Triplet& t, const ImageBank& bank, double mutation_prob, Rng& rng);

// One generation: elite carried unchanged into slot 0, then N-1 children
// from cyclically paired tournament parents, each crossover followed by
// mutation.  Only the evaluated prefix of the population participates.
Population reproduce(const Population& pop, const FitnessScores& fitness, const ImageBank& bank,
                     const EvolveConfig& cfg, Rng& rng);

}  // namespace stealix
