#include "stealix/evolve.hpp"

#include <stdexcept>

namespace stealix {

void EvolveConfig::validate() const {
  if (population < 2) throw std::invalid_argument("EvolveConfig: population must be >= 2");
  if (parents < 1 || parents > population)
    throw std::invalid_argument("EvolveConfig: parents must be in [1, population]");
  if (tournament_size < 1 || tournament_size > population)
    throw std::invalid_argument("EvolveConfig: tournament_size must be in [1, population]");
  if (mutation_prob < 0.0 || mutation_prob > 1.0)
    throw std::invalid_argument("EvolveConfig: mutation_prob must be in [0, 1]");
}

int select_elite_index(const FitnessScores& fitness) {
  if (fitness.empty()) throw std::invalid_argument("select_elite: no evaluated triplets");
  int best = 0;
  for (int i = 1; i < static_cast<int>(fitness.size()); ++i)
    if (fitness[i] > fitness[best]) best = i;
  return best;
}

const Triplet& select_elite(const Population& pop, const FitnessScores& fitness) {
  if (fitness.size() > pop.triplets.size())
    throw std::invalid_argument("select_elite: fitness longer than population");
  return pop.triplets[static_cast<std::size_t>(select_elite_index(fitness))];
}

std::vector<Triplet> tournament_select(const Population& pop, const FitnessScores& fitness,
                                       const EvolveConfig& cfg, Rng& rng,
                                       std::vector<std::vector<int>>* draws) {
  cfg.validate();
  if (fitness.empty()) throw std::invalid_argument("tournament_select: no evaluated triplets");
  if (fitness.size() > pop.triplets.size())
    throw std::invalid_argument("tournament_select: fitness longer than population");
  const int evaluated = static_cast<int>(fitness.size());

  std::vector<Triplet> parents;
  parents.reserve(static_cast<std::size_t>(cfg.parents));
  if (draws) draws->clear();
  for (int p = 0; p < cfg.parents; ++p) {
    int best = -1;
    std::vector<int> drawn;
    for (int j = 0; j < cfg.tournament_size; ++j) {
      const int idx = rng.uniform_int(evaluated);
      if (draws) drawn.push_back(idx);
      if (best < 0 || fitness[idx] > fitness[best] || (fitness[idx] == fitness[best] && idx < best))
        best = idx;
    }
    if (draws) draws->push_back(std::move(drawn));
    parents.push_back(pop.triplets[static_cast<std::size_t>(best)]);
  }
  return parents;
}

Triplet crossover(const Triplet& a, const Triplet& b, Rng& rng) {
  const int r = 1 + rng.uniform_int(2);
  Triplet child;
  child.seed = a.seed;
  child.positive = r > 1 ? a.positive : b.positive;
  child.negative = b.negative;
  return child;
}

Triplet mutate(const Triplet& t, const ImageBank& bank, double mutation_prob, Rng& rng) {
  if (mutation_prob < 0.0 || mutation_prob > 1.0)
    throw std::invalid_argument("mutate: mutation_prob must be in [0, 1]");
  Triplet out = t;
  const auto reroll = [&](std::optional<SampleId>& slot, const std::vector<SampleId>& pool) {
    if (rng.uniform01() >= mutation_prob) return;
    if (pool.empty())
      slot.reset();
    else
      slot = pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))];
  };
  reroll(out.seed, bank.seed_ids());
  reroll(out.positive, bank.positive_ids());
  reroll(out.negative, bank.negative_ids());
  return out;
}

Population reproduce(const Population& pop, const FitnessScores& fitness, const ImageBank& bank,
                     const EvolveConfig& cfg, Rng& rng) {
  cfg.validate();
  if (static_cast<int>(pop.triplets.size()) != cfg.population)
    throw std::invalid_argument("reproduce: population size does not match config");

  Population next;
  next.generation = pop.generation + 1;
  next.triplets.reserve(static_cast<std::size_t>(cfg.population));
  next.triplets.push_back(select_elite(pop, fitness));

  const std::vector<Triplet> parents = tournament_select(pop, fitness, cfg, rng);
  for (int i = 0; static_cast<int>(next.triplets.size()) < cfg.population; ++i) {
    const Triplet& a = parents[static_cast<std::size_t>(i % cfg.parents)];
    const Triplet& b = parents[static_cast<std::size_t>((i + 1) % cfg.parents)];
    next.triplets.push_back(mutate(crossover(a, b, rng), bank, cfg.mutation_prob, rng));
  }
  return next;
}

}  // namespace stealix
