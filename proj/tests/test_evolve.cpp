#include <doctest.h>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stealix/evolve.hpp"
#include "stealix/rng.hpp"
#include "support.hpp"

using namespace stealix;

namespace {

// Bank with `seeds` seed entries, `pos` positives, `neg` negatives, all of
// class-consistent labels; features are constants, identity comes from ids.
ImageBank make_bank(int seeds, int pos, int neg, ClassId target = 0, int dim = 4) {
  ImageBank bank(target, dim);
  for (int i = 0; i < seeds; ++i)
    bank.add_seed({FeatureVec::Constant(dim, static_cast<double>(i)), target});
  for (int i = 0; i < pos; ++i)
    bank.insert({FeatureVec::Constant(dim, 100.0 + i), target});
  for (int i = 0; i < neg; ++i)
    bank.insert({FeatureVec::Constant(dim, 200.0 + i), target + 1});
  return bank;
}

// Population whose triplet i is identifiable by seed slot == i.
Population tagged_population(int n) {
  Population pop;
  for (int i = 0; i < n; ++i) pop.triplets.push_back({i, std::nullopt, std::nullopt});
  return pop;
}

}  // namespace

TEST_CASE("evolve config validation") {
  EvolveConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  { EvolveConfig c; c.population = 1; CHECK_THROWS_AS(c.validate(), std::invalid_argument); }
  { EvolveConfig c; c.parents = 0; CHECK_THROWS_AS(c.validate(), std::invalid_argument); }
  { EvolveConfig c; c.parents = 11; CHECK_THROWS_AS(c.validate(), std::invalid_argument); }
  { EvolveConfig c; c.tournament_size = 0; CHECK_THROWS_AS(c.validate(), std::invalid_argument); }
  { EvolveConfig c; c.tournament_size = 11; CHECK_THROWS_AS(c.validate(), std::invalid_argument); }
  { EvolveConfig c; c.mutation_prob = -0.1; CHECK_THROWS_AS(c.validate(), std::invalid_argument); }
  { EvolveConfig c; c.mutation_prob = 1.1; CHECK_THROWS_AS(c.validate(), std::invalid_argument); }
}

TEST_CASE("elite selection takes the first maximum") {
  CHECK(select_elite_index({0.2, 0.9, 0.9}) == 1);
  CHECK(select_elite_index({0.5}) == 0);
  CHECK(select_elite_index({0.0, 0.0, 0.0}) == 0);
  CHECK_THROWS_AS(select_elite_index({}), std::invalid_argument);

  const Population pop = tagged_population(3);
  CHECK(select_elite(pop, {0.1, 0.8, 0.3}).seed == 1);
  CHECK_THROWS_AS(select_elite(pop, {0.1, 0.2, 0.3, 0.4}), std::invalid_argument);
}

TEST_CASE("elite selection matches a linear-scan oracle") {
  Rng rng(201);
  for (int trial = 0; trial < 100; ++trial) {
    FitnessScores fit;
    const int n = 1 + rng.uniform_int(10);
    for (int i = 0; i < n; ++i) fit.push_back(rng.uniform_int(4) / 4.0);  // force ties
    CHECK(select_elite_index(fit) == testsupport::brute_argmax(fit));
  }
}

TEST_CASE("single-draw tournaments sample parents uniformly") {
  const Population pop = tagged_population(10);
  const FitnessScores fit(10, 0.5);
  EvolveConfig cfg;
  cfg.parents = 10;
  cfg.tournament_size = 1;
  Rng rng(202);
  std::vector<int> counts(10, 0);
  std::vector<std::vector<int>> draws;
  for (int call = 0; call < 1000; ++call) {
    tournament_select(pop, fit, cfg, rng, &draws);
    for (const auto& d : draws) {
      REQUIRE(d.size() == 1);
      ++counts[static_cast<std::size_t>(d[0])];
    }
  }
  double chi2 = 0.0;
  for (const int c : counts) {
    const double dev = c - 1000.0;
    chi2 += dev * dev / 1000.0;
  }
  CHECK(chi2 < 21.666);  // chi-square critical value, 9 dof, p = 0.01
}

TEST_CASE("each tournament winner dominates its own draw") {
  Rng fit_rng(203);
  const Population pop = tagged_population(8);
  FitnessScores fit;
  for (int i = 0; i < 8; ++i) fit.push_back(fit_rng.uniform_int(5) / 5.0);
  EvolveConfig cfg;
  cfg.population = 8;
  cfg.parents = 8;
  cfg.tournament_size = 5;
  Rng rng(204);
  for (int call = 0; call < 50; ++call) {
    std::vector<std::vector<int>> draws;
    const std::vector<Triplet> parents = tournament_select(pop, fit, cfg, rng, &draws);
    REQUIRE(parents.size() == draws.size());
    for (std::size_t t = 0; t < parents.size(); ++t) {
      const int winner = *parents[t].seed;
      int expected = -1;
      for (const int idx : draws[t]) {
        CHECK(fit[static_cast<std::size_t>(winner)] >= fit[static_cast<std::size_t>(idx)]);
        if (expected < 0 || fit[static_cast<std::size_t>(idx)] >
                                fit[static_cast<std::size_t>(expected)] ||
            (fit[static_cast<std::size_t>(idx)] == fit[static_cast<std::size_t>(expected)] &&
             idx < expected))
          expected = idx;
      }
      CHECK(winner == expected);  // max of the draw, ties to the lowest index
    }
  }
}

TEST_CASE("tournaments only touch the evaluated prefix") {
  const Population pop = tagged_population(10);
  const FitnessScores fit = {0.1, 0.2, 0.3};  // only three triplets evaluated
  EvolveConfig cfg;
  cfg.tournament_size = 3;
  cfg.parents = 5;
  Rng rng(205);
  std::vector<std::vector<int>> draws;
  const auto parents = tournament_select(pop, fit, cfg, rng, &draws);
  for (const auto& d : draws)
    for (const int idx : d) CHECK(idx < 3);
  for (const auto& p : parents) CHECK(*p.seed < 3);

  Rng rng2(206);
  CHECK_THROWS_AS(tournament_select(pop, {}, cfg, rng2), std::invalid_argument);
}

TEST_CASE("a frozen tournament replays its recorded trace") {
  const Population pop = tagged_population(4);
  const FitnessScores fit = {0.25, 0.5, 0.75, 0.5};
  EvolveConfig cfg;
  cfg.population = 4;
  cfg.parents = 2;
  cfg.tournament_size = 2;
  Rng rng(2024);
  std::vector<std::vector<int>> draws;
  const std::vector<Triplet> parents = tournament_select(pop, fit, cfg, rng, &draws);
  // cross-checked against an independent replay of the generator
  CHECK(draws == std::vector<std::vector<int>>{{2, 0}, {1, 0}});
  CHECK(*parents[0].seed == 2);
  CHECK(*parents[1].seed == 1);
}

TEST_CASE("crossover splits between the ordered slots") {
  const Triplet a{1, 2, 3};
  const Triplet b{4, 5, 6};

  int seed_r1 = -1, seed_r2 = -1;
  for (int s = 0; s < 32 && (seed_r1 < 0 || seed_r2 < 0); ++s) {
    Rng probe(static_cast<std::uint64_t>(s));
    const int r = 1 + probe.uniform_int(2);
    if (r == 1 && seed_r1 < 0) seed_r1 = s;
    if (r == 2 && seed_r2 < 0) seed_r2 = s;
  }
  REQUIRE(seed_r1 >= 0);
  REQUIRE(seed_r2 >= 0);

  Rng r1(static_cast<std::uint64_t>(seed_r1));
  const Triplet c1 = crossover(a, b, r1);  // split before the positive slot
  CHECK(c1.seed == a.seed);
  CHECK(c1.positive == b.positive);
  CHECK(c1.negative == b.negative);

  Rng r2(static_cast<std::uint64_t>(seed_r2));
  const Triplet c2 = crossover(a, b, r2);  // split before the negative slot
  CHECK(c2.seed == a.seed);
  CHECK(c2.positive == a.positive);
  CHECK(c2.negative == b.negative);
}

TEST_CASE("crossover of identical parents is the parent") {
  const Triplet a{7, 8, std::nullopt};
  for (int s = 0; s < 10; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    CHECK(crossover(a, a, rng) == a);
  }
}

TEST_CASE("mutation probability zero is the identity") {
  const ImageBank bank = make_bank(1, 3, 3);
  const Triplet t{0, 1, 4};
  Rng rng(207);
  for (int i = 0; i < 20; ++i) CHECK(mutate(t, bank, 0.0, rng) == t);
}

TEST_CASE("mutation probability one rerolls every slot from the bank pools") {
  const ImageBank bank = make_bank(1, 3, 3);
  const Triplet t{0, 1, 4};
  Rng rng(208);
  const auto member = [](const std::vector<SampleId>& pool, const std::optional<SampleId>& v) {
    return v.has_value() && std::find(pool.begin(), pool.end(), *v) != pool.end();
  };
  for (int i = 0; i < 20; ++i) {
    const Triplet m = mutate(t, bank, 1.0, rng);
    CHECK(member(bank.seed_ids(), m.seed));
    CHECK(member(bank.positive_ids(), m.positive));
    CHECK(member(bank.negative_ids(), m.negative));
  }
}

TEST_CASE("mutation into an empty pool empties the slot") {
  const ImageBank bank = make_bank(1, 2, 0);  // no negatives yet
  const Triplet t{0, 1, 2};
  Rng rng(209);
  const Triplet m = mutate(t, bank, 1.0, rng);
  CHECK(m.seed == 0);
  CHECK_FALSE(m.negative.has_value());
  Rng rng2(210);
  CHECK_THROWS_AS(mutate(t, bank, 1.5, rng2), std::invalid_argument);
}

TEST_CASE("mutated slots always satisfy the bank's class routing") {
  const ImageBank bank = make_bank(1, 5, 5);
  Rng rng(211);
  Triplet t{0, 1, 6};
  for (int i = 0; i < 100; ++i) {
    t = mutate(t, bank, 0.6, rng);
    if (t.positive.has_value()) CHECK(bank.sample(*t.positive).predicted == bank.target());
    if (t.negative.has_value()) CHECK(bank.sample(*t.negative).predicted != bank.target());
  }
}

TEST_CASE("reproduction keeps the population size and carries the elite at slot zero") {
  const ImageBank bank = make_bank(1, 4, 4);
  Population pop = tagged_population(10);
  pop.generation = 3;
  FitnessScores fit = {0.1, 0.2, 0.9, 0.4, 0.9, 0.0, 0.3, 0.2, 0.1, 0.5};
  EvolveConfig cfg;
  Rng rng(212);
  const Population next = reproduce(pop, fit, bank, cfg, rng);
  CHECK(next.triplets.size() == 10);
  CHECK(next.generation == 4);
  CHECK(next.triplets[0] == pop.triplets[2]);  // first maximum wins the tie
}

TEST_CASE("a two-member population reproduces as elite plus one child") {
  const ImageBank bank = make_bank(1, 2, 2);
  const Population pop = tagged_population(2);
  EvolveConfig cfg;
  cfg.population = 2;
  cfg.parents = 1;
  cfg.tournament_size = 1;
  Rng rng(213);
  const Population next = reproduce(pop, {0.2, 0.8}, bank, cfg, rng);
  CHECK(next.triplets.size() == 2);
  CHECK(next.triplets[0] == pop.triplets[1]);
}

TEST_CASE("zero mutation with a single parent collapses the children onto it") {
  const ImageBank bank = make_bank(1, 2, 2);
  const Population pop = tagged_population(6);
  EvolveConfig cfg;
  cfg.population = 6;
  cfg.parents = 1;  // every pair is (p0, p0), crossover is then the identity
  cfg.tournament_size = 3;
  cfg.mutation_prob = 0.0;
  Rng rng(214);
  FitnessScores fit = {0.9, 0.1, 0.1, 0.1, 0.1, 0.1};
  const Population next = reproduce(pop, fit, bank, cfg, rng);
  for (std::size_t i = 1; i < next.triplets.size(); ++i)
    CHECK(next.triplets[i] == pop.triplets[0]);
}

TEST_CASE("reproduction only uses the evaluated prefix") {
  const ImageBank bank = make_bank(1, 3, 3);
  Population pop = tagged_population(10);
  FitnessScores fit = {0.5, 0.9};  // budget ran out after two evaluations
  EvolveConfig cfg;
  cfg.mutation_prob = 0.0;
  Rng rng(215);
  const Population next = reproduce(pop, fit, bank, cfg, rng);
  CHECK(next.triplets[0] == pop.triplets[1]);
  for (const Triplet& t : next.triplets) CHECK(*t.seed < 2);
}

TEST_CASE("a frozen reproduction run hashes to its recorded value") {
  const ImageBank bank = make_bank(1, 6, 4);
  const Population pop = tagged_population(10);
  const FitnessScores fit = {0.3, 0.7, 0.7, 0.1, 0.0, 0.9, 0.2, 0.4, 0.9, 0.6};
  EvolveConfig cfg;
  Rng rng(216);
  const Population next = reproduce(pop, fit, bank, cfg, rng);
  // recorded once from the reviewed implementation, then frozen
  CHECK(testsupport::hash_population(next) == 16983217991122304211ull);

  const Population wrong_size = tagged_population(7);
  Rng rng2(217);
  CHECK_THROWS_AS(reproduce(wrong_size, fit, bank, cfg, rng2), std::invalid_argument);
}
