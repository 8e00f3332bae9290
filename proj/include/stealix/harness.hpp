#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stealix/evolve.hpp"
#include "stealix/fitness.hpp"
#include "stealix/refine.hpp"
#include "stealix/surrogate.hpp"
#include "stealix/world.hpp"

namespace stealix {

struct RunConfig {
  WorldConfig world;
  RefineConfig refine;
  EvolveConfig evolve;
  TrainConfig train;
  int budget_per_class = 200;  // victim queries per class, B
  int batch = 10;              // queries per prompt evaluation, M
  bool soft_labels = false;    // additionally train on the victim's score vectors
  bool record_pairs = true;    // log (PC, L2 mean-feature distance) per evaluation
  bool record_recall = true;   // log k-NN coverage of the victim test set
  std::string out_dir = "out";
  std::uint64_t seed = 1;      // master seed; every substream derives from it

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

// A world rng_seed of zero means "derive from the run seed"; the echoed
// config in the report always carries the resolved value.
RunConfig resolve(RunConfig cfg);

struct FitnessTraceRow {
  int class_id = 0;
  int generation = 0;
  int triplet_index = 0;
  double pc = 0.0;

  bool operator==(const FitnessTraceRow&) const = default;
};

struct PairRow {
  int class_id = 0;
  int generation = 0;
  int triplet_index = 0;
  double pc = 0.0;
  double l2 = 0.0;

  bool operator==(const PairRow&) const = default;
};

struct PromptRecord {
  int class_id = 0;
  int generation = 0;
  int triplet_index = 0;
  std::vector<int> tokens;

  bool operator==(const PromptRecord&) const = default;
};

struct BankSizes {
  int positives = 0;
  int negatives = 0;

  bool operator==(const BankSizes&) const = default;
};

struct RunReport {
  std::string mode;  // "stealix" | "ablation"
  std::uint64_t seed = 0;
  RunConfig config;  // resolved echo
  std::vector<int> per_class_queries;
  std::vector<FitnessTraceRow> fitness_trace;
  std::vector<PairRow> pc_l2_pairs;
  std::vector<PromptRecord> prompts;
  std::vector<BankSizes> bank_sizes;
  double attacker_accuracy = 0.0;
  std::optional<double> attacker_accuracy_soft;
  std::optional<double> ablation_accuracy;  // filled by paired tooling, not single runs
  std::optional<double> recall_overall;
  std::vector<std::optional<double>> recall_per_class;
  double wall_clock_seconds = 0.0;

  bool operator==(const RunReport&) const = default;
};

// Instrumentation: called once per generation with the population that was
// evaluated, its fitness prefix, and the reproduced successor.
struct GenerationSnapshot {
  int class_id;
  int generation;
  const Population& evaluated;
  const FitnessScores& fitness;
  const Population& next;
};

struct RunHooks {
  std::function<void(const GenerationSnapshot&)> on_generation;
  std::vector<int> class_order;  // processing order override; empty = class-id order
};

// Full pipeline: per class, evolve triplet populations under the query
// budget (refine -> evaluate -> reproduce), then train the attacker on
// everything harvested (victim labels only) and score it on held-out
// victim test data against ground truth.  Report rows are merged in
// class-id order regardless of processing order.
RunReport run_stealix(const RunConfig& cfg, const RunHooks& hooks = {});

// Identical budget and batch structure, but every prompt is refined from
// the seed-only triplet and no reproduction happens.  Banks still collect
// victim labels for attacker training.
RunReport run_ablation_no_reproduction(const RunConfig& cfg, const RunHooks& hooks = {});

// Writes report.json plus flat tabular views (fitness_trace.csv,
// pc_l2_pairs.csv, summary.csv) under dir, creating it if needed.  Files
// are UTF-8, newline-terminated, with a fixed column order; empty sections
// produce a header-only file.
void emit_reports(const RunReport& report, const std::string& dir);

}  // namespace stealix
