#include "stealix/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <stdexcept>

#include "stealix/config_io.hpp"
#include "stealix/metrics.hpp"

namespace stealix {

namespace {
constexpr int kRecallNeighbors = 3;
}

void RunConfig::validate() const {
  world.validate();
  refine.validate();
  evolve.validate();
  train.validate();
  if (batch < 1) throw std::invalid_argument("RunConfig: batch must be >= 1");
  if (budget_per_class < batch)
    throw std::invalid_argument("RunConfig: budget_per_class must be >= batch");
  if (refine.prompt_length != world.prompt_length)
    throw std::invalid_argument("RunConfig: refine and world prompt lengths differ");
}

RunConfig resolve(RunConfig cfg) {
  if (cfg.world.rng_seed == 0) cfg.world.rng_seed = substream_seed(cfg.seed, "world");
  return cfg;
}

namespace {

struct ClassOutcome {
  int queries = 0;
  std::vector<FitnessTraceRow> trace;
  std::vector<PairRow> pairs;
  std::vector<PromptRecord> prompts;
  BankSizes bank_sizes;
  std::vector<FeatureVec> positives;       // harvested victim-correct features
  std::vector<TrainingExample> harvested;  // seeds + positives + negatives
};

ClassOutcome attack_class(const World& world, const RunConfig& cfg, ClassId target,
                          bool evolve_enabled, const RunHooks& hooks) {
  const int N = cfg.evolve.population;
  ImageBank bank(target, world.cfg.dim);
  const SampleId seed_id = bank.add_seed(world.seeds[static_cast<std::size_t>(target)]);
  BudgetLedger ledger(cfg.budget_per_class);

  std::vector<FeatureVec> class_reference;
  if (cfg.record_pairs)
    for (const LabeledSample& s : world.victim_train)
      if (s.predicted == target) class_reference.push_back(victim_features(world, s.feature));

  Population pop;
  pop.generation = 0;
  pop.triplets.assign(static_cast<std::size_t>(N), Triplet{seed_id, std::nullopt, std::nullopt});
  const Triplet seed_only{seed_id, std::nullopt, std::nullopt};

  ClassOutcome out;
  const auto c = static_cast<std::uint64_t>(target);
  int t = 0;
  while (!ledger.exhausted()) {
    FitnessScores fitness;
    for (int i = 0; i < N; ++i) {
      if (ledger.exhausted()) break;
      const Triplet& genome = evolve_enabled ? pop.triplets[static_cast<std::size_t>(i)]
                                             : seed_only;
      Rng refine_rng = substream(cfg.seed, "refine", c, static_cast<std::uint64_t>(t),
                                 static_cast<std::uint64_t>(i));
      const HardPrompt prompt = refine_prompt(world, bank, genome, cfg.refine, refine_rng);
      Rng eval_rng = substream(cfg.seed, "eval", c, static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(i));
      const auto outcome = evaluate_prompt(world, prompt, target, ledger, bank, cfg.batch,
                                           eval_rng);
      if (!outcome.has_value()) break;
      fitness.push_back(outcome->pc);
      out.trace.push_back({target, t, i, outcome->pc});
      out.prompts.push_back({target, t, i, prompt.tokens});
      if (cfg.record_pairs) {
        std::vector<FeatureVec> batch_features;
        batch_features.reserve(outcome->samples.size());
        for (const LabeledSample& s : outcome->samples)
          batch_features.push_back(victim_features(world, s.feature));
        out.pairs.push_back({target, t, i, outcome->pc,
                             l2_mean_feature_distance(batch_features, class_reference)});
      }
    }
    Population next = pop;
    if (evolve_enabled) {
      Rng evolve_rng = substream(cfg.seed, "evolve", c, static_cast<std::uint64_t>(t));
      next = reproduce(pop, fitness, bank, cfg.evolve, evolve_rng);
    } else {
      next.generation = pop.generation + 1;
    }
    if (hooks.on_generation) hooks.on_generation({target, t, pop, fitness, next});
    pop = std::move(next);
    ++t;
  }

  out.queries = ledger.consumed();
  out.bank_sizes = {static_cast<int>(bank.positive_ids().size()),
                    static_cast<int>(bank.negative_ids().size())};

  for (const SampleId id : bank.positive_ids())
    out.positives.push_back(bank.sample(id).feature);

  const auto harvest = [&](const std::vector<SampleId>& ids) {
    for (const SampleId id : ids) {
      const LabeledSample& s = bank.sample(id);
      TrainingExample ex;
      ex.feature = s.feature;
      ex.label = s.predicted;
      if (cfg.soft_labels || cfg.train.label_mode == LabelMode::soft)
        ex.soft = victim_predict(world, s.feature).soft;
      out.harvested.push_back(std::move(ex));
    }
  };
  harvest(bank.seed_ids());
  harvest(bank.positive_ids());
  harvest(bank.negative_ids());
  return out;
}

RunReport run_attack(const RunConfig& raw_cfg, bool evolve_enabled, const RunHooks& hooks) {
  const auto started = std::chrono::steady_clock::now();
  const RunConfig cfg = resolve(raw_cfg);
  cfg.validate();

  const World world = build_world(cfg.world);
  const int K = cfg.world.classes;

  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  if (!hooks.class_order.empty()) {
    if (static_cast<int>(hooks.class_order.size()) != K)
      throw std::invalid_argument("RunHooks: class_order must list every class once");
    order = hooks.class_order;
  }

  std::vector<ClassOutcome> per_class(static_cast<std::size_t>(K));
  for (const int target : order)
    per_class[static_cast<std::size_t>(target)] = attack_class(world, cfg, target,
                                                               evolve_enabled, hooks);

  RunReport report;
  report.mode = evolve_enabled ? "stealix" : "ablation";
  report.seed = cfg.seed;
  report.config = cfg;

  std::vector<TrainingExample> training;
  std::vector<FeatureVec> all_positives;
  for (int target = 0; target < K; ++target) {
    ClassOutcome& co = per_class[static_cast<std::size_t>(target)];
    report.per_class_queries.push_back(co.queries);
    report.fitness_trace.insert(report.fitness_trace.end(), co.trace.begin(), co.trace.end());
    report.pc_l2_pairs.insert(report.pc_l2_pairs.end(), co.pairs.begin(), co.pairs.end());
    report.prompts.insert(report.prompts.end(), co.prompts.begin(), co.prompts.end());
    report.bank_sizes.push_back(co.bank_sizes);
    all_positives.insert(all_positives.end(), co.positives.begin(), co.positives.end());
    for (TrainingExample& ex : co.harvested) training.push_back(std::move(ex));
  }

  {
    Rng train_rng = substream(cfg.seed, "attacker-train");
    TrainConfig hard_cfg = cfg.train;
    hard_cfg.label_mode = LabelMode::hard;
    const TrainResult trained = train_attacker(training, K, cfg.world.dim, hard_cfg, train_rng);
    report.attacker_accuracy = evaluate_accuracy(trained.model, world.victim_test);
  }
  if (cfg.soft_labels) {
    Rng train_rng = substream(cfg.seed, "attacker-train");
    TrainConfig soft_cfg = cfg.train;
    soft_cfg.label_mode = LabelMode::soft;
    const TrainResult trained = train_attacker(training, K, cfg.world.dim, soft_cfg, train_rng);
    report.attacker_accuracy_soft = evaluate_accuracy(trained.model, world.victim_test);
  }

  if (cfg.record_recall) {
    std::vector<FeatureVec> test_features;
    for (const LabeledSample& s : world.victim_test)
      test_features.push_back(victim_features(world, s.feature));
    if (static_cast<int>(all_positives.size()) > kRecallNeighbors)
      report.recall_overall = knn_recall(test_features, all_positives, kRecallNeighbors);
    for (int target = 0; target < K; ++target) {
      std::vector<FeatureVec> class_test;
      for (const LabeledSample& s : world.victim_test)
        if (s.predicted == target) class_test.push_back(victim_features(world, s.feature));
      const auto& pos = per_class[static_cast<std::size_t>(target)].positives;
      if (static_cast<int>(pos.size()) > kRecallNeighbors && !class_test.empty())
        report.recall_per_class.push_back(knn_recall(class_test, pos, kRecallNeighbors));
      else
        report.recall_per_class.push_back(std::nullopt);
    }
  }

  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace

RunReport run_stealix(const RunConfig& cfg, const RunHooks& hooks) {
  return run_attack(cfg, true, hooks);
}

RunReport run_ablation_no_reproduction(const RunConfig& cfg, const RunHooks& hooks) {
  return run_attack(cfg, false, hooks);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_reports: cannot open " + path.string());
  f << content;
  if (!f) throw std::runtime_error("emit_reports: write failed for " + path.string());
}

}  // namespace

void emit_reports(const RunReport& report, const std::string& dir) {
  const std::filesystem::path base(dir);
  std::filesystem::create_directories(base);

  {
    nlohmann::json j = report;
    write_file(base / "report.json", j.dump(2) + "\n");
  }
  {
    std::string csv = "class,generation,triplet,pc\n";
    for (const FitnessTraceRow& r : report.fitness_trace)
      csv += fmt(r.class_id) + "," + fmt(r.generation) + "," + fmt(r.triplet_index) + "," +
             fmt(r.pc) + "\n";
    write_file(base / "fitness_trace.csv", csv);
  }
  {
    std::string csv = "class,generation,triplet,pc,l2\n";
    for (const PairRow& r : report.pc_l2_pairs)
      csv += fmt(r.class_id) + "," + fmt(r.generation) + "," + fmt(r.triplet_index) + "," +
             fmt(r.pc) + "," + fmt(r.l2) + "\n";
    write_file(base / "pc_l2_pairs.csv", csv);
  }
  {
    const int total = std::accumulate(report.per_class_queries.begin(),
                                      report.per_class_queries.end(), 0);
    std::string csv =
        "mode,seed,classes,budget_per_class,batch,total_queries,attacker_accuracy,"
        "attacker_accuracy_soft,ablation_accuracy,recall,wall_clock_seconds\n";
    csv += report.mode + "," + fmt(report.seed) + "," + fmt(report.config.world.classes) + "," +
           fmt(report.config.budget_per_class) + "," + fmt(report.config.batch) + "," +
           fmt(total) + "," + fmt(report.attacker_accuracy) + ",";
    csv += (report.attacker_accuracy_soft ? fmt(*report.attacker_accuracy_soft) : "") + ",";
    csv += (report.ablation_accuracy ? fmt(*report.ablation_accuracy) : "") + ",";
    csv += (report.recall_overall ? fmt(*report.recall_overall) : "") + ",";
    csv += fmt(report.wall_clock_seconds) + "\n";
    write_file(base / "summary.csv", csv);
  }
}

}  // namespace stealix
