#include "stealix/config_io.hpp"

#include <fstream>
#include <stdexcept>

namespace stealix {

namespace {

using nlohmann::json;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

std::string label_mode_name(LabelMode m) { return m == LabelMode::soft ? "soft" : "hard"; }

LabelMode label_mode_of(const std::string& s) {
  if (s == "hard") return LabelMode::hard;
  if (s == "soft") return LabelMode::soft;
  throw std::invalid_argument("label_mode must be 'hard' or 'soft'");
}

}  // namespace

void to_json(json& j, const WorldConfig& c) {
  j = json{{"dim", c.dim},
           {"classes", c.classes},
           {"vocab_size", c.vocab_size},
           {"prompt_length", c.prompt_length},
           {"generator_noise", c.generator_noise},
           {"victim_noise", c.victim_noise},
           {"distractor_strength", c.distractor_strength},
           {"softmax_temperature", c.softmax_temperature},
           {"train_per_class", c.train_per_class},
           {"test_per_class", c.test_per_class},
           {"rng_seed", c.rng_seed}};
}

void from_json(const json& j, WorldConfig& c) {
  maybe(j, "dim", c.dim);
  maybe(j, "classes", c.classes);
  maybe(j, "vocab_size", c.vocab_size);
  maybe(j, "prompt_length", c.prompt_length);
  maybe(j, "generator_noise", c.generator_noise);
  maybe(j, "victim_noise", c.victim_noise);
  maybe(j, "distractor_strength", c.distractor_strength);
  maybe(j, "softmax_temperature", c.softmax_temperature);
  maybe(j, "train_per_class", c.train_per_class);
  maybe(j, "test_per_class", c.test_per_class);
  maybe(j, "rng_seed", c.rng_seed);
}

void to_json(json& j, const RefineConfig& c) {
  j = json{{"steps", c.steps},
           {"learning_rate", c.learning_rate},
           {"prompt_length", c.prompt_length}};
}

void from_json(const json& j, RefineConfig& c) {
  maybe(j, "steps", c.steps);
  maybe(j, "learning_rate", c.learning_rate);
  maybe(j, "prompt_length", c.prompt_length);
}

void to_json(json& j, const EvolveConfig& c) {
  j = json{{"population", c.population},
           {"parents", c.parents},
           {"tournament_size", c.tournament_size},
           {"mutation_prob", c.mutation_prob}};
}

void from_json(const json& j, EvolveConfig& c) {
  maybe(j, "population", c.population);
  maybe(j, "parents", c.parents);
  maybe(j, "tournament_size", c.tournament_size);
  maybe(j, "mutation_prob", c.mutation_prob);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"epochs", c.epochs},
           {"batch_size", c.batch_size},
           {"learning_rate", c.learning_rate},
           {"momentum", c.momentum},
           {"weight_decay", c.weight_decay},
           {"schedule", c.schedule},
           {"label_mode", label_mode_name(c.label_mode)}};
}

void from_json(const json& j, TrainConfig& c) {
  maybe(j, "epochs", c.epochs);
  maybe(j, "batch_size", c.batch_size);
  maybe(j, "learning_rate", c.learning_rate);
  maybe(j, "momentum", c.momentum);
  maybe(j, "weight_decay", c.weight_decay);
  maybe(j, "schedule", c.schedule);
  if (j.contains("label_mode")) c.label_mode = label_mode_of(j.at("label_mode").get<std::string>());
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"world", c.world},
           {"refine", c.refine},
           {"evolve", c.evolve},
           {"train", c.train},
           {"budget_per_class", c.budget_per_class},
           {"batch", c.batch},
           {"soft_labels", c.soft_labels},
           {"record_pairs", c.record_pairs},
           {"record_recall", c.record_recall},
           {"out_dir", c.out_dir},
           {"seed", c.seed}};
}

void from_json(const json& j, RunConfig& c) {
  maybe(j, "world", c.world);
  maybe(j, "refine", c.refine);
  maybe(j, "evolve", c.evolve);
  maybe(j, "train", c.train);
  maybe(j, "budget_per_class", c.budget_per_class);
  maybe(j, "batch", c.batch);
  maybe(j, "soft_labels", c.soft_labels);
  maybe(j, "record_pairs", c.record_pairs);
  maybe(j, "record_recall", c.record_recall);
  maybe(j, "out_dir", c.out_dir);
  maybe(j, "seed", c.seed);
}

namespace {

json optional_to_json(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

void to_json(json& j, const RunReport& r) {
  json trace = json::array();
  for (const FitnessTraceRow& row : r.fitness_trace)
    trace.push_back({{"class", row.class_id},
                     {"generation", row.generation},
                     {"triplet", row.triplet_index},
                     {"pc", row.pc}});
  json pairs = json::array();
  for (const PairRow& row : r.pc_l2_pairs)
    pairs.push_back({{"class", row.class_id},
                     {"generation", row.generation},
                     {"triplet", row.triplet_index},
                     {"pc", row.pc},
                     {"l2", row.l2}});
  json prompts = json::array();
  for (const PromptRecord& row : r.prompts)
    prompts.push_back({{"class", row.class_id},
                       {"generation", row.generation},
                       {"triplet", row.triplet_index},
                       {"tokens", row.tokens}});
  json banks = json::array();
  for (const BankSizes& b : r.bank_sizes)
    banks.push_back({{"positives", b.positives}, {"negatives", b.negatives}});
  json recalls = json::array();
  for (const auto& v : r.recall_per_class) recalls.push_back(optional_to_json(v));

  j = json{{"mode", r.mode},
           {"seed", r.seed},
           {"config", r.config},
           {"per_class_queries", r.per_class_queries},
           {"fitness_trace", trace},
           {"pc_l2_pairs", pairs},
           {"prompts", prompts},
           {"bank_sizes", banks},
           {"attacker_accuracy", r.attacker_accuracy},
           {"attacker_accuracy_soft", optional_to_json(r.attacker_accuracy_soft)},
           {"ablation_accuracy", optional_to_json(r.ablation_accuracy)},
           {"recall_overall", optional_to_json(r.recall_overall)},
           {"recall_per_class", recalls},
           {"wall_clock_seconds", r.wall_clock_seconds}};
}

void from_json(const json& j, RunReport& r) {
  j.at("mode").get_to(r.mode);
  j.at("seed").get_to(r.seed);
  j.at("config").get_to(r.config);
  j.at("per_class_queries").get_to(r.per_class_queries);
  r.fitness_trace.clear();
  for (const json& row : j.at("fitness_trace"))
    r.fitness_trace.push_back({row.at("class").get<int>(), row.at("generation").get<int>(),
                               row.at("triplet").get<int>(), row.at("pc").get<double>()});
  r.pc_l2_pairs.clear();
  for (const json& row : j.at("pc_l2_pairs"))
    r.pc_l2_pairs.push_back({row.at("class").get<int>(), row.at("generation").get<int>(),
                             row.at("triplet").get<int>(), row.at("pc").get<double>(),
                             row.at("l2").get<double>()});
  r.prompts.clear();
  for (const json& row : j.at("prompts"))
    r.prompts.push_back({row.at("class").get<int>(), row.at("generation").get<int>(),
                         row.at("triplet").get<int>(),
                         row.at("tokens").get<std::vector<int>>()});
  r.bank_sizes.clear();
  for (const json& row : j.at("bank_sizes"))
    r.bank_sizes.push_back({row.at("positives").get<int>(), row.at("negatives").get<int>()});
  r.attacker_accuracy = j.at("attacker_accuracy").get<double>();
  r.attacker_accuracy_soft = optional_from_json(j.at("attacker_accuracy_soft"));
  r.ablation_accuracy = optional_from_json(j.at("ablation_accuracy"));
  r.recall_overall = optional_from_json(j.at("recall_overall"));
  r.recall_per_class.clear();
  for (const json& v : j.at("recall_per_class")) r.recall_per_class.push_back(optional_from_json(v));
  r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
}

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  if (name == "desk") return cfg;
  if (name == "full") {
    cfg.refine.steps = 500;
    cfg.budget_per_class = 500;
    return cfg;
  }
  throw std::invalid_argument("unknown preset '" + name + "' (expected 'desk' or 'full')");
}

RunConfig load_run_config(const std::string& path, const std::string& preset_name) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("cannot parse config file " + path + ": " + e.what());
  }
  RunConfig cfg = preset(preset_name);
  j.get_to(cfg);
  return cfg;
}

}  // namespace stealix
