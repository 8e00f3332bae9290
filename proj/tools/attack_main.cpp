#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "stealix/config_io.hpp"
#include "stealix/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Prompt-evolution model extraction against a synthetic victim"};

  std::string config_path;
  std::string preset_name = "desk";
  std::string out_dir;
  std::uint64_t seed = 0;
  int budget = 0;
  bool ablation = false;
  bool soft_labels = false;

  app.add_option("--config", config_path, "JSON run configuration; omitted keys keep preset values");
  app.add_option("--preset", preset_name, "base profile: 'desk' (fast) or 'full'")
      ->check(CLI::IsMember({"desk", "full"}));
  app.add_option("--seed", seed, "master seed override");
  app.add_option("--budget", budget, "per-class query budget override")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory override");
  app.add_flag("--ablation", ablation, "refine from the seed only, without reproduction");
  app.add_flag("--soft-labels", soft_labels, "also train on the victim's score vectors");

  CLI11_PARSE(app, argc, argv);

  try {
    stealix::RunConfig cfg = config_path.empty() ? stealix::preset(preset_name)
                                                 : stealix::load_run_config(config_path,
                                                                            preset_name);
    if (seed != 0) cfg.seed = seed;
    if (budget != 0) cfg.budget_per_class = budget;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (soft_labels) cfg.soft_labels = true;

    const stealix::RunReport report = ablation ? stealix::run_ablation_no_reproduction(cfg)
                                               : stealix::run_stealix(cfg);
    stealix::emit_reports(report, cfg.out_dir);

    std::printf("mode=%s seed=%llu queries=%d/class x %d classes\n", report.mode.c_str(),
                static_cast<unsigned long long>(report.seed),
                report.per_class_queries.empty() ? 0 : report.per_class_queries.front(),
                report.config.world.classes);
    std::printf("attacker accuracy: %.4f\n", report.attacker_accuracy);
    if (report.attacker_accuracy_soft)
      std::printf("attacker accuracy (soft labels): %.4f\n", *report.attacker_accuracy_soft);
    if (report.recall_overall)
      std::printf("victim test recall: %.4f\n", *report.recall_overall);
    std::printf("reports written to %s\n", cfg.out_dir.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
