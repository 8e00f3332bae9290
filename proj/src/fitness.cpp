#include "stealix/fitness.hpp"

#include <stdexcept>

namespace stealix {

std::optional<EvalOutcome> evaluate_prompt(const World& world, const HardPrompt& prompt,
                                           ClassId target, BudgetLedger& ledger, ImageBank& bank,
                                           int batch, Rng& rng) {
  if (batch < 1) throw std::invalid_argument("evaluate_prompt: batch must be >= 1");
  if (target != bank.target())
    throw std::invalid_argument("evaluate_prompt: bank belongs to a different target class");

  const int granted = ledger.charge(batch);
  if (granted == 0) return std::nullopt;

  EvalOutcome out;
  out.prompt = prompt;
  out.samples.reserve(static_cast<std::size_t>(granted));
  int hits = 0;
  for (int i = 0; i < granted; ++i) {
    LabeledSample s;
    s.feature = generate(world, prompt, rng);
    s.predicted = victim_predict(world, s.feature).hard;
    if (s.predicted == target) ++hits;
    bank.insert(s);
    out.samples.push_back(std::move(s));
  }
  out.pc = static_cast<double>(hits) / static_cast<double>(granted);
  return out;
}

}  // namespace stealix
