#pragma once

#include <optional>
#include <vector>

#include "stealix/types.hpp"
#include "stealix/world.hpp"

namespace stealix {

struct EvalOutcome {
  double pc = 0.0;                    // fraction of the batch labeled as the target
  std::vector<LabeledSample> samples; // the batch, in generation order
  HardPrompt prompt;
};

// Generates up to `batch` images from the prompt, charges the ledger for
// what was actually granted, labels every image with the victim, and files
// each sample into the bank.  Returns nothing when the budget was already
// exhausted.  The attack consumes only the victim's hard labels.
std::optional<EvalOutcome> evaluate_prompt(const World& world, const HardPrompt& prompt,
                                           ClassId target, BudgetLedger& ledger, ImageBank& bank,
                                           int batch, Rng& rng);

}  // namespace stealix
