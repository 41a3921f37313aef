// Deterministic synthetic dialog generator. Scenarios are template-grammar
// question/answer pairs (what-favorite, do-you, how-often, or-choice, ...)
// whose elliptical answers carry a gold completion, a gold dialog-act set
// annotated on the original utterance, and gold SRL frames over both the
// original and the completed utterance (context-predicate and
// subordinate-clause annotation included).
#pragma once

#include <cstdint>

#include "elcmp/corpus.hpp"

namespace elcmp {

struct SyntheticMix {
  double had_ellipsis = 0.45;
  double modified_to_ellipsis = 0.15;
  double already_complete = 0.40;
};

struct SyntheticCorpora {
  CompletionCorpus completion;
  DACorpus da;            // utterances with ellipsis, gold acts
  DACorpus da_completed;  // gold-completed utterances, same gold acts
  SRLCorpus srl;            // frames over the original utterance
  SRLCorpus srl_completed;  // frames over the gold-completed utterance
};

// The 23-act inventory (MIDAS-style names). The generator emits a 10-label
// active subset of it.
LabelInventory default_act_inventory();

// Argument role inventory used by the SRL tagger head.
std::vector<std::string> default_srl_roles();

SyntheticCorpora generate_synthetic(uint64_t seed, std::size_t n,
                                    const SyntheticMix& mix = {});

}  // namespace elcmp
