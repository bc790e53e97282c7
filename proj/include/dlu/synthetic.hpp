#pragma once

#include <cstdint>
#include <vector>

#include "dlu/data.hpp"

namespace dlu {

struct SyntheticConfig {
  int num_dialogues = 200;
  int min_turns = 4;
  int max_turns = 6;
  int words_per_turn = 6;
  std::uint64_t seed = 7;
};

// Hermetic dialogue corpus for tests and acceptance runs. Each dialogue is
// assigned a topic with its own vocabulary; the true response reuses topic
// words that also occur in the context, so a lexical-overlap ranker can
// separate it from distractors drawn from other topics.
std::vector<Dialogue> generate_synthetic_corpus(const SyntheticConfig& cfg);

}  // namespace dlu
