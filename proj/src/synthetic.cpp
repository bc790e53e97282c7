#include "dlu/synthetic.hpp"

#include <string>

#include "dlu/rng.hpp"

namespace dlu {

namespace {

const char* kFiller[] = {"please", "thanks", "how", "do", "i", "can",
                         "you", "try", "it", "works", "now", "ok"};
constexpr int kNumFiller = 12;
constexpr int kTopicWords = 8;

// topic t, word w -> an invented but stable surface form
std::string topic_word(int topic, int w) {
  return "t" + std::to_string(topic) + "w" + std::to_string(w);
}

}  // namespace

std::vector<Dialogue> generate_synthetic_corpus(const SyntheticConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<Dialogue> dialogues;
  dialogues.reserve(cfg.num_dialogues);
  for (int d = 0; d < cfg.num_dialogues; ++d) {
    const int topic = d;  // one topic per dialogue keeps distractors disjoint
    const int turns =
        cfg.min_turns + static_cast<int>(rng.below(cfg.max_turns - cfg.min_turns + 1));
    Dialogue dlg;
    dlg.id = d;
    for (int t = 0; t < turns; ++t) {
      std::string turn;
      for (int w = 0; w < cfg.words_per_turn; ++w) {
        if (!turn.empty()) turn.push_back(' ');
        // mostly topic vocabulary with occasional shared filler
        if (rng.uniform() < 0.75) {
          turn += topic_word(topic, static_cast<int>(rng.below(kTopicWords)));
        } else {
          turn += kFiller[rng.below(kNumFiller)];
        }
      }
      dlg.turns.push_back(std::move(turn));
    }
    dialogues.push_back(std::move(dlg));
  }
  return dialogues;
}

}  // namespace dlu
