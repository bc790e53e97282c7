#pragma once

#include <cstdint>
#include <vector>

#include "dlu/cca.hpp"
#include "dlu/dcca.hpp"

namespace dlu {

// One canonical projection: a p-dimensional direction plus the canonical
// correlation of its component. Seed tokens carry correlation 1.0.
struct Intention {
  Eigen::VectorXd vector;
  double correlation = 1.0;
  int origin_utterance = 0;
  int origin_component = 0;
};

// Ordered, deduplicated accumulation of intentions (the DLU). No retained
// pair has |cosine| >= dedup_tau; retained tokens are never removed.
struct DiscourseState {
  std::vector<Intention> tokens;
  int dim_p = 0;
  double dedup_tau = 0.99;

  // Intention vectors stacked as rows (tokens x p), shaped like an
  // utterance matrix so the CCA orientation stays uniform.
  Eigen::MatrixXd as_matrix() const;
};

enum class DiscourseMode { LinearCca, Dcca };

struct DiscourseConfig {
  DiscourseMode mode = DiscourseMode::LinearCca;
  double dedup_tau = 0.99;
  CcaConfig cca;
  TrainConfig train;                    // dcca mode only
  std::vector<int> hidden_widths{16};   // dcca mode only
  std::uint64_t seed = 0;
};

DiscourseState seed_state(const UtteranceMatrix& utt1, double dedup_tau);

// Appends each normalized candidate column (interleaved lambda1/lambda2 by
// component) iff its |cosine| with every retained token stays below tau.
DiscourseState unique_merge(const DiscourseState& state,
                            const Eigen::MatrixXd& lambda1,
                            const Eigen::MatrixXd& lambda2,
                            const Eigen::VectorXd& correlations,
                            int origin_utterance);

// Folds a conversation left-to-right: seed with utterance 1, then for each
// later utterance run CCA (or DCCA) between the current DLU and the
// utterance and merge the resulting projections. Order-sensitive.
DiscourseState build_discourse(const std::vector<UtteranceMatrix>& context,
                               const DiscourseConfig& cfg);

}  // namespace dlu
