#pragma once

#include <map>
#include <optional>
#include <vector>

#include "dlu/discourse.hpp"

namespace dlu {

struct CandidateSet {
  std::vector<std::pair<int, UtteranceMatrix>> candidates;  // ids unique
  std::optional<int> truth_id;
};

struct RankedCandidates {
  std::map<int, double> scores;
  std::vector<int> order;  // by score descending, ties by ascending id
};

enum class ScoreAggregation { MaxCosine, MeanCosine };

// Cosine of the mean-pooled response against the discourse tokens,
// aggregated by max (default) or mean. A zero pooled vector scores -1.
double score_candidate(const DiscourseState& state, const UtteranceMatrix& response,
                       ScoreAggregation agg = ScoreAggregation::MaxCosine);

RankedCandidates rank(const DiscourseState& state, const CandidateSet& cands,
                      ScoreAggregation agg = ScoreAggregation::MaxCosine);

}  // namespace dlu
