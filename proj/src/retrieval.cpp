#include "dlu/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "dlu/errors.hpp"

namespace dlu {

double score_candidate(const DiscourseState& state, const UtteranceMatrix& response,
                       ScoreAggregation agg) {
  if (state.tokens.empty()) throw EmptyDiscourse();
  if (response.dim_p() != state.dim_p)
    throw DimensionMismatch("response dimension does not match discourse state");

  const Eigen::VectorXd pooled = mean_pool(response);
  const double pn = pooled.norm();
  if (pn == 0.0) return -1.0;

  double best = -1.0;
  double sum = 0.0;
  for (const Intention& t : state.tokens) {
    const double tn = t.vector.norm();
    const double c = tn == 0.0 ? 0.0 : pooled.dot(t.vector) / (pn * tn);
    best = std::max(best, c);
    sum += c;
  }
  return agg == ScoreAggregation::MaxCosine
             ? best
             : sum / static_cast<double>(state.tokens.size());
}

RankedCandidates rank(const DiscourseState& state, const CandidateSet& cands,
                      ScoreAggregation agg) {
  if (cands.candidates.empty()) throw ConfigError("candidate set is empty");
  RankedCandidates out;
  for (const auto& [id, matrix] : cands.candidates) {
    out.scores[id] = score_candidate(state, matrix, agg);
    out.order.push_back(id);
  }
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (out.scores[a] != out.scores[b]) return out.scores[a] > out.scores[b];
    return a < b;
  });
  return out;
}

}  // namespace dlu
