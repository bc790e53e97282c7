#include "dlu/discourse.hpp"

#include <algorithm>
#include <cmath>

#include "dlu/errors.hpp"
#include "dlu/rng.hpp"

namespace dlu {

namespace {

bool is_duplicate(const DiscourseState& state, const Eigen::VectorXd& candidate) {
  for (const Intention& t : state.tokens) {
    const double denom = t.vector.norm() * candidate.norm();
    if (denom == 0.0) continue;
    if (std::abs(t.vector.dot(candidate)) / denom >= state.dedup_tau) return true;
  }
  return false;
}

void try_append(DiscourseState& state, Eigen::VectorXd candidate, double correlation,
                int origin_utterance, int origin_component) {
  const double n = candidate.norm();
  if (n == 0.0) return;
  candidate /= n;
  if (is_duplicate(state, candidate)) return;
  state.tokens.push_back(
      {std::move(candidate), correlation, origin_utterance, origin_component});
}

}  // namespace

Eigen::MatrixXd DiscourseState::as_matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(tokens.size()), dim_p);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = tokens[i].vector.transpose();
  return m;
}

DiscourseState seed_state(const UtteranceMatrix& utt1, double dedup_tau) {
  if (utt1.token_count() == 0) throw EmptyUtterance();
  DiscourseState state;
  state.dim_p = utt1.dim_p();
  state.dedup_tau = dedup_tau;
  for (int r = 0; r < utt1.token_count(); ++r) {
    Eigen::VectorXd v = utt1.rows.row(r).transpose();
    if (v.norm() == 0.0 || is_duplicate(state, v)) continue;
    state.tokens.push_back({std::move(v), 1.0, 1, r});
  }
  return state;
}

DiscourseState unique_merge(const DiscourseState& state,
                            const Eigen::MatrixXd& lambda1,
                            const Eigen::MatrixXd& lambda2,
                            const Eigen::VectorXd& correlations,
                            int origin_utterance) {
  if (lambda1.rows() != state.dim_p || lambda2.rows() != state.dim_p)
    throw DimensionMismatch("projection dimension does not match discourse state");
  if (lambda1.cols() != lambda2.cols())
    throw DimensionMismatch("projection component counts differ");

  DiscourseState out = state;
  for (Eigen::Index j = 0; j < lambda1.cols(); ++j) {
    const double corr = j < correlations.size() ? correlations[j] : 0.0;
    try_append(out, lambda1.col(j), corr, origin_utterance, static_cast<int>(j));
    try_append(out, lambda2.col(j), corr, origin_utterance, static_cast<int>(j));
  }
  return out;
}

DiscourseState build_discourse(const std::vector<UtteranceMatrix>& context,
                               const DiscourseConfig& cfg) {
  if (context.empty()) throw EmptyUtterance();
  DiscourseState state = seed_state(context[0], cfg.dedup_tau);

  for (std::size_t n = 1; n < context.size(); ++n) {
    const UtteranceMatrix& utt = context[n];
    const int k = std::min<int>(static_cast<int>(state.tokens.size()),
                                utt.token_count());
    if (k < 1) continue;

    const Eigen::MatrixXd dlu = state.as_matrix();
    if (cfg.mode == DiscourseMode::LinearCca) {
      CcaConfig cca = cfg.cca;
      cca.num_components_k = k;
      const CcaSolution sol = fit_cca(dlu, utt.rows, cca);
      state = unique_merge(state, sol.proj_1, sol.proj_2, sol.correlations,
                           static_cast<int>(n) + 1);
    } else {
      NetworkSpec spec1, spec2;
      spec1.input_dim = static_cast<int>(dlu.rows());
      spec2.input_dim = utt.token_count();
      spec1.output_dim = spec2.output_dim = k;
      spec1.hidden_widths = spec2.hidden_widths = cfg.hidden_widths;
      spec1.activation = spec2.activation = Activation::Tanh;

      TrainConfig tc = cfg.train;
      tc.cca = cfg.cca;
      tc.cca.num_components_k = k;
      // fresh model per pair, seed derived from the pair index
      tc.seed = splitmix64(cfg.seed ^ (0x9e3779b97f4a7c15ULL * n));

      UtteranceMatrix dlu_view;
      dlu_view.rows = dlu;
      const DccaModel model = train(dlu_view, utt, spec1, spec2, tc);
      const DccaProjection proj = transform(model, dlu_view, utt);
      state = unique_merge(state, proj.lambda1, proj.lambda2, proj.correlations,
                           static_cast<int>(n) + 1);
    }
  }
  return state;
}

}  // namespace dlu
