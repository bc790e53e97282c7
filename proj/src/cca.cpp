#include "dlu/cca.hpp"

#include <algorithm>
#include <cmath>

#include "dlu/errors.hpp"

namespace dlu {

namespace {

struct Whitened {
  Eigen::MatrixXd w1;  // Sigma11^{-1/2}
  Eigen::MatrixXd w2;  // Sigma22^{-1/2}
  Eigen::MatrixXd t;   // w1 * Sigma12 * w2
};

// Covariances over the sample axis (columns of x are variables).
// x1, x2 are samples x variables, already centered.
Whitened whiten(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2,
                const CcaConfig& cfg) {
  const double denom = static_cast<double>(c1.rows() - 1);
  Eigen::MatrixXd s11 = (c1.transpose() * c1) / denom;
  Eigen::MatrixXd s22 = (c2.transpose() * c2) / denom;
  s11.diagonal().array() += cfg.reg_r;
  s22.diagonal().array() += cfg.reg_r;
  const Eigen::MatrixXd s12 = (c1.transpose() * c2) / denom;

  Whitened w;
  w.w1 = inv_sqrt_sym(s11, cfg.eig_floor);
  w.w2 = inv_sqrt_sym(s22, cfg.eig_floor);
  w.t = w.w1 * s12 * w.w2;
  return w;
}

void apply_sign_convention(Eigen::MatrixXd& weights_a, Eigen::MatrixXd& weights_b) {
  for (Eigen::Index j = 0; j < weights_a.cols(); ++j) {
    Eigen::Index imax = 0;
    weights_a.col(j).cwiseAbs().maxCoeff(&imax);
    if (weights_a(imax, j) < 0.0) {
      weights_a.col(j) = -weights_a.col(j);
      weights_b.col(j) = -weights_b.col(j);
    }
  }
}

}  // namespace

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& m) {
  if (m.rows() < 2) throw TooFewSamples("center_columns needs >= 2 rows");
  return m.rowwise() - m.colwise().mean();
}

Eigen::MatrixXd inv_sqrt_sym(const Eigen::MatrixXd& s, double eig_floor) {
  if (s.rows() != s.cols() || (s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw NotSymmetric();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
  if (es.info() != Eigen::Success) throw RankDeficient("eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(eig_floor);
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

CcaSolution fit_cca(const Eigen::MatrixXd& view1, const Eigen::MatrixXd& view2,
                    const CcaConfig& cfg) {
  const Eigen::Index g = view1.rows();
  const Eigen::Index h = view2.rows();
  const Eigen::Index p = view1.cols();
  if (view2.cols() != p)
    throw DimensionMismatch("views disagree on feature dimension");
  if (p < 2) throw TooFewSamples("need feature dimension >= 2");
  const Eigen::Index k = cfg.num_components_k;
  if (k < 1 || k > std::min(g, h))
    throw ConfigError("num_components_k must be in [1, min(g, h)]");

  // feature dimensions are samples, token rows are variables
  const Eigen::MatrixXd c1 = center_columns(view1.transpose());
  const Eigen::MatrixXd c2 = center_columns(view2.transpose());
  const Whitened w = whiten(c1, c2, cfg);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.t, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaSolution sol;
  sol.correlations = svd.singularValues().head(k).cwiseMin(1.0).cwiseMax(0.0);
  sol.weights_a = w.w1 * svd.matrixU().leftCols(k);
  sol.weights_b = w.w2 * svd.matrixV().leftCols(k);
  apply_sign_convention(sol.weights_a, sol.weights_b);
  sol.proj_1 = view1.transpose() * sol.weights_a;
  sol.proj_2 = view2.transpose() * sol.weights_b;
  sol.objective = sol.correlations.sum();
  return sol;
}

CcaSolution fit_cca(const UtteranceMatrix& utt1, const UtteranceMatrix& utt2,
                    const CcaConfig& cfg) {
  return fit_cca(utt1.rows, utt2.rows, cfg);
}

CorrGrad corr_objective_grad(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2,
                             const CcaConfig& cfg) {
  const Eigen::Index m = h1.cols();
  if (h2.cols() != m) throw DimensionMismatch("views disagree on sample count");
  if (m < 2) throw TooFewSamples("need >= 2 samples");
  const Eigen::Index k =
      std::min<Eigen::Index>(cfg.num_components_k, std::min(h1.rows(), h2.rows()));

  const Eigen::MatrixXd hb1 = h1.colwise() - h1.rowwise().mean();
  const Eigen::MatrixXd hb2 = h2.colwise() - h2.rowwise().mean();
  const Whitened w = whiten(hb1.transpose(), hb2.transpose(), cfg);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd u = svd.matrixU().leftCols(k);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(k);
  const Eigen::VectorXd d = svd.singularValues().head(k);

  CorrGrad out;
  out.objective = d.cwiseMin(1.0).cwiseMax(0.0).sum();

  // gradient of the truncated trace-norm objective
  const Eigen::MatrixXd g11 = -0.5 * w.w1 * u * d.asDiagonal() * u.transpose() * w.w1;
  const Eigen::MatrixXd g22 = -0.5 * w.w2 * v * d.asDiagonal() * v.transpose() * w.w2;
  const Eigen::MatrixXd g12 = w.w1 * u * v.transpose() * w.w2;
  const double denom = static_cast<double>(m - 1);
  out.grad1 = (2.0 * g11 * hb1 + g12 * hb2) / denom;
  out.grad2 = (2.0 * g22 * hb2 + g12.transpose() * hb1) / denom;
  return out;
}

}  // namespace dlu
