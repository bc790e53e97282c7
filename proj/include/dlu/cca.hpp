#pragma once

#include <Eigen/Dense>

#include "dlu/embedding.hpp"

namespace dlu {

struct CcaConfig {
  double reg_r = 1e-4;       // ridge added to both view covariances
  double eig_floor = 1e-10;  // eigenvalue clamp for inverse square roots
  int num_components_k = 1;
};

// Closed-form linear CCA between two utterance matrices. The p feature
// dimensions act as paired samples and the token rows as variables, so
// weights live in token space and projections are p-dimensional columns.
struct CcaSolution {
  Eigen::MatrixXd weights_a;     // g x k
  Eigen::MatrixXd weights_b;     // h x k
  Eigen::VectorXd correlations;  // k, sorted non-increasing, in [0, 1]
  Eigen::MatrixXd proj_1;        // p x k, = utt1^T * weights_a
  Eigen::MatrixXd proj_2;        // p x k, = utt2^T * weights_b
  double objective = 0.0;        // sum of correlations
};

// Subtracts each column's mean. Requires >= 2 rows.
Eigen::MatrixXd center_columns(const Eigen::MatrixXd& m);

// S^{-1/2} via eigendecomposition, eigenvalues clamped to >= eig_floor.
Eigen::MatrixXd inv_sqrt_sym(const Eigen::MatrixXd& s, double eig_floor);

CcaSolution fit_cca(const UtteranceMatrix& utt1, const UtteranceMatrix& utt2,
                    const CcaConfig& cfg);

// Raw-matrix overload used internally and by the DCCA training loop.
CcaSolution fit_cca(const Eigen::MatrixXd& view1, const Eigen::MatrixXd& view2,
                    const CcaConfig& cfg);

struct CorrGrad {
  double objective = 0.0;
  Eigen::MatrixXd grad1;  // same shape as h1
  Eigen::MatrixXd grad2;  // same shape as h2
};

// Total-correlation objective and its gradient with respect to every entry
// of h1 and h2. Matrices are variables x samples; the objective equals
// fit_cca's on the same inputs.
CorrGrad corr_objective_grad(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2,
                             const CcaConfig& cfg);

}  // namespace dlu
