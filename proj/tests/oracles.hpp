#pragma once

// Independent reference implementations used to check the library. These
// deliberately take different computational routes than the code under test.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dlu/rng.hpp"

namespace oracle {

// Canonical correlations via the generalized symmetric eigenproblem
//   S12 S22^{-1} S21 a = rho^2 S11 a
// (no whitening, no SVD).
inline Eigen::VectorXd cca_correlations(const Eigen::MatrixXd& view1,
                                        const Eigen::MatrixXd& view2,
                                        double reg_r, int k) {
  const Eigen::MatrixXd x1 = view1.transpose();  // samples x variables
  const Eigen::MatrixXd x2 = view2.transpose();
  const double denom = static_cast<double>(x1.rows() - 1);
  const Eigen::MatrixXd c1 = x1.rowwise() - x1.colwise().mean();
  const Eigen::MatrixXd c2 = x2.rowwise() - x2.colwise().mean();
  Eigen::MatrixXd s11 = c1.transpose() * c1 / denom;
  Eigen::MatrixXd s22 = c2.transpose() * c2 / denom;
  s11.diagonal().array() += reg_r;
  s22.diagonal().array() += reg_r;
  const Eigen::MatrixXd s12 = c1.transpose() * c2 / denom;

  const Eigen::MatrixXd a = s12 * s22.ldlt().solve(s12.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, s11);
  Eigen::VectorXd ev = ges.eigenvalues();  // ascending
  Eigen::VectorXd corr(k);
  for (int i = 0; i < k; ++i) {
    const double lambda = std::max(0.0, ev[ev.size() - 1 - i]);
    corr[i] = std::min(1.0, std::sqrt(lambda));
  }
  return corr;
}

// Projection columns via generalized eigenvectors: a solves the problem
// above, b = S22^{-1} S21 a; columns are utt^T * weights (unnormalized).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> cca_projections(
    const Eigen::MatrixXd& view1, const Eigen::MatrixXd& view2, double reg_r,
    int k) {
  const Eigen::MatrixXd x1 = view1.transpose();
  const Eigen::MatrixXd x2 = view2.transpose();
  const double denom = static_cast<double>(x1.rows() - 1);
  const Eigen::MatrixXd c1 = x1.rowwise() - x1.colwise().mean();
  const Eigen::MatrixXd c2 = x2.rowwise() - x2.colwise().mean();
  Eigen::MatrixXd s11 = c1.transpose() * c1 / denom;
  Eigen::MatrixXd s22 = c2.transpose() * c2 / denom;
  s11.diagonal().array() += reg_r;
  s22.diagonal().array() += reg_r;
  const Eigen::MatrixXd s12 = c1.transpose() * c2 / denom;

  const Eigen::MatrixXd a = s12 * s22.ldlt().solve(s12.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, s11);
  Eigen::MatrixXd wa(view1.rows(), k), wb(view2.rows(), k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd va = ges.eigenvectors().col(ges.eigenvectors().cols() - 1 - i);
    wa.col(i) = va;
    wb.col(i) = s22.ldlt().solve(s12.transpose() * va);
  }
  return {view1.transpose() * wa, view2.transpose() * wb};
}

inline double pearson(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Eigen::VectorXd uc = u.array() - u.mean();
  const Eigen::VectorXd vc = v.array() - v.mean();
  return uc.dot(vc) / std::sqrt(uc.squaredNorm() * vc.squaredNorm());
}

inline Eigen::MatrixXd random_matrix(dlu::Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.symmetric();
  return m;
}

// Straight-line sentence BLEU from the textbook formula, no shared helpers.
inline double bleu(const std::vector<std::string>& cand,
                   const std::vector<std::string>& ref) {
  if (cand.empty()) return 0.0;
  if (cand == ref) return 1.0;
  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    std::map<std::string, int> cgrams, rgrams;
    for (int i = 0; i + n <= static_cast<int>(cand.size()); ++i) {
      std::string g;
      for (int j = 0; j < n; ++j) g += cand[i + j] + "\x01";
      ++cgrams[g];
    }
    for (int i = 0; i + n <= static_cast<int>(ref.size()); ++i) {
      std::string g;
      for (int j = 0; j < n; ++j) g += ref[i + j] + "\x01";
      ++rgrams[g];
    }
    int match = 0, total = 0;
    for (const auto& [g, c] : cgrams) {
      total += c;
      auto it = rgrams.find(g);
      if (it != rgrams.end()) match += std::min(c, it->second);
    }
    log_sum += std::log((match + 1.0) / (total + 1.0));
  }
  double score = std::exp(log_sum / 4.0);
  if (cand.size() < ref.size())
    score *= std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
  return score;
}

inline double rouge1(const std::vector<std::string>& cand,
                     const std::vector<std::string>& ref) {
  std::map<std::string, int> counts;
  for (const auto& w : ref) ++counts[w];
  int overlap = 0;
  for (const auto& w : cand) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      ++overlap;
      --it->second;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / cand.size();
  const double r = static_cast<double>(overlap) / ref.size();
  return 2.0 * p * r / (p + r);
}

inline double rougeL(const std::vector<std::string>& cand,
                     const std::vector<std::string>& ref) {
  // recursive LCS with memoization, distinct from the DP in the library
  std::vector<std::vector<int>> memo(cand.size() + 1,
                                     std::vector<int>(ref.size() + 1, -1));
  std::function<int(int, int)> lcs = [&](int i, int j) -> int {
    if (i == 0 || j == 0) return 0;
    int& m = memo[i][j];
    if (m >= 0) return m;
    if (cand[i - 1] == ref[j - 1]) return m = lcs(i - 1, j - 1) + 1;
    return m = std::max(lcs(i - 1, j), lcs(i, j - 1));
  };
  const int l = lcs(static_cast<int>(cand.size()), static_cast<int>(ref.size()));
  if (l == 0) return 0.0;
  const double p = static_cast<double>(l) / cand.size();
  const double r = static_cast<double>(l) / ref.size();
  return 2.0 * p * r / (p + r);
}

}  // namespace oracle
