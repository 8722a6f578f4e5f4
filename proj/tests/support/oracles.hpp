#pragma once

// Independent oracles used only by tests. Each one deliberately takes the
// naive algebraic route (normal equations, dummy variables, explicit loops)
// so it shares no code path with the production estimators it checks.

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pressad/panel.hpp"
#include "pressad/regression.hpp"

namespace oracles {

// Plain least squares through the normal equations.
inline Eigen::VectorXd normal_equations_ols(const Eigen::VectorXd& y,
                                            const Eigen::MatrixXd& X) {
  Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::VectorXd xty = X.transpose() * y;
  return xtx.fullPivLu().solve(xty);
}

struct DummyOlsResult {
  double beta_war = 0;
  double beta_popularity = 0;
  Eigen::VectorXd full_beta;
};

// Full dummy-variable regression: intercept + regressors + (G-1) group
// dummies + (T-1) time dummies. By Frisch-Waugh-Lovell the regressor
// coefficients equal the within estimator's.
inline DummyOlsResult dummy_variable_ols(std::span<const pressad::PanelObservation> panel,
                                         const pressad::RegressionSpec& spec) {
  std::vector<const pressad::PanelObservation*> rows;
  for (const auto& r : panel) {
    if (spec.use_popularity && !r.popularity) continue;
    rows.push_back(&r);
  }
  std::map<std::string, int> group_ids, time_ids;
  for (const auto* r : rows) {
    group_ids.emplace(r->source + "\x1f" + r->entity, static_cast<int>(group_ids.size()));
    time_ids.emplace(r->period, static_cast<int>(time_ids.size()));
  }

  const bool use_group = spec.fixed_effects == pressad::FixedEffects::group ||
                         spec.fixed_effects == pressad::FixedEffects::both;
  const bool use_time = spec.fixed_effects == pressad::FixedEffects::time ||
                        spec.fixed_effects == pressad::FixedEffects::both;

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::Index k = 1 + 1 + (spec.use_popularity ? 1 : 0);
  if (use_group) k += static_cast<Eigen::Index>(group_ids.size()) - 1;
  if (use_time) k += static_cast<Eigen::Index>(time_ids.size()) - 1;

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = *rows[static_cast<std::size_t>(i)];
    y(i) = spec.dependent == pressad::Dependent::sentiment_total
               ? static_cast<double>(r.sentiment_total)
               : static_cast<double>(r.article_count);
    Eigen::Index col = 0;
    X(i, col++) = 1.0;
    X(i, col++) = r.weighted_ad_ratio;
    if (spec.use_popularity) X(i, col++) = *r.popularity;
    if (use_group) {
      int g = group_ids.at(r.source + "\x1f" + r.entity);
      if (g > 0) X(i, col + g - 1) = 1.0;
      col += static_cast<Eigen::Index>(group_ids.size()) - 1;
    }
    if (use_time) {
      int t = time_ids.at(r.period);
      if (t > 0) X(i, col + t - 1) = 1.0;
    }
  }

  DummyOlsResult res;
  res.full_beta = X.fullPivHouseholderQr().solve(y);
  res.beta_war = res.full_beta(1);
  if (spec.use_popularity) res.beta_popularity = res.full_beta(2);
  return res;
}

// Cluster sandwich assembled with explicit per-cluster loops and a plain
// matrix inverse.
inline std::vector<double> brute_force_clustered_se(const Eigen::MatrixXd& X,
                                                    const Eigen::VectorXd& u,
                                                    const std::vector<int>& clusters,
                                                    int n_clusters) {
  const Eigen::Index n = X.rows(), k = X.cols();
  Eigen::MatrixXd bread = (X.transpose() * X).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (int g = 0; g < n_clusters; ++g) {
    Eigen::VectorXd sg = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i)
      if (clusters[static_cast<std::size_t>(i)] == g) sg += u(i) * X.row(i).transpose();
    meat += sg * sg.transpose();
  }
  double G = n_clusters, N = static_cast<double>(n), K = static_cast<double>(k);
  Eigen::MatrixXd V = (G / (G - 1.0)) * ((N - 1.0) / (N - K)) * bread * meat * bread;
  std::vector<double> se(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) se[static_cast<std::size_t>(j)] = std::sqrt(V(j, j));
  return se;
}

// HC1 heteroskedasticity-robust sandwich.
inline std::vector<double> hc1_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& u) {
  const Eigen::Index n = X.rows(), k = X.cols();
  Eigen::MatrixXd bread = (X.transpose() * X).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i)
    meat += u(i) * u(i) * X.row(i).transpose() * X.row(i);
  double N = static_cast<double>(n), K = static_cast<double>(k);
  Eigen::MatrixXd V = (N / (N - K)) * bread * meat * bread;
  std::vector<double> se(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) se[static_cast<std::size_t>(j)] = std::sqrt(V(j, j));
  return se;
}

// Classical homoskedastic standard errors.
inline std::vector<double> classical_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& u) {
  const Eigen::Index n = X.rows(), k = X.cols();
  double s2 = u.squaredNorm() / static_cast<double>(n - k);
  Eigen::MatrixXd V = s2 * (X.transpose() * X).inverse();
  std::vector<double> se(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) se[static_cast<std::size_t>(j)] = std::sqrt(V(j, j));
  return se;
}

}  // namespace oracles
