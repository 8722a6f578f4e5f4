#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "pressad/csv.hpp"
#include "pressad/errors.hpp"
#include "pressad/panel.hpp"

namespace pressad {

enum class Dependent { sentiment_total, article_count };

inline std::optional<Dependent> dependent_from_string(std::string_view s) {
  if (s == "sentiment" || s == "sentiment_total") return Dependent::sentiment_total;
  if (s == "count" || s == "article_count") return Dependent::article_count;
  return std::nullopt;
}

inline const char* to_string(Dependent d) {
  return d == Dependent::sentiment_total ? "sentiment_total" : "article_count";
}

enum class FixedEffects { none, group, time, both };

inline std::optional<FixedEffects> fixed_effects_from_string(std::string_view s) {
  if (s == "none") return FixedEffects::none;
  if (s == "group") return FixedEffects::group;
  if (s == "time") return FixedEffects::time;
  if (s == "both") return FixedEffects::both;
  return std::nullopt;
}

inline const char* to_string(FixedEffects fe) {
  switch (fe) {
    case FixedEffects::none: return "none";
    case FixedEffects::group: return "group";
    case FixedEffects::time: return "time";
    case FixedEffects::both: return "both";
  }
  return "?";
}

struct RegressionSpec {
  Dependent dependent = Dependent::sentiment_total;
  bool use_popularity = false;
  FixedEffects fixed_effects = FixedEffects::both;
  // Regress per-article mean sentiment instead of the period sum.
  bool sentiment_as_mean = false;
  // Cluster variable is always the entity; the group effect is source x entity.
};

// Least squares via column-pivoted Householder QR. Throws NumericError on a
// rank-deficient design, naming the collinear columns.
inline Eigen::VectorXd ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                           const std::vector<std::string>* column_names = nullptr) {
  if (X.rows() != y.size()) throw DomainError("ols: X and y row counts differ");
  if (X.rows() < X.cols()) throw NumericError("ols: fewer observations than columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    std::string msg = "ols: rank-deficient design (rank " + std::to_string(qr.rank()) +
                      " of " + std::to_string(X.cols()) + ")";
    // pivots beyond the numerical rank identify the dependent columns
    const auto& perm = qr.colsPermutation().indices();
    std::string cols;
    for (Eigen::Index i = qr.rank(); i < X.cols(); ++i) {
      if (!cols.empty()) cols += ", ";
      Eigen::Index j = perm(i);
      cols += column_names && j < static_cast<Eigen::Index>(column_names->size())
                  ? (*column_names)[j]
                  : "column " + std::to_string(j);
    }
    throw NumericError(msg + "; collinear: " + cols);
  }
  return qr.solve(y);
}

struct WithinOptions {
  double tolerance = 1e-10;
  std::size_t max_sweeps = 10000;
};

struct WithinResult {
  std::size_t sweeps = 0;
  bool converged = true;
};

namespace detail {

inline void demean_by(Eigen::MatrixXd& M, const std::vector<int>& groups, int n_groups) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_groups, M.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_groups);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    sums.row(groups[static_cast<std::size_t>(i)]) += M.row(i);
    counts(groups[static_cast<std::size_t>(i)]) += 1;
  }
  for (int g = 0; g < n_groups; ++g)
    if (counts(g) > 0) sums.row(g) /= counts(g);
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    M.row(i) -= sums.row(groups[static_cast<std::size_t>(i)]);
}

}  // namespace detail

// Removes fixed effects by demeaning every column of M within groups. With
// two dimensions it alternates demeaning until the largest change in one
// full sweep drops below tolerance, which matches the dummy-variable
// projection on balanced and unbalanced panels alike.
inline WithinResult within_transform(Eigen::MatrixXd& M, const std::vector<int>* groups_a,
                                     int n_a, const std::vector<int>* groups_b, int n_b,
                                     const WithinOptions& opts = {}) {
  WithinResult res;
  if (groups_a && !groups_b) {
    detail::demean_by(M, *groups_a, n_a);
    res.sweeps = 1;
    return res;
  }
  if (!groups_a && groups_b) {
    detail::demean_by(M, *groups_b, n_b);
    res.sweeps = 1;
    return res;
  }
  if (!groups_a && !groups_b) return res;

  for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    Eigen::MatrixXd before = M;
    detail::demean_by(M, *groups_a, n_a);
    detail::demean_by(M, *groups_b, n_b);
    res.sweeps = sweep;
    double delta = (M - before).cwiseAbs().maxCoeff();
    if (delta < opts.tolerance) return res;
  }
  res.converged = false;
  throw NumericError("within_transform: alternating demeaning did not converge after " +
                     std::to_string(opts.max_sweeps) + " sweeps (tolerance " +
                     fmt_double(opts.tolerance) + ")");
}

// Cluster-robust sandwich covariance:
//   (X'X)^{-1} [ sum_g X_g' u_g u_g' X_g ] (X'X)^{-1}
// scaled by G/(G-1) x (N-1)/(N-K); p-values downstream use G-1 degrees of
// freedom. Requires at least two clusters.
inline Eigen::MatrixXd clustered_vcov(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                                      const std::vector<int>& clusters, int n_clusters) {
  if (n_clusters < 2)
    throw NumericError(
        "clustered standard errors need >= 2 clusters; use plain robust (HC1) errors for a "
        "single cluster");
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (residuals.size() != n || static_cast<Eigen::Index>(clusters.size()) != n)
    throw DomainError("clustered_vcov: size mismatch");
  if (n <= k) throw NumericError("clustered_vcov: no residual degrees of freedom");

  Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n_clusters, k);
  for (Eigen::Index i = 0; i < n; ++i)
    scores.row(clusters[static_cast<std::size_t>(i)]) += residuals(i) * X.row(i);
  Eigen::MatrixXd meat = scores.transpose() * scores;

  const double G = static_cast<double>(n_clusters);
  const double N = static_cast<double>(n);
  const double K = static_cast<double>(k);
  const double c = G / (G - 1.0) * (N - 1.0) / (N - K);
  return c * xtx_inv * meat * xtx_inv;
}

inline std::vector<double> clustered_se(const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& residuals,
                                        const std::vector<int>& clusters, int n_clusters) {
  Eigen::MatrixXd V = clustered_vcov(X, residuals, clusters, n_clusters);
  std::vector<double> se(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    se[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, V(j, j)));
  return se;
}

inline std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

struct CoefficientEstimate {
  std::string name;
  double estimate = 0;
  double se = 0;
  double t_stat = 0;
  double p_value = 1;
  std::string stars;
};

struct RegressionResult {
  Dependent dependent = Dependent::sentiment_total;
  FixedEffects fixed_effects = FixedEffects::both;
  std::vector<CoefficientEstimate> coefficients;  // regressors (and intercept when present)
  double r_squared = 0;  // within-R² once fixed effects are absorbed
  std::size_t observations = 0;
  std::size_t entity_count = 0;
  std::size_t period_count = 0;
  std::size_t cluster_count = 0;
  std::size_t popularity_excluded = 0;  // rows without popularity, popularity specs only
  std::size_t demeaning_sweeps = 0;

  const CoefficientEstimate& coefficient(const std::string& name) const {
    for (const auto& c : coefficients)
      if (c.name == name) return c;
    throw DomainError("no coefficient named " + name);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["dependent"] = to_string(dependent);
    j["fixed_effects"] = to_string(fixed_effects);
    auto arr = nlohmann::json::array();
    for (const auto& c : coefficients) {
      arr.push_back({{"name", c.name},
                     {"estimate", c.estimate},
                     {"clustered_se", c.se},
                     {"t", c.t_stat},
                     {"p", c.p_value},
                     {"stars", c.stars}});
    }
    j["coefficients"] = std::move(arr);
    j["r_squared"] = r_squared;
    j["observations"] = observations;
    j["entities"] = entity_count;
    j["periods"] = period_count;
    j["clusters"] = cluster_count;
    j["popularity_excluded"] = popularity_excluded;
    return j;
  }
};

// Within-transform per spec, OLS on the transformed data, entity-clustered
// standard errors, and t-based p-values with G-1 degrees of freedom.
inline RegressionResult fit(const RegressionSpec& spec,
                            std::span<const PanelObservation> panel,
                            const WithinOptions& within_opts = {}) {
  std::vector<const PanelObservation*> rows;
  std::size_t popularity_excluded = 0;
  for (const PanelObservation& r : panel) {
    if (spec.use_popularity && !r.popularity) {
      ++popularity_excluded;
      continue;
    }
    rows.push_back(&r);
  }
  if (rows.size() < 3) throw NumericError("fit: too few usable panel rows");
  // canonical row order makes the fit bit-identical under input permutation
  std::sort(rows.begin(), rows.end(),
            [](const PanelObservation* a, const PanelObservation* b) {
              return std::tie(a->entity, a->source, a->period) <
                     std::tie(b->entity, b->source, b->period);
            });

  const bool use_group =
      spec.fixed_effects == FixedEffects::group || spec.fixed_effects == FixedEffects::both;
  const bool use_time =
      spec.fixed_effects == FixedEffects::time || spec.fixed_effects == FixedEffects::both;
  const bool intercept = !use_group && !use_time;

  std::map<std::string, int> group_ids, time_ids, entity_ids;
  std::set<std::string> periods;
  std::vector<int> groups(rows.size()), times(rows.size()), clusters(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PanelObservation& r = *rows[i];
    groups[i] = group_ids.emplace(r.source + "\x1f" + r.entity,
                                  static_cast<int>(group_ids.size())).first->second;
    times[i] = time_ids.emplace(r.period, static_cast<int>(time_ids.size())).first->second;
    clusters[i] =
        entity_ids.emplace(r.entity, static_cast<int>(entity_ids.size())).first->second;
    periods.insert(r.period);
  }

  std::vector<std::string> names;
  names.push_back("weighted_ad_ratio");
  if (spec.use_popularity) names.push_back("popularity");
  if (intercept) names.push_back("intercept");
  const std::size_t k = names.size();

  // column 0 is y; the rest are the design
  Eigen::MatrixXd M(rows.size(), 1 + k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PanelObservation& r = *rows[i];
    double y_i;
    if (spec.dependent == Dependent::sentiment_total) {
      y_i = static_cast<double>(r.sentiment_total);
      if (spec.sentiment_as_mean)
        y_i = r.article_count > 0 ? y_i / static_cast<double>(r.article_count) : 0.0;
    } else {
      y_i = static_cast<double>(r.article_count);
    }
    M(static_cast<Eigen::Index>(i), 0) = y_i;
    M(static_cast<Eigen::Index>(i), 1) = r.weighted_ad_ratio;
    Eigen::Index col = 2;
    if (spec.use_popularity) M(static_cast<Eigen::Index>(i), col++) = *r.popularity;
    if (intercept) M(static_cast<Eigen::Index>(i), col++) = 1.0;
  }

  WithinResult within;
  if (use_group || use_time)
    within = within_transform(M, use_group ? &groups : nullptr,
                              static_cast<int>(group_ids.size()),
                              use_time ? &times : nullptr,
                              static_cast<int>(time_ids.size()), within_opts);

  Eigen::VectorXd y = M.col(0);
  Eigen::MatrixXd X = M.rightCols(static_cast<Eigen::Index>(k));
  Eigen::VectorXd beta = ols(y, X, &names);
  Eigen::VectorXd residuals = y - X * beta;

  auto se = clustered_se(X, residuals, clusters, static_cast<int>(entity_ids.size()));

  RegressionResult res;
  res.dependent = spec.dependent;
  res.fixed_effects = spec.fixed_effects;
  res.observations = rows.size();
  res.entity_count = entity_ids.size();
  res.period_count = periods.size();
  res.cluster_count = entity_ids.size();
  res.popularity_excluded = spec.use_popularity ? popularity_excluded : 0;
  res.demeaning_sweeps = within.sweeps;

  boost::math::students_t t_dist(static_cast<double>(entity_ids.size()) - 1.0);
  for (std::size_t j = 0; j < k; ++j) {
    CoefficientEstimate c;
    c.name = names[j];
    c.estimate = beta(static_cast<Eigen::Index>(j));
    c.se = se[j];
    if (c.se > 0) {
      c.t_stat = c.estimate / c.se;
      c.p_value = 2.0 * boost::math::cdf(boost::math::complement(t_dist, std::abs(c.t_stat)));
    } else {
      // exact fit: no residual variation
      c.t_stat = c.estimate == 0 ? 0 : std::numeric_limits<double>::infinity();
      c.p_value = c.estimate == 0 ? 1 : 0;
    }
    c.stars = significance_stars(c.p_value);
    res.coefficients.push_back(std::move(c));
  }

  double tss = (y.array() - y.mean()).square().sum();
  double ssr = residuals.squaredNorm();
  res.r_squared = tss > 0 ? 1.0 - ssr / tss : 0.0;
  return res;
}

}  // namespace pressad
