#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "pressad/regression.hpp"
#include "pressad/synth.hpp"
#include "support/oracles.hpp"

using namespace pressad;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int n, int k) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) X(i, j) = gauss(rng);
  return X;
}

}  // namespace

TEST_CASE("ols solves exact and trivial systems") {
  Eigen::VectorXd x(4);
  x << 1, 2, 3, 4;
  Eigen::VectorXd y = 2 * x;
  Eigen::MatrixXd X = x;
  auto beta = ols(y, X);
  CHECK_THAT(beta(0), WithinAbs(2.0, 1e-12));

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(5);
  Eigen::VectorXd constant = Eigen::VectorXd::Constant(5, 7.5);
  auto intercept = ols(constant, ones);
  CHECK_THAT(intercept(0), WithinAbs(7.5, 1e-12));
}

TEST_CASE("ols matches the normal-equations oracle on random systems") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd X = random_matrix(rng, 50, 3);
    Eigen::VectorXd y = random_matrix(rng, 50, 1);
    auto beta = ols(y, X);
    auto oracle = oracles::normal_equations_ols(y, X);
    for (int j = 0; j < 3; ++j) CHECK_THAT(beta(j), WithinAbs(oracle(j), 1e-10));
  }
}

TEST_CASE("rank-deficient designs fail naming the collinear column") {
  std::mt19937_64 rng(7);
  Eigen::MatrixXd X = random_matrix(rng, 30, 3);
  X.col(2) = 2.0 * X.col(0);  // exact collinearity
  Eigen::VectorXd y = random_matrix(rng, 30, 1);
  std::vector<std::string> names = {"war", "popularity", "war_copy"};
  try {
    ols(y, X, &names);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    std::string msg = e.what();
    CHECK(msg.find("rank-deficient") != std::string::npos);
    bool names_one = msg.find("war") != std::string::npos;
    CHECK(names_one);
  }
}

TEST_CASE("one-way within transform zeroes group means") {
  std::mt19937_64 rng(3);
  Eigen::MatrixXd M = random_matrix(rng, 40, 3);
  std::vector<int> groups(40);
  for (int i = 0; i < 40; ++i) groups[static_cast<std::size_t>(i)] = i % 5;
  within_transform(M, &groups, 5, nullptr, 0);
  for (int g = 0; g < 5; ++g) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
    int n = 0;
    for (int i = 0; i < 40; ++i)
      if (groups[static_cast<std::size_t>(i)] == g) {
        mean += M.row(i);
        ++n;
      }
    mean /= n;
    for (int j = 0; j < 3; ++j) CHECK_THAT(mean(j), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("balanced two-way transform matches the closed form") {
  // 2x2 balanced panel: y_it - y_i. - y_.t + y_..
  Eigen::MatrixXd M(4, 1);
  M << 3.0, 5.0, 4.0, 10.0;
  std::vector<int> unit = {0, 0, 1, 1};
  std::vector<int> time = {0, 1, 0, 1};

  Eigen::MatrixXd expected(4, 1);
  double grand = (3 + 5 + 4 + 10) / 4.0;
  double u0 = (3 + 5) / 2.0, u1 = (4 + 10) / 2.0;
  double t0 = (3 + 4) / 2.0, t1 = (5 + 10) / 2.0;
  expected << 3 - u0 - t0 + grand, 5 - u0 - t1 + grand, 4 - u1 - t0 + grand,
      10 - u1 - t1 + grand;

  within_transform(M, &unit, 2, &time, 2);
  for (int i = 0; i < 4; ++i) CHECK_THAT(M(i, 0), WithinAbs(expected(i, 0), 1e-9));
}

TEST_CASE("two-way demeaning reports non-convergence with diagnostics") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd M = random_matrix(rng, 30, 2);
  std::vector<int> a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[static_cast<std::size_t>(i)] = i % 5;
    b[static_cast<std::size_t>(i)] = (i / 3) % 4;
  }
  WithinOptions opts;
  opts.max_sweeps = 1;
  try {
    within_transform(M, &a, 5, &b, 4, opts);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    std::string msg = e.what();
    CHECK(msg.find("did not converge") != std::string::npos);
    CHECK(msg.find("1 sweeps") != std::string::npos);
  }
}

TEST_CASE("FWL: within estimator equals dummy-variable OLS on unbalanced panels") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    SynthPanelConfig cfg;
    cfg.seed = seed;
    cfg.entities = 8;
    cfg.sources = 2;
    cfg.periods = 10;
    cfg.keep_probability = 0.8;
    auto panel = synth_panel(cfg);

    for (FixedEffects fe : {FixedEffects::group, FixedEffects::time, FixedEffects::both}) {
      RegressionSpec spec;
      spec.fixed_effects = fe;
      auto result = fit(spec, panel.rows);
      auto oracle = oracles::dummy_variable_ols(panel.rows, spec);
      CHECK_THAT(result.coefficient("weighted_ad_ratio").estimate,
                 WithinAbs(oracle.beta_war, 1e-8));
    }
  }
}

TEST_CASE("FWL holds on a weakly connected two-way panel") {
  // groups chained through single shared periods: the slow case for
  // alternating projections
  std::vector<PanelObservation> panel;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int n_entities = 6, n_periods = 12;
  for (int e = 0; e < n_entities; ++e) {
    // each entity observed in its own two periods plus one bridging period
    std::vector<int> periods = {2 * e, 2 * e + 1, (2 * e + 2) % n_periods};
    for (int t : periods) {
      PanelObservation r;
      r.entity = "e" + std::to_string(e);
      r.source = "s";
      r.period = "t" + std::to_string(t);
      r.weighted_ad_ratio = unit(rng);
      r.sentiment_total = std::llround(0.7 * r.weighted_ad_ratio + e - t + gauss(rng));
      r.article_count = 1;
      panel.push_back(r);
    }
  }
  RegressionSpec spec;
  spec.fixed_effects = FixedEffects::both;
  auto result = fit(spec, panel);
  auto oracle = oracles::dummy_variable_ols(panel, spec);
  CHECK_THAT(result.coefficient("weighted_ad_ratio").estimate,
             WithinAbs(oracle.beta_war, 1e-8));
  CHECK(result.demeaning_sweeps > 1);  // genuinely iterative on this shape
}

TEST_CASE("clustered SEs with singleton clusters equal HC1") {
  std::mt19937_64 rng(202);
  Eigen::MatrixXd X = random_matrix(rng, 40, 2);
  Eigen::VectorXd y = random_matrix(rng, 40, 1);
  auto beta = ols(y, X);
  Eigen::VectorXd u = y - X * beta;
  std::vector<int> clusters(40);
  for (int i = 0; i < 40; ++i) clusters[static_cast<std::size_t>(i)] = i;

  auto clustered = clustered_se(X, u, clusters, 40);
  auto hc1 = oracles::hc1_se(X, u);
  for (std::size_t j = 0; j < 2; ++j) CHECK_THAT(clustered[j], WithinAbs(hc1[j], 1e-10));
}

TEST_CASE("clustered SEs match the brute-force sandwich oracle") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 60;
    Eigen::MatrixXd X = random_matrix(rng, n, 3);
    Eigen::VectorXd y = random_matrix(rng, n, 1);
    std::vector<int> clusters(static_cast<std::size_t>(n));
    int G = 6;
    for (int i = 0; i < n; ++i) clusters[static_cast<std::size_t>(i)] = i % G;
    auto beta = ols(y, X);
    Eigen::VectorXd u = y - X * beta;
    auto ours = clustered_se(X, u, clusters, G);
    auto oracle = oracles::brute_force_clustered_se(X, u, clusters, G);
    for (std::size_t j = 0; j < 3; ++j) CHECK_THAT(ours[j], WithinAbs(oracle[j], 1e-10));
  }
}

TEST_CASE("duplicating observations preserves beta and clustered SEs, shrinks naive SEs") {
  std::mt19937_64 rng(404);
  int n = 50, G = 10;
  Eigen::MatrixXd X = random_matrix(rng, n, 2);
  Eigen::VectorXd y = random_matrix(rng, n, 1);
  std::vector<int> clusters(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) clusters[static_cast<std::size_t>(i)] = i % G;

  Eigen::MatrixXd X2(2 * n, 2);
  X2 << X, X;
  Eigen::VectorXd y2(2 * n);
  y2 << y, y;
  std::vector<int> clusters2 = clusters;
  clusters2.insert(clusters2.end(), clusters.begin(), clusters.end());

  auto beta = ols(y, X);
  auto beta2 = ols(y2, X2);
  for (int j = 0; j < 2; ++j) CHECK_THAT(beta2(j), WithinAbs(beta(j), 1e-10));

  Eigen::VectorXd u = y - X * beta;
  Eigen::VectorXd u2 = y2 - X2 * beta2;
  auto naive = oracles::classical_se(X, u);
  auto naive2 = oracles::classical_se(X2, u2);
  auto cl = clustered_se(X, u, clusters, G);
  auto cl2 = clustered_se(X2, u2, clusters2, G);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(naive2[j] < 0.8 * naive[j]);          // naive SEs shrink roughly by sqrt(2)
    CHECK(cl2[j] / cl[j] > 0.95);               // cluster structure keeps the SE
    CHECK(cl2[j] / cl[j] < 1.05);
  }
}

TEST_CASE("a single cluster is rejected with advice") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
  Eigen::VectorXd u = Eigen::VectorXd::Random(10);
  std::vector<int> clusters(10, 0);
  try {
    clustered_se(X, u, clusters, 1);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("HC1") != std::string::npos);
  }
}

TEST_CASE("homoskedastic independent data: clustered close to classical SEs") {
  std::mt19937_64 rng(505);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double total_ratio = 0;
  int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    int n = 200, G = 40;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = gauss(rng);
      y(i) = 0.5 + 0.3 * X(i, 1) + gauss(rng);
    }
    std::vector<int> clusters(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) clusters[static_cast<std::size_t>(i)] = i % G;
    auto beta = ols(y, X);
    Eigen::VectorXd u = y - X * beta;
    auto cl = clustered_se(X, u, clusters, G);
    auto classical = oracles::classical_se(X, u);
    total_ratio += cl[1] / classical[1];
  }
  double mean_ratio = total_ratio / trials;
  CHECK(mean_ratio > 0.75);
  CHECK(mean_ratio < 1.25);
}

TEST_CASE("fit with no fixed effects equals plain OLS with intercept") {
  SynthPanelConfig cfg;
  cfg.seed = 9;
  cfg.entities = 10;
  cfg.periods = 8;
  cfg.sigma_group = 0.0;  // no fixed-effect structure in the truth
  cfg.sigma_time = 0.0;
  auto panel = synth_panel(cfg);

  RegressionSpec spec;
  spec.fixed_effects = FixedEffects::none;
  auto result = fit(spec, panel.rows);

  Eigen::Index n = static_cast<Eigen::Index>(panel.rows.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = panel.rows[static_cast<std::size_t>(i)].weighted_ad_ratio;
    X(i, 1) = 1.0;
    y(i) = static_cast<double>(panel.rows[static_cast<std::size_t>(i)].sentiment_total);
  }
  auto oracle = oracles::normal_equations_ols(y, X);
  CHECK_THAT(result.coefficient("weighted_ad_ratio").estimate, WithinAbs(oracle(0), 1e-9));
  CHECK_THAT(result.coefficient("intercept").estimate, WithinAbs(oracle(1), 1e-9));
}

TEST_CASE("scaling the regressor scales beta inversely and keeps t-statistics") {
  SynthPanelConfig cfg;
  cfg.seed = 21;
  cfg.entities = 12;
  cfg.periods = 10;
  auto panel = synth_panel(cfg);

  RegressionSpec spec;
  spec.fixed_effects = FixedEffects::both;
  auto base = fit(spec, panel.rows);

  const double c = 8.0;
  auto scaled_rows = panel.rows;
  for (auto& r : scaled_rows) r.weighted_ad_ratio *= c;
  auto scaled = fit(spec, scaled_rows);

  CHECK_THAT(scaled.coefficient("weighted_ad_ratio").estimate * c,
             WithinAbs(base.coefficient("weighted_ad_ratio").estimate, 1e-9));
  CHECK_THAT(scaled.coefficient("weighted_ad_ratio").t_stat,
             WithinAbs(base.coefficient("weighted_ad_ratio").t_stat, 1e-9));
}

TEST_CASE("adding a constant to y moves only the intercept") {
  SynthPanelConfig cfg;
  cfg.seed = 33;
  cfg.entities = 9;
  cfg.periods = 7;
  cfg.integerize = true;
  auto panel = synth_panel(cfg);

  auto shifted_rows = panel.rows;
  for (auto& r : shifted_rows) r.sentiment_total += 100;

  RegressionSpec none;
  none.fixed_effects = FixedEffects::none;
  auto a = fit(none, panel.rows);
  auto b = fit(none, shifted_rows);
  CHECK_THAT(b.coefficient("weighted_ad_ratio").estimate,
             WithinAbs(a.coefficient("weighted_ad_ratio").estimate, 1e-10));
  CHECK_THAT(b.coefficient("intercept").estimate,
             WithinAbs(a.coefficient("intercept").estimate + 100.0, 1e-9));

  RegressionSpec both;
  both.fixed_effects = FixedEffects::both;
  auto c = fit(both, panel.rows);
  auto d = fit(both, shifted_rows);
  CHECK_THAT(d.coefficient("weighted_ad_ratio").estimate,
             WithinAbs(c.coefficient("weighted_ad_ratio").estimate, 1e-10));
}

TEST_CASE("permuting panel rows changes nothing") {
  SynthPanelConfig cfg;
  cfg.seed = 55;
  cfg.entities = 10;
  cfg.periods = 9;
  auto panel = synth_panel(cfg);

  auto shuffled = panel.rows;
  std::mt19937_64 rng(99);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  RegressionSpec spec;
  spec.fixed_effects = FixedEffects::both;
  auto a = fit(spec, panel.rows);
  auto b = fit(spec, shuffled);
  // bit-identical: fit orders rows canonically before any arithmetic
  CHECK(b.coefficient("weighted_ad_ratio").estimate ==
        a.coefficient("weighted_ad_ratio").estimate);
  CHECK(b.coefficient("weighted_ad_ratio").se == a.coefficient("weighted_ad_ratio").se);
  CHECK(b.r_squared == a.r_squared);
  CHECK(a.observations == b.observations);
  CHECK(a.entity_count == b.entity_count);
}

TEST_CASE("star assignment is a pure threshold function") {
  CHECK(significance_stars(0.005) == "***");
  CHECK(significance_stars(0.01) == "**");
  CHECK(significance_stars(0.03) == "**");
  CHECK(significance_stars(0.05) == "*");
  CHECK(significance_stars(0.09) == "*");
  CHECK(significance_stars(0.1) == "");
  CHECK(significance_stars(0.7) == "");
}

TEST_CASE("popularity rows without values are excluded and counted") {
  SynthPanelConfig cfg;
  cfg.seed = 61;
  cfg.entities = 8;
  cfg.periods = 8;
  cfg.with_popularity = true;
  cfg.beta_popularity = 0.01;
  auto panel = synth_panel(cfg);
  for (std::size_t i = 0; i < panel.rows.size(); i += 4) panel.rows[i].popularity.reset();

  RegressionSpec spec;
  spec.fixed_effects = FixedEffects::both;
  spec.use_popularity = true;
  auto result = fit(spec, panel.rows);
  CHECK(result.popularity_excluded == (panel.rows.size() + 3) / 4);
  CHECK(result.observations == panel.rows.size() - result.popularity_excluded);
  CHECK(result.coefficients.size() == 2);
  CHECK(result.coefficient("popularity").se > 0.0);
}

TEST_CASE("sentiment can also be regressed as a per-article mean") {
  std::vector<PanelObservation> panel;
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  for (int e = 0; e < 6; ++e)
    for (int t = 0; t < 6; ++t) {
      PanelObservation r;
      r.entity = "e" + std::to_string(e);
      r.source = "s";
      r.period = "t" + std::to_string(t);
      r.weighted_ad_ratio = unit(rng);
      r.article_count = 2 + (e + t) % 5;
      r.sentiment_total = (e + 3 * t) % (r.article_count + 1);
      panel.push_back(r);
    }

  RegressionSpec mean_spec;
  mean_spec.fixed_effects = FixedEffects::none;
  mean_spec.sentiment_as_mean = true;
  auto mean_fit = fit(mean_spec, panel);

  Eigen::Index n = static_cast<Eigen::Index>(panel.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = panel[static_cast<std::size_t>(i)];
    X(i, 0) = r.weighted_ad_ratio;
    X(i, 1) = 1.0;
    y(i) = static_cast<double>(r.sentiment_total) / static_cast<double>(r.article_count);
  }
  auto oracle = oracles::normal_equations_ols(y, X);
  CHECK_THAT(mean_fit.coefficient("weighted_ad_ratio").estimate,
             WithinAbs(oracle(0), 1e-10));

  RegressionSpec sum_spec;
  sum_spec.fixed_effects = FixedEffects::none;
  auto sum_fit = fit(sum_spec, panel);
  CHECK(sum_fit.coefficient("weighted_ad_ratio").estimate !=
        mean_fit.coefficient("weighted_ad_ratio").estimate);
}

TEST_CASE("fit reports entity and period counts and a within R2 in [0,1]") {
  SynthPanelConfig cfg;
  cfg.seed = 71;
  cfg.entities = 14;
  cfg.periods = 11;
  auto panel = synth_panel(cfg);
  RegressionSpec spec;
  spec.fixed_effects = FixedEffects::both;
  auto result = fit(spec, panel.rows);
  CHECK(result.entity_count == 14);
  CHECK(result.period_count == 11);
  CHECK(result.cluster_count == 14);
  CHECK(result.observations == panel.rows.size());
  CHECK(result.r_squared >= 0.0);
  CHECK(result.r_squared <= 1.0);
  CHECK(result.coefficient("weighted_ad_ratio").se > 0.0);
}

TEST_CASE("planted coefficients are recovered within three clustered SEs") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthPanelConfig cfg;
    cfg.seed = seed;
    cfg.entities = 25;
    cfg.periods = 18;
    cfg.beta_war = 0.0189;
    cfg.sigma_noise = 0.4;
    auto panel = synth_panel(cfg);
    RegressionSpec spec;
    spec.fixed_effects = FixedEffects::both;
    auto result = fit(spec, panel.rows);
    const auto& war = result.coefficient("weighted_ad_ratio");
    if (std::abs(war.estimate - 0.0189) <= 3.0 * war.se) ++hits;
  }
  CHECK(hits >= 19);
}
