#include <doctest.h>

#include <random>

#include "appealscope/synth.hpp"
#include "appealscope/tweedie.hpp"
#include "oracles.hpp"

using namespace appealscope;

TEST_CASE("unit deviance: hand-computed values at p = 1.5") {
  // d(0, mu) collapses to 4 sqrt(mu).
  CHECK(tweedie_unit_deviance(0.0, 4.0, 1.5) == doctest::Approx(8.0).epsilon(1e-12));
  // d(4, 1): -8 sqrt(y) + 4 y / sqrt(mu) + 4 sqrt(mu) = -16 + 16 + 4.
  CHECK(tweedie_unit_deviance(4.0, 1.0, 1.5) == doctest::Approx(4.0).epsilon(1e-12));
  for (double mu : {0.25, 1.0, 3.7, 120.0})
    CHECK(tweedie_unit_deviance(mu, mu, 1.5) == doctest::Approx(0.0));
}

TEST_CASE("unit deviance: domain errors") {
  CHECK_THROWS_AS(tweedie_unit_deviance(1.0, 0.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(tweedie_unit_deviance(1.0, -2.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(tweedie_unit_deviance(-1.0, 1.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(tweedie_unit_deviance(1.0, 1.0, 2.5), std::domain_error);
}

TEST_CASE("unit deviance: nonnegative, zero only at y == mu") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> value(0.0, 50.0);
  std::uniform_real_distribution<double> power(1.05, 1.95);
  for (int i = 0; i < 5000; ++i) {
    double y = value(rng);
    double mu = value(rng) + 1e-6;
    double p = power(rng);
    double d = tweedie_unit_deviance(y, mu, p);
    CHECK(d >= 0.0);
    if (std::abs(y - mu) > 1e-6) CHECK(d > 0.0);
  }
}

TEST_CASE("estimate_dispersion: Pearson sum over residual degrees of freedom") {
  Vector y(2), mu(2);
  y << 0, 2;
  mu << 1, 1;
  // ((0-1)^2 + (2-1)^2) / (2 - 1)
  CHECK(estimate_dispersion(y, mu, 1.5, 1) == doctest::Approx(2.0));
  Vector y3(2);
  y3 << 0, 3;
  // ((0-1)^2 + (3-1)^2) / (2 - 1) = (1 + 4) / 1
  CHECK(estimate_dispersion(y3, mu, 1.5, 1) == doctest::Approx(5.0));

  Vector equal = mu;
  CHECK(estimate_dispersion(equal, mu, 1.5, 1) == doctest::Approx(0.0));

  // Doubling all residuals quadruples the estimate.
  Vector y2 = mu + 2.0 * (y - mu);
  CHECK(estimate_dispersion(y2, mu, 1.5, 1) ==
        doctest::Approx(4.0 * estimate_dispersion(y, mu, 1.5, 1)));

  CHECK_THROWS_AS(estimate_dispersion(y, mu, 1.5, 2), std::domain_error);
}

TEST_CASE("fit: intercept-only model matches ln(mean)") {
  Rng rng(77);
  Eigen::Index n = 400;
  Matrix X = Matrix::Ones(n, 1);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = sample_tweedie(2.5, 1.5, 1.0, rng);
  auto fit = fit_tweedie_glm(X, y);
  REQUIRE(fit.converged);
  CHECK(fit.coefficients[0] == doctest::Approx(std::log(y.mean())).epsilon(1e-8));
  // At the optimum the fitted mean matches the sample mean, so the
  // response-scale residuals average out.
  CHECK(std::abs(fit.residuals.mean()) < 1e-7);
}

TEST_CASE("fit: group-saturated design matches group means exactly") {
  // With a log link the score equations force the fitted mean of each
  // saturated group to equal its sample mean, for any variance power.
  Rng rng(500);
  Eigen::Index n = 600;
  Matrix X(n, 2);
  Vector y(n);
  double sum0 = 0, sum1 = 0;
  Eigen::Index n1 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = (i % 3 == 0) ? 1.0 : 0.0;
    double mu = X(i, 1) > 0 ? 0.8 : 3.0;
    y[i] = sample_tweedie(mu, 1.5, 1.0, rng);
    if (X(i, 1) > 0) {
      sum1 += y[i];
      ++n1;
    } else {
      sum0 += y[i];
    }
  }
  auto fit = fit_tweedie_glm(X, y, TweedieSpec{1.5, 100, 1e-12});
  REQUIRE(fit.converged);
  double mean0 = sum0 / double(n - n1), mean1 = sum1 / double(n1);
  CHECK(fit.coefficients[0] == doctest::Approx(std::log(mean0)).epsilon(1e-9));
  CHECK(fit.coefficients[1] ==
        doctest::Approx(std::log(mean1) - std::log(mean0)).epsilon(1e-9));
}

TEST_CASE("fit: standard errors match the dense information inverse") {
  Vector planted(3);
  planted << 0.7, -0.9, 0.3;
  auto problem = sample_glm_problem(800, planted, 1.5, 1.2, 606);
  auto fit = fit_tweedie_glm(problem.X, problem.y);
  REQUIRE(fit.converged);

  Vector mu = problem.y - fit.residuals;
  Matrix info = Matrix::Zero(3, 3);
  for (Eigen::Index i = 0; i < problem.X.rows(); ++i) {
    double w = std::pow(mu[i], 0.5);  // mu^(2-p) at p = 1.5
    info += w * problem.X.row(i).transpose() * problem.X.row(i);
  }
  Matrix cov = fit.dispersion * info.inverse();
  for (Eigen::Index j = 0; j < 3; ++j)
    CHECK(fit.standard_errors[j] ==
          doctest::Approx(std::sqrt(cov(j, j))).epsilon(1e-8));
}

TEST_CASE("fit: recovers planted coefficients within three reported SEs") {
  Vector planted(3);
  planted << 0.5, -2.0, 0.3;
  auto problem = sample_glm_problem(5000, planted, 1.5, 1.0, 424242);
  auto fit = fit_tweedie_glm(problem.X, problem.y);
  REQUIRE(fit.converged);
  for (Eigen::Index j = 0; j < planted.size(); ++j) {
    CAPTURE(j);
    CHECK(std::abs(fit.coefficients[j] - planted[j]) < 3.0 * fit.standard_errors[j]);
  }
  CHECK(fit.dispersion == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("fit: matches a derivative-free deviance minimizer to 1e-4") {
  Vector planted(3);
  planted << 0.8, -1.2, 0.4;
  auto problem = sample_glm_problem(500, planted, 1.5, 1.0, 20200910);
  auto fit = fit_tweedie_glm(problem.X, problem.y, TweedieSpec{1.5, 200, 1e-12});
  REQUIRE(fit.converged);

  auto objective = [&](const Eigen::VectorXd& beta) {
    return oracles::direct_total_deviance(problem.X, problem.y, beta, 1.5);
  };
  Eigen::VectorXd start = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd oracle = oracles::nelder_mead(objective, start, 0.5);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CAPTURE(j);
    CHECK(std::abs(fit.coefficients[j] - oracle[j]) < 1e-4);
  }
}

TEST_CASE("fit: deviance is non-increasing along the accepted path") {
  Vector planted(4);
  planted << 1.0, -0.7, 0.2, -0.1;
  auto problem = sample_glm_problem(1200, planted, 1.5, 1.3, 9);
  auto fit = fit_tweedie_glm(problem.X, problem.y);
  REQUIRE(fit.converged);
  REQUIRE(fit.deviance_path.size() >= 2);
  for (std::size_t i = 1; i < fit.deviance_path.size(); ++i)
    CHECK(fit.deviance_path[i] <= fit.deviance_path[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("fit: score vanishes at convergence (central differences)") {
  Vector planted(3);
  planted << 0.6, -1.0, 0.25;
  auto problem = sample_glm_problem(2000, planted, 1.5, 1.0, 333);
  auto fit = fit_tweedie_glm(problem.X, problem.y, TweedieSpec{1.5, 200, 1e-10});
  REQUIRE(fit.converged);
  const double h = 1e-5;
  for (Eigen::Index j = 0; j < 3; ++j) {
    Eigen::VectorXd up = fit.coefficients, down = fit.coefficients;
    up[j] += h;
    down[j] -= h;
    double grad = (oracles::direct_total_deviance(problem.X, problem.y, up, 1.5) -
                   oracles::direct_total_deviance(problem.X, problem.y, down, 1.5)) /
                  (2.0 * h);
    CHECK(std::abs(grad) < 1e-4 * double(problem.y.size()));
  }
}

TEST_CASE("fit: permutation invariance of the coefficients") {
  Vector planted(3);
  planted << 0.8, -0.5, 0.2;
  auto problem = sample_glm_problem(600, planted, 1.5, 1.0, 101);
  auto base = fit_tweedie_glm(problem.X, problem.y);

  std::vector<Eigen::Index> perm(600);
  for (Eigen::Index i = 0; i < 600; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(4);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix Xp(600, 3);
  Vector yp(600);
  for (Eigen::Index i = 0; i < 600; ++i) {
    Xp.row(i) = problem.X.row(perm[static_cast<std::size_t>(i)]);
    yp[i] = problem.y[perm[static_cast<std::size_t>(i)]];
  }
  auto shuffled = fit_tweedie_glm(Xp, yp);
  for (Eigen::Index j = 0; j < 3; ++j)
    CHECK(std::abs(base.coefficients[j] - shuffled.coefficients[j]) < 1e-10);
}

TEST_CASE("fit: rank-deficient design names the dependent columns") {
  Matrix X(50, 3);
  Rng rng(8);
  for (Eigen::Index i = 0; i < 50; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    X(i, 2) = X(i, 1);  // exact duplicate
  }
  Vector y(50);
  for (Eigen::Index i = 0; i < 50; ++i) y[i] = sample_tweedie(2.0, 1.5, 1.0, rng);
  try {
    fit_tweedie_glm(X, y);
    FAIL("expected RankDeficiencyError");
  } catch (const RankDeficiencyError& e) {
    REQUIRE(e.dependent_columns.size() == 1);
    // One of the duplicated pair must be reported.
    CHECK((e.dependent_columns[0] == 1 || e.dependent_columns[0] == 2));
  }
}

TEST_CASE("fit: hitting the iteration cap reports converged = false") {
  Vector planted(2);
  planted << 0.5, -1.0;
  auto problem = sample_glm_problem(300, planted, 1.5, 1.0, 55);
  auto fit = fit_tweedie_glm(problem.X, problem.y, TweedieSpec{1.5, 1, 1e-14});
  CHECK(!fit.converged);
  CHECK(fit.iterations_used == 1);
}

TEST_CASE("fit: rejects bad inputs") {
  Matrix X = Matrix::Ones(5, 1);
  Vector zeros = Vector::Zero(5);
  CHECK_THROWS_AS(fit_tweedie_glm(X, zeros), std::invalid_argument);
  Vector y = Vector::Ones(5);
  y[0] = -0.5;
  CHECK_THROWS_AS(fit_tweedie_glm(X, y), std::invalid_argument);
  CHECK_THROWS_AS(fit_tweedie_glm(Matrix::Ones(1, 1), Vector::Ones(1)),
                  std::invalid_argument);
}

TEST_CASE("significance stars follow the table thresholds") {
  CHECK(significance_stars(0.0005) == "***");
  CHECK(significance_stars(0.005) == "**");
  CHECK(significance_stars(0.03) == "*");
  CHECK(significance_stars(0.5) == "");
  CHECK(significance_stars(0.05) == "");  // boundary: strict
}

TEST_CASE("wald table carries names, stats and stars") {
  Vector planted(2);
  planted << 1.0, -0.8;
  auto problem = sample_glm_problem(3000, planted, 1.5, 1.0, 2024);
  auto fit = fit_tweedie_glm(problem.X, problem.y);
  REQUIRE(fit.converged);
  std::vector<std::string> names = {"intercept", "bot"};
  auto rows = wald_table(fit, names);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].term == "intercept");
  CHECK(rows[1].term == "bot");
  CHECK(rows[1].estimate == fit.coefficients[1]);
  CHECK(rows[1].p_value < 0.001);
  CHECK(rows[1].stars == "***");
  std::string text = format_wald_table(rows);
  CHECK(text.find("bot") != std::string::npos);

  FitResult unconverged = fit;
  unconverged.converged = false;
  CHECK_THROWS_AS(wald_table(unconverged, names), std::invalid_argument);
}
