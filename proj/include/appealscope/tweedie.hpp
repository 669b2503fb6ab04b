/*
 * Copyright 2026 the appealscope authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef APPEALSCOPE_TWEEDIE_HPP_
#define APPEALSCOPE_TWEEDIE_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace appealscope {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Variance-power family on (1,2): compound Poisson-Gamma, variance
// phi * mu^p, with an exact point mass at zero. Fitting uses a log link.
struct TweedieSpec {
  double power = 1.5;        // p, must lie in (1,2)
  int max_iterations = 100;
  double tolerance = 1e-8;   // relative deviance change between iterations
};

// Unit deviance
//   d(y, mu) = 2 [ y^(2-p)/((1-p)(2-p)) - y mu^(1-p)/(1-p) + mu^(2-p)/(2-p) ]
// with the y-power term dropped at y = 0. Nonnegative, zero iff y == mu;
// the result is clamped at 0 against rounding. Requires y >= 0, mu > 0,
// 1 < p < 2 (std::domain_error otherwise).
template <typename Scalar>
Scalar tweedie_unit_deviance(Scalar y, Scalar mu, Scalar p) {
  if (!(mu > Scalar(0))) throw std::domain_error("tweedie deviance: mu must be positive");
  if (!(y >= Scalar(0))) throw std::domain_error("tweedie deviance: y must be nonnegative");
  if (!(p > Scalar(1) && p < Scalar(2)))
    throw std::domain_error("tweedie deviance: power must lie in (1,2)");
  const Scalar one_minus_p = Scalar(1) - p;
  const Scalar two_minus_p = Scalar(2) - p;
  Scalar term_y = y > Scalar(0)
                      ? std::pow(y, two_minus_p) / (one_minus_p * two_minus_p)
                      : Scalar(0);
  Scalar term_cross = y * std::pow(mu, one_minus_p) / one_minus_p;
  Scalar term_mu = std::pow(mu, two_minus_p) / two_minus_p;
  Scalar d = Scalar(2) * (term_y - term_cross + term_mu);
  return d > Scalar(0) ? d : Scalar(0);
}

double tweedie_total_deviance(const Eigen::Ref<const Vector>& y,
                              const Eigen::Ref<const Vector>& mu, double p);

// Pearson estimator sum((y-mu)^2 / mu^p) / (n - k); requires n > k.
double estimate_dispersion(const Eigen::Ref<const Vector>& y,
                           const Eigen::Ref<const Vector>& mu, double p,
                           Eigen::Index k);

struct FitResult {
  Vector coefficients;    // intercept first, per design column
  Vector standard_errors;
  Vector z_statistics;
  Vector p_values;        // two-sided, standard normal reference
  double dispersion = 0.0;
  double deviance = 0.0;
  int iterations_used = 0;
  bool converged = false;
  Vector residuals;              // response scale, y - mu
  std::vector<double> deviance_path;  // total deviance after each accepted step
};

// Thrown when the design is not full column rank; carries the dependent
// column indices identified by the pivoted decomposition.
class RankDeficiencyError : public std::runtime_error {
 public:
  RankDeficiencyError(std::string message, std::vector<Eigen::Index> columns)
      : std::runtime_error(std::move(message)), dependent_columns(std::move(columns)) {}
  std::vector<Eigen::Index> dependent_columns;
};

// Maximum quasi-likelihood fit by iteratively reweighted least squares
// under the log link: mu = exp(X beta), working weights mu^(2-p), working
// response eta + (y - mu)/mu. Each weighted subproblem is solved through
// a column-pivoted QR of the weighted design. A step that increases the
// deviance is halved back toward the previous iterate, up to 20 times.
// Requires n > k, X full column rank, y >= 0 with at least one positive
// entry. Non-convergence is reported, not thrown.
FitResult fit_tweedie_glm(const Eigen::Ref<const Matrix>& X,
                          const Eigen::Ref<const Vector>& y,
                          const TweedieSpec& spec = {});

// --- inference table ---------------------------------------------------------

struct WaldRow {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p_value = 0.0;
  std::string stars;
};

// "***" below 0.001, "**" below 0.01, "*" below 0.05, empty otherwise.
std::string significance_stars(double p_value);

std::vector<WaldRow> wald_table(const FitResult& fit, std::span<const std::string> names);

// Fixed-width text rendering, deterministic.
std::string format_wald_table(std::span<const WaldRow> rows);

}  // namespace appealscope

#endif  // APPEALSCOPE_TWEEDIE_HPP_
