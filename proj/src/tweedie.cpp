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

#include "appealscope/tweedie.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace appealscope {

double tweedie_total_deviance(const Eigen::Ref<const Vector>& y,
                              const Eigen::Ref<const Vector>& mu, double p) {
  if (y.size() != mu.size())
    throw std::invalid_argument("total deviance: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    total += tweedie_unit_deviance(y[i], mu[i], p);
  return total;
}

double estimate_dispersion(const Eigen::Ref<const Vector>& y,
                           const Eigen::Ref<const Vector>& mu, double p,
                           Eigen::Index k) {
  if (y.size() != mu.size())
    throw std::invalid_argument("dispersion: length mismatch");
  if (y.size() <= k)
    throw std::domain_error("dispersion: need more observations than parameters");
  double pearson = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double resid = y[i] - mu[i];
    pearson += resid * resid / std::pow(mu[i], p);
  }
  return pearson / static_cast<double>(y.size() - k);
}

namespace {

double standard_normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

FitResult fit_tweedie_glm(const Eigen::Ref<const Matrix>& X,
                          const Eigen::Ref<const Vector>& y,
                          const TweedieSpec& spec) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (y.size() != n) throw std::invalid_argument("fit: X and y row counts differ");
  if (n <= k) throw std::invalid_argument("fit: need more observations than columns");
  if (!(spec.power > 1.0 && spec.power < 2.0))
    throw std::domain_error("fit: power must lie in (1,2)");
  if ((y.array() < 0.0).any()) throw std::invalid_argument("fit: negative response");
  if (!(y.array() > 0.0).any())
    throw std::invalid_argument("fit: response is identically zero");

  const double p = spec.power;
  const double ybar = y.mean();

  // Warm start away from log(0): mu0 = (y + ybar)/2.
  Vector mu = (y.array() + ybar) / 2.0;
  Vector eta = mu.array().log();
  Vector beta = Vector::Zero(k);
  double deviance = tweedie_total_deviance(y, mu, p);

  FitResult result;

  Eigen::ColPivHouseholderQR<Matrix> qr;
  Matrix weighted_design(n, k);
  Vector weighted_response(n);
  bool have_beta = false;

  int iter = 0;
  for (; iter < spec.max_iterations; ++iter) {
    // Working weights mu^(2-p) and working response eta + (y-mu)/mu.
    Vector w_sqrt = mu.array().pow((2.0 - p) / 2.0);
    Vector z = eta.array() + (y - mu).array() / mu.array();

    weighted_design = w_sqrt.asDiagonal() * X;
    weighted_response = w_sqrt.asDiagonal() * z;

    qr.compute(weighted_design);
    if (qr.rank() < k) {
      std::vector<Eigen::Index> dependent;
      const auto& perm = qr.colsPermutation().indices();
      for (Eigen::Index j = qr.rank(); j < k; ++j)
        dependent.push_back(perm[j]);
      std::sort(dependent.begin(), dependent.end());
      std::string msg = "fit: design is rank deficient; dependent columns:";
      for (auto c : dependent) msg += ' ' + std::to_string(c);
      throw RankDeficiencyError(std::move(msg), std::move(dependent));
    }
    Vector beta_new = qr.solve(weighted_response);

    // Step-halving line search toward the previous iterate when the
    // deviance rises or turns non-finite.
    Vector eta_new = X * beta_new;
    Vector mu_new = eta_new.array().exp();
    double deviance_new = (mu_new.array() > 0.0).all()
                              ? tweedie_total_deviance(y, mu_new, p)
                              : std::numeric_limits<double>::infinity();
    if (have_beta) {
      int halvings = 0;
      while ((!std::isfinite(deviance_new) || deviance_new > deviance) && halvings < 20) {
        beta_new = 0.5 * (beta_new + beta);
        eta_new = X * beta_new;
        mu_new = eta_new.array().exp();
        deviance_new = (mu_new.array() > 0.0).all()
                           ? tweedie_total_deviance(y, mu_new, p)
                           : std::numeric_limits<double>::infinity();
        ++halvings;
      }
    } else if (!std::isfinite(deviance_new)) {
      throw std::runtime_error("fit: first IRLS step diverged");
    }

    beta = beta_new;
    eta = eta_new;
    mu = mu_new;
    have_beta = true;

    double change = std::abs(deviance_new - deviance) / (std::abs(deviance_new) + 0.1);
    deviance = deviance_new;
    result.deviance_path.push_back(deviance);
    if (change < spec.tolerance) {
      result.converged = true;
      ++iter;
      break;
    }
  }

  result.coefficients = beta;
  result.deviance = deviance;
  result.iterations_used = iter;
  result.residuals = y - mu;
  result.dispersion = estimate_dispersion(y, mu, p, k);

  // Covariance phi * (X' W X)^(-1) from the final weighted QR:
  // X'WX = P R'R P', so the inverse is P R^-1 R^-T P'.
  Vector w_sqrt = mu.array().pow((2.0 - p) / 2.0);
  weighted_design = w_sqrt.asDiagonal() * X;
  qr.compute(weighted_design);
  Matrix r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
  Matrix cov = qr.colsPermutation() * (r_inv * r_inv.transpose()) *
               qr.colsPermutation().transpose();
  cov *= result.dispersion;

  result.standard_errors = cov.diagonal().array().max(0.0).sqrt();
  result.z_statistics = Vector(k);
  result.p_values = Vector(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double se = result.standard_errors[j];
    double zstat = se > 0.0 ? result.coefficients[j] / se
                            : std::numeric_limits<double>::infinity();
    result.z_statistics[j] = zstat;
    result.p_values[j] = standard_normal_two_sided_p(zstat);
  }
  return result;
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

std::vector<WaldRow> wald_table(const FitResult& fit, std::span<const std::string> names) {
  if (!fit.converged)
    throw std::invalid_argument("wald_table: fit did not converge");
  if (static_cast<Eigen::Index>(names.size()) != fit.coefficients.size())
    throw std::invalid_argument("wald_table: name count mismatch");
  std::vector<WaldRow> rows;
  rows.reserve(names.size());
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    WaldRow row;
    row.term = names[static_cast<std::size_t>(j)];
    row.estimate = fit.coefficients[j];
    row.std_error = fit.standard_errors[j];
    row.z = fit.z_statistics[j];
    row.p_value = fit.p_values[j];
    row.stars = significance_stars(row.p_value);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_wald_table(std::span<const WaldRow> rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %12s %12s %9s %11s %-4s\n", "term",
                "estimate", "std_error", "z", "p_value", "sig");
  out << line;
  for (const WaldRow& r : rows) {
    std::snprintf(line, sizeof line, "%-28s %12.6g %12.6g %9.4g %11.4g %-4s\n",
                  r.term.c_str(), r.estimate, r.std_error, r.z, r.p_value,
                  r.stars.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace appealscope
