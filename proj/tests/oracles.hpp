// Test-only oracles, kept independent of the library's fitting path.
#ifndef APPEALSCOPE_TESTS_ORACLES_HPP_
#define APPEALSCOPE_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// Total Tweedie deviance evaluated directly from the closed form; no
// shared code with the library implementation.
inline double direct_total_deviance(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& beta, double p) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double mu = std::exp(X.row(i).dot(beta));
    double yi = y[i];
    double term_y =
        yi > 0.0 ? std::pow(yi, 2.0 - p) / ((1.0 - p) * (2.0 - p)) : 0.0;
    total += 2.0 * (term_y - yi * std::pow(mu, 1.0 - p) / (1.0 - p) +
                    std::pow(mu, 2.0 - p) / (2.0 - p));
  }
  return total;
}

// Derivative-free Nelder-Mead simplex minimization with restarts. Returns
// the best point found; `fn` must be continuous near the optimum.
inline Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                                   Eigen::VectorXd start, double initial_step,
                                   int max_iterations = 20000, double tolerance = 1e-13,
                                   int restarts = 4) {
  const auto n = start.size();
  Eigen::VectorXd best = start;
  double best_value = fn(best);

  for (int round = 0; round < restarts; ++round) {
    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n) + 1, best);
    for (Eigen::Index i = 0; i < n; ++i)
      simplex[static_cast<std::size_t>(i) + 1][i] += initial_step;
    std::vector<double> value(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) value[i] = fn(simplex[i]);

    for (int iter = 0; iter < max_iterations; ++iter) {
      std::vector<std::size_t> order(simplex.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
      std::size_t lo = order.front(), hi = order.back(), second_hi = order[order.size() - 2];

      if (std::abs(value[hi] - value[lo]) <=
          tolerance * (std::abs(value[lo]) + tolerance))
        break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i < simplex.size(); ++i)
        if (i != hi) centroid += simplex[i];
      centroid /= double(n);

      Eigen::VectorXd reflected = centroid + (centroid - simplex[hi]);
      double reflected_value = fn(reflected);
      if (reflected_value < value[lo]) {
        Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[hi]);
        double expanded_value = fn(expanded);
        if (expanded_value < reflected_value) {
          simplex[hi] = expanded;
          value[hi] = expanded_value;
        } else {
          simplex[hi] = reflected;
          value[hi] = reflected_value;
        }
      } else if (reflected_value < value[second_hi]) {
        simplex[hi] = reflected;
        value[hi] = reflected_value;
      } else {
        Eigen::VectorXd contracted = centroid + 0.5 * (simplex[hi] - centroid);
        double contracted_value = fn(contracted);
        if (contracted_value < value[hi]) {
          simplex[hi] = contracted;
          value[hi] = contracted_value;
        } else {
          for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == lo) continue;
            simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
            value[i] = fn(simplex[i]);
          }
        }
      }
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (value[i] < best_value) {
        best_value = value[i];
        best = simplex[i];
      }
    }
    initial_step *= 0.1;  // restart tighter around the incumbent
  }
  return best;
}

}  // namespace oracles

#endif  // APPEALSCOPE_TESTS_ORACLES_HPP_
