#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace rotogo {

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CmaesConfig {
  int population_size = 25;
  double initial_step_size = std::sqrt(10.0);  // variance 10 m^2
  double warm_start_step_size = std::sqrt(5.0);
  int max_iterations = 20;
  std::uint64_t seed = 0;

  void validate() const {
    if (population_size < 4) throw OptimizerError("CMA-ES population size must be >= 4");
    if (!(initial_step_size > 0) || !(warm_start_step_size > 0)) throw OptimizerError("CMA-ES step sizes must be > 0");
    if (max_iterations < 0) throw OptimizerError("CMA-ES max_iterations must be >= 0");
  }
};

struct CmaesIteration {
  Eigen::VectorXd mean;  // mean after the update
  double sigma = 0;
  double iteration_best = 0;
  double best_so_far = 0;
};

struct CmaesResult {
  Eigen::VectorXd best_x;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<CmaesIteration> history;
  int evaluations = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and rank-one
/// plus rank-mu covariance updates. Runs exactly max_iterations generations.
/// Deterministic for a fixed seed; candidates are ranked by (value, index).
inline CmaesResult cmaes_minimize(const Objective& objective, const Eigen::VectorXd& x0, const CmaesConfig& config,
                                  double step_size) {
  config.validate();
  if (x0.size() < 1) throw OptimizerError("CMA-ES needs dimension >= 1");
  if (!(step_size > 0)) throw OptimizerError("CMA-ES step size must be > 0");

  const auto n = x0.size();
  const double dn = static_cast<double>(n);
  const int lambda = config.population_size;
  const int mu = lambda / 2;

  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double cc = (4.0 + mu_eff / dn) / (dn + 4.0 + 2.0 * mu_eff / dn);
  const double cs = (mu_eff + 2.0) / (dn + mu_eff + 5.0);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mu_eff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dn + 2.0) * (dn + 2.0) + mu_eff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  Eigen::VectorXd mean = x0;
  double sigma = step_size;
  Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd D = Eigen::VectorXd::Ones(n);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  CmaesResult result;
  result.best_x = x0;
  std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(lambda));
  std::vector<Eigen::VectorXd> ys(static_cast<std::size_t>(lambda));
  std::vector<double> values(static_cast<std::size_t>(lambda));
  std::vector<int> order(static_cast<std::size_t>(lambda));

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n);
      for (Eigen::Index d = 0; d < n; ++d) z[d] = normal(rng);
      ys[k] = B * D.cwiseProduct(z);
      xs[k] = mean + sigma * ys[k];
    }
    // Evaluations are independent; reduction below is in candidate order.
    for (int k = 0; k < lambda; ++k) {
      const double v = objective(xs[k]);
      if (!std::isfinite(v)) throw OptimizerError("objective returned a non-finite value");
      values[k] = v;
    }
    result.evaluations += lambda;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });

    const int best_k = order[0];
    if (values[best_k] < result.best_value) {
      result.best_value = values[best_k];
      result.best_x = xs[best_k];
    }

    const Eigen::VectorXd old_mean = mean;
    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    mean = old_mean + sigma * y_w;

    // C^{-1/2} y_w = B D^{-1} B^T y_w
    const Eigen::VectorXd c_inv_sqrt_yw = B * (B.transpose() * y_w).cwiseQuotient(D);
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mu_eff) * c_inv_sqrt_yw;
    const double ps_norm = ps.norm();
    const double gen = static_cast<double>(iter + 1);
    const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen)) / chi_n < 1.4 + 2.0 / (dn + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mu_eff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * ys[order[i]] * ys[order[i]].transpose();
    const double delta_h = hsig ? 0.0 : cc * (2.0 - cc);
    C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + delta_h * C) + cmu * rank_mu;
    C = 0.5 * (C + C.transpose());

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    B = eig.eigenvectors();
    D = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();

    result.history.push_back({mean, sigma, values[best_k], result.best_value});
  }
  return result;
}

inline CmaesResult cmaes_minimize(const Objective& objective, const Eigen::VectorXd& x0, const CmaesConfig& config) {
  return cmaes_minimize(objective, x0, config, config.initial_step_size);
}

}  // namespace rotogo
