#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sep/diagnostics.hpp"
#include "sep/epadmm.hpp"
#include "sep/gaussian.hpp"
#include "sep/grid.hpp"
#include "sep/model.hpp"
#include "sep/rng.hpp"

namespace sep {

struct BaselineConfig {
  int iters = 1000;
  int burn_in = 500;
  int thin = 10;
  double pixel_step = 0.1;
  double tau_step = 0.005;
  double lambda_step = 0.005;
  double init_tau = 0.01;
  double init_lambda = 0.01;
  std::uint64_t seed = 0;

  void validate() const {
    if (iters < 1) throw std::invalid_argument("BaselineConfig: iters must be >= 1");
    if (burn_in < 0 || burn_in >= iters)
      throw std::invalid_argument("BaselineConfig: need 0 <= burn_in < iters");
    if (thin < 1) throw std::invalid_argument("BaselineConfig: thin must be >= 1");
    if (!(pixel_step > 0.0) || !(tau_step > 0.0) || !(lambda_step > 0.0))
      throw std::invalid_argument("BaselineConfig: steps must be > 0");
    if (!(init_tau > 0.0) || !(init_lambda > 0.0))
      throw std::invalid_argument("BaselineConfig: initial variances must be > 0");
  }
};

struct BaselineReport {
  Grid mean_image;
  ChainSet tau_chains;     // kept samples, single chain
  ChainSet lambda_chains;  // kept samples, single chain
  double tau_mean = 0.0;
  double lambda_mean = 0.0;
  std::size_t kept = 0;
  double acceptance_pixel = 0.0;
  double acceptance_tau = 0.0;
  double acceptance_lambda = 0.0;
};

// Single-site random-walk Metropolis over every pixel of X plus scalar
// reflected random walks for tau and lambda, against the joint density.
inline BaselineReport run_full_mcmc(const Grid& y, const Model& model,
                                    const BaselineConfig& cfg) {
  cfg.validate();
  model.validate();
  const std::size_t n = y.size();
  auto rng = make_stream(cfg.seed, 0x626c);
  std::normal_distribution<double> pixel_noise(0.0, cfg.pixel_step);
  std::normal_distribution<double> tau_noise(0.0, cfg.tau_step);
  std::normal_distribution<double> lambda_noise(0.0, cfg.lambda_step);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Grid x = y;  // chains start at the observation
  double tau = cfg.init_tau;
  double lambda = cfg.init_lambda;

  const auto cols_g = detail::SparseColumns::build(model.forward, y.rows(), y.cols());
  const auto cols_l = detail::SparseColumns::build(model.regularizer, y.rows(), y.cols());

  Grid residual = y;  // y - G x
  {
    const Grid gx = apply_operator(model.forward, x);
    for (std::size_t k = 0; k < n; ++k) residual[k] -= gx[k];
  }
  Grid field = apply_operator(model.regularizer, x);  // L x

  double ssr = sum_square(residual);
  double ssq = sum_square(field);

  Grid mean_image(y.rows(), y.cols(), 0.0);
  std::vector<double> tau_kept, lambda_kept;
  long acc_pixel = 0, acc_tau = 0, acc_lambda = 0;

  const double nd = static_cast<double>(n);
  auto log_target_tau = [&](double t) {
    if (!(t > 0.0)) return kNegInf;
    return -0.5 * nd * (kLog2Pi + std::log(t)) - 0.5 * ssq / t +
           log_exponential(t, model.hyper_rate_tau);
  };
  auto log_target_lambda = [&](double l) {
    if (!(l > 0.0)) return kNegInf;
    return -0.5 * nd * (kLog2Pi + std::log(l)) - 0.5 * ssr / l +
           log_exponential(l, model.hyper_rate_lambda);
  };

  for (int t = 1; t <= cfg.iters; ++t) {
    // Systematic row-major scan over pixels.
    for (std::size_t s = 0; s < n; ++s) {
      const double delta = pixel_noise(rng);
      double d_ssr = 0.0, d_ssq = 0.0;
      for (std::uint32_t e = cols_g.offsets[s]; e < cols_g.offsets[s + 1]; ++e) {
        const double r0 = residual[cols_g.row[e]];
        const double r1 = r0 - cols_g.weight[e] * delta;
        d_ssr += r1 * r1 - r0 * r0;
      }
      for (std::uint32_t e = cols_l.offsets[s]; e < cols_l.offsets[s + 1]; ++e) {
        const double q0 = field[cols_l.row[e]];
        const double q1 = q0 + cols_l.weight[e] * delta;
        d_ssq += q1 * q1 - q0 * q0;
      }
      const double log_ratio = -0.5 * d_ssr / lambda - 0.5 * d_ssq / tau;
      if (std::log(unif(rng)) < log_ratio) {
        x[s] += delta;
        for (std::uint32_t e = cols_g.offsets[s]; e < cols_g.offsets[s + 1]; ++e)
          residual[cols_g.row[e]] -= cols_g.weight[e] * delta;
        for (std::uint32_t e = cols_l.offsets[s]; e < cols_l.offsets[s + 1]; ++e)
          field[cols_l.row[e]] += cols_l.weight[e] * delta;
        ssr += d_ssr;
        ssq += d_ssq;
        ++acc_pixel;
      }
    }
    // Refresh the cached sums once per iteration to stop drift.
    ssr = sum_square(residual);
    ssq = sum_square(field);

    // Scalar updates with proposals reflected at zero.
    {
      const double cand = std::abs(tau + tau_noise(rng));
      const double log_ratio = log_target_tau(cand) - log_target_tau(tau);
      if (std::log(unif(rng)) < log_ratio) {
        tau = cand;
        ++acc_tau;
      }
    }
    {
      const double cand = std::abs(lambda + lambda_noise(rng));
      const double log_ratio = log_target_lambda(cand) - log_target_lambda(lambda);
      if (std::log(unif(rng)) < log_ratio) {
        lambda = cand;
        ++acc_lambda;
      }
    }

    if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0) {
      for (std::size_t k = 0; k < n; ++k) mean_image[k] += x[k];
      tau_kept.push_back(tau);
      lambda_kept.push_back(lambda);
    }
  }

  BaselineReport report;
  report.kept = tau_kept.size();
  if (report.kept > 0) {
    for (std::size_t k = 0; k < n; ++k)
      mean_image[k] /= static_cast<double>(report.kept);
    double st = 0.0, sl = 0.0;
    for (double v : tau_kept) st += v;
    for (double v : lambda_kept) sl += v;
    report.tau_mean = st / static_cast<double>(report.kept);
    report.lambda_mean = sl / static_cast<double>(report.kept);
  }
  report.mean_image = mean_image;
  report.tau_chains.chains.push_back(std::move(tau_kept));
  report.lambda_chains.chains.push_back(std::move(lambda_kept));
  const double total_pixel = static_cast<double>(cfg.iters) * static_cast<double>(n);
  report.acceptance_pixel = acc_pixel / total_pixel;
  report.acceptance_tau = acc_tau / static_cast<double>(cfg.iters);
  report.acceptance_lambda = acc_lambda / static_cast<double>(cfg.iters);
  return report;
}

}  // namespace sep
