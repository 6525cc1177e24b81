#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "sep/epadmm.hpp"
#include "sep/epmc.hpp"
#include "sep/epmcmc.hpp"
#include "sep/grid.hpp"
#include "sep/mcmc_baseline.hpp"
#include "sep/model.hpp"
#include "sep/phantoms.hpp"
#include "sep/rng.hpp"

namespace sep {

// Synthetic parameter-recovery setup: a smooth full-intensity cylinder plus a
// rough texture whose Laplacian field is white, scaled so the field second
// moment mean((Lx)^2) equals target_field_var exactly. "Generated with prior
// precision p" therefore holds by construction with p = 1/target_field_var;
// the smooth cylinder itself is nearly free under the smoothness prior.
struct RecoverySetup {
  Grid truth;
  Grid observation;
  Model model;
  double target_field_var = 0.01;
  double noise_sd = 0.1;
};

namespace detail {

// Naive orthonormal DCT-II and its inverse over one vector.
inline std::vector<double> dct_1d(const std::vector<double>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  const double nd = static_cast<double>(n);
  for (std::size_t a = 0; a < n; ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t i = inverse ? a : b;  // sample index
      const std::size_t p = inverse ? b : a;  // frequency index
      const double scale = p == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
      acc += x[b] * scale *
             std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                      static_cast<double>(p) / nd);
    }
    out[a] = acc;
  }
  return out;
}

inline void dct2_grid(Grid& g, bool inverse) {
  std::vector<double> line;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    line.assign(g.values().begin() + i * g.cols(), g.values().begin() + (i + 1) * g.cols());
    const auto t = dct_1d(line, inverse);
    std::copy(t.begin(), t.end(), g.values().begin() + i * g.cols());
  }
  std::vector<double> col(g.rows());
  for (std::size_t j = 0; j < g.cols(); ++j) {
    for (std::size_t i = 0; i < g.rows(); ++i) col[i] = g(i, j);
    const auto t = dct_1d(col, inverse);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, j) = t[i];
  }
}

}  // namespace detail

inline RecoverySetup make_recovery_setup(std::size_t rows, std::size_t cols,
                                         std::uint64_t seed, double noise_sd = 0.1,
                                         double target_field_var = 0.01,
                                         double smooth_sigma = 4.0,
                                         double blur_sigma = 0.5, double l_scale = 0.65,
                                         double min_symbol = 0.2) {
  if (!(target_field_var > 0.0))
    throw std::invalid_argument("make_recovery_setup: target_field_var must be > 0");

  Model model;
  model.forward = LinearOperator::gaussian_blur(blur_sigma);
  Grid l_kernel(3, 3, {0.0, -1.0, 0.0, -1.0, 4.0, -1.0, 0.0, -1.0, 0.0});
  for (double& v : l_kernel.values()) v *= l_scale;
  model.regularizer = LinearOperator::convolution(l_kernel);

  const Grid disk = make_phantom(PhantomSpec::cylinder(rows, cols, 1.0));
  const Grid base = apply_operator(LinearOperator::gaussian_blur(smooth_sigma), disk);

  // White field w in DCT space mapped through the smoothness operator's
  // pseudo-inverse: texture modes t_k = w_k / l_k on l_k >= min_symbol, so
  // L * texture is white exactly on the passband.
  Grid texture(rows, cols, 0.0);
  {
    auto rng = make_stream(seed, 0x7478);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (double& v : texture.values()) v = n01(rng);
    detail::dct2_grid(texture, false);
    for (std::size_t p = 0; p < rows; ++p)
      for (std::size_t q = 0; q < cols; ++q) {
        const double l =
            l_scale * (4.0 - 2.0 * std::cos(std::numbers::pi * p / rows) -
                       2.0 * std::cos(std::numbers::pi * q / cols));
        texture(p, q) = l >= min_symbol ? texture(p, q) / l : 0.0;
      }
    detail::dct2_grid(texture, true);
  }

  const Grid ltexture = apply_operator(model.regularizer, texture);
  const double tex_scale = std::sqrt(target_field_var / mean_square(ltexture));
  Grid truth = base;
  for (std::size_t k = 0; k < truth.size(); ++k) truth[k] += tex_scale * texture[k];

  // Exact calibration of the field second moment.
  const Grid lx = apply_operator(model.regularizer, truth);
  const double scale = std::sqrt(target_field_var / mean_square(lx));
  for (double& v : truth.values()) v *= scale;

  RecoverySetup setup;
  setup.truth = truth;
  setup.observation = simulate_observation(truth, model, noise_sd, mix_seed(seed, 0x6f62, 1));
  setup.model = model;
  setup.target_field_var = target_field_var;
  setup.noise_sd = noise_sd;
  return setup;
}

struct RecoveryEstimates {
  double tau_variance = 0.0;
  double lambda_variance = 0.0;
  double precision = 0.0;  // 1 / tau_variance
  double sd = 0.0;         // sqrt(lambda_variance)
  double relative_error = 0.0;
  std::size_t collapses = 0;
};

inline RecoveryEstimates recover_with_epmc(const RecoverySetup& setup, std::uint64_t seed,
                                           int sweeps = 220, std::size_t rate_samples = 4096,
                                           std::size_t x_samples = 256,
                                           double rate_lr = 0.35) {
  McConfig mc;
  mc.samples = rate_samples;
  mc.learning_rate = rate_lr;
  mc.seed = seed;
  EpConfig ep;
  ep.max_sweeps = sweeps;
  EpMcOptions opt;
  opt.x_samples = x_samples;
  const EpMcReport fit = epmc_fit(setup.observation, setup.model, mc, ep, opt);
  // Average the tail of the stochastic-search traces; the iterates hover
  // around the fixed point once converged.
  const std::size_t t0 = fit.tau_trace.size() - fit.tau_trace.size() / 4;
  double tau = 0.0, lambda = 0.0;
  for (std::size_t i = t0; i < fit.tau_trace.size(); ++i) {
    tau += fit.tau_trace[i];
    lambda += fit.lambda_trace[i];
  }
  const double count = static_cast<double>(fit.tau_trace.size() - t0);
  tau /= count;
  lambda /= count;

  RecoveryEstimates est;
  est.tau_variance = tau;
  est.lambda_variance = lambda;
  est.precision = reported_precision(tau);
  est.sd = reported_sd(lambda);
  est.relative_error = relative_error(fit.mean, setup.truth);
  est.collapses = fit.collapses;
  return est;
}

inline RecoveryEstimates recover_with_epmcmc(const RecoverySetup& setup, std::uint64_t seed,
                                             int iters = 1000, int replications = 10) {
  MhConfig cfg;
  cfg.iters = iters;
  cfg.replications = replications;
  cfg.seed = seed;
  EpMcmcOptions opt;
  const EpMcmcReport fit = run_ep_mcmc(setup.observation, setup.model, cfg, opt);
  RecoveryEstimates est;
  est.tau_variance = fit.tau_mean;
  est.lambda_variance = fit.lambda_mean;
  est.precision = reported_precision(fit.tau_mean);
  est.sd = reported_sd(fit.lambda_mean);
  est.relative_error = relative_error(fit.recon_mean, setup.truth);
  est.collapses = fit.collapses;
  return est;
}

struct ImprovementResult {
  Grid truth;
  Grid observation;
  Grid reconstruction;
  double observation_error = 0.0;
  double reconstruction_error = 0.0;
  std::size_t collapses = 0;
  double min_variance = 0.0;
};

// Denoising/deblurring improvement experiment on a binary phantom with a
// smoothness prior.
inline ImprovementResult improvement_experiment(PhantomKind kind, std::size_t rows,
                                                std::size_t cols, double noise_sd,
                                                std::uint64_t seed) {
  Model model;
  model.forward = LinearOperator::gaussian_blur(1.0);
  model.regularizer = LinearOperator::laplacian();
  const PhantomSpec spec = kind == PhantomKind::Cylinder
                               ? PhantomSpec::cylinder(rows, cols, 1.0)
                               : PhantomSpec::four_circles(rows, cols, 1.0);
  ImprovementResult out;
  out.truth = make_phantom(spec);
  out.observation = simulate_observation(out.truth, model, noise_sd, seed);

  AdmmSettings settings;
  settings.prior_var = 10.0;
  settings.tau = 0.25;
  settings.lambda = noise_sd * noise_sd;
  const EpAdmmReport rep = epadmm_reconstruct(out.observation, model, settings, EpConfig{});
  out.reconstruction = rep.mean;
  out.observation_error = relative_error(out.observation, out.truth);
  out.reconstruction_error = relative_error(rep.mean, out.truth);
  out.collapses = rep.collapses;
  out.min_variance = rep.var[0];
  for (double v : rep.var.values()) out.min_variance = std::min(out.min_variance, v);
  return out;
}

}  // namespace sep
