#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sep/epadmm.hpp"
#include "sep/epcore.hpp"
#include "sep/gaussian.hpp"
#include "sep/grid.hpp"
#include "sep/model.hpp"
#include "sep/rng.hpp"
#include "sep/spectral.hpp"

namespace sep {

inline constexpr double kRateFloor = 1e-8;

struct McConfig {
  std::size_t samples = 1024;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    if (samples == 0) throw std::invalid_argument("McConfig: samples must be >= 1");
    if (!(learning_rate > 0.0))
      throw std::invalid_argument("McConfig: learning_rate must be > 0");
  }
};

// Z_tau estimate with the proposal and the weight rate decoupled:
// tau_k ~ Exp(proposal_rate), weights carry Exp(tau | weight_rate)/proposal.
// With weight_rate == proposal_rate this is the plain cavity-sampled average
// of the likelihood factor; the split form gives common-random-numbers
// derivatives in the weight rate.
inline double mc_normalizer_tau_at(double lx, double weight_rate, double proposal_rate,
                                   const McConfig& cfg) {
  cfg.validate();
  if (!(proposal_rate > 0.0) || !(weight_rate > 0.0))
    throw std::domain_error("mc_normalizer_tau: rates must be > 0");
  auto rng = make_stream(cfg.seed, 0x7a75);
  std::exponential_distribution<double> cavity(proposal_rate);
  double acc = 0.0;
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    const double tau = cavity(rng);
    const double log_ratio = log_exponential(tau, weight_rate) -
                             log_exponential(tau, proposal_rate);
    acc += normal_pdf(lx, 0.0, tau) * std::exp(log_ratio);
  }
  return acc / static_cast<double>(cfg.samples);
}

inline double mc_normalizer_tau(double lx, double cavity_rate, const McConfig& cfg) {
  return mc_normalizer_tau_at(lx, cavity_rate, cavity_rate, cfg);
}

inline double mc_normalizer_lambda_at(double y, double gx, double weight_rate,
                                      double proposal_rate, const McConfig& cfg) {
  cfg.validate();
  if (!(proposal_rate > 0.0) || !(weight_rate > 0.0))
    throw std::domain_error("mc_normalizer_lambda: rates must be > 0");
  auto rng = make_stream(cfg.seed, 0x6c61);
  std::exponential_distribution<double> cavity(proposal_rate);
  double acc = 0.0;
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    const double lambda = cavity(rng);
    const double log_ratio = log_exponential(lambda, weight_rate) -
                             log_exponential(lambda, proposal_rate);
    acc += normal_pdf(y, gx, lambda) * std::exp(log_ratio);
  }
  return acc / static_cast<double>(cfg.samples);
}

inline double mc_normalizer_lambda(double y, double gx, double cavity_rate,
                                   const McConfig& cfg) {
  return mc_normalizer_lambda_at(y, gx, cavity_rate, cavity_rate, cfg);
}

// Mean of the sampled rates: the stochastic estimate the additive update rule
// consumes as its gradient term.
inline double grad_log_z_rate(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("grad_log_z_rate: empty samples");
  double acc = 0.0;
  for (double s : samples) acc += s;
  return acc / static_cast<double>(samples.size());
}

inline double update_rate(double cavity_rate, double cavity_variance, double zeta,
                          double floor = kRateFloor) {
  if (!(cavity_rate > 0.0)) throw std::domain_error("update_rate: cavity rate must be > 0");
  return std::max(cavity_rate + cavity_variance * zeta, floor);
}

// Self-normalized importance-sampling ratio sum(w g)/sum(w).
inline double snis_gradient(std::span<const double> weights, std::span<const double> grads) {
  if (weights.size() != grads.size())
    throw std::invalid_argument("snis_gradient: length mismatch");
  if (weights.empty()) throw std::invalid_argument("snis_gradient: empty input");
  double sw = 0.0, swg = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] < 0.0) throw std::domain_error("snis_gradient: negative weight");
    sw += weights[k];
    swg += weights[k] * grads[k];
  }
  if (!(sw > 0.0)) throw std::domain_error("snis_gradient: degenerate weights");
  return swg / sw;
}

inline double gradient_step(double omega, double lr, double g) {
  if (!(lr > 0.0)) throw std::domain_error("gradient_step: lr must be > 0");
  return omega + lr * g;
}

namespace detail {

// Tilted mean of the rate parameter against a whole-field Gaussian factor
// with sufficient statistic (n, S): SNIS in log space over cavity draws.
struct RateTiltedEstimate {
  double tilted_mean = 0.0;
  bool ok = false;
};

inline RateTiltedEstimate rate_tilted_mean(double n_terms, double sum_sq, double cavity_rate,
                                           std::size_t samples, std::mt19937_64& rng) {
  std::exponential_distribution<double> cavity(cavity_rate);
  std::vector<double> t(samples), logw(samples);
  double lmax = kNegInf;
  for (std::size_t k = 0; k < samples; ++k) {
    t[k] = std::max(cavity(rng), 1e-300);
    logw[k] = -0.5 * n_terms * (kLog2Pi + std::log(t[k])) - 0.5 * sum_sq / t[k];
    lmax = std::max(lmax, logw[k]);
  }
  if (!std::isfinite(lmax)) return {};
  double sw = 0.0, swt = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double w = std::exp(logw[k] - lmax);
    sw += w;
    swt += w * t[k];
  }
  if (!(sw > 0.0)) return {};
  return {swt / sw, true};
}

}  // namespace detail

enum class RateRule {
  kSnisGradient,  // ascent on log Z in log-rate; fixed point is moment matching
  kPaperAdditive  // cavity + cavity-variance * mean-of-draws
};

struct EpMcOptions {
  RateRule rate_rule = RateRule::kSnisGradient;
  std::size_t x_samples = 0;      // per-pixel SNIS draws; 0 = mc.samples
  double init_tau = 0.01;         // starting variance parameters
  double init_lambda = 0.01;
  bool learn_tau = true;
  bool learn_lambda = true;
  double site_rate_tau = 2.0;     // collective-site rates, cavities fixed once
  double site_rate_lambda = 1.0;
  double base_var = 1e8;          // vague base belief for X
  double bound_b = 1e-6;          // variance floor shared with the ADMM engine
};

struct EpMcReport {
  Grid mean;
  Grid var;
  double alpha_tau = 0.0;
  double alpha_lambda = 0.0;
  double tau_variance = 0.0;     // 1/alpha_tau
  double lambda_variance = 0.0;  // 1/alpha_lambda
  int sweeps = 0;
  std::size_t collapses = 0;
  std::size_t clamps = 0;
  std::vector<double> tau_trace;
  std::vector<double> lambda_trace;
};

// EP with Monte-Carlo site updates: per-pixel SNIS tilted moments for the
// likelihood sites, conjugate updates for the field-prior sites, stochastic
// log-Z gradient steps for the exponential rates.
inline EpMcReport epmc_fit(const Grid& y, const Model& model, const McConfig& mc,
                           const EpConfig& ep, const EpMcOptions& opt = {}) {
  mc.validate();
  model.validate();
  if (!(opt.init_tau > 0.0) || !(opt.init_lambda > 0.0))
    throw std::invalid_argument("epmc_fit: initial variances must be > 0");
  const std::size_t n = y.size();
  const double nd = static_cast<double>(n);
  const std::size_t kx = opt.x_samples ? opt.x_samples : mc.samples;

  double alpha_tau = model.hyper_rate_tau;
  double alpha_lambda = model.hyper_rate_lambda;
  const double cavity_tau =
      exponential_cavity(alpha_tau, opt.site_rate_tau).value_or(alpha_tau);
  const double cavity_lambda =
      exponential_cavity(alpha_lambda, opt.site_rate_lambda).value_or(alpha_lambda);

  double tau = opt.init_tau;
  double lambda = opt.init_lambda;

  auto st = make_image_state(n, opt.base_var);
  const Grid gain = diagonal_gain(model.forward, y.rows(), y.cols());
  const double l_gain = std::sqrt(stencil_sq_norm(model.regularizer));
  AdmmState plain = AdmmState::zeros(n, 0.0, 0.0, opt.bound_b);

  detail::ResidualFeedback data_feedback(y, model.forward);
  data_feedback.reset(y, Grid(y.rows(), y.cols(), st.mean), model.forward);
  const Grid zero(y.rows(), y.cols(), 0.0);
  detail::ResidualFeedback prior_feedback(zero, model.regularizer);
  prior_feedback.reset(zero, Grid(y.rows(), y.cols(), st.mean), model.regularizer);

  EpMcReport report;
  // Prior sites first: they tighten the likelihood cavities before any
  // sampling happens, which keeps the first-sweep proposals sane.
  std::vector<std::size_t> schedule(2 * n);
  for (std::size_t s = 0; s < n; ++s) {
    schedule[s] = n + s;
    schedule[n + s] = s;
  }
  std::vector<double> xs(kx), lw(kx);
  for (int sweep = 0; sweep < ep.max_sweeps; ++sweep) {
    const SweepResult swept = ep_sweep(
        st, schedule,
        [&](std::size_t s, const GaussianMoments& cavity)
            -> std::optional<GaussianMoments> {
          if (s >= n) {
            // Field-prior site: Gaussian-Gaussian, handled in closed form.
            const std::size_t p = s - n;
            if (l_gain < 1e-12) return std::nullopt;
            const double y_eff = detail::pseudo_observation(
                prior_feedback.adjoint_residual(p), l_gain, st.mean[p]);
            const GaussianMoments updated = admm_update_site(
                y_eff, l_gain, cavity.mean, cavity.var, tau, plain, p);
            const double delta = updated.mean - st.mean[p];
            data_feedback.mean_changed(p, delta);
            prior_feedback.mean_changed(p, delta);
            return updated;
          }
          const double g = gain[s];
          if (std::abs(g) < 1e-12) return std::nullopt;
          const double y_eff = detail::pseudo_observation(
              data_feedback.adjoint_residual(s), g, st.mean[s]);
          auto rng = make_stream(mc.seed, 0x78, static_cast<std::uint64_t>(sweep), s);
          // Draws from the cavity weighted by the likelihood factor; the
          // weights are bounded, so the estimator cannot blow up.
          std::normal_distribution<double> prop(cavity.mean, std::sqrt(cavity.var));
          double lmax = kNegInf;
          for (std::size_t k = 0; k < kx; ++k) {
            xs[k] = prop(rng);
            lw[k] = log_normal_pdf(y_eff, g * xs[k], lambda);
            lmax = std::max(lmax, lw[k]);
          }
          if (!std::isfinite(lmax)) return std::nullopt;
          double sw = 0.0, swx = 0.0, swxx = 0.0;
          for (std::size_t k = 0; k < kx; ++k) {
            const double w = std::exp(lw[k] - lmax);
            sw += w;
            swx += w * xs[k];
            swxx += w * xs[k] * xs[k];
          }
          if (!(sw > 0.0)) return std::nullopt;
          const double mean = swx / sw;
          double var = swxx / sw - mean * mean;
          if (!(var > 0.0)) return std::nullopt;
          if (var < opt.bound_b) {
            var = opt.bound_b;
            ++report.clamps;
          }
          const double delta = mean - st.mean[s];
          data_feedback.mean_changed(s, delta);
          prior_feedback.mean_changed(s, delta);
          return GaussianMoments{mean, var};
        },
        SweepOptions{1.0});
    report.collapses += swept.collapses;

    // Field and residual second moments under the current posterior: exact
    // means from the belief grid, variance mass from the stationary spectrum
    // (falling back to the independent-pixel pushforward when unavailable).
    const Grid mean_grid(y.rows(), y.cols(), st.mean);
    const Grid lx = apply_operator(model.regularizer, mean_grid);
    double s_tau = 0.0, s_lambda = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s_tau += lx[k] * lx[k];
      const double r = data_feedback.residual()[k];
      s_lambda += r * r;
    }
    if (const auto spectral = stationary_posterior_stats(model, lambda, tau, opt.base_var,
                                                         y.rows(), y.cols())) {
      s_tau += nd * spectral->mean_lx_var;
      s_lambda += nd * spectral->mean_gx_var;
    } else {
      const Grid var_grid(y.rows(), y.cols(), st.var);
      const Grid lx_var = apply_variance(model.regularizer, var_grid);
      const Grid gx_var = apply_variance(model.forward, var_grid);
      for (std::size_t k = 0; k < n; ++k) s_tau += lx_var[k];
      for (std::size_t k = 0; k < n; ++k) s_lambda += gx_var[k];
    }

    auto rng_tau = make_stream(mc.seed, 0x74, static_cast<std::uint64_t>(sweep));
    auto rng_lambda = make_stream(mc.seed, 0x6c, static_cast<std::uint64_t>(sweep));
    if (opt.rate_rule == RateRule::kSnisGradient) {
      if (opt.learn_tau) {
        const auto et =
            detail::rate_tilted_mean(nd, s_tau, cavity_tau, mc.samples, rng_tau);
        if (et.ok) {
          // d log Z / d log alpha = 1 - alpha * E_tilted[tau]
          const double g = 1.0 - alpha_tau * et.tilted_mean;
          alpha_tau = std::max(
              std::exp(gradient_step(std::log(alpha_tau), mc.learning_rate, g)),
              kRateFloor);
        }
      }
      if (opt.learn_lambda) {
        const auto el =
            detail::rate_tilted_mean(nd, s_lambda, cavity_lambda, mc.samples, rng_lambda);
        if (el.ok) {
          const double g = 1.0 - alpha_lambda * el.tilted_mean;
          alpha_lambda = std::max(
              std::exp(gradient_step(std::log(alpha_lambda), mc.learning_rate, g)),
              kRateFloor);
        }
      }
    } else {
      std::exponential_distribution<double> ct(cavity_tau), cl(cavity_lambda);
      std::vector<double> ts(mc.samples), ls(mc.samples);
      for (auto& v : ts) v = ct(rng_tau);
      for (auto& v : ls) v = cl(rng_lambda);
      if (opt.learn_tau)
        alpha_tau = update_rate(cavity_tau, 1.0 / (cavity_tau * cavity_tau),
                                grad_log_z_rate(ts));
      if (opt.learn_lambda)
        alpha_lambda = update_rate(cavity_lambda, 1.0 / (cavity_lambda * cavity_lambda),
                                   grad_log_z_rate(ls));
    }

    if (opt.learn_tau) tau = 1.0 / alpha_tau;
    if (opt.learn_lambda) lambda = 1.0 / alpha_lambda;
    report.tau_trace.push_back(tau);
    report.lambda_trace.push_back(lambda);
    report.sweeps = sweep + 1;
  }

  report.mean = Grid(y.rows(), y.cols(), st.mean);
  report.var = Grid(y.rows(), y.cols(), st.var);
  report.alpha_tau = alpha_tau;
  report.alpha_lambda = alpha_lambda;
  report.tau_variance = tau;
  report.lambda_variance = lambda;
  return report;
}

}  // namespace sep
