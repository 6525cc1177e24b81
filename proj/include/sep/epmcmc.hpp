#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sep/diagnostics.hpp"
#include "sep/epadmm.hpp"
#include "sep/epcore.hpp"
#include "sep/gaussian.hpp"
#include "sep/grid.hpp"
#include "sep/model.hpp"
#include "sep/parallel.hpp"
#include "sep/rng.hpp"
#include "sep/spectral.hpp"

namespace sep {

struct MhConfig {
  double step_tau = 0.005;
  double step_lambda = 0.005;
  int iters = 1000;
  int replications = 10;
  double target_acceptance = 0.234;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(step_tau > 0.0) || !(step_lambda > 0.0))
      throw std::invalid_argument("MhConfig: steps must be > 0");
    if (iters < 1 || replications < 1)
      throw std::invalid_argument("MhConfig: iters and replications must be >= 1");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
      throw std::invalid_argument("MhConfig: target_acceptance outside (0,1)");
  }
};

// log of the tilted density of tau: whole-field factor times exponential cavity.
inline double tilted_log_density_tau(double tau, double cavity_rate, const Grid& lx) {
  if (!(tau > 0.0)) return kNegInf;
  double acc = log_exponential(tau, cavity_rate);
  for (double v : lx.values()) acc += log_normal_pdf(v, 0.0, tau);
  return acc;
}

// Same structure for lambda with residual entries y - (Gx).
inline double tilted_log_density_lambda(double lambda, double cavity_rate,
                                        const Grid& residual) {
  if (!(lambda > 0.0)) return kNegInf;
  double acc = log_exponential(lambda, cavity_rate);
  for (double v : residual.values()) acc += log_normal_pdf(v, 0.0, lambda);
  return acc;
}

struct MhStepResult {
  double next;
  bool accepted;
};

// Random-walk proposal, log-space ratio test.
template <typename LogTarget>
MhStepResult mh_step(double current, LogTarget&& log_target, double step,
                     std::mt19937_64& rng) {
  if (!(step > 0.0)) throw std::invalid_argument("mh_step: step must be > 0");
  const double lt_current = log_target(current);
  if (lt_current == kNegInf) throw std::domain_error("mh_step: start has zero density");
  std::normal_distribution<double> noise(0.0, step);
  const double proposal = current + noise(rng);
  const double lt_proposal = log_target(proposal);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_u = std::log(unif(rng));
  if (log_u < lt_proposal - lt_current) return {proposal, true};
  return {current, false};
}

struct AcceptanceWindow {
  int proposals = 0;
  int accepted = 0;

  void record(bool acc) {
    ++proposals;
    if (acc) ++accepted;
  }
  void reset() { proposals = accepted = 0; }
  double rate() const { return static_cast<double>(accepted) / proposals; }
};

// Multiplicative adjustment toward the target acceptance rate.
inline double tune_step(const AcceptanceWindow& history, double step, double target = 0.234) {
  if (history.proposals == 0) throw std::invalid_argument("tune_step: empty window");
  return step * std::exp(history.rate() - target);
}

struct EpMcmcOptions {
  double init_tau = 0.01;
  double init_lambda = 0.01;
  double site_rate_tau = 2.0;
  double site_rate_lambda = 1.0;
  int refresh_every = 50;  // inner-engine X refresh cadence (iterations)
  int tune_every = 100;
  AdmmSettings inner_admm;
  EpConfig inner_ep;
};

struct EpMcmcReport {
  ChainSet tau_chains;
  ChainSet lambda_chains;
  double tau_mean = 0.0;
  double lambda_mean = 0.0;
  double alpha_tau = 0.0;    // moment-matched rate from the pooled draws
  double alpha_lambda = 0.0;
  Grid recon_mean;
  Grid recon_var;
  double acceptance_tau = 0.0;
  double acceptance_lambda = 0.0;
  double step_tau_final = 0.0;
  double step_lambda_final = 0.0;
  std::size_t collapses = 0;
};

namespace detail {

// sqrt(mean^2 + variance) per pixel: a grid whose squared entries carry the
// full second moment of the operator output under the factorized belief.
inline Grid moment_augmented(const Grid& mean_out, const Grid& var_out) {
  Grid out = mean_out;
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::sqrt(mean_out[k] * mean_out[k] + var_out[k]);
  return out;
}

struct FieldStats {
  Grid lx_eff;        // field grid for the tau factor
  Grid residual_eff;  // residual grid for the lambda factor
};

// Moment-augmented grids whose squared entries carry the posterior second
// moments of Lx and of the residual; variance mass comes from the stationary
// spectrum when available, else from the independent-pixel pushforward.
inline FieldStats make_field_stats(const Grid& y, const Model& model,
                                   const GaussianFactorState& st, double lambda,
                                   double tau, double base_var) {
  const Grid mean(y.rows(), y.cols(), st.mean);
  const Grid lx = apply_operator(model.regularizer, mean);
  const Grid gx = apply_operator(model.forward, mean);
  Grid resid = y;
  for (std::size_t k = 0; k < resid.size(); ++k) resid[k] -= gx[k];

  if (const auto spectral =
          stationary_posterior_stats(model, lambda, tau, base_var, y.rows(), y.cols())) {
    const Grid lx_var(y.rows(), y.cols(), spectral->mean_lx_var);
    const Grid gx_var(y.rows(), y.cols(), spectral->mean_gx_var);
    return FieldStats{moment_augmented(lx, lx_var), moment_augmented(resid, gx_var)};
  }
  const Grid var(y.rows(), y.cols(), st.var);
  const Grid lx_var = apply_variance(model.regularizer, var);
  const Grid gx_var = apply_variance(model.forward, var);
  return FieldStats{moment_augmented(lx, lx_var), moment_augmented(resid, gx_var)};
}

}  // namespace detail

// The outer EP-MCMC loop: fixed exponential cavities, random-walk sampling of
// the whole-field tilted densities, inner EP-ADMM refreshes of the X belief,
// moment matching from the full set of tilted draws.
inline EpMcmcReport run_ep_mcmc(const Grid& y, const Model& model, const MhConfig& cfg,
                                const EpMcmcOptions& opt = {}) {
  cfg.validate();
  model.validate();
  const std::size_t m = static_cast<std::size_t>(cfg.replications);
  const std::size_t n_iter = static_cast<std::size_t>(cfg.iters);
  const double cavity_tau = exponential_cavity(model.hyper_rate_tau, opt.site_rate_tau)
                                .value_or(model.hyper_rate_tau);
  const double cavity_lambda =
      exponential_cavity(model.hyper_rate_lambda, opt.site_rate_lambda)
          .value_or(model.hyper_rate_lambda);

  struct Replication {
    std::vector<double> tau_chain, lambda_chain;
    GaussianFactorState state;
    double step_tau = 0.0, step_lambda = 0.0;
    int acc_tau = 0, acc_lambda = 0;
    std::size_t collapses = 0;
  };
  std::vector<Replication> reps(m);

  parallel_for(m, [&](std::size_t r) {
    Replication& rep = reps[r];
    auto rng = make_stream(cfg.seed, 0x6d68, r);
    double tau = opt.init_tau;
    double lambda = opt.init_lambda;
    double step_tau = cfg.step_tau;
    double step_lambda = cfg.step_lambda;
    AcceptanceWindow win_tau, win_lambda;

    rep.state = make_image_state(y.size(), opt.inner_admm.prior_var);
    double n_field = 0.0, s_field = 0.0, s_resid = 0.0;
    auto refresh = [&]() {
      AdmmSettings inner = opt.inner_admm;
      inner.tau = std::max(tau, 1e-12);
      inner.lambda = std::max(lambda, 1e-12);
      const EpAdmmReport inner_report =
          epadmm_reconstruct(y, model, inner, opt.inner_ep, &rep.state);
      rep.collapses += inner_report.collapses;
      const auto stats = detail::make_field_stats(y, model, rep.state, inner.lambda,
                                                  inner.tau, inner.prior_var);
      n_field = static_cast<double>(y.size());
      s_field = sum_square(stats.lx_eff);
      s_resid = sum_square(stats.residual_eff);
    };
    refresh();

    // Whole-field tilted log densities via their sufficient statistics;
    // identical to tilted_log_density_* on the moment-augmented grids.
    auto log_target_tau = [&](double t) {
      if (!(t > 0.0)) return kNegInf;
      return -0.5 * n_field * (kLog2Pi + std::log(t)) - 0.5 * s_field / t +
             log_exponential(t, cavity_tau);
    };
    auto log_target_lambda = [&](double l) {
      if (!(l > 0.0)) return kNegInf;
      return -0.5 * n_field * (kLog2Pi + std::log(l)) - 0.5 * s_resid / l +
             log_exponential(l, cavity_lambda);
    };

    rep.tau_chain.reserve(n_iter);
    rep.lambda_chain.reserve(n_iter);
    for (std::size_t t = 0; t < n_iter; ++t) {
      if (t > 0 && opt.refresh_every > 0 && t % static_cast<std::size_t>(opt.refresh_every) == 0)
        refresh();
      const auto st_tau = mh_step(tau, log_target_tau, step_tau, rng);
      tau = st_tau.next;
      win_tau.record(st_tau.accepted);
      if (st_tau.accepted) ++rep.acc_tau;

      const auto st_lambda = mh_step(lambda, log_target_lambda, step_lambda, rng);
      lambda = st_lambda.next;
      win_lambda.record(st_lambda.accepted);
      if (st_lambda.accepted) ++rep.acc_lambda;

      rep.tau_chain.push_back(tau);
      rep.lambda_chain.push_back(lambda);

      if (opt.tune_every > 0 && win_tau.proposals >= opt.tune_every) {
        step_tau = tune_step(win_tau, step_tau, cfg.target_acceptance);
        step_lambda = tune_step(win_lambda, step_lambda, cfg.target_acceptance);
        win_tau.reset();
        win_lambda.reset();
      }
    }
    rep.step_tau = step_tau;
    rep.step_lambda = step_lambda;
  });

  EpMcmcReport report;
  report.tau_chains.chains.reserve(m);
  report.lambda_chains.chains.reserve(m);
  double sum_tau = 0.0, sum_lambda = 0.0;
  long acc_tau = 0, acc_lambda = 0;
  for (const auto& rep : reps) {
    report.tau_chains.chains.push_back(rep.tau_chain);
    report.lambda_chains.chains.push_back(rep.lambda_chain);
    for (double v : rep.tau_chain) sum_tau += v;
    for (double v : rep.lambda_chain) sum_lambda += v;
    acc_tau += rep.acc_tau;
    acc_lambda += rep.acc_lambda;
    report.collapses += rep.collapses;
  }
  const double total = static_cast<double>(m * n_iter);
  report.tau_mean = sum_tau / total;
  report.lambda_mean = sum_lambda / total;
  // Moment matching on the full tilted-sample set (no burn-in, no thinning).
  report.alpha_tau = exponential_moment_match(report.tau_mean);
  report.alpha_lambda = exponential_moment_match(report.lambda_mean);
  report.acceptance_tau = acc_tau / total;
  report.acceptance_lambda = acc_lambda / total;
  report.step_tau_final = reps.front().step_tau;
  report.step_lambda_final = reps.front().step_lambda;
  report.recon_mean = Grid(y.rows(), y.cols(), reps.front().state.mean);
  report.recon_var = Grid(y.rows(), y.cols(), reps.front().state.var);
  return report;
}

}  // namespace sep
