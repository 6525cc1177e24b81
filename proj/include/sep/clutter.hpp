#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sep/epcore.hpp"
#include "sep/gaussian.hpp"
#include "sep/rng.hpp"

namespace sep {

// Observations embedded in a sea of clutter:
//   p(y | theta) = (1-w) N(y; theta, 1) + w N(y; 0, clutter_var),
//   theta ~ N(0, prior_var).
struct ClutterModel {
  double w = 0.5;
  double prior_var = 100.0;
  double clutter_var = 10.0;
  int dim = 1;

  void validate() const {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("ClutterModel: w outside [0,1]");
    if (!(prior_var > 0.0) || !(clutter_var > 0.0))
      throw std::invalid_argument("ClutterModel: variances must be > 0");
  }
};

inline double clutter_loglik(double y, double theta, const ClutterModel& cm) {
  if (cm.w <= 0.0) return log_normal_pdf(y, theta, 1.0);
  if (cm.w >= 1.0) return log_normal_pdf(y, 0.0, cm.clutter_var);
  const double terms[2] = {std::log(1.0 - cm.w) + log_normal_pdf(y, theta, 1.0),
                           std::log(cm.w) + log_normal_pdf(y, 0.0, cm.clutter_var)};
  return log_sum_exp(terms);
}

struct ExactPosterior {
  double mean = 0.0;
  double var = 0.0;
  std::vector<double> grid;
  std::vector<double> density;  // normalized over theta
};

inline constexpr std::size_t kClutterEnumerationCap = 20;

// Expands the product of n two-component mixtures into <= 2^n Gaussians and
// normalizes exactly. Guarded at n <= 20.
inline ExactPosterior exact_posterior(std::span<const double> data, const ClutterModel& cm,
                                      std::span<const double> grid) {
  cm.validate();
  const std::size_t n = data.size();
  if (n > kClutterEnumerationCap)
    throw std::invalid_argument("exact_posterior: n exceeds enumeration cap");

  const double log_keep = cm.w < 1.0 ? std::log(1.0 - cm.w) : kNegInf;
  const double log_clut = cm.w > 0.0 ? std::log(cm.w) : kNegInf;

  std::vector<double> log_weight;
  std::vector<double> comp_mean, comp_var;
  const std::uint64_t total = std::uint64_t(1) << n;
  log_weight.reserve(total);
  comp_mean.reserve(total);
  comp_var.reserve(total);

  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double lw = 0.0;
    double m = 0.0, v = cm.prior_var;  // running conjugate posterior
    bool dead = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t(1) << i)) {
        if (log_keep == kNegInf) { dead = true; break; }
        // Non-clutter component: conjugate update, prediction term N(y; m, v+1).
        lw += log_keep + log_normal_pdf(data[i], m, v + 1.0);
        const double gain = v / (v + 1.0);
        m += gain * (data[i] - m);
        v = gain * 1.0;
      } else {
        if (log_clut == kNegInf) { dead = true; break; }
        lw += log_clut + log_normal_pdf(data[i], 0.0, cm.clutter_var);
      }
    }
    if (dead) continue;
    log_weight.push_back(lw);
    comp_mean.push_back(m);
    comp_var.push_back(v);
  }
  if (log_weight.empty()) throw std::domain_error("exact_posterior: no live components");

  const double lz = log_sum_exp(log_weight);
  double mean = 0.0, second = 0.0;
  std::vector<double> pi(log_weight.size());
  for (std::size_t k = 0; k < log_weight.size(); ++k) {
    pi[k] = std::exp(log_weight[k] - lz);
    mean += pi[k] * comp_mean[k];
    second += pi[k] * (comp_var[k] + comp_mean[k] * comp_mean[k]);
  }

  ExactPosterior out;
  out.mean = mean;
  out.var = second - mean * mean;
  out.grid.assign(grid.begin(), grid.end());
  out.density.resize(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double d = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k)
      d += pi[k] * normal_pdf(grid[g], comp_mean[k], comp_var[k]);
    out.density[g] = d;
  }
  return out;
}

// Pointwise product + trapezoid normalization; oracle cross-check for the
// enumeration and fallback beyond the cap.
inline ExactPosterior grid_posterior(std::span<const double> data, const ClutterModel& cm,
                                     std::span<const double> grid) {
  cm.validate();
  if (grid.size() < 3) throw std::invalid_argument("grid_posterior: grid too small");
  std::vector<double> logp(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double lp = log_normal_pdf(grid[g], 0.0, cm.prior_var);
    for (double y : data) lp += clutter_loglik(y, grid[g], cm);
    logp[g] = lp;
  }
  const double m = *std::max_element(logp.begin(), logp.end());
  std::vector<double> p(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) p[g] = std::exp(logp[g] - m);

  auto trapz = [&](auto&& f) {
    double s = 0.0;
    for (std::size_t g = 0; g + 1 < grid.size(); ++g)
      s += 0.5 * (grid[g + 1] - grid[g]) * (f(g) + f(g + 1));
    return s;
  };
  const double z = trapz([&](std::size_t g) { return p[g]; });
  if (!(z > 0.0)) throw std::domain_error("grid_posterior: vanished density");
  ExactPosterior out;
  out.grid.assign(grid.begin(), grid.end());
  out.density.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) out.density[g] = p[g] / z;
  out.mean = trapz([&](std::size_t g) { return out.density[g] * grid[g]; });
  const double second = trapz([&](std::size_t g) { return out.density[g] * grid[g] * grid[g]; });
  out.var = second - out.mean * out.mean;
  return out;
}

inline std::vector<double> default_theta_grid(std::span<const double> data,
                                              const ClutterModel& cm,
                                              std::size_t points = 1001) {
  double mean = 0.0;
  for (double y : data) mean += y;
  if (!data.empty()) mean /= static_cast<double>(data.size());
  const double half = 6.0 * std::sqrt(cm.prior_var);
  std::vector<double> grid(points);
  for (std::size_t g = 0; g < points; ++g)
    grid[g] = mean - half + 2.0 * half * static_cast<double>(g) / static_cast<double>(points - 1);
  return grid;
}

// Closed-form moments of cavity x clutter likelihood: a two-Gaussian mixture.
inline std::optional<GaussianMoments> clutter_tilted_moments(double y,
                                                             const GaussianMoments& cavity,
                                                             const ClutterModel& cm) {
  const double za = (1.0 - cm.w) * normal_pdf(y, cavity.mean, cavity.var + 1.0);
  const double zb = cm.w * normal_pdf(y, 0.0, cm.clutter_var);
  const double z = za + zb;
  if (!(z > 0.0)) return std::nullopt;
  const double gain = cavity.var / (cavity.var + 1.0);
  const double ma = cavity.mean + gain * (y - cavity.mean);
  const double va = gain;  // cavity.var * 1 / (cavity.var + 1)
  const double pa = za / z;
  const double mean = pa * ma + (1.0 - pa) * cavity.mean;
  const double second = pa * (va + ma * ma) +
                        (1.0 - pa) * (cavity.var + cavity.mean * cavity.mean);
  const double var = second - mean * mean;
  if (!(var > 0.0)) return std::nullopt;
  return GaussianMoments{mean, var};
}

struct ClutterFitResult {
  double mean = 0.0;
  double var = 0.0;
  int sweeps = 0;
  bool converged = false;
  bool ok = true;  // false on total collapse
  std::size_t collapses = 0;
  std::vector<double> site_prec;
  std::vector<double> site_prec_mean;
};

namespace detail {

template <typename Hook>
ClutterFitResult run_clutter_ep(std::size_t n_sites, const ClutterModel& cm,
                                const EpConfig& cfg, Hook&& hook) {
  cm.validate();
  if (n_sites == 0) throw std::invalid_argument("clutter fit: need at least one observation");
  auto st = GaussianFactorState::shared_scalar(n_sites, 0.0, cm.prior_var);
  const auto schedule = row_major_schedule(n_sites);
  ClutterFitResult out;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    const SweepResult r = ep_sweep(st, schedule,
                                   [&](std::size_t s, const GaussianMoments& cavity) {
                                     return hook(sweep, s, cavity);
                                   },
                                   SweepOptions{cfg.damping});
    out.sweeps = sweep + 1;
    out.collapses += r.collapses;
    if (r.collapses + r.hook_failures == n_sites) {
      out.ok = false;
      break;
    }
    if (r.max_site_delta < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.mean = st.mean[0];
  out.var = st.var[0];
  out.site_prec = st.site_prec;
  out.site_prec_mean = st.site_prec_mean;
  return out;
}

}  // namespace detail

// Classic EP with analytic tilted moments.
inline ClutterFitResult ep_clutter(std::span<const double> data, const ClutterModel& cm,
                                   const EpConfig& cfg = {}) {
  return detail::run_clutter_ep(data.size(), cm, cfg,
                                [&](int, std::size_t s, const GaussianMoments& cavity) {
                                  return clutter_tilted_moments(data[s], cavity, cm);
                                });
}

struct ClutterMcConfig {
  std::size_t samples = 1024;
  std::uint64_t seed = 0;
};

// Tilted moments estimated by self-normalized sampling from the cavity.
inline ClutterFitResult epmc_clutter(std::span<const double> data, const ClutterModel& cm,
                                     const ClutterMcConfig& mc, const EpConfig& cfg = {}) {
  if (mc.samples == 0) throw std::invalid_argument("epmc_clutter: samples must be >= 1");
  return detail::run_clutter_ep(
      data.size(), cm, cfg,
      [&](int sweep, std::size_t s, const GaussianMoments& cavity)
          -> std::optional<GaussianMoments> {
        auto rng = make_stream(mc.seed, static_cast<std::uint64_t>(sweep), s);
        std::normal_distribution<double> proposal(cavity.mean, std::sqrt(cavity.var));
        std::vector<double> theta(mc.samples), logw(mc.samples);
        for (std::size_t k = 0; k < mc.samples; ++k) {
          theta[k] = proposal(rng);
          logw[k] = clutter_loglik(data[s], theta[k], cm);
        }
        const double lmax = *std::max_element(logw.begin(), logw.end());
        if (!std::isfinite(lmax)) return std::nullopt;
        double sw = 0.0, swx = 0.0, swxx = 0.0;
        for (std::size_t k = 0; k < mc.samples; ++k) {
          const double w = std::exp(logw[k] - lmax);
          sw += w;
          swx += w * theta[k];
          swxx += w * theta[k] * theta[k];
        }
        if (!(sw > 0.0)) return std::nullopt;  // degenerate weights
        const double mean = swx / sw;
        const double var = swxx / sw - mean * mean;
        if (!(var > 0.0)) return std::nullopt;
        return GaussianMoments{mean, var};
      });
}

struct ClutterAdmmConfig {
  double rho = 0.0;
  double a = 0.0;
  double b = 1e-6;
};

// EP with the method-of-multipliers correction applied to the moment update;
// rho = 0 with zero duals reduces exactly to ep_clutter.
inline ClutterFitResult epadmm_clutter(std::span<const double> data, const ClutterModel& cm,
                                       const ClutterAdmmConfig& admm, const EpConfig& cfg = {}) {
  std::vector<double> dual_mean(data.size(), 0.0);
  std::vector<double> dual_var(data.size(), 0.0);
  return detail::run_clutter_ep(
      data.size(), cm, cfg,
      [&](int, std::size_t s, const GaussianMoments& cavity)
          -> std::optional<GaussianMoments> {
        const auto tilted = clutter_tilted_moments(data[s], cavity, cm);
        if (!tilted) return std::nullopt;
        const double m_new = tilted->mean + dual_mean[s] + admm.rho * (cavity.mean - admm.a);
        double v_new = tilted->var + dual_var[s] + admm.rho * (cavity.var - admm.b);
        v_new = std::max(v_new, admm.b);
        dual_mean[s] += admm.rho * (m_new - admm.a);
        dual_var[s] += admm.rho * (v_new - admm.b);
        return GaussianMoments{m_new, v_new};
      });
}

}  // namespace sep
