#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sep/grid.hpp"

namespace sep {

struct GaussianMoments {
  double mean = 0.0;
  double var = 1.0;
};

// Gaussian approximating term stored in natural parameters so that vacuous
// sites (zero precision) and negative-variance sites are both representable.
struct GaussianSite {
  double prec = 0.0;
  double prec_mean = 0.0;

  bool vacuous() const { return prec == 0.0 && prec_mean == 0.0; }
  double site_variance() const { return 1.0 / prec; }
  double site_mean() const { return prec_mean / prec; }
};

// Cavity by natural-parameter subtraction: q / site. Empty result signals a
// CavityCollapse (nonpositive cavity precision); the caller decides skip/damp.
inline std::optional<GaussianMoments> gaussian_cavity(const GaussianMoments& belief,
                                                      const GaussianSite& site) {
  if (!(belief.var > 0.0)) throw std::domain_error("gaussian_cavity: belief variance <= 0");
  const double prec = 1.0 / belief.var - site.prec;
  if (!(prec > 0.0)) return std::nullopt;
  const double prec_mean = belief.mean / belief.var - site.prec_mean;
  return GaussianMoments{prec_mean / prec, 1.0 / prec};
}

inline std::optional<double> exponential_cavity(double rate, double site_rate) {
  if (!(rate > 0.0)) throw std::domain_error("exponential_cavity: rate <= 0");
  const double cavity = rate - site_rate;
  if (!(cavity > 0.0)) return std::nullopt;
  return cavity;
}

// KL projection onto the Gaussian family keeps the first two tilted moments.
inline GaussianMoments moment_match_gaussian(double tilted_mean, double tilted_var) {
  if (!(tilted_var > 0.0))
    throw std::domain_error("moment_match_gaussian: variance must be > 0");
  return GaussianMoments{tilted_mean, tilted_var};
}

// KL projection onto the exponential family matches the mean: rate = 1/mean.
inline double exponential_moment_match(double tilted_mean) {
  if (!(tilted_mean > 0.0))
    throw std::domain_error("exponential_moment_match: mean must be > 0");
  return 1.0 / tilted_mean;
}

// New site = new belief / cavity, in natural parameters. Negative site
// variance is representable and permitted.
inline GaussianSite gaussian_site_update(const GaussianMoments& new_belief,
                                         const GaussianMoments& cavity) {
  if (!(new_belief.var > 0.0) || !(cavity.var > 0.0))
    throw std::domain_error("gaussian_site_update: variances must be > 0");
  return GaussianSite{1.0 / new_belief.var - 1.0 / cavity.var,
                      new_belief.mean / new_belief.var - cavity.mean / cavity.var};
}

// Factorized Gaussian state: belief marginals plus one site per exact factor.
// site_owner maps each site onto the belief entry it refines, covering both
// the shared-parameter case (all sites on one marginal) and per-pixel sites.
struct GaussianFactorState {
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> site_prec;
  std::vector<double> site_prec_mean;
  std::vector<std::size_t> site_owner;

  std::size_t sites() const { return site_prec.size(); }

  static GaussianFactorState pixel_grid(std::size_t n, double m0, double v0) {
    GaussianFactorState st;
    st.mean.assign(n, m0);
    st.var.assign(n, v0);
    st.site_prec.assign(n, 0.0);
    st.site_prec_mean.assign(n, 0.0);
    st.site_owner.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.site_owner[i] = i;
    return st;
  }

  static GaussianFactorState shared_scalar(std::size_t n_sites, double m0, double v0) {
    GaussianFactorState st;
    st.mean.assign(1, m0);
    st.var.assign(1, v0);
    st.site_prec.assign(n_sites, 0.0);
    st.site_prec_mean.assign(n_sites, 0.0);
    st.site_owner.assign(n_sites, 0);
    return st;
  }

  GaussianMoments belief(std::size_t site) const {
    const std::size_t b = site_owner[site];
    return GaussianMoments{mean[b], var[b]};
  }
  GaussianSite site(std::size_t s) const {
    return GaussianSite{site_prec[s], site_prec_mean[s]};
  }
};

struct SweepOptions {
  double damping = 1.0;  // new site = (1-d)*old + d*proposed, in naturals
};

struct SweepResult {
  double max_site_delta = 0.0;
  std::size_t collapses = 0;
  std::size_t hook_failures = 0;
  std::vector<std::size_t> collapsed_sites;
};

inline std::vector<std::size_t> row_major_schedule(std::size_t n) {
  std::vector<std::size_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

// One EP pass: for each scheduled site, cavity -> tilted moments via the
// engine hook -> moment match -> site update by division. Collapsed cavities
// and hook failures are skipped and counted.
template <typename TiltedHook>
SweepResult ep_sweep(GaussianFactorState& st, std::span<const std::size_t> schedule,
                     TiltedHook&& hook, const SweepOptions& opt = {}) {
  SweepResult result;
  for (std::size_t s : schedule) {
    const auto cavity = gaussian_cavity(st.belief(s), st.site(s));
    if (!cavity) {
      ++result.collapses;
      result.collapsed_sites.push_back(s);
      continue;
    }
    const std::optional<GaussianMoments> tilted = hook(s, *cavity);
    if (!tilted) {
      ++result.hook_failures;
      continue;
    }
    const GaussianMoments matched = moment_match_gaussian(tilted->mean, tilted->var);
    const GaussianSite proposed = gaussian_site_update(matched, *cavity);
    const double d = opt.damping;
    const double new_prec = (1.0 - d) * st.site_prec[s] + d * proposed.prec;
    const double new_prec_mean = (1.0 - d) * st.site_prec_mean[s] + d * proposed.prec_mean;

    // Damped site must still combine with the cavity into a proper belief.
    const double belief_prec = 1.0 / cavity->var + new_prec;
    if (!(belief_prec > 0.0)) {
      ++result.collapses;
      result.collapsed_sites.push_back(s);
      continue;
    }
    result.max_site_delta = std::max(result.max_site_delta,
                                     std::abs(new_prec - st.site_prec[s]));
    result.max_site_delta = std::max(result.max_site_delta,
                                     std::abs(new_prec_mean - st.site_prec_mean[s]));
    st.site_prec[s] = new_prec;
    st.site_prec_mean[s] = new_prec_mean;
    const double belief_prec_mean = cavity->mean / cavity->var + new_prec_mean;
    const std::size_t b = st.site_owner[s];
    st.var[b] = 1.0 / belief_prec;
    st.mean[b] = belief_prec_mean / belief_prec;
  }
  return result;
}

// Strict comparison: true iff every site parameter moved by less than tol.
inline bool converged(const GaussianFactorState& prev, const GaussianFactorState& next,
                      double tol) {
  if (prev.sites() != next.sites())
    throw std::invalid_argument("converged: state shape mismatch");
  for (std::size_t s = 0; s < prev.sites(); ++s) {
    if (!(std::abs(prev.site_prec[s] - next.site_prec[s]) < tol)) return false;
    if (!(std::abs(prev.site_prec_mean[s] - next.site_prec_mean[s]) < tol)) return false;
  }
  return true;
}

struct EpConfig {
  double tol = 1e-6;
  int max_sweeps = 200;
  double damping = 1.0;
};

}  // namespace sep
