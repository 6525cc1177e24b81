#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sep/epcore.hpp"
#include "sep/gaussian.hpp"
#include "sep/grid.hpp"
#include "sep/model.hpp"

namespace sep {

// Dual variables and constraint constants for the constrained moment update,
// minimize KL subject to m >= a, v >= b.
struct AdmmState {
  std::vector<double> dual_mean;  // alpha, per pixel
  std::vector<double> dual_var;   // beta, per pixel
  double rho = 0.0;
  double bound_a = 0.0;
  double bound_b = 1e-6;

  static AdmmState zeros(std::size_t n, double rho = 0.0, double a = 0.0, double b = 1e-6) {
    if (rho < 0.0) throw std::invalid_argument("AdmmState: rho must be >= 0");
    if (!(b > 0.0)) throw std::invalid_argument("AdmmState: bound_b must be > 0");
    AdmmState st;
    st.dual_mean.assign(n, 0.0);
    st.dual_var.assign(n, 0.0);
    st.rho = rho;
    st.bound_a = a;
    st.bound_b = b;
    return st;
  }
};

struct ZxResult {
  double z;
  double m_y;
  double v_y;
};

// Normalizer of the Gaussian-likelihood tilted distribution:
// Z_x = N(y; g m_-, v_- g^2 + lambda).
inline ZxResult closed_form_zx(double y, double g, double m_cav, double v_cav, double lambda) {
  if (!(v_cav > 0.0)) throw std::domain_error("closed_form_zx: cavity variance <= 0");
  if (!(lambda > 0.0)) throw std::domain_error("closed_form_zx: lambda <= 0");
  const double v_y = v_cav * g * g + lambda;
  if (!(v_y > 0.0)) throw std::domain_error("closed_form_zx: nonpositive predictive variance");
  const double m_y = g * m_cav;
  return ZxResult{normal_pdf(y, m_y, v_y), m_y, v_y};
}

// d log Z_x / d m_-, the analytic mean-shift term.
inline double zx_dlogz_dmean(double y, double g, double m_cav, double v_cav, double lambda) {
  return g * (y - g * m_cav) / (v_cav * g * g + lambda);
}

// Moment update with the method-of-multipliers correction; the variance is
// clamped at bound_b so positivity holds unconditionally.
inline GaussianMoments admm_update_site(double y, double g, double m_cav, double v_cav,
                                        double lambda, const AdmmState& admm,
                                        std::size_t pixel) {
  const double denom = v_cav * g * g + lambda;
  const double m_new = m_cav + v_cav * g * (y - g * m_cav) / denom + admm.dual_mean[pixel] +
                       admm.rho * (m_cav - admm.bound_a);
  double v_new = v_cav * lambda / denom + admm.dual_var[pixel] +
                 admm.rho * (v_cav - admm.bound_b);
  v_new = std::max(v_new, admm.bound_b);
  return GaussianMoments{m_new, v_new};
}

inline void admm_dual_update(AdmmState& admm, double m_new, double v_new, std::size_t pixel) {
  admm.dual_mean[pixel] += admm.rho * (m_new - admm.bound_a);
  admm.dual_var[pixel] += admm.rho * (v_new - admm.bound_b);
}

namespace detail {

// Column-major sparse view of a pixel operator, including boundary folding;
// column s lists every output (row, weight) that reads pixel s.
struct SparseColumns {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> row;
  std::vector<double> weight;

  static SparseColumns build(const LinearOperator& op, std::size_t rows, std::size_t cols) {
    const std::size_t n = rows * cols;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> cols_tmp(n);
    auto push = [&](std::size_t src, std::uint32_t out, double w) {
      cols_tmp[src].emplace_back(out, w);
    };
    switch (op.kind()) {
      case OperatorKind::Identity:
        for (std::uint32_t k = 0; k < n; ++k) push(k, k, 1.0);
        break;
      case OperatorKind::Scalar:
        for (std::uint32_t k = 0; k < n; ++k) push(k, k, op.gain());
        break;
      case OperatorKind::Convolution:
      case OperatorKind::Laplacian: {
        const Grid& kern = op.kernel();
        const long ri = static_cast<long>(kern.rows()) / 2;
        const long rj = static_cast<long>(kern.cols()) / 2;
        const long nr = static_cast<long>(rows), nc = static_cast<long>(cols);
        for (long i = 0; i < nr; ++i)
          for (long j = 0; j < nc; ++j)
            for (long di = -ri; di <= ri; ++di)
              for (long dj = -rj; dj <= rj; ++dj) {
                const double w = kern(static_cast<std::size_t>(di + ri),
                                      static_cast<std::size_t>(dj + rj));
                if (w == 0.0) continue;
                long ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= nr || jj < 0 || jj >= nc) {
                  if (op.boundary() == Boundary::Zero) continue;
                  ii = static_cast<long>(reflect_index(ii, nr));
                  jj = static_cast<long>(reflect_index(jj, nc));
                }
                push(static_cast<std::size_t>(ii * nc + jj),
                     static_cast<std::uint32_t>(i * nc + j), w);
              }
        break;
      }
    }
    SparseColumns sc;
    sc.offsets.resize(n + 1, 0);
    std::size_t total = 0;
    for (std::size_t s = 0; s < n; ++s) {
      sc.offsets[s] = static_cast<std::uint32_t>(total);
      total += cols_tmp[s].size();
    }
    sc.offsets[n] = static_cast<std::uint32_t>(total);
    sc.row.resize(total);
    sc.weight.resize(total);
    std::size_t at = 0;
    for (std::size_t s = 0; s < n; ++s)
      for (const auto& [r, w] : cols_tmp[s]) {
        sc.row[at] = r;
        sc.weight[at] = w;
        ++at;
      }
    return sc;
  }
};

// Running residual r = y - G m with per-pixel adjoint reads, so pixel sweeps
// perform exact Gauss-Seidel on the coupled normal equations while each site
// still sees the scalar update formula.
class ResidualFeedback {
 public:
  ResidualFeedback(const Grid& y, const LinearOperator& g)
      : columns_(SparseColumns::build(g, y.rows(), y.cols())), residual_(y) {}

  void reset(const Grid& y, const Grid& mean, const LinearOperator& g) {
    const Grid pred = apply_operator(g, mean);
    residual_ = y;
    for (std::size_t k = 0; k < residual_.size(); ++k) residual_[k] -= pred[k];
  }

  double adjoint_residual(std::size_t s) const {
    double acc = 0.0;
    for (std::uint32_t t = columns_.offsets[s]; t < columns_.offsets[s + 1]; ++t)
      acc += columns_.weight[t] * residual_[columns_.row[t]];
    return acc;
  }

  void mean_changed(std::size_t s, double delta) {
    for (std::uint32_t t = columns_.offsets[s]; t < columns_.offsets[s + 1]; ++t)
      residual_[columns_.row[t]] -= columns_.weight[t] * delta;
  }

  double residual_norm() const {
    double acc = 0.0;
    for (double r : residual_.values()) acc += r * r;
    return std::sqrt(acc);
  }

  const Grid& residual() const { return residual_; }

 private:
  SparseColumns columns_;
  Grid residual_;
};

// Pseudo-observation making the scalar site update solve the full coupled
// system: with cavity (0, v0) the fixed point is m/v0 = G^T(y - G m)/lambda.
inline double pseudo_observation(double adjoint_res, double gain, double mean) {
  return (adjoint_res + gain * gain * mean) / gain;
}

// Per-pixel prior variance surrogate induced by the field prior N(Lx|0,tau).
inline double prior_var_surrogate(const Model& model, double tau) {
  return tau / stencil_sq_norm(model.regularizer);
}

}  // namespace detail

struct AdmmSettings {
  double rho = 0.0;
  double a = 0.0;
  double b = 1e-6;
  double prior_var = 1e8;  // vague base belief N(0, prior_var) per pixel
  double tau = 1.0;        // field prior variance for the L sites
  double lambda = 0.01;    // noise variance for the likelihood sites
};

struct EpAdmmReport {
  Grid mean;
  Grid var;
  int sweeps = 0;
  bool converged = false;
  std::size_t collapses = 0;
  std::size_t clamps = 0;  // variance updates that hit bound_b
  std::vector<double> residual_norms;
  double dual_mean_norm = 0.0;
  double dual_var_norm = 0.0;
};

// Belief state for image engines: per pixel one likelihood site (indices
// [0, n)) and one field-prior site (indices [n, 2n)), both on the same
// marginal.
inline GaussianFactorState make_image_state(std::size_t n, double base_var) {
  GaussianFactorState st;
  st.mean.assign(n, 0.0);
  st.var.assign(n, base_var);
  st.site_prec.assign(2 * n, 0.0);
  st.site_prec_mean.assign(2 * n, 0.0);
  st.site_owner.resize(2 * n);
  for (std::size_t s = 0; s < 2 * n; ++s) st.site_owner[s] = s % n;
  return st;
}

// Full-image reconstruction. Likelihood sites carry N(y | g x, lambda) with
// the method-of-multipliers correction; prior sites carry N(Lx | 0, tau).
// Residual feedback turns the scalar updates into Gauss-Seidel passes over
// the coupled normal equations, so the mean grid converges to the posterior
// mean of the full linear model.
inline EpAdmmReport epadmm_reconstruct(const Grid& y, const Model& model,
                                       const AdmmSettings& settings, const EpConfig& ep,
                                       GaussianFactorState* warm_start = nullptr) {
  model.validate();
  if (!(settings.prior_var > 0.0))
    throw std::invalid_argument("epadmm_reconstruct: prior_var must be > 0");
  if (!(settings.lambda > 0.0))
    throw std::invalid_argument("epadmm_reconstruct: lambda must be > 0");
  if (!(settings.tau > 0.0))
    throw std::invalid_argument("epadmm_reconstruct: tau must be > 0");
  const std::size_t n = y.size();

  GaussianFactorState local = make_image_state(n, settings.prior_var);
  GaussianFactorState& st = warm_start ? *warm_start : local;
  if (st.sites() != 2 * n)
    throw std::invalid_argument("epadmm_reconstruct: warm start shape");

  AdmmState admm = AdmmState::zeros(n, settings.rho, settings.a, settings.b);
  AdmmState prior_plain = AdmmState::zeros(n, 0.0, settings.a, settings.b);
  const Grid gain = diagonal_gain(model.forward, y.rows(), y.cols());
  const double l_gain = std::sqrt(stencil_sq_norm(model.regularizer));

  detail::ResidualFeedback data_feedback(y, model.forward);
  data_feedback.reset(y, Grid(y.rows(), y.cols(), st.mean), model.forward);
  const Grid zero(y.rows(), y.cols(), 0.0);
  detail::ResidualFeedback prior_feedback(zero, model.regularizer);
  prior_feedback.reset(zero, Grid(y.rows(), y.cols(), st.mean), model.regularizer);

  EpAdmmReport report;
  const auto schedule = row_major_schedule(2 * n);
  for (int sweep = 0; sweep < ep.max_sweeps; ++sweep) {
    const SweepResult r = ep_sweep(
        st, schedule,
        [&](std::size_t s, const GaussianMoments& cavity)
            -> std::optional<GaussianMoments> {
          const bool is_data = s < n;
          const std::size_t p = is_data ? s : s - n;
          const double g = is_data ? gain[p] : l_gain;
          if (std::abs(g) < 1e-12) return std::nullopt;  // no pull at this pixel
          auto& feedback = is_data ? data_feedback : prior_feedback;
          const double noise = is_data ? settings.lambda : settings.tau;
          const double y_eff =
              detail::pseudo_observation(feedback.adjoint_residual(p), g, st.mean[p]);
          AdmmState& duals = is_data ? admm : prior_plain;
          GaussianMoments updated =
              admm_update_site(y_eff, g, cavity.mean, cavity.var, noise, duals, p);
          const double unclamped =
              cavity.var * noise / (cavity.var * g * g + noise) + duals.dual_var[p] +
              duals.rho * (cavity.var - duals.bound_b);
          if (unclamped < duals.bound_b) ++report.clamps;
          if (is_data) admm_dual_update(admm, updated.mean, updated.var, p);
          const double delta = updated.mean - st.mean[p];
          data_feedback.mean_changed(p, delta);
          prior_feedback.mean_changed(p, delta);
          return updated;
        },
        SweepOptions{1.0});
    report.sweeps = sweep + 1;
    report.collapses += r.collapses;
    report.residual_norms.push_back(data_feedback.residual_norm());
    if (r.max_site_delta < ep.tol) {
      report.converged = true;
      break;
    }
  }

  report.mean = Grid(y.rows(), y.cols(), st.mean);
  report.var = Grid(y.rows(), y.cols(), st.var);
  for (std::size_t k = 0; k < n; ++k) {
    report.dual_mean_norm += admm.dual_mean[k] * admm.dual_mean[k];
    report.dual_var_norm += admm.dual_var[k] * admm.dual_var[k];
  }
  report.dual_mean_norm = std::sqrt(report.dual_mean_norm);
  report.dual_var_norm = std::sqrt(report.dual_var_norm);
  return report;
}

}  // namespace sep
