#pragma once

#include <stdexcept>

#include "sep/gaussian.hpp"
#include "sep/grid.hpp"
#include "sep/operators.hpp"

namespace sep {

// Hierarchical observation model:
//   y_ij ~ N((G x)_ij, lambda),  (L x)_ij ~ N(0, tau),
//   lambda ~ Exp(hyper_rate_lambda), tau ~ Exp(hyper_rate_tau).
// lambda and tau sit in the variance slot of the Gaussian densities; reports
// convert to precision (1/tau) and standard deviation (sqrt(lambda)).
struct Model {
  LinearOperator forward = LinearOperator::identity();      // G
  LinearOperator regularizer = LinearOperator::identity();  // L
  double hyper_rate_tau = 10.0;
  double hyper_rate_lambda = 10.0;

  void validate() const {
    if (!(hyper_rate_tau > 0.0) || !(hyper_rate_lambda > 0.0))
      throw std::invalid_argument("Model: hyper rates must be > 0");
  }
};

inline double reported_precision(double tau_variance) { return 1.0 / tau_variance; }
inline double reported_sd(double lambda_variance) { return std::sqrt(lambda_variance); }

inline double log_likelihood(const Grid& y, const Grid& x, const LinearOperator& g,
                             double lambda) {
  if (!y.same_shape(x)) throw std::invalid_argument("log_likelihood: shape mismatch");
  if (!(lambda > 0.0)) throw std::domain_error("log_likelihood: lambda must be > 0");
  const Grid gx = apply_operator(g, x);
  double total = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) total += log_normal_pdf(y[k], gx[k], lambda);
  return total;
}

inline double log_prior_field(const Grid& x, const LinearOperator& l, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("log_prior_field: tau must be > 0");
  const Grid lx = apply_operator(l, x);
  double total = 0.0;
  for (double v : lx.values()) total += log_normal_pdf(v, 0.0, tau);
  return total;
}

inline double log_joint(const Grid& y, const Grid& x, double lambda, double tau,
                        const Model& model) {
  if (lambda < 0.0 || tau < 0.0) return kNegInf;
  return log_likelihood(y, x, model.forward, lambda) +
         log_prior_field(x, model.regularizer, tau) +
         log_exponential(lambda, model.hyper_rate_lambda) +
         log_exponential(tau, model.hyper_rate_tau);
}

}  // namespace sep
