#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

namespace sep {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_normal_pdf(double x, double mean, double var) {
  if (!(var > 0.0)) throw std::domain_error("log_normal_pdf: variance must be > 0");
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

inline double normal_pdf(double x, double mean, double var) {
  return std::exp(log_normal_pdf(x, mean, var));
}

// Exponential density in rate form, alpha * exp(-alpha * theta) on theta >= 0.
inline double log_exponential(double theta, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("log_exponential: rate must be > 0");
  if (theta < 0.0) return kNegInf;
  return std::log(rate) - rate * theta;
}

inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace sep
