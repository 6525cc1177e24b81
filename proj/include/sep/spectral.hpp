#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>

#include "sep/model.hpp"

namespace sep {

namespace detail {

// Per-axis even symmetry makes a stencil diagonal in the DCT-II basis that
// half-sample reflection induces.
inline bool axis_symmetric(const Grid& kernel) {
  const std::size_t kr = kernel.rows(), kc = kernel.cols();
  for (std::size_t i = 0; i < kr; ++i)
    for (std::size_t j = 0; j < kc; ++j) {
      if (std::abs(kernel(i, j) - kernel(kr - 1 - i, j)) > 1e-12) return false;
      if (std::abs(kernel(i, j) - kernel(i, kc - 1 - j)) > 1e-12) return false;
    }
  return true;
}

inline std::optional<double> operator_symbol(const LinearOperator& op, double theta,
                                             double phi) {
  switch (op.kind()) {
    case OperatorKind::Identity:
      return 1.0;
    case OperatorKind::Scalar:
      return op.gain();
    case OperatorKind::Convolution:
    case OperatorKind::Laplacian: {
      if (op.boundary() != Boundary::Reflect) return std::nullopt;
      const Grid& k = op.kernel();
      if (!axis_symmetric(k)) return std::nullopt;
      const long ri = static_cast<long>(k.rows()) / 2;
      const long rj = static_cast<long>(k.cols()) / 2;
      double acc = 0.0;
      for (long di = -ri; di <= ri; ++di)
        for (long dj = -rj; dj <= rj; ++dj)
          acc += k(static_cast<std::size_t>(di + ri), static_cast<std::size_t>(dj + rj)) *
                 std::cos(di * theta) * std::cos(dj * phi);
      return acc;
    }
  }
  return std::nullopt;
}

}  // namespace detail

struct StationaryStats {
  double mean_var;     // average posterior variance of x per pixel
  double mean_lx_var;  // average Var((Lx)_ij)
  double mean_gx_var;  // average Var((Gx)_ij)
};

// Mode-exact average posterior variances for the stationary Gaussian model
// prec(x) = G^T G / lambda + L^T L / tau + I / v0 under reflect boundaries.
// These carry the full posterior correlation that the factorized per-pixel
// beliefs cannot represent. Returns nullopt when an operator is not
// DCT-diagonalizable (odd kernels or zero boundary); callers then fall back
// to the independent-pixel pushforward.
inline std::optional<StationaryStats> stationary_posterior_stats(
    const Model& model, double lambda, double tau, double v0, std::size_t rows,
    std::size_t cols) {
  if (!(lambda > 0.0) || !(tau > 0.0) || !(v0 > 0.0)) return std::nullopt;
  StationaryStats out{0.0, 0.0, 0.0};
  const double total = static_cast<double>(rows * cols);
  for (std::size_t p = 0; p < rows; ++p) {
    const double theta = std::numbers::pi * static_cast<double>(p) / static_cast<double>(rows);
    for (std::size_t q = 0; q < cols; ++q) {
      const double phi = std::numbers::pi * static_cast<double>(q) / static_cast<double>(cols);
      const auto bg = detail::operator_symbol(model.forward, theta, phi);
      const auto bl = detail::operator_symbol(model.regularizer, theta, phi);
      if (!bg || !bl) return std::nullopt;
      const double var =
          1.0 / ((*bg) * (*bg) / lambda + (*bl) * (*bl) / tau + 1.0 / v0);
      out.mean_var += var;
      out.mean_lx_var += (*bl) * (*bl) * var;
      out.mean_gx_var += (*bg) * (*bg) * var;
    }
  }
  out.mean_var /= total;
  out.mean_lx_var /= total;
  out.mean_gx_var /= total;
  return out;
}

}  // namespace sep
