#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "sep/grid.hpp"

namespace sep {

enum class OperatorKind { Identity, Scalar, Convolution, Laplacian };
enum class Boundary { Reflect, Zero };

// Pixel-space linear operator: identity, scalar gain, odd-sized convolution
// kernel, or the 4-neighbour Laplacian stencil.
class LinearOperator {
 public:
  static LinearOperator identity() { return LinearOperator(OperatorKind::Identity); }

  static LinearOperator scalar(double gain) {
    if (gain == 0.0) throw std::invalid_argument("LinearOperator: zero scalar gain");
    LinearOperator op(OperatorKind::Scalar);
    op.gain_ = gain;
    return op;
  }

  static LinearOperator convolution(Grid kernel, Boundary boundary = Boundary::Reflect) {
    if (kernel.rows() % 2 == 0 || kernel.cols() % 2 == 0)
      throw std::invalid_argument("LinearOperator: kernel dimensions must be odd");
    if (!kernel.all_finite())
      throw std::invalid_argument("LinearOperator: kernel entries must be finite");
    LinearOperator op(OperatorKind::Convolution);
    op.kernel_ = std::move(kernel);
    op.boundary_ = boundary;
    return op;
  }

  static LinearOperator laplacian(Boundary boundary = Boundary::Reflect) {
    LinearOperator op(OperatorKind::Laplacian);
    op.kernel_ = Grid(3, 3, {0.0, -1.0, 0.0, -1.0, 4.0, -1.0, 0.0, -1.0, 0.0});
    op.boundary_ = boundary;
    return op;
  }

  // Normalized Gaussian blur, kernel radius = ceil(2*sigma) capped at 3.
  static LinearOperator gaussian_blur(double sigma, Boundary boundary = Boundary::Reflect) {
    if (!(sigma > 0.0)) throw std::invalid_argument("LinearOperator: blur sigma must be > 0");
    const int r = std::min(3, std::max(1, static_cast<int>(std::ceil(2.0 * sigma))));
    const std::size_t k = static_cast<std::size_t>(2 * r + 1);
    Grid kernel(k, k);
    double total = 0.0;
    for (int i = -r; i <= r; ++i)
      for (int j = -r; j <= r; ++j) {
        const double w = std::exp(-0.5 * (i * i + j * j) / (sigma * sigma));
        kernel(static_cast<std::size_t>(i + r), static_cast<std::size_t>(j + r)) = w;
        total += w;
      }
    for (double& v : kernel.values()) v /= total;
    return convolution(std::move(kernel), boundary);
  }

  OperatorKind kind() const { return kind_; }
  Boundary boundary() const { return boundary_; }
  double gain() const { return gain_; }
  const Grid& kernel() const { return kernel_; }

 private:
  explicit LinearOperator(OperatorKind kind) : kind_(kind) {}

  OperatorKind kind_;
  Boundary boundary_ = Boundary::Reflect;
  double gain_ = 1.0;
  Grid kernel_;
};

namespace detail {

inline std::size_t reflect_index(long idx, long n) {
  // Symmetric reflection about the edge pixel (..., 1, 0 | 0, 1, ...).
  while (idx < 0 || idx >= n) {
    if (idx < 0) idx = -idx - 1;
    if (idx >= n) idx = 2 * n - idx - 1;
  }
  return static_cast<std::size_t>(idx);
}

// Applies a stencil as correlation: out(i,j) = sum_t k(t) * x(i+di, j+dj).
// `transform` maps kernel taps (used to square them for variance pushforward).
template <typename TapFn>
Grid correlate(const Grid& kernel, const Grid& x, Boundary boundary, TapFn&& tap) {
  if (kernel.rows() > x.rows() || kernel.cols() > x.cols())
    throw std::invalid_argument("apply_operator: kernel larger than image");
  const long ri = static_cast<long>(kernel.rows()) / 2;
  const long rj = static_cast<long>(kernel.cols()) / 2;
  const long nr = static_cast<long>(x.rows());
  const long nc = static_cast<long>(x.cols());
  Grid out(x.rows(), x.cols());
  for (long i = 0; i < nr; ++i) {
    for (long j = 0; j < nc; ++j) {
      double acc = 0.0;
      for (long di = -ri; di <= ri; ++di) {
        for (long dj = -rj; dj <= rj; ++dj) {
          const double k = tap(kernel(static_cast<std::size_t>(di + ri),
                                      static_cast<std::size_t>(dj + rj)));
          if (k == 0.0) continue;
          const long ii = i + di, jj = j + dj;
          double v = 0.0;
          if (ii >= 0 && ii < nr && jj >= 0 && jj < nc) {
            v = x(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
          } else if (boundary == Boundary::Reflect) {
            v = x(reflect_index(ii, nr), reflect_index(jj, nc));
          }
          acc += k * v;
        }
      }
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc;
    }
  }
  return out;
}

// Exact adjoint of `correlate`: scatter each output tap back to its source.
inline Grid correlate_adjoint(const Grid& kernel, const Grid& y, Boundary boundary) {
  if (kernel.rows() > y.rows() || kernel.cols() > y.cols())
    throw std::invalid_argument("apply_adjoint: kernel larger than image");
  const long ri = static_cast<long>(kernel.rows()) / 2;
  const long rj = static_cast<long>(kernel.cols()) / 2;
  const long nr = static_cast<long>(y.rows());
  const long nc = static_cast<long>(y.cols());
  Grid out(y.rows(), y.cols());
  for (long i = 0; i < nr; ++i) {
    for (long j = 0; j < nc; ++j) {
      const double v = y(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (v == 0.0) continue;
      for (long di = -ri; di <= ri; ++di) {
        for (long dj = -rj; dj <= rj; ++dj) {
          const double k = kernel(static_cast<std::size_t>(di + ri),
                                  static_cast<std::size_t>(dj + rj));
          if (k == 0.0) continue;
          const long ii = i + di, jj = j + dj;
          if (ii >= 0 && ii < nr && jj >= 0 && jj < nc) {
            out(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) += k * v;
          } else if (boundary == Boundary::Reflect) {
            out(reflect_index(ii, nr), reflect_index(jj, nc)) += k * v;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

inline Grid apply_operator(const LinearOperator& op, const Grid& x) {
  switch (op.kind()) {
    case OperatorKind::Identity:
      return x;
    case OperatorKind::Scalar: {
      Grid out = x;
      for (double& v : out.values()) v *= op.gain();
      return out;
    }
    case OperatorKind::Convolution:
    case OperatorKind::Laplacian:
      return detail::correlate(op.kernel(), x, op.boundary(), [](double k) { return k; });
  }
  throw std::logic_error("apply_operator: unknown kind");
}

inline Grid apply_adjoint(const LinearOperator& op, const Grid& y) {
  switch (op.kind()) {
    case OperatorKind::Identity:
      return y;
    case OperatorKind::Scalar: {
      Grid out = y;
      for (double& v : out.values()) v *= op.gain();
      return out;
    }
    case OperatorKind::Convolution:
    case OperatorKind::Laplacian:
      return detail::correlate_adjoint(op.kernel(), y, op.boundary());
  }
  throw std::logic_error("apply_adjoint: unknown kind");
}

// Pushes per-pixel variances through the operator assuming independent pixels:
// Var((Ax)_ij) = sum_t a_t^2 Var(x_source(t)).
inline Grid apply_variance(const LinearOperator& op, const Grid& var) {
  switch (op.kind()) {
    case OperatorKind::Identity:
      return var;
    case OperatorKind::Scalar: {
      Grid out = var;
      for (double& v : out.values()) v *= op.gain() * op.gain();
      return out;
    }
    case OperatorKind::Convolution:
    case OperatorKind::Laplacian:
      return detail::correlate(op.kernel(), var, op.boundary(), [](double k) { return k * k; });
  }
  throw std::logic_error("apply_variance: unknown kind");
}

// Per-pixel diagonal surrogate gain: the operator applied to a unit grid.
inline Grid diagonal_gain(const LinearOperator& op, std::size_t rows, std::size_t cols) {
  return apply_operator(op, Grid(rows, cols, 1.0));
}

// Squared norm of the stencil row, i.e. diag(A^T A) away from boundaries.
inline double stencil_sq_norm(const LinearOperator& op) {
  switch (op.kind()) {
    case OperatorKind::Identity:
      return 1.0;
    case OperatorKind::Scalar:
      return op.gain() * op.gain();
    case OperatorKind::Convolution:
    case OperatorKind::Laplacian:
      return sum_square(op.kernel());
  }
  throw std::logic_error("stencil_sq_norm: unknown kind");
}

}  // namespace sep
