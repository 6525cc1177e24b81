#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sep {

// Dense row-major grid of real intensities (arbitrary units).
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Grid: empty dimensions");
  }
  Grid(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) throw std::invalid_argument("Grid: size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_shape(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline double mean_square(const Grid& g) {
  double s = 0.0;
  for (double v : g.values()) s += v * v;
  return s / static_cast<double>(g.size());
}

inline double sum_square(const Grid& g) {
  double s = 0.0;
  for (double v : g.values()) s += v * v;
  return s;
}

// ||a - b||_2 / ||b||_2
inline double relative_error(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("relative_error: shape mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    num += d * d;
    den += b[k] * b[k];
  }
  if (den == 0.0) throw std::domain_error("relative_error: zero reference");
  return std::sqrt(num / den);
}

}  // namespace sep
