#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sep/grid.hpp"
#include "sep/model.hpp"
#include "sep/rng.hpp"

namespace sep {

enum class PhantomKind { Cylinder, FourCircles };

struct Disk {
  double center_row;
  double center_col;
  double radius;
};

struct PhantomSpec {
  PhantomKind kind = PhantomKind::Cylinder;
  std::size_t rows = 64;
  std::size_t cols = 64;
  double intensity = 1.0;
  std::vector<Disk> disks;  // empty -> per-kind defaults

  static PhantomSpec cylinder(std::size_t rows, std::size_t cols, double intensity = 1.0) {
    PhantomSpec spec;
    spec.kind = PhantomKind::Cylinder;
    spec.rows = rows;
    spec.cols = cols;
    spec.intensity = intensity;
    return spec;
  }

  static PhantomSpec four_circles(std::size_t rows, std::size_t cols,
                                  double intensity = 1.0) {
    PhantomSpec spec;
    spec.kind = PhantomKind::FourCircles;
    spec.rows = rows;
    spec.cols = cols;
    spec.intensity = intensity;
    return spec;
  }

  std::vector<Disk> geometry() const {
    if (!disks.empty()) return disks;
    const double r = static_cast<double>(rows);
    const double c = static_cast<double>(cols);
    const double min_dim = std::min(r, c);
    if (kind == PhantomKind::Cylinder)
      return {Disk{0.5 * (r - 1.0), 0.5 * (c - 1.0), 0.3 * min_dim}};
    const double rad = 0.12 * min_dim;
    return {Disk{0.25 * r, 0.25 * c, rad}, Disk{0.25 * r, 0.75 * c, rad},
            Disk{0.75 * r, 0.25 * c, rad}, Disk{0.75 * r, 0.75 * c, rad}};
  }
};

// Binary-level phantom: intensity inside the disks, zero outside.
inline Grid make_phantom(const PhantomSpec& spec) {
  if (!(spec.intensity > 0.0)) throw std::invalid_argument("make_phantom: intensity <= 0");
  const auto disks = spec.geometry();
  for (const auto& d : disks) {
    if (d.radius <= 0.0) throw std::invalid_argument("make_phantom: radius <= 0");
    if (d.center_row - d.radius < -0.5 ||
        d.center_row + d.radius > static_cast<double>(spec.rows) - 0.5 ||
        d.center_col - d.radius < -0.5 ||
        d.center_col + d.radius > static_cast<double>(spec.cols) - 0.5)
      throw std::invalid_argument("make_phantom: shape outside the grid");
  }
  Grid out(spec.rows, spec.cols, 0.0);
  for (std::size_t i = 0; i < spec.rows; ++i)
    for (std::size_t j = 0; j < spec.cols; ++j)
      for (const auto& d : disks) {
        const double di = static_cast<double>(i) - d.center_row;
        const double dj = static_cast<double>(j) - d.center_col;
        if (di * di + dj * dj <= d.radius * d.radius) {
          out(i, j) = spec.intensity;
          break;
        }
      }
  return out;
}

// y = G x + N(0, noise_sd^2) iid per pixel, seeded.
inline Grid simulate_observation(const Grid& x, const Model& model, double noise_sd,
                                 std::uint64_t seed) {
  if (!(noise_sd > 0.0))
    throw std::invalid_argument("simulate_observation: noise_sd must be > 0");
  Grid y = apply_operator(model.forward, x);
  auto rng = make_stream(seed, 0x6f62);
  std::normal_distribution<double> noise(0.0, noise_sd);
  for (double& v : y.values()) v += noise(rng);
  return y;
}

}  // namespace sep
