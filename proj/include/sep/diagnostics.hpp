#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace sep {

// m replicated chains of n scalar samples each, rectangular.
struct ChainSet {
  std::vector<std::vector<double>> chains;

  std::size_t m() const { return chains.size(); }
  std::size_t n() const { return chains.empty() ? 0 : chains.front().size(); }

  void validate() const {
    for (const auto& c : chains)
      if (c.size() != n()) throw std::invalid_argument("ChainSet: ragged chains");
  }

  std::vector<double> pooled() const {
    std::vector<double> all;
    all.reserve(m() * n());
    for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
    return all;
  }
};

namespace detail {
inline double chain_mean(std::span<const double> c) {
  double s = 0.0;
  for (double x : c) s += x;
  return s / static_cast<double>(c.size());
}
}  // namespace detail

// B/n = (1/(m-1)) sum_j (mean_j - grand_mean)^2
inline double between_chain_var(const ChainSet& c) {
  c.validate();
  const std::size_t m = c.m();
  if (m < 2) throw std::invalid_argument("between_chain_var: need m >= 2");
  std::vector<double> means(m);
  for (std::size_t j = 0; j < m; ++j) means[j] = detail::chain_mean(c.chains[j]);
  const double grand = detail::chain_mean(means);
  double acc = 0.0;
  for (double mj : means) acc += (mj - grand) * (mj - grand);
  return acc / static_cast<double>(m - 1);
}

// W = (1/(m(n-1))) sum_j sum_t (s_jt - mean_j)^2
inline double within_chain_var(const ChainSet& c) {
  c.validate();
  if (c.n() < 2) throw std::invalid_argument("within_chain_var: need n >= 2");
  double acc = 0.0;
  for (const auto& chain : c.chains) {
    const double mj = detail::chain_mean(chain);
    for (double x : chain) acc += (x - mj) * (x - mj);
  }
  return acc / (static_cast<double>(c.m()) * static_cast<double>(c.n() - 1));
}

struct PooledEstimates {
  double sigma2_plus;
  double v_hat;
};

// sigma2_plus = ((n-1)/n) W + B/n;  V_hat = sigma2_plus + (B/n)/m
inline PooledEstimates pooled_estimates(double b_over_n, double w, std::size_t m,
                                        std::size_t n) {
  if (m < 2 || n < 2) throw std::invalid_argument("pooled_estimates: need m, n >= 2");
  const double nd = static_cast<double>(n);
  const double sigma2_plus = (nd - 1.0) / nd * w + b_over_n;
  return PooledEstimates{sigma2_plus, sigma2_plus + b_over_n / static_cast<double>(m)};
}

struct PsrfResult {
  double psrf_paper;  // ((m+1)/m) sigma2_plus/W - (n-1)/(mn)
  double psrf_ratio;  // V_hat / W
  double w;
  double b_over_n;
  double sigma2_plus;
  double v_hat;
};

inline PsrfResult psrf(const ChainSet& c) {
  const double w = within_chain_var(c);
  const double b_over_n = between_chain_var(c);
  const double md = static_cast<double>(c.m());
  const double nd = static_cast<double>(c.n());
  PsrfResult out{};
  out.w = w;
  out.b_over_n = b_over_n;
  const auto pooled = pooled_estimates(b_over_n, w, c.m(), c.n());
  out.sigma2_plus = pooled.sigma2_plus;
  out.v_hat = pooled.v_hat;
  if (w == 0.0) {
    // Divergent when chains are internally constant but disagree; degenerate
    // when everything is a single constant.
    const double sentinel = b_over_n > 0.0 ? std::numeric_limits<double>::infinity()
                                           : std::numeric_limits<double>::quiet_NaN();
    out.psrf_paper = sentinel;
    out.psrf_ratio = sentinel;
    return out;
  }
  out.psrf_paper = (md + 1.0) / md * pooled.sigma2_plus / w - (nd - 1.0) / (md * nd);
  out.psrf_ratio = pooled.v_hat / w;
  return out;
}

// Sample autocorrelation at the given lag (autocovariance with divisor n over
// the lag-0 variance). Constant chains return NaN as the degenerate sentinel.
inline double autocorrelation(std::span<const double> chain, std::size_t lag) {
  const std::size_t n = chain.size();
  if (lag >= n) throw std::invalid_argument("autocorrelation: lag >= n");
  const double mean = detail::chain_mean(chain);
  double var = 0.0;
  for (double x : chain) var += (x - mean) * (x - mean);
  if (var == 0.0) return std::numeric_limits<double>::quiet_NaN();
  double acov = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t)
    acov += (chain[t] - mean) * (chain[t + lag] - mean);
  return acov / var;
}

// Empirical central interval with linear interpolation between order stats.
inline std::pair<double, double> credible_interval(std::span<const double> samples,
                                                   double level) {
  if (samples.empty()) throw std::invalid_argument("credible_interval: empty samples");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("credible_interval: level outside (0,1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  };
  return {quantile(0.5 * (1.0 - level)), quantile(0.5 * (1.0 + level))};
}

}  // namespace sep
