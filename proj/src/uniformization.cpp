#include "raidph/uniformization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "raidph/math_util.hpp"

namespace raidph {

UniformizationOverflow::UniformizationOverflow(double qt_)
    : std::runtime_error(
          "uniformization: q*t = " + std::to_string(qt_) +
          " exceeds 1e10; solve in shorter time steps instead"),
      qt(qt_) {}

namespace {

// Poisson(lambda) weights over a window [k_lo, k_hi] chosen so the mass
// outside is below epsilon. Built outward from the mode with the stable
// ratio recurrence; the mode weight itself comes from log space.
struct PoissonWindow {
  std::size_t k_lo = 0;
  std::vector<double> weights;
};

PoissonWindow poisson_window(double lambda, double epsilon) {
  PoissonWindow win;
  if (lambda <= 0.0) {
    win.weights = {1.0};
    return win;
  }
  const std::size_t mode = static_cast<std::size_t>(lambda);
  const double log_pm =
      mode * std::log(lambda) - lambda - log_gamma(double(mode) + 1.0);
  const double pm = std::exp(log_pm);

  std::vector<double> right{pm};
  std::vector<double> left;
  double total = pm;
  std::size_t lo = mode, hi = mode;
  // grow whichever side has the larger boundary term until enough mass
  double next_right = pm * lambda / (double(hi) + 1.0);
  double next_left = lo > 0 ? pm * double(lo) / lambda : 0.0;
  while (total < 1.0 - epsilon) {
    if (next_right >= next_left) {
      hi += 1;
      right.push_back(next_right);
      total += next_right;
      next_right = right.back() * lambda / (double(hi) + 1.0);
    } else if (lo > 0) {
      left.push_back(next_left);
      total += next_left;
      lo -= 1;
      next_left = lo > 0 ? left.back() * double(lo) / lambda : 0.0;
    } else {
      break;  // left side exhausted; keep growing right
    }
    if (next_right <= 0.0 && (lo == 0 || next_left <= 0.0)) break;
  }
  win.k_lo = lo;
  win.weights.resize(left.size() + right.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    win.weights[left.size() - 1 - i] = left[i];
  }
  std::copy(right.begin(), right.end(), win.weights.begin() + left.size());
  return win;
}

// y = x * (I + Q/q) as one fused pass over the CSR rows.
void dtmc_step(const CsrMatrix& gen, double q, const std::vector<double>& x,
               std::vector<double>& y) {
  y = x;
  const double inv_q = 1.0 / q;
  for (std::size_t row = 0; row < gen.rows; ++row) {
    const double xv = x[row];
    if (xv == 0.0) continue;
    const double scaled = xv * inv_q;
    for (std::size_t k = gen.row_ptr[row]; k < gen.row_ptr[row + 1]; ++k) {
      y[gen.col[k]] += scaled * gen.val[k];
    }
  }
}

}  // namespace

std::vector<double> transient_vector(const CsrMatrix& gen,
                                     std::vector<double> pi0, double t,
                                     double epsilon) {
  if (t < 0.0) {
    throw std::invalid_argument("transient_vector: t must be >= 0");
  }
  if (!(epsilon > 0.0) || epsilon >= 1.0) {
    throw std::invalid_argument("transient_vector: epsilon must be in (0,1)");
  }
  if (pi0.size() != gen.rows) {
    throw std::invalid_argument("transient_vector: dimension mismatch");
  }
  double q = 0.0;
  for (std::size_t row = 0; row < gen.rows; ++row) {
    for (std::size_t k = gen.row_ptr[row]; k < gen.row_ptr[row + 1]; ++k) {
      if (gen.col[k] == row) q = std::max(q, -gen.val[k]);
    }
  }
  if (t == 0.0 || q == 0.0) {
    return pi0;
  }
  const double qt = q * t;
  if (qt > 1e10) {
    throw UniformizationOverflow(qt);
  }
  const PoissonWindow win = poisson_window(qt, epsilon);
  const std::size_t k_hi = win.k_lo + win.weights.size() - 1;

  std::vector<double> acc(gen.rows, 0.0);
  std::vector<double> cur = std::move(pi0);
  std::vector<double> next(gen.rows);
  for (std::size_t k = 0; k <= k_hi; ++k) {
    if (k >= win.k_lo) {
      const double w = win.weights[k - win.k_lo];
      for (std::size_t i = 0; i < gen.rows; ++i) acc[i] += w * cur[i];
    }
    if (k < k_hi) {
      dtmc_step(gen, q, cur, next);
      cur.swap(next);
    }
  }
  double total = 0.0;
  for (double v : acc) total += v;
  if (total > 0.0) {
    for (double& v : acc) v /= total;
  }
  return acc;
}

TransientResult uniformize(const LumpedChain& chain, double t, double epsilon) {
  const double grid[1] = {t};
  return uniformize_grid(chain, grid, epsilon, true);
}

TransientResult uniformize_grid(const LumpedChain& chain,
                                std::span<const double> times_hours,
                                double epsilon, bool keep_distributions) {
  TransientResult result;
  result.epsilon = epsilon;
  if (times_hours.empty()) return result;
  for (std::size_t i = 0; i + 1 < times_hours.size(); ++i) {
    if (times_hours[i + 1] < times_hours[i]) {
      throw std::invalid_argument("uniformize_grid: times must be ascending");
    }
  }
  const double step_eps = epsilon / double(times_hours.size());
  std::vector<double> pi(chain.size(), 0.0);
  pi[chain.initial] = 1.0;
  double prev = 0.0;
  for (double t : times_hours) {
    if (t < 0.0) {
      throw std::invalid_argument("uniformize_grid: negative time");
    }
    pi = transient_vector(chain.generator, std::move(pi), t - prev, step_eps);
    prev = t;
    result.times_hours.push_back(t);
    result.loss_probability.push_back(pi[chain.loss]);
    if (keep_distributions) result.distributions.push_back(pi);
  }
  return result;
}

DdfSeries loss_probability(const LumpedChain& chain,
                           std::span<const double> times_hours,
                           double group_multiplier, double epsilon) {
  const TransientResult transient =
      uniformize_grid(chain, times_hours, epsilon, false);
  DdfSeries series;
  series.times_hours = transient.times_hours;
  series.group_multiplier = group_multiplier;
  series.epsilon = epsilon;
  series.value.reserve(transient.loss_probability.size());
  for (double p : transient.loss_probability) {
    series.value.push_back(p * group_multiplier);
  }
  return series;
}

}  // namespace raidph
