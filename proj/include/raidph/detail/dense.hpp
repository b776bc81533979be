#ifndef RAIDPH_DETAIL_DENSE_HPP
#define RAIDPH_DETAIL_DENSE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace raidph::detail {

// Solve A x = b in place (b becomes x), partial pivoting. A is row-major
// n x n and is consumed. Throws std::domain_error on singular input.
inline void lu_solve(std::vector<double> a, std::size_t n,
                     std::vector<double>& b) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::fabs(a[perm[col] * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::fabs(a[perm[r] * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-300) {
      throw std::domain_error("lu_solve: singular matrix");
    }
    std::swap(perm[col], perm[piv]);
    const double d = a[perm[col] * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[perm[r] * n + col] / d;
      a[perm[r] * n + col] = f;
      for (std::size_t c = col + 1; c < n; ++c) {
        a[perm[r] * n + c] -= f * a[perm[col] * n + c];
      }
    }
  }
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = b[perm[r]];
    for (std::size_t c = 0; c < r; ++c) s -= a[perm[r] * n + c] * y[c];
    y[r] = s;
  }
  for (std::size_t r = n; r-- > 0;) {
    double s = y[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[perm[r] * n + c] * b[c];
    b[r] = s / a[perm[r] * n + r];
  }
}

inline void mat_mul(const std::vector<double>& a, const std::vector<double>& b,
                    std::vector<double>& out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j];
      out[i * n + j] = s;
    }
  }
}

// exp(A) by scaling-and-squaring with a Pade(6,6) approximant.
inline std::vector<double> expm(std::vector<double> a, std::size_t n) {
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::fabs(a[i * n + j]);
    norm = std::max(norm, row);
  }
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const double f = std::ldexp(1.0, -squarings);
    for (auto& v : a) v *= f;
  }
  static const double c[7] = {1.0,         0.5,           5.0 / 44.0,
                              1.0 / 66.0,  1.0 / 792.0,   1.0 / 15840.0,
                              1.0 / 665280.0};
  std::vector<double> a2(n * n), pow(n * n), u(n * n, 0.0), v(n * n, 0.0);
  std::vector<double> odd(n * n, 0.0);
  mat_mul(a, a, a2, n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i * n + i] = c[0];
    odd[i * n + i] = c[1];
  }
  pow = a2;
  for (int k = 1; k <= 3; ++k) {
    for (std::size_t idx = 0; idx < n * n; ++idx) {
      v[idx] += c[2 * k] * pow[idx];
      if (k < 3) odd[idx] += c[2 * k + 1] * pow[idx];
    }
    if (k < 3) {
      std::vector<double> next(n * n);
      mat_mul(pow, a2, next, n);
      pow.swap(next);
    }
  }
  mat_mul(a, odd, u, n);
  std::vector<double> num(n * n), den(n * n);
  for (std::size_t idx = 0; idx < n * n; ++idx) {
    num[idx] = v[idx] + u[idx];
    den[idx] = v[idx] - u[idx];
  }
  std::vector<double> result(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> colv(n);
    for (std::size_t i = 0; i < n; ++i) colv[i] = num[i * n + j];
    lu_solve(den, n, colv);
    for (std::size_t i = 0; i < n; ++i) result[i * n + j] = colv[i];
  }
  for (int s = 0; s < squarings; ++s) {
    std::vector<double> sq(n * n);
    mat_mul(result, result, sq, n);
    result.swap(sq);
  }
  return result;
}

}  // namespace raidph::detail

#endif
