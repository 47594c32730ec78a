#pragma once

// Independent reference computations for the unit tests. Everything here is
// deliberately naive: exhaustive scans, bisection, long summation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using real = long double;

// Hand-rolled generator for property tests: fixed seed, uniform reals.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  real uniform(real lo, real hi) { return lo + (hi - lo) * real(std::ldexp(double(rng_() >> 11), -53)); }
  real log_uniform(real lo, real hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::size_t index(std::size_t n) { return std::size_t(rng_() % n); }

 private:
  std::mt19937_64 rng_;
};

// Root of an increasing f on [lo, hi] by plain bisection.
inline real bisect(const std::function<real(real)>& f, real lo, real hi, int iterations = 300) {
  for (int i = 0; i < iterations; ++i) {
    const real mid = (lo + hi) / 2;
    if (f(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

// Smallest distance from (zx, zy) to any listed point.
template <typename P>
real nearest(real zx, real zy, const std::vector<P>& pts) {
  real best = std::numeric_limits<real>::infinity();
  for (const auto& p : pts) best = std::min(best, std::hypot(real(p.x()) - zx, real(p.y()) - zy));
  return best;
}

// Left ends of the level-j intervals of the u1 construction, by direct
// recursion on [left, left + l_{j-1}] -> two children of length l_j.
inline void cantor_lefts(const std::vector<real>& l, int j, int level, real left, std::vector<real>& out) {
  if (level == j) {
    out.push_back(left);
    return;
  }
  cantor_lefts(l, j, level + 1, left, out);
  cantor_lefts(l, j, level + 1, left + l[level] - l[level + 1], out);
}

// Level-j endpoints: both ends of every level-j interval, sorted.
inline std::vector<real> cantor_endpoints(const std::vector<real>& l, int j) {
  std::vector<real> lefts;
  cantor_lefts(l, j, 0, 0, lefts);
  std::vector<real> out;
  for (real a : lefts) {
    out.push_back(a);
    out.push_back(a + l[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// On-diagonal annulus kernel summed term by term for 1 <= |n| <= N.
// Negative n rewritten with u = r^2 / x so nothing overflows.
inline real kernel_long_sum(real r, real abs_z, int N = 2000) {
  const real pi = 3.141592653589793238462643383279502884L;
  const real x = abs_z * abs_z;
  const real u = r * r / x;
  real s = 1 / (2 * std::log(1 / r));
  for (int n = N; n >= 1; --n) {
    const real den = 1 - std::pow(r, real(2 * n));
    s += real(n) * std::pow(x, real(n)) / den;
    s += real(n) * std::pow(u, real(n)) / den;
  }
  return s / (pi * x);
}

// Radial Laplace equation u'' + u'/s = 0 on [a, b], u(a) = 0, u(b) = 1,
// second-order central differences and a Thomas sweep. Returns u at the n
// interior nodes.
inline std::vector<real> radial_harmonic_fd(real a, real b, int n) {
  const real h = (b - a) / real(n + 1);
  std::vector<real> lo(n), di(n), up(n), rhs(n, 0);
  for (int i = 0; i < n; ++i) {
    const real s = a + h * real(i + 1);
    lo[i] = 1 / (h * h) - 1 / (2 * h * s);
    di[i] = -2 / (h * h);
    up[i] = 1 / (h * h) + 1 / (2 * h * s);
  }
  rhs[n - 1] = -up[n - 1];
  for (int i = 1; i < n; ++i) {
    const real w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<real> u(n);
  u[n - 1] = rhs[n - 1] / di[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = (rhs[i] - up[i] * u[i + 1]) / di[i];
  return u;
}

// Simpson's rule on [a, b] with n (even) panels.
inline real simpson(const std::function<real(real)>& f, real a, real b, int n) {
  const real h = (b - a) / real(n);
  real s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + h * real(i)) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace oracle
