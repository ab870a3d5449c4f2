// Copyright 2026 The qtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-only reference implementations, deliberately written with different
// algorithms than the library (bisection instead of rational approximations,
// quadrature instead of series) so agreement is meaningful.

#ifndef QTRACK_TESTS_ORACLES_HPP
#define QTRACK_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qtrack::testing {

inline double ref_norm_cdf(double x) {
  return 0.5 * std::erfc(-x / 1.4142135623730951);
}

// Normal quantile by plain bisection on the CDF. Upper-tail probabilities
// reflect through the lower tail: near p = 1 the CDF is quantized at one ulp
// of 1.0, which would leave the bisected root uncertain by ~1e-8 there, while
// the lower tail keeps full relative precision (1 - p is exact for p >= 0.5).
inline double ref_inv_norm(double p) {
  if (p > 0.5) return -ref_inv_norm(1.0 - p);
  double lo = -42.0;
  double hi = 42.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ref_norm_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double ref_chisq_pdf(double t, double df) {
  if (t <= 0.0) return 0.0;
  const double half = 0.5 * df;
  return std::exp((half - 1.0) * std::log(t) - 0.5 * t -
                  half * 0.6931471805599453 - std::lgamma(half));
}

namespace detail {
inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(double (*f)(double, double), double df, double a,
                               double b, double fa, double fm, double fb,
                               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm, df);
  const double frm = f(rm, df);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, df, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, df, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Chi-squared CDF by adaptive Simpson quadrature of the density. Needs
// df >= 2 so the density is bounded at the origin.
inline double ref_chisq_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  const double fa = ref_chisq_pdf(0.0, df);
  const double fb = ref_chisq_pdf(x, df);
  const double fm = ref_chisq_pdf(0.5 * x, df);
  const double whole = detail::simpson(0.0, x, fa, fm, fb);
  return detail::adaptive_simpson(ref_chisq_pdf, df, 0.0, x, fa, fm, fb, whole,
                                  1e-12, 40);
}

inline double ref_inv_chisq(double p, double df) {
  double lo = 0.0;
  double hi = df;
  while (ref_chisq_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 120; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ref_chisq_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Classical exponentially weighted mean/variance recursion with one shared
// weight, the reference the library's two-weight form generalizes.
struct EwRef {
  double mean = 0.0;
  double var = 0.0;

  void update(double alpha, double x) {
    const double diff = x - mean;
    const double incr = alpha * diff;
    mean += incr;
    var = (1.0 - alpha) * (var + diff * incr);
  }
};

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman: need two equal-length series");
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace qtrack::testing

#endif  // QTRACK_TESTS_ORACLES_HPP
