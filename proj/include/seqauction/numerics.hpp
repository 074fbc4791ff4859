// Copyright 2026 The seqauction Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQAUCTION_NUMERICS_HPP_
#define SEQAUCTION_NUMERICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "seqauction/common.hpp"

namespace seqauction {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  int max_depth = 40;
};

namespace detail {

struct SimpsonState {
  double unresolved = 0.0;
  double worst_err = 0.0;
  double worst_a = 0.0;
  double worst_b = 0.0;
};

template <class F>
double SimpsonRecurse(F& f, double a, double b, double fa, double fm,
                      double fb, double whole, double tol, int depth,
                      int max_depth, SimpsonState& st) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::isnan(delta)) {
    std::ostringstream msg;
    msg << "quadrature: integrand is NaN on [" << a << ", " << b << "]";
    throw ConvergenceError(msg.str());
  }
  const bool tiny = !(lm > a && m > lm && rm > m && b > rm);
  if (std::abs(delta) <= 15.0 * tol || tiny) {
    return left + right + delta / 15.0;
  }
  if (depth >= max_depth) {
    const double err = std::abs(delta) / 15.0;
    st.unresolved += err;
    if (err > st.worst_err) {
      st.worst_err = err;
      st.worst_a = a;
      st.worst_b = b;
    }
    return left + right + delta / 15.0;
  }
  return SimpsonRecurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1,
                        max_depth, st) +
         SimpsonRecurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1,
                        max_depth, st);
}

}  // namespace detail

// Adaptive Simpson on [a, b]. Throws ConvergenceError when the error left in
// intervals that hit max_depth exceeds abs_tol.
template <class F>
double Integrate(F&& f, double a, double b, QuadratureOptions opts = {}) {
  if (!(b > a)) return 0.0;
  detail::SimpsonState st;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double out = detail::SimpsonRecurse(f, a, b, fa, fm, fb, whole,
                                            opts.abs_tol, 0, opts.max_depth,
                                            st);
  if (st.unresolved > opts.abs_tol) {
    std::ostringstream msg;
    msg << "quadrature did not converge: unresolved error " << st.unresolved
        << ", worst interval [" << st.worst_a << ", " << st.worst_b
        << "] with error " << st.worst_err;
    throw ConvergenceError(msg.str());
  }
  return out;
}

// Integrates over [a, b] split at every break point strictly inside it.
template <class F>
double IntegratePiecewise(F&& f, double a, double b,
                          std::vector<double> breaks,
                          QuadratureOptions opts = {}) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks) {
    if (std::isfinite(x) && x > pts.back() && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  double total = 0.0;
  const double width = b - a;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    QuadratureOptions local = opts;
    local.abs_tol = opts.abs_tol * (pts[i + 1] - pts[i]) / width;
    total += Integrate(f, pts[i], pts[i + 1], local);
  }
  return total;
}

// Smallest double x in [lo, hi] with pred(x) true, for pred monotone
// false -> true. Returns hi when pred is false everywhere below hi. Bisects
// down to adjacent doubles so threshold comparisons agree with pred exactly.
template <class P>
double BisectPredicate(P&& pred, double lo, double hi, int max_iter = 2000) {
  if (pred(lo)) return lo;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Golden-section search for the maximizer of a unimodal f on (a, b).
template <class F>
double GoldenSectionMaximize(F&& f, double a, double b, double width_tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > width_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct Newton2Result {
  std::array<double, 2> x;
  double residual;
  int iterations;
};

// Damped Newton for a 2-D system with a finite-difference Jacobian. Steps are
// halved until the residual norm drops and `feasible` accepts the iterate.
template <class F, class Feasible>
Newton2Result SolveNewton2(F&& fn, std::array<double, 2> x, Feasible&& feasible,
                           double tol = 1e-10, int max_iter = 200) {
  auto norm = [](const std::array<double, 2>& v) {
    return std::max(std::abs(v[0]), std::abs(v[1]));
  };
  std::array<double, 2> fx = fn(x);
  for (int it = 0; it < max_iter; ++it) {
    if (norm(fx) <= tol) return {x, norm(fx), it};
    double jac[2][2];
    for (int j = 0; j < 2; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      std::array<double, 2> xp = x;
      std::array<double, 2> xm = x;
      xp[j] += h;
      xm[j] -= h;
      const auto fp = fn(xp);
      const auto fm = fn(xm);
      jac[0][j] = (fp[0] - fm[0]) / (2.0 * h);
      jac[1][j] = (fp[1] - fm[1]) / (2.0 * h);
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (det == 0.0 || !std::isfinite(det)) {
      throw ConvergenceError("newton: singular jacobian");
    }
    const std::array<double, 2> step{
        (jac[1][1] * fx[0] - jac[0][1] * fx[1]) / det,
        (-jac[1][0] * fx[0] + jac[0][0] * fx[1]) / det};
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const std::array<double, 2> cand{x[0] - t * step[0], x[1] - t * step[1]};
      if (!feasible(cand)) continue;
      const auto fc = fn(cand);
      if (norm(fc) < norm(fx) || norm(fc) <= tol) {
        x = cand;
        fx = fc;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (norm(fx) <= tol) return {x, norm(fx), max_iter};
  std::ostringstream msg;
  msg << "newton did not converge: residual " << norm(fx) << " at (" << x[0]
      << ", " << x[1] << ")";
  throw ConvergenceError(msg.str());
}

}  // namespace seqauction

#endif  // SEQAUCTION_NUMERICS_HPP_
