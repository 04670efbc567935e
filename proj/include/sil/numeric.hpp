#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sil {

// Root of f on [lo, hi]. Requires a sign change on the bracket.
template <typename F>
double bisect_root(F&& f, double lo, double hi, double x_tol = 1e-14,
                   int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::runtime_error("bisect_root: no sign change on bracket");
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Maximum of a unimodal f on [lo, hi]; returns {argmax, max}.
template <typename F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi,
                                             double x_tol = 1e-12) {
  constexpr double ratio = 0.6180339887498949;  // (sqrt(5)-1)/2
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

namespace detail {

template <typename F>
double simpson_rec(F& f, double a, double fa, double b, double fb, double c,
                   double fc, double whole, double tol, int depth) {
  const double d = 0.5 * (a + c);
  const double e = 0.5 * (c + b);
  const double fd = f(d);
  const double fe = f(e);
  const double left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
  const double right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, c, fc, d, fd, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, c, fc, b, fb, e, fe, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Integral of f over [a, b], adaptive Simpson with absolute tolerance.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol = 1e-9,
                        int max_depth = 40) {
  if (!(b > a)) return 0.0;
  const double c = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fc = f(c);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
  return detail::simpson_rec(f, a, fa, b, fb, c, fc, whole, abs_tol, max_depth);
}

}  // namespace sil
