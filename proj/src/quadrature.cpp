#include "curex/quadrature.hpp"

#include <cmath>

namespace curex {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const std::function<double(double)>& f, double a, double b,
              double fa, double fm, double fb, double whole, double tolerance,
              int depth) {
  if (depth <= 0) throw QuadratureFailure();
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tolerance) {
    return left + right + delta / 15.0;
  }
  return refine(f, a, m, fa, flm, fm, left, 0.5 * tolerance, depth - 1) +
         refine(f, m, b, fm, frm, fb, right, 0.5 * tolerance, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tolerance, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  return refine(f, a, b, fa, fm, fb, whole, tolerance, max_depth);
}

}  // namespace curex
