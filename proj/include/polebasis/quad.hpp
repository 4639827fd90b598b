#ifndef POLEBASIS_QUAD_HPP
#define POLEBASIS_QUAD_HPP

#include <algorithm>
#include <functional>
#include <vector>

namespace polebasis {

// Nodes and weights for n-point Gauss-Legendre quadrature on [-1, 1].
// Computed once per order and cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

// Composite Gauss-Legendre integral of f over [a, b] split into `panels`
// equal panels of `order` points each.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order);

// As above but with explicit interior breakpoints; each sub-interval gets
// `panels_per_interval` panels. Breakpoints must lie inside (a, b).
double integrate_gl_split(const std::function<double(double)>& f, double a,
                          double b, const std::vector<double>& breakpoints,
                          int panels_per_interval, int order);

}  // namespace polebasis

#endif
