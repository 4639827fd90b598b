#include "polebasis/quad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace polebasis {

namespace {

// Newton iteration on the Legendre polynomial; standard Golub-free version,
// good to ~1e-15 for the orders used here.
GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order < 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    const double half = 0.5 * h;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
    total += acc * half;
  }
  return total;
}

double integrate_gl_split(const std::function<double(double)>& f, double a,
                          double b, const std::vector<double>& breakpoints,
                          int panels_per_interval, int order) {
  std::vector<double> edges;
  edges.push_back(a);
  for (double c : breakpoints)
    if (c > a && c < b) edges.push_back(c);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  const double width_floor = 1e-14 * (std::abs(a) + std::abs(b) + 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] - edges[i] <= width_floor) continue;  // duplicate edge
    total += integrate_gl(f, edges[i], edges[i + 1], panels_per_interval, order);
  }
  return total;
}

}  // namespace polebasis
