#include "polebasis/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polebasis/quad.hpp"

namespace polebasis {

SpectralDensity SpectralDensity::ohmic(double eta, double cutoff) {
  if (eta < 0.0 || !std::isfinite(eta))
    fail(ErrorKind::InvalidScenario, "ohmic density: eta must be >= 0");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    fail(ErrorKind::InvalidScenario, "ohmic density: cutoff must be > 0");
  SpectralDensity j;
  j.kind_ = Kind::Ohmic;
  j.eta_ = eta;
  j.cutoff_ = cutoff;
  return j;
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> grid,
                                           std::vector<double> values) {
  if (grid.size() != values.size())
    fail(ErrorKind::InvalidScenario, "tabulated density: size mismatch");
  if (grid.size() < 8)
    fail(ErrorKind::InvalidScenario, "tabulated density: need >= 8 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
      fail(ErrorKind::InvalidScenario, "tabulated density: non-finite entry");
    if (grid[i] < 0.0)
      fail(ErrorKind::InvalidScenario, "tabulated density: grid must be >= 0");
    if (values[i] < 0.0)
      fail(ErrorKind::InvalidScenario, "tabulated density: J must be >= 0");
    if (i > 0 && grid[i] <= grid[i - 1])
      fail(ErrorKind::InvalidScenario,
           "tabulated density: grid must be strictly increasing");
  }
  SpectralDensity j;
  j.kind_ = Kind::Tabulated;
  j.grid_ = std::move(grid);
  j.values_ = std::move(values);

  // Fritsch-Carlson monotone tangents.
  const std::size_t n = j.grid_.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = j.grid_[i + 1] - j.grid_[i];
    d[i] = (j.values_[i + 1] - j.values_[i]) / h[i];
  }
  j.slopes_.resize(n);
  j.slopes_[0] = d[0];
  j.slopes_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      j.slopes_[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      j.slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      j.slopes_[i] = 0.0;
      j.slopes_[i + 1] = 0.0;
    } else {
      double a = j.slopes_[i] / d[i];
      double b = j.slopes_[i + 1] / d[i];
      double s = a * a + b * b;
      if (s > 9.0) {
        double t = 3.0 / std::sqrt(s);
        j.slopes_[i] = t * a * d[i];
        j.slopes_[i + 1] = t * b * d[i];
      }
    }
  }
  return j;
}

double SpectralDensity::operator()(double omega) const {
  if (kind_ == Kind::Ohmic) {
    if (omega < 0.0)
      fail(ErrorKind::OutsideSupport, "ohmic density: omega must be >= 0");
    return eta_ * omega * std::exp(-omega / cutoff_);
  }
  if (omega < grid_.front() || omega > grid_.back()) {
    std::ostringstream os;
    os << "tabulated density: omega = " << omega << " outside hull ["
       << grid_.front() << ", " << grid_.back() << "]";
    fail(ErrorKind::OutOfHull, os.str());
  }
  auto it = std::upper_bound(grid_.begin(), grid_.end(), omega);
  std::size_t i = (it == grid_.begin()) ? 0 : std::size_t(it - grid_.begin()) - 1;
  if (i + 1 >= grid_.size()) i = grid_.size() - 2;
  const double h = grid_[i + 1] - grid_[i];
  const double t = (omega - grid_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  double v = h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] +
             h11 * h * slopes_[i + 1];
  return std::max(v, 0.0);
}

double SpectralDensity::support_min() const {
  return kind_ == Kind::Ohmic ? 0.0 : grid_.front();
}

double SpectralDensity::support_max(double omega) const {
  if (kind_ == Kind::Ohmic)
    return std::max(10.0 * cutoff_, omega + 10.0 * cutoff_);
  return grid_.back();
}

bool SpectralDensity::embeds(double omega) const {
  if (kind_ == Kind::Ohmic) return eta_ > 0.0 && omega > 0.0;
  return omega > grid_.front() && omega < grid_.back() &&
         (*this)(omega) > 0.0;
}

double evaluate_density(const SpectralDensity& j, double omega) {
  return j(omega);
}

namespace {

// Regularized integrand of the singularity-subtraction rule. The query
// frequency is made a panel edge, so Gauss nodes never coincide with it;
// tabulated densities additionally break panels at the spline knots where
// the interpolant is only C^1.
double pv_shift(const SpectralDensity& j, double omega, double jw, int panels,
                int order) {
  const double lo = j.support_min();
  const double hi = j.support_max(omega);
  auto f = [&](double w) { return (j(w) - jw) / (omega - w); };
  std::vector<double> breaks = {omega};
  int per_interval = std::max(panels / 2, 1);
  if (!j.is_ohmic()) {
    breaks.insert(breaks.end(), j.grid().begin(), j.grid().end());
    std::sort(breaks.begin(), breaks.end());
    per_interval = 1;
    order = std::min(order, 32);
  }
  double regular = integrate_gl_split(f, lo, hi, breaks, per_interval, order);
  double logterm = jw * std::log((omega - lo) / (hi - omega));
  return regular + logterm;
}

}  // namespace

SelfEnergy self_energy(const SpectralDensity& j, double omega,
                       const SelfEnergyOptions& opt) {
  const double lo = j.support_min();
  const double hi = j.support_max(omega);
  if (!(omega > lo) || !(omega < hi) || !j.embeds(omega)) {
    std::ostringstream os;
    os << "self_energy: omega = " << omega
       << " is not embedded in the continuum (no width there)";
    fail(ErrorKind::OutsideSupport, os.str());
  }
  const double jw = j(omega);
  SelfEnergy se;
  se.width_part = M_PI * jw;
  se.shift = pv_shift(j, omega, jw, opt.panels, opt.order);
  double coarse = pv_shift(j, omega, jw, opt.panels, opt.order / 2);
  se.quadrature_error = std::abs(se.shift - coarse);
  if (se.quadrature_error > opt.error_tolerance) {
    std::ostringstream os;
    os << "self_energy: quadrature error estimate " << se.quadrature_error
       << " above tolerance " << opt.error_tolerance;
    fail(ErrorKind::QuadratureNonConvergence, os.str());
  }
  return se;
}

Pole pole_second_order(const SpectralDensity& j, double omega,
                       const SelfEnergyOptions& opt) {
  if (j.is_ohmic() && j.eta() == 0.0)
    fail(ErrorKind::FreeSystem,
         "pole_second_order: zero coupling, the system does not decay");
  SelfEnergy se = self_energy(j, omega, opt);
  double gamma = 2.0 * se.width_part;  // gamma = -2 Im z0 = 2 pi J(omega)
  if (!(gamma > 0.0))
    fail(ErrorKind::FreeSystem, "pole_second_order: vanishing width");
  return Pole(omega + se.shift, gamma);
}

}  // namespace polebasis
