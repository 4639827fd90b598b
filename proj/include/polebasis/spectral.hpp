#ifndef POLEBASIS_SPECTRAL_HPP
#define POLEBASIS_SPECTRAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "polebasis/errors.hpp"

namespace polebasis {

// Environment spectral density J(w). Two representations:
//   ohmic:     J(w) = eta * w * exp(-w / cutoff), w >= 0
//   tabulated: strictly increasing grid with monotone piecewise-cubic
//              interpolation, clamped at >= 0; no extrapolation.
class SpectralDensity {
public:
  static SpectralDensity ohmic(double eta, double cutoff);
  static SpectralDensity tabulated(std::vector<double> grid,
                                   std::vector<double> values);

  bool is_ohmic() const { return kind_ == Kind::Ohmic; }
  double eta() const { return eta_; }
  double cutoff() const { return cutoff_; }

  // Evaluation; out-of-hull queries on tabulated densities throw.
  double operator()(double omega) const;

  // Integration window [support_min, support_max(omega)] used by the
  // principal-value integral when resolving a resonance at `omega`.
  double support_min() const;
  double support_max(double omega) const;

  // True when J is strictly positive at omega (resonance embedded in the
  // continuum).
  bool embeds(double omega) const;

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

private:
  enum class Kind { Ohmic, Tabulated };
  SpectralDensity() = default;

  Kind kind_ = Kind::Ohmic;
  double eta_ = 0.0;
  double cutoff_ = 1.0;
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> slopes_;  // Fritsch-Carlson tangents
};

double evaluate_density(const SpectralDensity& j, double omega);

// Second-order self-energy at a real frequency inside the support:
// shift = PV integral of J(w')/(w - w'), width_part = pi * J(w).
struct SelfEnergy {
  double shift = 0.0;
  double width_part = 0.0;
  double quadrature_error = 0.0;  // |I_N - I_{N/2}| convergence estimate
};

struct SelfEnergyOptions {
  int panels = 16;
  int order = 256;
  double error_tolerance = 1e-9;
};

SelfEnergy self_energy(const SpectralDensity& j, double omega,
                       const SelfEnergyOptions& opt = SelfEnergyOptions{});

// Complex decay mode z = omega_prime - (i/2) gamma, gamma > 0.
struct Pole {
  double omega_prime = 0.0;
  double gamma = 0.0;

  Pole(double w, double g) : omega_prime(w), gamma(g) {
    if (!(g > 0.0)) fail(ErrorKind::FreeSystem, "Pole: gamma must be > 0");
  }
};

// Born-level pole: omega_prime = omega + shift, gamma = 2 pi J(omega).
Pole pole_second_order(const SpectralDensity& j, double omega,
                       const SelfEnergyOptions& opt = SelfEnergyOptions{});

// z_n = n z_0 for n = 1 .. n_max, exact integer scaling.
struct PoleLadder {
  Pole base;
  int n_max;

  PoleLadder(Pole b, int n) : base(b), n_max(n) {
    if (n < 1) fail(ErrorKind::InvalidScenario, "PoleLadder: n_max < 1");
  }
  Pole member(int n) const {
    if (n < 1 || n > n_max)
      fail(ErrorKind::InvalidScenario, "PoleLadder: member index out of range");
    return Pole(double(n) * base.omega_prime, double(n) * base.gamma);
  }
};

inline PoleLadder pole_ladder(const Pole& base, int n_max) {
  return PoleLadder(base, n_max);
}

}  // namespace polebasis

#endif
