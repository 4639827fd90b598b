#ifndef POLEBASIS_MODES_HPP
#define POLEBASIS_MODES_HPP

#include <string>
#include <utility>
#include <vector>

#include "polebasis/errors.hpp"

namespace polebasis {

// One decaying mode a * cos(omega t / hbar + phase) * exp(-gamma t / hbar).
// gamma > 0 for any mode admitted into a ModeExpansion; phase defaults to 0
// and amplitudes may be negative.
struct DecayMode {
  double amplitude = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
  double phase = 0.0;

  // Amplitude as seen at t = 0.
  double amplitude0() const;
};

// Equilibrium value plus decay modes, sorted ascending by (gamma, omega)
// with coincident modes merged. Stationary signals are represented with an
// empty mode list; operations that need modes reject those.
struct ModeExpansion {
  double equilibrium = 0.0;
  std::vector<DecayMode> modes;

  static ModeExpansion make(double equilibrium, std::vector<DecayMode> modes);
};

double evaluate_expansion(const ModeExpansion& exp, double t, double hbar = 1.0);

// hbar / min gamma; the mode closest to the real axis sets relaxation.
double relaxation_time(const ModeExpansion& exp, double hbar = 1.0);

enum class GammaEffConvention {
  AllModes,        // sum over every mode
  ExcludeSlowest,  // leave the slowest (relaxational) mode out of the average
};

struct GammaEffResult {
  double value = 0.0;
  bool mixed_sign_warning = false;  // gamma_eff fell outside [gamma_min, gamma_max]
};

GammaEffResult gamma_eff_checked(const ModeExpansion& exp,
                                 GammaEffConvention conv = GammaEffConvention::AllModes);

inline double gamma_eff(const ModeExpansion& exp,
                        GammaEffConvention conv = GammaEffConvention::AllModes) {
  return gamma_eff_checked(exp, conv).value;
}

double decoherence_time(const ModeExpansion& exp,
                        GammaEffConvention conv = GammaEffConvention::AllModes,
                        double hbar = 1.0);

struct ModeClassification {
  std::vector<DecayMode> slow;  // gamma <= gamma_eff (boundary goes slow)
  std::vector<DecayMode> fast;
  double gamma_eff = 0.0;
};

ModeClassification classify_modes(const ModeExpansion& exp,
                                  GammaEffConvention conv = GammaEffConvention::AllModes);

// First two coefficients of log(sum_i a_i(0) e^{-gamma_i t/hbar}):
// g0 = log sum a_i(0), g1 = -gamma_eff / hbar.
std::pair<double, double> short_time_log_expansion(const ModeExpansion& exp,
                                                   double hbar = 1.0);

// Numerical inverse of the expansion: matrix-pencil estimate of the modes
// plus the constant term from uniformly sampled data.
struct ExtractionResult {
  ModeExpansion expansion;
  bool unstable = false;     // recovered gamma <= 0 somewhere
  std::string note;          // human-readable diagnostics
  std::vector<DecayMode> rejected;  // unstable modes kept out of the expansion
};

ExtractionResult extract_modes(const std::vector<std::pair<double, double>>& samples,
                               int model_order, double hbar = 1.0);

// Relaxation/decoherence summary. t_R and t_D are derived, never stored.
struct TimescaleReport {
  double hbar = 1.0;
  double gamma0 = 0.0;      // slowest width
  double gamma_eff = 0.0;   // width entering t_D
  double gamma_eff_all = 0.0;
  double gamma_eff_excl = 0.0;
  bool mixed_sign_warning = false;
  std::vector<DecayMode> slow;
  std::vector<DecayMode> fast;

  double t_R() const { return hbar / gamma0; }
  double t_D() const { return hbar / gamma_eff; }
};

}  // namespace polebasis

#endif
