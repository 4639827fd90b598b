#ifndef POLEBASIS_SCENARIO_HPP
#define POLEBASIS_SCENARIO_HPP

#include <map>
#include <string>
#include <vector>

#include "polebasis/errors.hpp"
#include "polebasis/fock.hpp"
#include "polebasis/spectral.hpp"

namespace polebasis {

struct TimeGridSpec {
  double t_min = 1e-3;
  double t_max = 1e2;
  int count = 81;
  bool log_scale = true;
  bool relative = true;  // times in units of hbar/gamma0 instead of absolute
};

// Flat key = value scenario. See README for the schema.
struct Scenario {
  // density
  std::string density_kind = "ohmic";  // ohmic | tabulated
  double eta = 0.01;
  double cutoff = 10.0;
  std::string density_csv;  // tabulated only
  std::vector<double> tab_grid, tab_values;

  double omega = 1.0;  // bare frequency embedded in the continuum

  // physical constants for I/O conversion
  double hbar = 1.0;
  double mass = 1.0;
  double omega_unit = 1.0;

  // L; branch labels are alpha1 = 0, alpha2 = kappa L. The default puts
  // |alpha2|^2 = 50 for the default density (kappa^2 = omega0'/2).
  double separation = 10.627956835047302;
  Complex weight_a{M_SQRT1_2, 0.0};
  Complex weight_b{M_SQRT1_2, 0.0};

  int dim = 128;
  TimeGridSpec grid;
  Tolerances tol;

  void validate() const;
  SpectralDensity density() const;
};

// Parse/serialize. Tabulated density CSV paths resolve relative to the
// scenario file; POLEBASIS_TOL_* environment variables override tolerances.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& base_dir);
Scenario default_scenario();

std::string scenario_to_text(const Scenario& sc);

}  // namespace polebasis

#endif
