#ifndef POLEBASIS_PIPELINE_HPP
#define POLEBASIS_PIPELINE_HPP

#include <map>
#include <string>
#include <vector>

#include "polebasis/preferred.hpp"
#include "polebasis/scenario.hpp"

namespace polebasis {

// Scenario with the pole resolved and labels/grid made absolute.
struct ResolvedScenario {
  Scenario sc;
  Pole pole;
  CoherentLabel alpha1;  // always the vacuum under the placement rule
  CoherentLabel alpha2;  // kappa * L
  double alpha2_sq = 0.0;
  FockSpace space;
  std::vector<double> times;  // absolute

  TwoBranchDecomposition decomposition() const;
};

ResolvedScenario resolve(const Scenario& sc);

// Accumulated outputs of a pipeline stage.
struct RunReport {
  std::map<std::string, double> values;
  std::map<std::string, std::string> paths;
  std::vector<std::string> warnings;

  double value(const std::string& key) const;
};

RunReport run_poles(const ResolvedScenario& rs, const std::string& out_dir);
RunReport run_evolve(const ResolvedScenario& rs, const std::string& out_dir);
RunReport run_timescales(const ResolvedScenario& rs, const std::string& out_dir);
RunReport run_basis(const ResolvedScenario& rs, const std::string& out_dir);

// Timescale analysis of an externally sampled (time, value) signal via the
// matrix-pencil extractor.
RunReport run_timescales_samples(const std::string& samples_csv,
                                 int model_order, double hbar,
                                 const std::string& out_dir);

// Decoherence rate of the off-diagonal coefficient: the exclude-slowest
// average over its decay tower (the a0-term stays out of the sum).
double offdiag_gamma_eff(const TwoBranchDecomposition& decomp);

// Least-squares extraction of the dyad coefficients of a state matrix over
// the moving dyad frame; used to cross-check the closed-form factor.
struct DyadCoefficients {
  double vac = 0.0;     // weight on |0><0| (includes compensation)
  double p2 = 0.0;      // weight on |alpha2(t)><alpha2(t)|
  Complex cross{0, 0};  // weight on |alpha1(t)><alpha2(t)|
};

DyadCoefficients fit_dyad_coefficients(const Matrix& rho,
                                       const CoherentLabel& alpha1,
                                       const CoherentLabel& alpha2,
                                       const Pole& pole, double t,
                                       const FockSpace& space, double hbar,
                                       const Tolerances& tol);

}  // namespace polebasis

#endif
