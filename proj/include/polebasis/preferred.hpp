#ifndef POLEBASIS_PREFERRED_HPP
#define POLEBASIS_PREFERRED_HPP

#include <optional>
#include <vector>

#include "polebasis/evolution.hpp"
#include "polebasis/fock.hpp"
#include "polebasis/modes.hpp"
#include "polebasis/spectral.hpp"

namespace polebasis {

// Mode expansion of one matrix entry: eq + sum amp e^{-gamma t/hbar} e^{-i omega t/hbar}.
// The expansion of entry (n, m) is the conjugate mirror of entry (m, n).
struct EntryExpansion {
  struct Term {
    Complex amp;
    double gamma = 0.0;
    double omega = 0.0;
  };
  Complex equilibrium{0.0, 0.0};
  std::vector<Term> modes;

  Complex evaluate(double t, double hbar = 1.0) const;
  EntryExpansion conjugate_mirror() const;
};

// Analytic decomposition of the two-coherent-branch system under a single
// decay pole. Every dyad coefficient is a tower of rates k * gamma0 whose
// amplitudes follow from the closed-form survival/cross factors; matrix
// entries inherit those towers shifted by the dyad's own (m+n)/2 rate.
class TwoBranchDecomposition {
public:
  TwoBranchDecomposition(Complex a, Complex b, CoherentLabel alpha1,
                         CoherentLabel alpha2, Pole pole, double hbar = 1.0);

  const Pole& pole() const { return pole_; }
  double hbar() const { return hbar_; }
  const CoherentLabel& alpha1() const { return alpha1_; }
  const CoherentLabel& alpha2() const { return alpha2_; }

  // Tower of the cross-dyad decay factor W(t) (equilibrium e^{-c}; modes at
  // k gamma0 with Poisson amplitudes). This is the signal whose linearized
  // rate defines the pipeline decoherence time.
  ModeExpansion offdiag_coefficient_expansion() const;

  // Short-time log-slope of the summed dyad-coefficient signal; the pooled
  // slow/fast cut used to build the preferred state.
  double pooled_cut_rate() const;

  // Matrix-entry expansion in the fixed Fock basis.
  EntryExpansion entry_expansion(int m, int n) const;

  // rho_S(t); delegates to the pole-evolution closed forms.
  DensityMatrix rho_s(double t, const FockSpace& space,
                      const Tolerances& tol = Tolerances::defaults()) const;

  // rho_P(t): dyad coefficients truncated to modes with gamma <= gamma_cut,
  // then vacuum-compensated and Hermitized.
  struct PreferredResult {
    Matrix state;
    double trace_correction = 0.0;
  };
  PreferredResult rho_p(double t, const FockSpace& space, double gamma_cut,
                        const Tolerances& tol = Tolerances::defaults()) const;

  // l1 envelope of everything rho_p dropped, evaluated at time t:
  // sum_fast |a_i| e^{-gamma_i t / hbar}. Bounds ||rho_P - rho_S||_F.
  double dropped_envelope(double t, double gamma_cut) const;

private:
  struct Tower {  // scale * exp(q e^{-gamma0 t/hbar}), stored as amplitudes
    std::vector<Complex> amp;  // amp[k] on e^{-k gamma0 t/hbar}
  };
  Tower coefficient_tower(int u, int v) const;  // dyad indices 1/2
  Tower vacuum_tower() const;
  static Tower exp_tower(Complex log_scale, Complex q);
  static void accumulate(Tower& into, const Tower& t, Complex factor);

  Complex a_, b_;
  CoherentLabel alpha1_, alpha2_;
  Pole pole_;
  double hbar_;
  double norm_sq_;
};

struct PreferredStateTrajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  FockSpace space;
  double max_trace_correction = 0.0;
};

PreferredStateTrajectory preferred_trajectory(
    const TwoBranchDecomposition& decomp, const std::vector<double>& times,
    const FockSpace& space, double gamma_cut,
    const Tolerances& tol = Tolerances::defaults());

// Time-indexed orthonormal eigenbases of rho_P, eigenvalues descending,
// phases canonical, consecutive frames permutation/phase matched.
struct BasisTrajectory {
  std::vector<double> times;
  std::vector<Matrix> bases;                    // columns are eigenvectors
  std::vector<Eigen::VectorXd> eigenvalues;     // descending
  std::vector<std::vector<int>> degenerate_flags;  // 1 = inside a degenerate cluster
};

BasisTrajectory moving_basis(const PreferredStateTrajectory& traj,
                             const Tolerances& tol = Tolerances::defaults());

// Frobenius mass of the off-diagonal part of each rho_S(t) in basis(t).
std::vector<double> diagonality_series(const std::vector<Matrix>& rho_s,
                                       const BasisTrajectory& basis);

// Matched-vector fidelity between the two leading basis vectors and the
// Lowdin-orthonormalized moving branch pair.
struct FidelityPoint {
  double fidelity = 0.0;
  bool branches_coincide = false;
};

std::vector<FidelityPoint> coherent_basis_fidelity(
    const BasisTrajectory& basis, const CoherentLabel& alpha1,
    const CoherentLabel& alpha2, const Pole& pole, const FockSpace& space,
    double hbar = 1.0, const Tolerances& tol = Tolerances::defaults());

// ---------------------------------------------------------------------------
// Sample-driven path for externally supplied trajectories.
// ---------------------------------------------------------------------------

// Per-entry matrix-pencil extraction of a sampled state trajectory.
struct SampledDecomposition {
  FockSpace space;
  double hbar = 1.0;
  // Upper triangle including the diagonal; entry (m, n) with m <= n at
  // index m * dim - m(m-1)/2 + (n - m). Lower entries are mirrors.
  std::vector<EntryExpansion> upper;

  const EntryExpansion& upper_entry(int m, int n) const;
  EntryExpansion entry(int m, int n) const;
};

SampledDecomposition decompose_sampled(const std::vector<double>& times,
                                       const std::vector<Matrix>& states,
                                       int model_order, double hbar = 1.0);

// Entrywise preferred state for sampled decompositions: equilibrium plus
// the slow entry modes, vacuum-compensated and Hermitized.
Matrix preferred_state_sampled(const SampledDecomposition& decomp, double t,
                               double gamma_cut);

double pooled_cut_rate_sampled(const SampledDecomposition& decomp);

}  // namespace polebasis

#endif
