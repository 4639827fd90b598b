#ifndef POLEBASIS_EVOLUTION_HPP
#define POLEBASIS_EVOLUTION_HPP

#include <vector>

#include "polebasis/fock.hpp"
#include "polebasis/spectral.hpp"

namespace polebasis {

// A coherent branch under the non-Hermitian ladder Hamiltonian: the label
// spirals inward as alpha * exp(-i z0 t / hbar) and the branch keeps weight
// survival = exp(-|alpha|^2 (1 - e^{-gamma t / hbar})).
struct EvolvedBranch {
  CoherentLabel label;
  double survival = 1.0;
};

EvolvedBranch evolve_branch(const CoherentLabel& alpha, const Pole& pole,
                            double t, double hbar = 1.0);

// A(t) = sum_n b_n conj(a_n) e^{-i n z0 t / hbar}.
Complex amplitude(const std::vector<Complex>& a_coeffs,
                  const std::vector<Complex>& b_coeffs, const Pole& pole,
                  double t, double hbar = 1.0);

// <alpha_i(0)|alpha_j(t)> = e^{-(|a_i|^2+|a_j|^2)/2} e^{conj(a_i) a_j e^{-i z0 t/hbar}}.
Complex coherent_overlap(const CoherentLabel& alpha_i,
                         const CoherentLabel& alpha_j, const Pole& pole,
                         double t, double hbar = 1.0);

// Closed-form off-diagonal decay factor e^{-x (1 - e^{-gamma t / hbar})}.
double offdiag_factor(double alpha2_mag_sq, const Pole& pole, double t,
                      double hbar = 1.0);

// Stationary state of the compensated evolution: the vacuum projector.
DensityMatrix equilibrium_state(const FockSpace& space);

// Scalar weights of the two-branch state at time t, in the representation
// rho_raw = [|a|^2 S1 P1 + |b|^2 S2 P2 + a conj(b) W D12 + h.c.] / N^2 over
// the normalized moving dyads, plus the vacuum compensation weight.
struct DyadWeights {
  double s1 = 1.0;            // branch-1 survival
  double s2 = 1.0;            // branch-2 survival
  double w = 1.0;             // cross-dyad decay factor
  Complex overlap{1.0, 0.0};  // <alpha1(t)|alpha2(t)> of the moving labels
  double norm_sq = 1.0;       // <Phi(0)|Phi(0)>
  double trace_raw = 1.0;     // trace before vacuum compensation
  double vacuum = 0.0;        // compensation weight
};

DyadWeights dyad_weights(Complex a, Complex b, const CoherentLabel& alpha1,
                         const CoherentLabel& alpha2, const Pole& pole,
                         double t, double hbar = 1.0);

// rho_S(t): the weighted moving dyads with the lost trace deposited on the
// vacuum. Equals superposition_density at t = 0 and tends to |0><0|.
DensityMatrix reduced_state(Complex a, Complex b, const CoherentLabel& alpha1,
                            const CoherentLabel& alpha2, const Pole& pole,
                            double t, const FockSpace& space, double hbar = 1.0,
                            const Tolerances& tol = Tolerances::defaults());

}  // namespace polebasis

#endif
