#include "polebasis/evolution.hpp"

#include <cmath>

namespace polebasis {

namespace {

void require_causal(double t, const char* who) {
  if (t < 0.0) fail(ErrorKind::AntiCausal, std::string(who) + ": t < 0");
}

// exp(-i z0 t / hbar) for z0 = omega' - (i/2) gamma.
Complex evolution_factor(const Pole& pole, double t, double hbar) {
  return std::exp(Complex(-0.5 * pole.gamma * t / hbar,
                          -pole.omega_prime * t / hbar));
}

}  // namespace

EvolvedBranch evolve_branch(const CoherentLabel& alpha, const Pole& pole,
                            double t, double hbar) {
  require_causal(t, "evolve_branch");
  const double u = 1.0 - std::exp(-pole.gamma * t / hbar);
  EvolvedBranch b;
  b.label = CoherentLabel(alpha.alpha * evolution_factor(pole, t, hbar));
  b.survival = std::exp(-alpha.mag_sq() * u);
  return b;
}

Complex amplitude(const std::vector<Complex>& a_coeffs,
                  const std::vector<Complex>& b_coeffs, const Pole& pole,
                  double t, double hbar) {
  if (a_coeffs.size() != b_coeffs.size())
    fail(ErrorKind::LengthMismatch, "amplitude: coefficient lists differ");
  require_causal(t, "amplitude");
  const Complex f = evolution_factor(pole, t, hbar);
  Complex acc = 0.0;
  Complex fn = 1.0;
  for (std::size_t n = 0; n < a_coeffs.size(); ++n) {
    acc += b_coeffs[n] * std::conj(a_coeffs[n]) * fn;
    fn *= f;
  }
  return acc;
}

Complex coherent_overlap(const CoherentLabel& alpha_i,
                         const CoherentLabel& alpha_j, const Pole& pole,
                         double t, double hbar) {
  require_causal(t, "coherent_overlap");
  const Complex f = evolution_factor(pole, t, hbar);
  return std::exp(Complex(-0.5 * (alpha_i.mag_sq() + alpha_j.mag_sq()), 0.0) +
                  std::conj(alpha_i.alpha) * alpha_j.alpha * f);
}

double offdiag_factor(double alpha2_mag_sq, const Pole& pole, double t,
                      double hbar) {
  require_causal(t, "offdiag_factor");
  if (alpha2_mag_sq < 0.0)
    fail(ErrorKind::InvalidScenario, "offdiag_factor: |alpha2|^2 < 0");
  const double u = 1.0 - std::exp(-pole.gamma * t / hbar);
  return std::exp(-alpha2_mag_sq * u);
}

DensityMatrix equilibrium_state(const FockSpace& space) {
  return DensityMatrix{vacuum_projector(space), space};
}

DyadWeights dyad_weights(Complex a, Complex b, const CoherentLabel& alpha1,
                         const CoherentLabel& alpha2, const Pole& pole,
                         double t, double hbar) {
  require_causal(t, "dyad_weights");
  const double u = 1.0 - std::exp(-pole.gamma * t / hbar);
  const double x1 = alpha1.mag_sq();
  const double x2 = alpha2.mag_sq();

  DyadWeights w;
  w.s1 = std::exp(-x1 * u);
  w.s2 = std::exp(-x2 * u);
  // Cross exponent x1 + x2 - Re(conj(a1) a2): reduces to |alpha2|^2 for a
  // vacuum first branch and to the single-branch survival when the labels
  // coincide; |W|^2 <= S1 S2 keeps the dyad block positive.
  const double c = x1 + x2 - (std::conj(alpha1.alpha) * alpha2.alpha).real();
  w.w = std::exp(-c * u);

  const Complex f = evolution_factor(pole, t, hbar);
  CoherentLabel a1t(alpha1.alpha * f), a2t(alpha2.alpha * f);
  w.overlap = coherent_overlap_static(a1t, a2t);
  w.norm_sq = std::norm(a) + std::norm(b) +
              2.0 * (std::conj(a) * b * coherent_overlap_static(alpha1, alpha2))
                        .real();
  if (w.norm_sq < 1e-28 * (std::norm(a) + std::norm(b)))
    fail(ErrorKind::ZeroState, "dyad_weights: initial state vanishes");

  const Complex cross = a * std::conj(b) * w.w;
  // Tr(|a1><a2|) = <a2|a1> = conj(overlap).
  w.trace_raw = (std::norm(a) * w.s1 + std::norm(b) * w.s2 +
                 2.0 * (cross * std::conj(w.overlap)).real()) /
                w.norm_sq;
  w.vacuum = 1.0 - w.trace_raw;
  return w;
}

DensityMatrix reduced_state(Complex a, Complex b, const CoherentLabel& alpha1,
                            const CoherentLabel& alpha2, const Pole& pole,
                            double t, const FockSpace& space, double hbar,
                            const Tolerances& tol) {
  if (std::abs(a) == 0.0 && std::abs(b) == 0.0)
    fail(ErrorKind::ZeroState, "reduced_state: a = b = 0");
  DyadWeights w = dyad_weights(a, b, alpha1, alpha2, pole, t, hbar);

  const Complex f = std::exp(Complex(-0.5 * pole.gamma * t / hbar,
                                     -pole.omega_prime * t / hbar));
  Vector v1 = coherent_vector(CoherentLabel(alpha1.alpha * f), space, tol).components;
  Vector v2 = coherent_vector(CoherentLabel(alpha2.alpha * f), space, tol).components;

  Matrix rho = std::norm(a) * w.s1 * (v1 * v1.adjoint()) +
               std::norm(b) * w.s2 * (v2 * v2.adjoint());
  Complex cross = a * std::conj(b) * w.w;
  rho += cross * (v1 * v2.adjoint());
  rho += std::conj(cross) * (v2 * v1.adjoint());
  rho /= w.norm_sq;
  rho(0, 0) += 1.0 - rho.trace().real();
  return DensityMatrix::checked(std::move(rho), space, tol);
}

}  // namespace polebasis
