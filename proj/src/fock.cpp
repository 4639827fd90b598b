#include "polebasis/fock.hpp"

#include <cmath>
#include <sstream>

namespace polebasis {

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::checked(Matrix m, FockSpace s,
                                     const Tolerances& tol) {
  if (m.rows() != s.dim || m.cols() != s.dim)
    fail(ErrorKind::SpaceMismatch, "DensityMatrix: shape mismatch");
  double herm = hermiticity_defect(m);
  if (herm > tol.eps_herm) {
    std::ostringstream os;
    os << "DensityMatrix: hermiticity defect " << herm << " > " << tol.eps_herm;
    fail(ErrorKind::StateInvariant, os.str());
  }
  double tr = std::abs(m.trace().real() - 1.0);
  if (tr > tol.eps_trace || std::abs(m.trace().imag()) > tol.eps_trace) {
    std::ostringstream os;
    os << "DensityMatrix: trace defect " << tr << " > " << tol.eps_trace;
    fail(ErrorKind::StateInvariant, os.str());
  }
  double lmin = min_eigenvalue(m);
  if (lmin < -tol.eps_psd) {
    std::ostringstream os;
    os << "DensityMatrix: min eigenvalue " << lmin << " < -" << tol.eps_psd;
    fail(ErrorKind::StateInvariant, os.str());
  }
  return DensityMatrix{std::move(m), s};
}

Observable Observable::checked(Matrix m, FockSpace s, const Tolerances& tol) {
  if (m.rows() != s.dim || m.cols() != s.dim)
    fail(ErrorKind::SpaceMismatch, "Observable: shape mismatch");
  if (hermiticity_defect(m) > tol.eps_herm)
    fail(ErrorKind::StateInvariant, "Observable: not Hermitian");
  return Observable{std::move(m), s};
}

bool truncation_adequate(double alpha_mag_sq, int dim) {
  if (alpha_mag_sq == 0.0) return true;  // the expansion terminates at |0>
  return alpha_mag_sq + 8.0 * std::sqrt(alpha_mag_sq + 1.0) <= double(dim);
}

StateVector coherent_vector(const CoherentLabel& label, const FockSpace& space,
                            const Tolerances& tol) {
  const double x = label.mag_sq();
  if (!std::isfinite(x))
    fail(ErrorKind::InvalidScenario, "coherent_vector: non-finite label");
  if (!truncation_adequate(x, space.dim)) {
    std::ostringstream os;
    os << "coherent_vector: dim " << space.dim << " inadequate for |alpha|^2 = "
       << x << " (need >= " << x + 8.0 * std::sqrt(x + 1.0) << ")";
    fail(ErrorKind::TruncationInadequate, os.str());
  }
  Vector c(space.dim);
  // c_n = c_{n-1} * alpha / sqrt(n), seeded with e^{-|a|^2/2}.
  Complex cur = std::exp(Complex(-0.5 * x, 0.0));
  for (int n = 0; n < space.dim; ++n) {
    c(n) = cur;
    cur *= label.alpha / std::sqrt(double(n + 1));
  }
  StateVector out(std::move(c), space);
  if (std::abs(out.norm_sq() - 1.0) > tol.eps_trunc)
    fail(ErrorKind::TruncationInadequate,
         "coherent_vector: truncated norm outside eps_trunc");
  return out;
}

DensityMatrix superposition_density(Complex a, Complex b,
                                    const CoherentLabel& alpha1,
                                    const CoherentLabel& alpha2,
                                    const FockSpace& space,
                                    const Tolerances& tol) {
  if (std::abs(a) == 0.0 && std::abs(b) == 0.0)
    fail(ErrorKind::ZeroState, "superposition_density: a = b = 0");
  Vector phi = a * coherent_vector(alpha1, space, tol).components +
               b * coherent_vector(alpha2, space, tol).components;
  double n2 = phi.squaredNorm();
  if (n2 < 1e-28 * (std::norm(a) + std::norm(b)))
    fail(ErrorKind::ZeroState,
         "superposition_density: destructive cancellation below numeric floor");
  Matrix rho = (phi * phi.adjoint()) / n2;
  return DensityMatrix::checked(std::move(rho), space, tol);
}

double expectation(const DensityMatrix& rho, const Observable& obs,
                   const Tolerances& tol) {
  if (rho.space != obs.space)
    fail(ErrorKind::SpaceMismatch, "expectation: space mismatch");
  Complex val = (rho.entries * obs.entries).trace();
  if (std::abs(val.imag()) > tol.eps_herm)
    fail(ErrorKind::StateInvariant, "expectation: imaginary residue too large");
  return val.real();
}

double offdiagonal_mass(const DensityMatrix& rho,
                        const std::vector<StateVector>& basis,
                        const Tolerances& tol) {
  if (basis.empty())
    fail(ErrorKind::NonOrthonormalBasis, "offdiagonal_mass: empty basis");
  const int k = int(basis.size());
  Matrix v(rho.space.dim, k);
  for (int i = 0; i < k; ++i) {
    if (basis[i].space != rho.space)
      fail(ErrorKind::SpaceMismatch, "offdiagonal_mass: basis space mismatch");
    v.col(i) = basis[i].components;
  }
  Matrix gram = v.adjoint() * v;
  double orth_defect = (gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (orth_defect > tol.eps_orth)
    fail(ErrorKind::NonOrthonormalBasis,
         "offdiagonal_mass: basis not orthonormal within eps_orth");
  Matrix proj = v.adjoint() * rho.entries * v;
  double spanned = proj.trace().real();
  if (spanned < (1.0 - tol.eps_trunc) * rho.trace_real() - tol.eps_trunc)
    fail(ErrorKind::NonOrthonormalBasis,
         "offdiagonal_mass: basis does not span the state");
  double acc = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) acc += std::norm(proj(i, j));
  return std::sqrt(acc);
}

Matrix vacuum_projector(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim, space.dim);
  m(0, 0) = 1.0;
  return m;
}

Observable number_operator(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim, space.dim);
  for (int n = 0; n < space.dim; ++n) m(n, n) = double(n);
  return Observable{std::move(m), space};
}

Observable identity_observable(const FockSpace& space) {
  return Observable{Matrix::Identity(space.dim, space.dim), space};
}

Complex coherent_overlap_static(const CoherentLabel& a, const CoherentLabel& b) {
  return std::exp(Complex(-0.5 * (a.mag_sq() + b.mag_sq()), 0.0) +
                  std::conj(a.alpha) * b.alpha);
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Internal: return "internal";
    case ErrorKind::InvalidScenario: return "invalid-scenario";
    case ErrorKind::TruncationInadequate: return "truncation-inadequate";
    case ErrorKind::ZeroState: return "zero-state";
    case ErrorKind::SpaceMismatch: return "space-mismatch";
    case ErrorKind::NonOrthonormalBasis: return "non-orthonormal-basis";
    case ErrorKind::OutOfHull: return "out-of-hull";
    case ErrorKind::OutsideSupport: return "outside-support";
    case ErrorKind::FreeSystem: return "free-system";
    case ErrorKind::QuadratureNonConvergence: return "quadrature-non-convergence";
    case ErrorKind::DegenerateExpansion: return "degenerate-expansion";
    case ErrorKind::NonPositiveAmplitudeSum: return "non-positive-amplitude-sum";
    case ErrorKind::NonUniformSampling: return "non-uniform-sampling";
    case ErrorKind::RankDeficient: return "rank-deficient";
    case ErrorKind::AntiCausal: return "anti-causal";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::StateInvariant: return "state-invariant";
    case ErrorKind::IoFailure: return "io-failure";
  }
  return "unknown";
}

}  // namespace polebasis
