#ifndef POLEBASIS_FOCK_HPP
#define POLEBASIS_FOCK_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "polebasis/errors.hpp"

namespace polebasis {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Truncated Fock space keeping number states |0> .. |dim-1>.
struct FockSpace {
  int dim = 1;

  explicit FockSpace(int d) : dim(d) {
    if (d < 1) fail(ErrorKind::InvalidScenario, "FockSpace: dim must be >= 1");
  }
  bool operator==(const FockSpace& o) const { return dim == o.dim; }
  bool operator!=(const FockSpace& o) const { return dim != o.dim; }
};

// Dimensionless coherent-state displacement.
struct CoherentLabel {
  Complex alpha{0.0, 0.0};

  CoherentLabel() = default;
  explicit CoherentLabel(Complex a) : alpha(a) {}
  explicit CoherentLabel(double a) : alpha(a, 0.0) {}
  double mag_sq() const { return std::norm(alpha); }
};

struct StateVector {
  Vector components;
  FockSpace space;

  StateVector(Vector c, FockSpace s) : components(std::move(c)), space(s) {
    if (components.size() != space.dim)
      fail(ErrorKind::SpaceMismatch, "StateVector: component count != dim");
  }
  double norm_sq() const { return components.squaredNorm(); }
};

// Hermitian, unit-trace, positive operator. Construct through
// DensityMatrix::checked() so the invariants are verified; raw intermediate
// operators stay plain Matrix objects.
struct DensityMatrix {
  Matrix entries;
  FockSpace space;

  static DensityMatrix checked(Matrix m, FockSpace s,
                               const Tolerances& tol = Tolerances::defaults());
  double trace_real() const { return entries.trace().real(); }
};

struct Observable {
  Matrix entries;
  FockSpace space;

  static Observable checked(Matrix m, FockSpace s,
                            const Tolerances& tol = Tolerances::defaults());
};

// Largest |alpha|^2 a space of the given dimension can hold without leaking
// more than ~1e-12 of norm past the truncation (Poisson mean + 8 sigma rule).
bool truncation_adequate(double alpha_mag_sq, int dim);

// c_n = e^{-|a|^2/2} a^n / sqrt(n!). Throws TruncationInadequate when the
// space is too small for the label.
StateVector coherent_vector(const CoherentLabel& label, const FockSpace& space,
                            const Tolerances& tol = Tolerances::defaults());

// Normalized projector onto a|alpha1> + b|alpha2>.
DensityMatrix superposition_density(Complex a, Complex b,
                                    const CoherentLabel& alpha1,
                                    const CoherentLabel& alpha2,
                                    const FockSpace& space,
                                    const Tolerances& tol = Tolerances::defaults());

// Tr(rho O); the imaginary residue is checked against eps_herm and dropped.
double expectation(const DensityMatrix& rho, const Observable& obs,
                   const Tolerances& tol = Tolerances::defaults());

// sqrt(sum_{i != j} |<i|rho|j>|^2) over an orthonormal basis.
double offdiagonal_mass(const DensityMatrix& rho,
                        const std::vector<StateVector>& basis,
                        const Tolerances& tol = Tolerances::defaults());

// Helpers shared across modules.
Matrix vacuum_projector(const FockSpace& space);
Observable number_operator(const FockSpace& space);
Observable identity_observable(const FockSpace& space);
Complex coherent_overlap_static(const CoherentLabel& a, const CoherentLabel& b);
double trace_distance(const Matrix& a, const Matrix& b);

double hermiticity_defect(const Matrix& m);
double min_eigenvalue(const Matrix& hermitian);

}  // namespace polebasis

#endif
