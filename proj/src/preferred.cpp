#include "polebasis/preferred.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polebasis {

namespace {

constexpr double kTowerRelFloor = 1e-18;

// Rate-tie tolerance when deciding slow vs fast (boundary goes slow).
bool mode_is_slow(double gamma, double gamma_cut) {
  return gamma <= gamma_cut * (1.0 + 1e-12);
}

}  // namespace

Complex EntryExpansion::evaluate(double t, double hbar) const {
  Complex v = equilibrium;
  for (const Term& m : modes)
    v += m.amp * std::exp(Complex(-m.gamma * t / hbar, -m.omega * t / hbar));
  return v;
}

EntryExpansion EntryExpansion::conjugate_mirror() const {
  EntryExpansion out;
  out.equilibrium = std::conj(equilibrium);
  out.modes.reserve(modes.size());
  for (const Term& m : modes)
    out.modes.push_back(Term{std::conj(m.amp), m.gamma, -m.omega});
  return out;
}

// ---------------------------------------------------------------------------
// TwoBranchDecomposition
// ---------------------------------------------------------------------------

TwoBranchDecomposition::TwoBranchDecomposition(Complex a, Complex b,
                                               CoherentLabel alpha1,
                                               CoherentLabel alpha2, Pole pole,
                                               double hbar)
    : a_(a), b_(b), alpha1_(alpha1), alpha2_(alpha2), pole_(pole), hbar_(hbar) {
  if (std::abs(a) == 0.0 && std::abs(b) == 0.0)
    fail(ErrorKind::ZeroState, "TwoBranchDecomposition: a = b = 0");
  if (!(hbar > 0.0))
    fail(ErrorKind::InvalidScenario, "TwoBranchDecomposition: hbar <= 0");
  norm_sq_ = std::norm(a) + std::norm(b) +
             2.0 * (std::conj(a) * b * coherent_overlap_static(alpha1, alpha2))
                       .real();
  if (norm_sq_ < 1e-28 * (std::norm(a) + std::norm(b)))
    fail(ErrorKind::ZeroState, "TwoBranchDecomposition: initial state vanishes");
}

TwoBranchDecomposition::Tower TwoBranchDecomposition::exp_tower(
    Complex log_scale, Complex q) {
  Tower t;
  const double qa = std::abs(q);
  if (qa == 0.0) {
    t.amp.push_back(std::exp(log_scale));
    return t;
  }
  const Complex lq = std::log(q);
  const int kmax = int(qa + 12.0 * std::sqrt(qa + 1.0)) + 40;
  t.amp.resize(kmax + 1);
  double peak = 0.0;
  int last = 0;
  for (int k = 0; k <= kmax; ++k) {
    Complex la = log_scale + double(k) * lq - std::lgamma(double(k) + 1.0);
    Complex v = (la.real() < -745.0) ? Complex(0.0, 0.0) : std::exp(la);
    t.amp[k] = v;
    double m = std::abs(v);
    if (m > peak) peak = m;
    if (m > kTowerRelFloor * peak) last = k;
    if (double(k) > qa && m < kTowerRelFloor * peak && peak > 0.0) break;
  }
  t.amp.resize(last + 1);
  return t;
}

void TwoBranchDecomposition::accumulate(Tower& into, const Tower& t,
                                        Complex factor) {
  if (t.amp.size() > into.amp.size()) into.amp.resize(t.amp.size(), Complex(0, 0));
  for (std::size_t k = 0; k < t.amp.size(); ++k) into.amp[k] += factor * t.amp[k];
}

TwoBranchDecomposition::Tower TwoBranchDecomposition::coefficient_tower(
    int u, int v) const {
  const double x1 = alpha1_.mag_sq();
  const double x2 = alpha2_.mag_sq();
  Complex coef;
  double q = 0.0;
  if (u == 1 && v == 1) {
    coef = Complex(std::norm(a_), 0.0) / norm_sq_;
    q = 0.0;
    Tower t;
    t.amp.push_back(coef);
    return t;
  }
  if (u == 2 && v == 2) {
    coef = Complex(std::norm(b_), 0.0) / norm_sq_;
    q = x2;
  } else {
    const double c = x1 + x2 - (std::conj(alpha1_.alpha) * alpha2_.alpha).real();
    coef = (u == 1 ? a_ * std::conj(b_) : b_ * std::conj(a_)) / norm_sq_;
    q = c;
  }
  if (std::abs(coef) == 0.0) return Tower{};
  Complex log_scale = std::log(coef) - q;
  return exp_tower(log_scale, Complex(q, 0.0));
}

TwoBranchDecomposition::Tower TwoBranchDecomposition::vacuum_tower() const {
  const double x1 = alpha1_.mag_sq();
  const double x2 = alpha2_.mag_sq();
  // Trace of the raw dyad sum: diagonal survivals plus the cross term folded
  // with the moving overlap <alpha2(t)|alpha1(t)>.
  Tower trace;
  accumulate(trace, coefficient_tower(1, 1), Complex(1.0, 0.0));
  accumulate(trace, coefficient_tower(2, 2), Complex(1.0, 0.0));

  // cross12(t) * conj(g(t)) with g = <alpha1(t)|alpha2(t)>.
  const double c = x1 + x2 - (std::conj(alpha1_.alpha) * alpha2_.alpha).real();
  const Complex qg = Complex(-0.5 * (x1 + x2), 0.0) +
                     std::conj(alpha1_.alpha) * alpha2_.alpha;
  Complex coef = a_ * std::conj(b_) / norm_sq_;
  if (std::abs(coef) > 0.0) {
    Complex log_scale = std::log(coef) - c;
    Tower crossg = exp_tower(log_scale, Complex(c, 0.0) + std::conj(qg));
    Tower crossg2;
    for (const Complex& z : crossg.amp) crossg2.amp.push_back(std::conj(z));
    accumulate(trace, crossg, Complex(1.0, 0.0));
    accumulate(trace, crossg2, Complex(1.0, 0.0));
  }

  Tower vac;
  vac.amp.resize(std::max<std::size_t>(trace.amp.size(), 1), Complex(0.0, 0.0));
  for (std::size_t k = 0; k < trace.amp.size(); ++k) vac.amp[k] = -trace.amp[k];
  vac.amp[0] += 1.0;
  return vac;
}

ModeExpansion TwoBranchDecomposition::offdiag_coefficient_expansion() const {
  const double x1 = alpha1_.mag_sq();
  const double x2 = alpha2_.mag_sq();
  const double c = x1 + x2 - (std::conj(alpha1_.alpha) * alpha2_.alpha).real();
  Tower w = exp_tower(Complex(-c, 0.0), Complex(c, 0.0));
  std::vector<DecayMode> modes;
  double peak = 0.0;
  for (const Complex& z : w.amp) peak = std::max(peak, std::abs(z));
  for (std::size_t k = 1; k < w.amp.size(); ++k) {
    double amp = w.amp[k].real();
    if (std::abs(amp) < kTowerRelFloor * peak) continue;
    modes.push_back(DecayMode{amp, double(k) * pole_.gamma, 0.0, 0.0});
  }
  double eq = w.amp.empty() ? 0.0 : w.amp[0].real();
  return ModeExpansion::make(eq, std::move(modes));
}

double TwoBranchDecomposition::pooled_cut_rate() const {
  Tower pooled;
  accumulate(pooled, coefficient_tower(1, 1), Complex(1.0, 0.0));
  accumulate(pooled, coefficient_tower(2, 2), Complex(1.0, 0.0));
  accumulate(pooled, coefficient_tower(1, 2), Complex(1.0, 0.0));
  accumulate(pooled, coefficient_tower(2, 1), Complex(1.0, 0.0));
  accumulate(pooled, vacuum_tower(), Complex(1.0, 0.0));
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < pooled.amp.size(); ++k) {
    den += pooled.amp[k].real();
    num += pooled.amp[k].real() * double(k) * pole_.gamma;
  }
  if (std::abs(den) < 1e-300)
    fail(ErrorKind::DegenerateExpansion, "pooled_cut_rate: signal vanishes");
  return num / den;
}

EntryExpansion TwoBranchDecomposition::entry_expansion(int m, int n) const {
  const double x1 = alpha1_.mag_sq();
  const double x2 = alpha2_.mag_sq();
  // Towers aligned on rates ((m+n)/2 + k) gamma0, frequency (m-n) omega'.
  Tower acc;
  // log of alpha_u^m conj(alpha_v)^n / sqrt(m! n!), kept in log form so large
  // labels and indices cannot overflow an intermediate.
  auto dyad_log_scale = [&](int u, int v, bool& zero) -> Complex {
    const Complex au = (u == 1) ? alpha1_.alpha : alpha2_.alpha;
    const Complex av = (v == 1) ? alpha1_.alpha : alpha2_.alpha;
    zero = (m > 0 && std::abs(au) == 0.0) || (n > 0 && std::abs(av) == 0.0);
    if (zero) return Complex(0.0, 0.0);
    Complex acc_log(0.0, 0.0);
    if (m > 0) acc_log += double(m) * std::log(au);
    if (n > 0) acc_log += double(n) * std::conj(std::log(av));
    return acc_log - 0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0));
  };
  struct DyadSpec {
    int u, v;
    Complex coef;
    double cuv;
  };
  const double c12 = x1 + x2 - (std::conj(alpha1_.alpha) * alpha2_.alpha).real();
  const DyadSpec specs[4] = {
      {1, 1, Complex(std::norm(a_), 0.0) / norm_sq_, x1},
      {2, 2, Complex(std::norm(b_), 0.0) / norm_sq_, x2},
      {1, 2, a_ * std::conj(b_) / norm_sq_, c12},
      {2, 1, b_ * std::conj(a_) / norm_sq_, c12},
  };
  for (const DyadSpec& sp : specs) {
    if (std::abs(sp.coef) == 0.0) continue;
    bool zero = false;
    Complex log_scale = dyad_log_scale(sp.u, sp.v, zero);
    if (zero) continue;
    const double xu = (sp.u == 1) ? x1 : x2;
    const double xv = (sp.v == 1) ? x1 : x2;
    // Coefficient carries e^{-cuv}; the two moving normalizations carry
    // exp(-(xu+xv)/2 e^{-s}), which folds into the tower exponent.
    const double q = sp.cuv - 0.5 * (xu + xv);
    Tower t = exp_tower(std::log(sp.coef) + log_scale - sp.cuv, Complex(q, 0.0));
    accumulate(acc, t, Complex(1.0, 0.0));
  }

  EntryExpansion out;
  double peak = 0.0;
  for (const Complex& z : acc.amp) peak = std::max(peak, std::abs(z));
  const double omega_entry = double(m - n) * pole_.omega_prime;
  for (std::size_t k = 0; k < acc.amp.size(); ++k) {
    if (std::abs(acc.amp[k]) < kTowerRelFloor * std::max(peak, 1e-300)) continue;
    double gamma = (0.5 * double(m + n) + double(k)) * pole_.gamma;
    if (gamma == 0.0)
      out.equilibrium += acc.amp[k];
    else
      out.modes.push_back(EntryExpansion::Term{acc.amp[k], gamma, omega_entry});
  }
  if (m == 0 && n == 0) {
    Tower vac = vacuum_tower();
    for (std::size_t k = 0; k < vac.amp.size(); ++k) {
      if (k == 0)
        out.equilibrium += vac.amp[0];
      else if (std::abs(vac.amp[k]) > 1e-300)
        out.modes.push_back(
            EntryExpansion::Term{vac.amp[k], double(k) * pole_.gamma, 0.0});
    }
  }
  return out;
}

DensityMatrix TwoBranchDecomposition::rho_s(double t, const FockSpace& space,
                                            const Tolerances& tol) const {
  return reduced_state(a_, b_, alpha1_, alpha2_, pole_, t, space, hbar_, tol);
}

TwoBranchDecomposition::PreferredResult TwoBranchDecomposition::rho_p(
    double t, const FockSpace& space, double gamma_cut,
    const Tolerances& tol) const {
  if (t < 0.0) fail(ErrorKind::AntiCausal, "rho_p: t < 0");
  const double s = pole_.gamma * t / hbar_;
  auto kept_value = [&](const Tower& tower) -> Complex {
    Complex v(0.0, 0.0);
    for (std::size_t k = 0; k < tower.amp.size(); ++k) {
      if (k > 0 && !mode_is_slow(double(k) * pole_.gamma, gamma_cut)) break;
      v += tower.amp[k] * std::exp(-double(k) * s);
    }
    return v;
  };
  Complex k11 = kept_value(coefficient_tower(1, 1));
  Complex k22 = kept_value(coefficient_tower(2, 2));
  Complex k12 = kept_value(coefficient_tower(1, 2));
  Complex kvac = kept_value(vacuum_tower());

  const Complex f = std::exp(Complex(-0.5 * pole_.gamma * t / hbar_,
                                     -pole_.omega_prime * t / hbar_));
  Vector v1 = coherent_vector(CoherentLabel(alpha1_.alpha * f), space, tol).components;
  Vector v2 = coherent_vector(CoherentLabel(alpha2_.alpha * f), space, tol).components;

  Matrix rho = k11.real() * (v1 * v1.adjoint()) + k22.real() * (v2 * v2.adjoint());
  rho += k12 * (v1 * v2.adjoint());
  rho += std::conj(k12) * (v2 * v1.adjoint());
  rho(0, 0) += kvac.real();

  rho = 0.5 * (rho + Matrix(rho.adjoint()));
  PreferredResult out;
  out.trace_correction = std::abs(1.0 - rho.trace().real());
  rho(0, 0) += 1.0 - rho.trace().real();
  out.state = std::move(rho);
  return out;
}

double TwoBranchDecomposition::dropped_envelope(double t, double gamma_cut) const {
  const double s = pole_.gamma * t / hbar_;
  auto dropped = [&](const Tower& tower) {
    double acc = 0.0;
    for (std::size_t k = 1; k < tower.amp.size(); ++k)
      if (!mode_is_slow(double(k) * pole_.gamma, gamma_cut))
        acc += std::abs(tower.amp[k]) * std::exp(-double(k) * s);
    return acc;
  };
  return dropped(coefficient_tower(1, 1)) + dropped(coefficient_tower(2, 2)) +
         2.0 * dropped(coefficient_tower(1, 2)) + dropped(vacuum_tower());
}

// ---------------------------------------------------------------------------
// Trajectories and the moving basis
// ---------------------------------------------------------------------------

PreferredStateTrajectory preferred_trajectory(
    const TwoBranchDecomposition& decomp, const std::vector<double>& times,
    const FockSpace& space, double gamma_cut, const Tolerances& tol) {
  PreferredStateTrajectory traj{.times = times, .states = {}, .space = space};
  traj.states.reserve(times.size());
  for (double t : times) {
    auto r = decomp.rho_p(t, space, gamma_cut, tol);
    traj.max_trace_correction = std::max(traj.max_trace_correction,
                                         r.trace_correction);
    traj.states.push_back(std::move(r.state));
  }
  return traj;
}

namespace {

void canonical_phase(Matrix& v) {
  for (int j = 0; j < v.cols(); ++j) {
    int imax = 0;
    double best = 0.0;
    for (int i = 0; i < v.rows(); ++i) {
      double m = std::abs(v(i, j));
      if (m > best) {
        best = m;
        imax = i;
      }
    }
    if (best > 0.0) {
      Complex ph = v(imax, j) / best;
      v.col(j) *= std::conj(ph);
    }
  }
}

}  // namespace

BasisTrajectory moving_basis(const PreferredStateTrajectory& traj,
                             const Tolerances& tol) {
  BasisTrajectory out;
  out.times = traj.times;
  const int dim = traj.space.dim;
  Matrix prev;
  for (std::size_t ti = 0; ti < traj.states.size(); ++ti) {
    const Matrix& st = traj.states[ti];
    if (hermiticity_defect(st) > tol.eps_herm)
      fail(ErrorKind::StateInvariant, "moving_basis: state not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(st);
    if (es.info() != Eigen::Success)
      fail(ErrorKind::Internal, "moving_basis: eigensolver failed");

    // Descending order.
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    Matrix v(dim, dim);
    for (int j = 0; j < dim; ++j) v.col(j) = es.eigenvectors().col(dim - 1 - j);
    if (ev.minCoeff() < -tol.eps_psd)
      fail(ErrorKind::StateInvariant, "moving_basis: state not PSD");

    canonical_phase(v);

    std::vector<int> flags(dim, 0);
    // Degenerate clusters by eigenvalue gap.
    std::vector<std::pair<int, int>> clusters;
    {
      int start = 0;
      for (int j = 1; j <= dim; ++j) {
        if (j == dim || ev(j - 1) - ev(j) > tol.eps_degen) {
          if (j - start > 1) {
            clusters.push_back({start, j});
            for (int k = start; k < j; ++k) flags[k] = 1;
          }
          start = j;
        }
      }
    }

    if (!prev.size()) {
      prev = v;
      out.bases.push_back(v);
      out.eigenvalues.push_back(ev);
      out.degenerate_flags.push_back(std::move(flags));
      continue;
    }

    // Permutation match against the previous frame, greedy on |overlap|,
    // restricted to within-cluster swaps (distinct eigenvalues keep their
    // sorted positions).
    Matrix matched = v;
    Eigen::VectorXd ev_m = ev;
    for (auto [b, e] : clusters) {
      int w = e - b;
      Matrix block = v.middleCols(b, w);
      Matrix pblock = prev.middleCols(b, std::min(w, int(prev.cols()) - b));
      if (pblock.cols() != w) continue;
      // Subspace alignment (orthogonal Procrustes). BDCSVD for wide blocks;
      // Jacobi is prohibitively slow on the near-null cluster.
      Matrix x = block.adjoint() * pblock;
      Matrix rot;
      if (w >= 16) {
        Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
        rot = svd.matrixU() * svd.matrixV().adjoint();
      } else {
        Eigen::JacobiSVD<Matrix> svd(x,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
        rot = svd.matrixU() * svd.matrixV().adjoint();
      }
      matched.middleCols(b, w) = block * rot;
    }
    // Phase-align every column with its predecessor.
    for (int j = 0; j < dim; ++j) {
      Complex ov = prev.col(j).dot(matched.col(j));
      if (std::abs(ov) > 0.0) matched.col(j) *= ov / std::abs(ov);
    }
    prev = matched;
    out.bases.push_back(matched);
    out.eigenvalues.push_back(ev_m);
    out.degenerate_flags.push_back(std::move(flags));
  }
  return out;
}

std::vector<double> diagonality_series(const std::vector<Matrix>& rho_s,
                                       const BasisTrajectory& basis) {
  if (rho_s.size() != basis.bases.size())
    fail(ErrorKind::GridMismatch, "diagonality_series: grid mismatch");
  std::vector<double> d;
  d.reserve(rho_s.size());
  for (std::size_t i = 0; i < rho_s.size(); ++i) {
    Matrix p = basis.bases[i].adjoint() * rho_s[i] * basis.bases[i];
    double total = p.squaredNorm();
    double diag = p.diagonal().squaredNorm();
    d.push_back(std::sqrt(std::max(total - diag, 0.0)));
  }
  return d;
}

std::vector<FidelityPoint> coherent_basis_fidelity(
    const BasisTrajectory& basis, const CoherentLabel& alpha1,
    const CoherentLabel& alpha2, const Pole& pole, const FockSpace& space,
    double hbar, const Tolerances& tol) {
  std::vector<FidelityPoint> out;
  out.reserve(basis.times.size());
  for (std::size_t i = 0; i < basis.times.size(); ++i) {
    const double t = basis.times[i];
    const Complex f = std::exp(Complex(-0.5 * pole.gamma * t / hbar,
                                       -pole.omega_prime * t / hbar));
    CoherentLabel l1(alpha1.alpha * f), l2(alpha2.alpha * f);
    FidelityPoint pt;
    Vector e1 = basis.bases[i].col(0);
    Vector e2 = basis.bases[i].cols() > 1 ? Vector(basis.bases[i].col(1))
                                          : Vector(e1);
    if (std::abs(l1.alpha - l2.alpha) < 1e-8 * (1.0 + std::abs(l2.alpha))) {
      pt.branches_coincide = true;
      Vector v = coherent_vector(l1, space, tol).components;
      pt.fidelity = std::max(std::norm(e1.dot(v)), std::norm(e2.dot(v)));
      out.push_back(pt);
      continue;
    }
    Vector v1 = coherent_vector(l1, space, tol).components;
    Vector v2 = coherent_vector(l2, space, tol).components;
    // Symmetric Lowdin orthonormalization of the branch pair.
    Eigen::Matrix2cd gram;
    gram << 1.0, v1.dot(v2), v2.dot(v1), 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> ges(gram);
    Eigen::Vector2d gev = ges.eigenvalues();
    if (gev.minCoeff() < 1e-14) {
      pt.branches_coincide = true;
      pt.fidelity = std::max(std::norm(e1.dot(v1)), std::norm(e2.dot(v1)));
      out.push_back(pt);
      continue;
    }
    Eigen::Matrix2cd ginv_sqrt =
        ges.eigenvectors() * gev.cwiseInverse().cwiseSqrt().asDiagonal() *
        ges.eigenvectors().adjoint();
    Matrix pair(space.dim, 2);
    pair.col(0) = v1;
    pair.col(1) = v2;
    Matrix lowdin = pair * ginv_sqrt;

    // Best matched-vector assignment between the two leading eigenvectors
    // and the two Lowdin branch vectors.
    double f11 = std::norm(e1.dot(lowdin.col(0)));
    double f22 = std::norm(e2.dot(lowdin.col(1)));
    double f12 = std::norm(e1.dot(lowdin.col(1)));
    double f21 = std::norm(e2.dot(lowdin.col(0)));
    pt.fidelity = std::max(0.5 * (f11 + f22), 0.5 * (f12 + f21));
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sample-driven decomposition
// ---------------------------------------------------------------------------

const EntryExpansion& SampledDecomposition::upper_entry(int m, int n) const {
  const int dim = space.dim;
  int idx = m * dim - m * (m - 1) / 2 + (n - m);
  return upper[idx];
}

EntryExpansion SampledDecomposition::entry(int m, int n) const {
  if (m <= n) return upper_entry(m, n);
  return upper_entry(n, m).conjugate_mirror();
}

namespace {

// Convert a real cosine-mode expansion into complex +/- omega terms.
void append_complex_terms(std::vector<EntryExpansion::Term>& out,
                          const ModeExpansion& exp, Complex unit) {
  for (const DecayMode& m : exp.modes) {
    if (m.omega == 0.0) {
      out.push_back(EntryExpansion::Term{
          unit * m.amplitude * std::cos(m.phase), m.gamma, 0.0});
      continue;
    }
    Complex half = 0.5 * m.amplitude * std::exp(Complex(0.0, m.phase));
    out.push_back(EntryExpansion::Term{unit * std::conj(half), m.gamma, m.omega});
    out.push_back(EntryExpansion::Term{unit * half, m.gamma, -m.omega});
  }
}

ExtractionResult extract_adaptive(const std::vector<std::pair<double, double>>& s,
                                  int order, double hbar) {
  for (int k = order; k >= 1; --k) {
    try {
      return extract_modes(s, k, hbar);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RankDeficient || k == 1) throw;
    }
  }
  fail(ErrorKind::RankDeficient, "extract_adaptive: unreachable");
}

}  // namespace

SampledDecomposition decompose_sampled(const std::vector<double>& times,
                                       const std::vector<Matrix>& states,
                                       int model_order, double hbar) {
  if (times.size() != states.size() || times.size() < 4)
    fail(ErrorKind::GridMismatch, "decompose_sampled: bad trajectory");
  const int dim = int(states.front().rows());
  SampledDecomposition out{FockSpace(dim), hbar, {}};
  out.upper.reserve(std::size_t(dim) * (dim + 1) / 2);
  std::vector<std::pair<double, double>> re(times.size()), im(times.size());
  for (int m = 0; m < dim; ++m) {
    for (int n = m; n < dim; ++n) {
      for (std::size_t k = 0; k < times.size(); ++k) {
        re[k] = {times[k], states[k](m, n).real()};
        im[k] = {times[k], states[k](m, n).imag()};
      }
      EntryExpansion e;
      try {
        ExtractionResult r = extract_adaptive(re, model_order, hbar);
        e.equilibrium += r.expansion.equilibrium;
        append_complex_terms(e.modes, r.expansion, Complex(1.0, 0.0));
        ExtractionResult ri = extract_adaptive(im, model_order, hbar);
        e.equilibrium += Complex(0.0, 1.0) * ri.expansion.equilibrium;
        append_complex_terms(e.modes, ri.expansion, Complex(0.0, 1.0));
      } catch (const Error& err) {
        std::ostringstream os;
        os << "decompose_sampled: entry (" << m << ", " << n
           << "): " << err.what();
        fail(err.kind(), os.str());
      }
      out.upper.push_back(std::move(e));
    }
  }
  return out;
}

Matrix preferred_state_sampled(const SampledDecomposition& decomp, double t,
                               double gamma_cut) {
  const int dim = decomp.space.dim;
  Matrix rho = Matrix::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) {
    for (int n = m; n < dim; ++n) {
      const EntryExpansion& e = decomp.upper_entry(m, n);
      Complex v = e.equilibrium;
      for (const auto& term : e.modes)
        if (mode_is_slow(term.gamma, gamma_cut))
          v += term.amp *
               std::exp(Complex(-term.gamma * t / decomp.hbar,
                                -term.omega * t / decomp.hbar));
      rho(m, n) = v;
      if (n != m) rho(n, m) = std::conj(v);
    }
  }
  rho = 0.5 * (rho + Matrix(rho.adjoint()));
  rho(0, 0) += 1.0 - rho.trace().real();
  return rho;
}

double pooled_cut_rate_sampled(const SampledDecomposition& decomp) {
  double num = 0.0, den = 0.0;
  const int dim = decomp.space.dim;
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      EntryExpansion e = decomp.entry(m, n);
      den += e.equilibrium.real();
      for (const auto& term : e.modes) {
        den += term.amp.real();
        num += term.amp.real() * term.gamma;
      }
    }
  if (std::abs(den) < 1e-300)
    fail(ErrorKind::DegenerateExpansion, "pooled_cut_rate_sampled: vanishing");
  return num / den;
}

}  // namespace polebasis
