#include "polebasis/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "polebasis/csv.hpp"

namespace polebasis {

namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoFailure, "cannot create output dir " + dir);
}

}  // namespace

double RunReport::value(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end())
    fail(ErrorKind::Internal, "RunReport: missing value " + key);
  return it->second;
}

TwoBranchDecomposition ResolvedScenario::decomposition() const {
  return TwoBranchDecomposition(sc.weight_a, sc.weight_b, alpha1, alpha2, pole,
                                sc.hbar);
}

ResolvedScenario resolve(const Scenario& sc) {
  sc.validate();
  SpectralDensity j = sc.density();
  Pole pole = pole_second_order(j, sc.omega);

  // alpha2 = kappa L with kappa^2 = m omega' / (2 hbar^2); omega_unit maps
  // the internal frequency onto the physical one entering kappa.
  double kappa = std::sqrt(sc.mass * pole.omega_prime * sc.omega_unit / 2.0) /
                 sc.hbar;
  CoherentLabel alpha2(kappa * sc.separation);
  if (!truncation_adequate(alpha2.mag_sq(), sc.dim))
    fail(ErrorKind::TruncationInadequate,
         "scenario: fock.dim too small for the requested separation");

  ResolvedScenario rs{sc, pole, CoherentLabel(0.0), alpha2, alpha2.mag_sq(),
                      FockSpace(sc.dim), {}};
  const double t_r = sc.hbar / pole.gamma;
  const double scale = sc.grid.relative ? t_r : 1.0;
  rs.times.reserve(sc.grid.count);
  for (int i = 0; i < sc.grid.count; ++i) {
    double f = (sc.grid.count == 1)
                   ? 0.0
                   : double(i) / double(sc.grid.count - 1);
    double t = sc.grid.log_scale
                   ? sc.grid.t_min * std::pow(sc.grid.t_max / sc.grid.t_min, f)
                   : sc.grid.t_min + f * (sc.grid.t_max - sc.grid.t_min);
    rs.times.push_back(t * scale);
  }
  return rs;
}

RunReport run_poles(const ResolvedScenario& rs, const std::string& out_dir) {
  ensure_dir(out_dir);
  const int n_max = std::max(1, rs.sc.dim - 1);
  PoleLadder ladder(rs.pole, n_max);
  std::vector<std::vector<double>> rows;
  rows.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    Pole zn = ladder.member(n);
    rows.push_back({double(n), zn.omega_prime, -0.5 * zn.gamma, zn.gamma});
  }
  std::string path = join(out_dir, "poles.csv");
  write_csv(path, {"n", "re_z", "im_z", "gamma_n"}, rows);

  RunReport rep;
  rep.values["gamma0"] = rs.pole.gamma;
  rep.values["omega0_prime"] = rs.pole.omega_prime;
  rep.values["t_r"] = rs.sc.hbar / rs.pole.gamma;
  rep.values["n_max"] = double(n_max);
  rep.paths["poles"] = path;
  return rep;
}

DyadCoefficients fit_dyad_coefficients(const Matrix& rho,
                                       const CoherentLabel& alpha1,
                                       const CoherentLabel& alpha2,
                                       const Pole& pole, double t,
                                       const FockSpace& space, double hbar,
                                       const Tolerances& tol) {
  const Complex f = std::exp(Complex(-0.5 * pole.gamma * t / hbar,
                                     -pole.omega_prime * t / hbar));
  Vector v1 = coherent_vector(CoherentLabel(alpha1.alpha * f), space, tol).components;
  Vector v2 = coherent_vector(CoherentLabel(alpha2.alpha * f), space, tol).components;

  const bool merged = alpha1.mag_sq() < 1e-24;  // P1 coincides with the vacuum
  std::vector<Matrix> basis;
  Matrix vac = vacuum_projector(space);
  basis.push_back(vac);
  basis.push_back(v2 * v2.adjoint());
  if (!merged) basis.push_back(v1 * v1.adjoint());
  Matrix d12 = v1 * v2.adjoint();
  Matrix d21 = v2 * v1.adjoint();
  // Real unknowns: weights on the Hermitian dyads plus Re/Im of the cross.
  const int nh = int(basis.size());
  const int unknowns = nh + 2;
  Eigen::MatrixXd a(unknowns, unknowns);
  Eigen::VectorXd b(unknowns);
  auto hs = [](const Matrix& x, const Matrix& y) {
    return (x.adjoint() * y).trace();
  };
  std::vector<Matrix> cols;
  for (const Matrix& m : basis) cols.push_back(m);
  cols.push_back(d12 + d21);                       // Re(cross) direction
  cols.push_back(Complex(0, 1) * (d12 - d21));     // Im(cross) direction
  for (int i = 0; i < unknowns; ++i) {
    for (int j = 0; j < unknowns; ++j) a(i, j) = hs(cols[i], cols[j]).real();
    b(i) = hs(cols[i], rho).real();
  }
  // Rank-revealing pseudo-inverse: when the moving dyads collapse onto the
  // vacuum the frame degenerates and the minimum-norm solution is the only
  // stable one.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd inv = es.eigenvalues();
  const double floor = es.eigenvalues().maxCoeff() * 1e-14;
  for (int i = 0; i < unknowns; ++i)
    inv(i) = (inv(i) > floor) ? 1.0 / inv(i) : 0.0;
  Eigen::VectorXd x = es.eigenvectors() * inv.asDiagonal() *
                      (es.eigenvectors().transpose() * b);

  DyadCoefficients out;
  out.vac = x(0);
  out.p2 = x(1);
  out.cross = Complex(x(nh), x(nh + 1));
  return out;
}

RunReport run_evolve(const ResolvedScenario& rs, const std::string& out_dir) {
  ensure_dir(out_dir);
  const FockSpace& space = rs.space;
  const double x2 = rs.alpha2_sq;
  RunReport rep;

  // frame_ok marks rows where the moving dyad frame is still numerically
  // resolvable; past it the cross coefficient has no matrix footprint above
  // double precision and the extracted ratio is only a minimum-norm value.
  const double sep0 = std::norm(rs.alpha1.alpha - rs.alpha2.alpha);

  std::vector<std::string> header = {"time", "offdiag_factor",
                                     "offdiag_coeff_ratio", "frame_ok",
                                     "trace_dist_vac"};
  for (int m = 0; m < space.dim; ++m)
    for (int n = 0; n < space.dim; ++n) {
      header.push_back("rho_" + std::to_string(m) + "_" + std::to_string(n) + "_re");
      header.push_back("rho_" + std::to_string(m) + "_" + std::to_string(n) + "_im");
    }

  Matrix vac = vacuum_projector(space);
  DyadCoefficients c0 = fit_dyad_coefficients(
      rs.decomposition().rho_s(0.0, space, rs.sc.tol).entries, rs.alpha1,
      rs.alpha2, rs.pole, 0.0, space, rs.sc.hbar, rs.sc.tol);
  const bool has_cross = std::abs(c0.cross) > 1e-300;
  if (!has_cross)
    rep.warnings.push_back("no off-diagonal dyad in this scenario");

  std::vector<double> times = rs.times;
  if (times.empty() || times.front() > 0.0) times.insert(times.begin(), 0.0);

  std::vector<std::vector<double>> rows;
  rows.reserve(times.size());
  TwoBranchDecomposition decomp = rs.decomposition();
  for (double t : times) {
    DensityMatrix rho = decomp.rho_s(t, space, rs.sc.tol);
    double odf = offdiag_factor(x2, rs.pole, t, rs.sc.hbar);
    double sep_t = sep0 * std::exp(-rs.pole.gamma * t / rs.sc.hbar);
    double frame_ok = (has_cross && sep_t >= 1e-2) ? 1.0 : 0.0;
    double ratio = odf;
    if (has_cross) {
      DyadCoefficients ct = fit_dyad_coefficients(rho.entries, rs.alpha1,
                                                  rs.alpha2, rs.pole, t, space,
                                                  rs.sc.hbar, rs.sc.tol);
      ratio = (ct.cross / c0.cross).real();
    }
    std::vector<double> row = {t, odf, ratio, frame_ok,
                               trace_distance(rho.entries, vac)};
    row.reserve(header.size());
    for (int m = 0; m < space.dim; ++m)
      for (int n = 0; n < space.dim; ++n) {
        row.push_back(rho.entries(m, n).real());
        row.push_back(rho.entries(m, n).imag());
      }
    rows.push_back(std::move(row));
  }
  std::string path = join(out_dir, "trajectory.csv");
  write_csv(path, header, rows);
  rep.paths["trajectory"] = path;
  rep.values["gamma0"] = rs.pole.gamma;
  rep.values["alpha2_sq"] = x2;
  return rep;
}

double offdiag_gamma_eff(const TwoBranchDecomposition& decomp) {
  return gamma_eff(decomp.offdiag_coefficient_expansion(),
                   GammaEffConvention::ExcludeSlowest);
}

namespace {

void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& kv) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::IoFailure, "cannot open " + path);
  for (const auto& [k, v] : kv) std::fprintf(f, "%s = %s\n", k.c_str(), v.c_str());
  std::fclose(f);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunReport run_timescales(const ResolvedScenario& rs, const std::string& out_dir) {
  ensure_dir(out_dir);
  TwoBranchDecomposition decomp = rs.decomposition();
  ModeExpansion offdiag = decomp.offdiag_coefficient_expansion();

  TimescaleReport ts;
  ts.hbar = rs.sc.hbar;
  ts.gamma0 = rs.pole.gamma;
  GammaEffResult excl = gamma_eff_checked(offdiag, GammaEffConvention::ExcludeSlowest);
  GammaEffResult all = gamma_eff_checked(offdiag, GammaEffConvention::AllModes);
  ts.gamma_eff_excl = excl.value;
  ts.gamma_eff_all = all.value;
  ts.gamma_eff = excl.value;  // the exclude-slowest reading defines t_D
  ts.mixed_sign_warning = excl.mixed_sign_warning || all.mixed_sign_warning;
  ModeClassification cls = classify_modes(offdiag, GammaEffConvention::ExcludeSlowest);
  ts.slow = cls.slow;
  ts.fast = cls.fast;

  const double pooled = decomp.pooled_cut_rate();

  RunReport rep;
  rep.values["gamma0"] = ts.gamma0;
  rep.values["t_r"] = ts.t_R();
  rep.values["gamma_eff"] = ts.gamma_eff;
  rep.values["t_d"] = ts.t_D();
  rep.values["gamma_eff_all"] = ts.gamma_eff_all;
  rep.values["gamma_eff_excl"] = ts.gamma_eff_excl;
  rep.values["pooled_cut_rate"] = pooled;
  rep.values["alpha2_sq"] = rs.alpha2_sq;
  rep.values["slow_count"] = double(ts.slow.size());
  rep.values["fast_count"] = double(ts.fast.size());
  rep.values["mixed_sign_warning"] = ts.mixed_sign_warning ? 1.0 : 0.0;
  if (ts.mixed_sign_warning)
    rep.warnings.push_back("gamma_eff outside [gamma_min, gamma_max]");

  std::string path = join(out_dir, "timescales.txt");
  write_kv(path, {
                     {"gamma0", fmt(ts.gamma0)},
                     {"t_r", fmt(ts.t_R())},
                     {"gamma_eff", fmt(ts.gamma_eff)},
                     {"t_d", fmt(ts.t_D())},
                     {"gamma_eff_all_modes", fmt(ts.gamma_eff_all)},
                     {"gamma_eff_exclude_slowest", fmt(ts.gamma_eff_excl)},
                     {"pooled_cut_rate", fmt(pooled)},
                     {"alpha2_sq", fmt(rs.alpha2_sq)},
                     {"slow_count", fmt(double(ts.slow.size()))},
                     {"fast_count", fmt(double(ts.fast.size()))},
                     {"mixed_sign_warning", ts.mixed_sign_warning ? "1" : "0"},
                 });
  rep.paths["timescales"] = path;
  return rep;
}

RunReport run_timescales_samples(const std::string& samples_csv,
                                 int model_order, double hbar,
                                 const std::string& out_dir) {
  ensure_dir(out_dir);
  std::vector<double> times, values;
  read_two_column(samples_csv, times, values);
  std::vector<std::pair<double, double>> samples;
  samples.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    samples.push_back({times[i], values[i]});
  ExtractionResult r = extract_modes(samples, model_order, hbar);

  RunReport rep;
  rep.values["equilibrium"] = r.expansion.equilibrium;
  rep.values["mode_count"] = double(r.expansion.modes.size());
  rep.values["unstable"] = r.unstable ? 1.0 : 0.0;
  if (r.unstable) rep.warnings.push_back("unstable modes: " + r.note);
  std::vector<std::pair<std::string, std::string>> kv = {
      {"equilibrium", fmt(r.expansion.equilibrium)},
      {"mode_count", fmt(double(r.expansion.modes.size()))},
      {"unstable", r.unstable ? "1" : "0"},
  };
  if (!r.expansion.modes.empty()) {
    double gamma0 = r.expansion.modes.front().gamma;
    GammaEffResult all = gamma_eff_checked(r.expansion, GammaEffConvention::AllModes);
    GammaEffResult excl =
        gamma_eff_checked(r.expansion, GammaEffConvention::ExcludeSlowest);
    rep.values["gamma0"] = gamma0;
    rep.values["t_r"] = hbar / gamma0;
    rep.values["gamma_eff_all"] = all.value;
    rep.values["gamma_eff_excl"] = excl.value;
    rep.values["t_d"] = hbar / excl.value;
    kv.push_back({"gamma0", fmt(gamma0)});
    kv.push_back({"t_r", fmt(hbar / gamma0)});
    kv.push_back({"gamma_eff_all_modes", fmt(all.value)});
    kv.push_back({"gamma_eff_exclude_slowest", fmt(excl.value)});
    kv.push_back({"t_d", fmt(hbar / excl.value)});
    for (std::size_t i = 0; i < r.expansion.modes.size(); ++i) {
      const DecayMode& m = r.expansion.modes[i];
      std::string p = "mode" + std::to_string(i);
      kv.push_back({p + ".amplitude", fmt(m.amplitude)});
      kv.push_back({p + ".gamma", fmt(m.gamma)});
      kv.push_back({p + ".omega", fmt(m.omega)});
      kv.push_back({p + ".phase", fmt(m.phase)});
    }
  }
  std::string path = join(out_dir, "timescales.txt");
  write_kv(path, kv);
  rep.paths["timescales"] = path;
  return rep;
}

RunReport run_basis(const ResolvedScenario& rs, const std::string& out_dir) {
  ensure_dir(out_dir);
  TwoBranchDecomposition decomp = rs.decomposition();
  const FockSpace& space = rs.space;

  std::vector<double> times = rs.times;
  if (times.empty() || times.front() > 0.0)
    times.insert(times.begin(), 0.0);

  const double gamma_cut = decomp.pooled_cut_rate();
  PreferredStateTrajectory ptraj =
      preferred_trajectory(decomp, times, space, gamma_cut, rs.sc.tol);
  BasisTrajectory basis = moving_basis(ptraj, rs.sc.tol);

  std::vector<Matrix> rho_s;
  rho_s.reserve(times.size());
  for (double t : times)
    rho_s.push_back(decomp.rho_s(t, space, rs.sc.tol).entries);
  std::vector<double> diag = diagonality_series(rho_s, basis);
  std::vector<FidelityPoint> fid = coherent_basis_fidelity(
      basis, rs.alpha1, rs.alpha2, rs.pole, space, rs.sc.hbar, rs.sc.tol);

  // basis.csv: one row per (time, eigen index).
  std::vector<std::string> bh = {"time", "index", "eigenvalue", "degenerate"};
  for (int i = 0; i < space.dim; ++i) {
    bh.push_back("v" + std::to_string(i) + "_re");
    bh.push_back("v" + std::to_string(i) + "_im");
  }
  std::vector<std::vector<double>> brows;
  brows.reserve(times.size() * space.dim);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (int j = 0; j < space.dim; ++j) {
      std::vector<double> row = {times[ti], double(j),
                                 basis.eigenvalues[ti](j),
                                 double(basis.degenerate_flags[ti][j])};
      for (int i = 0; i < space.dim; ++i) {
        row.push_back(basis.bases[ti](i, j).real());
        row.push_back(basis.bases[ti](i, j).imag());
      }
      brows.push_back(std::move(row));
    }
  }
  std::string basis_path = join(out_dir, "basis.csv");
  write_csv(basis_path, bh, brows);

  std::vector<std::vector<double>> drows;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    double bound = decomp.dropped_envelope(times[ti], gamma_cut) +
                   rs.sc.tol.eps_herm * space.dim;
    drows.push_back({times[ti], diag[ti], bound});
  }
  std::string diag_path = join(out_dir, "diagonality.csv");
  write_csv(diag_path, {"time", "offdiag_mass", "bound"}, drows);

  std::vector<std::vector<double>> frows;
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    frows.push_back({times[ti], fid[ti].fidelity,
                     fid[ti].branches_coincide ? 1.0 : 0.0});
  std::string fid_path = join(out_dir, "fidelity.csv");
  write_csv(fid_path, {"time", "fidelity", "branches_coincide"}, frows);

  RunReport rep;
  rep.values["gamma_cut"] = gamma_cut;
  rep.values["max_trace_correction"] = ptraj.max_trace_correction;
  rep.values["d_initial"] = diag.front();
  rep.values["d_final"] = diag.back();
  rep.paths["basis"] = basis_path;
  rep.paths["diagonality"] = diag_path;
  rep.paths["fidelity"] = fid_path;
  return rep;
}

}  // namespace polebasis
