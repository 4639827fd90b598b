#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "polebasis/csv.hpp"
#include "polebasis/pipeline.hpp"

using namespace polebasis;

namespace {

std::string tmp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("pb_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

Scenario small_scenario() {
  Scenario sc = default_scenario();
  ResolvedScenario base = resolve(sc);
  double kappa = base.alpha2.alpha.real() / sc.separation;
  sc.separation = 2.0 / kappa;  // |alpha2|^2 = 4
  sc.dim = 24;
  sc.grid.count = 12;
  return sc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("resolve computes the default placement") {
  ResolvedScenario rs = resolve(default_scenario());
  CHECK(rs.alpha1.mag_sq() == 0.0);
  CHECK(rs.alpha2_sq == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(rs.pole.gamma == doctest::Approx(2.0 * M_PI * 0.01 * std::exp(-0.1)).epsilon(1e-10));
  CHECK(rs.times.size() == 81);
  CHECK(rs.times.front() == doctest::Approx(1e-3 / rs.pole.gamma).epsilon(1e-12));
  CHECK(rs.times.back() == doctest::Approx(1e2 / rs.pole.gamma).epsilon(1e-12));
}

TEST_CASE("resolve rejects a zero-coupling scenario as a free system") {
  Scenario sc = default_scenario();
  sc.eta = 0.0;
  try {
    resolve(sc);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FreeSystem);
  }
}

TEST_CASE("resolve enforces truncation adequacy") {
  Scenario sc = default_scenario();
  sc.dim = 16;  // far too small for |alpha2|^2 = 50
  CHECK_THROWS_AS(resolve(sc), Error);
}

TEST_CASE("run_poles emits an exact ladder and parses back") {
  std::string dir = tmp_dir("poles");
  ResolvedScenario rs = resolve(small_scenario());
  RunReport rep = run_poles(rs, dir);
  CsvTable t = read_csv(rep.paths.at("poles"));
  CHECK(t.rows.size() == std::size_t(rs.sc.dim - 1));
  double g0 = rep.value("gamma0");
  for (const auto& row : t.rows) {
    double n = row[t.column("n")];
    CHECK(row[t.column("gamma_n")] == n * g0);
    CHECK(row[t.column("im_z")] == -0.5 * n * g0);
  }
}

TEST_CASE("run_poles is deterministic") {
  std::string d1 = tmp_dir("det1");
  std::string d2 = tmp_dir("det2");
  ResolvedScenario rs = resolve(small_scenario());
  run_poles(rs, d1);
  run_poles(rs, d2);
  CHECK(slurp(d1 + "/poles.csv") == slurp(d2 + "/poles.csv"));
}

TEST_CASE("run_evolve columns are mutually consistent") {
  std::string dir = tmp_dir("evolve");
  Scenario sc = small_scenario();
  sc.grid.t_max = 60.0;
  ResolvedScenario rs = resolve(sc);
  RunReport rep = run_evolve(rs, dir);
  CsvTable t = read_csv(rep.paths.at("trajectory"));
  REQUIRE(t.rows.size() == rs.times.size() + 1);  // t = 0 prepended
  int c_odf = t.column("offdiag_factor");
  int c_ratio = t.column("offdiag_coeff_ratio");
  int c_frame = t.column("frame_ok");
  int c_dist = t.column("trace_dist_vac");
  REQUIRE(c_odf >= 0);
  REQUIRE(c_ratio >= 0);
  REQUIRE(c_frame >= 0);
  int resolvable = 0;
  for (const auto& row : t.rows) {
    if (row[c_frame] == 1.0) {
      CHECK(std::abs(row[c_odf] - row[c_ratio]) < 1e-10);
      ++resolvable;
    }
  }
  CHECK(resolvable > int(t.rows.size()) / 2);
  CHECK(t.rows.back()[c_dist] < 1e-3);

  // The t = 0 row reproduces the static superposition entries.
  DensityMatrix direct = superposition_density(sc.weight_a, sc.weight_b,
                                               rs.alpha1, rs.alpha2, rs.space);
  CHECK(t.rows.front()[0] == 0.0);
  int c00 = t.column("rho_0_0_re");
  REQUIRE(c00 >= 0);
  CHECK(std::abs(t.rows.front()[c00] - direct.entries(0, 0).real()) < 1e-9);
}

TEST_CASE("run_timescales reports both readings and the expected t_D") {
  std::string dir = tmp_dir("times");
  ResolvedScenario rs = resolve(default_scenario());
  RunReport rep = run_timescales(rs, dir);
  double tr = rep.value("t_r");
  double td = rep.value("t_d");
  CHECK(tr == doctest::Approx(rs.sc.hbar / rs.pole.gamma).epsilon(1e-14));
  CHECK(td == doctest::Approx(tr / rs.alpha2_sq).epsilon(1e-9));
  CHECK(rep.values.count("gamma_eff_all") == 1);
  CHECK(rep.values.count("gamma_eff_excl") == 1);
  CHECK(rep.values.count("pooled_cut_rate") == 1);

  // The emitted file parses as key = value with the same numbers.
  std::string text = slurp(rep.paths.at("timescales"));
  CHECK(text.find("t_d = ") != std::string::npos);
  CHECK(text.find("gamma_eff_all_modes") != std::string::npos);
  CHECK(text.find("gamma_eff_exclude_slowest") != std::string::npos);
}

TEST_CASE("hbar rescales reported times, diagnostics unchanged") {
  // Same dimensionless scenario expressed in a different hbar: separation
  // scales with hbar so that |alpha2|^2 is preserved.
  Scenario sc1 = small_scenario();
  Scenario sc3 = sc1;
  sc3.hbar = 3.0;
  sc3.separation *= 3.0;
  ResolvedScenario r1 = resolve(sc1);
  ResolvedScenario r3 = resolve(sc3);
  CHECK(r3.alpha2_sq == doctest::Approx(r1.alpha2_sq).epsilon(1e-12));
  std::string d1 = tmp_dir("h1");
  std::string d3 = tmp_dir("h3");
  RunReport p1 = run_timescales(r1, d1);
  RunReport p3 = run_timescales(r3, d3);
  CHECK(p3.value("t_r") == doctest::Approx(3.0 * p1.value("t_r")).epsilon(1e-12));
  CHECK(p3.value("t_d") == doctest::Approx(3.0 * p1.value("t_d")).epsilon(1e-12));
  CHECK(p3.value("gamma_eff") == doctest::Approx(p1.value("gamma_eff")).epsilon(1e-12));

  RunReport b1 = run_basis(r1, d1);
  RunReport b3 = run_basis(r3, d3);
  CHECK(b3.value("d_initial") == doctest::Approx(b1.value("d_initial")).epsilon(1e-9));
  CHECK(b3.value("d_final") == doctest::Approx(b1.value("d_final")).epsilon(1e-9));
}

TEST_CASE("run_basis artifacts exist, parse, and are orthonormal") {
  std::string dir = tmp_dir("basis");
  ResolvedScenario rs = resolve(small_scenario());
  RunReport rep = run_basis(rs, dir);
  CsvTable basis = read_csv(rep.paths.at("basis"));
  CsvTable diag = read_csv(rep.paths.at("diagonality"));
  CsvTable fid = read_csv(rep.paths.at("fidelity"));
  const int dim = rs.sc.dim;
  const std::size_t n_times = rs.times.size() + 1;  // t = 0 prepended
  CHECK(basis.rows.size() == n_times * dim);
  CHECK(diag.rows.size() == n_times);
  CHECK(fid.rows.size() == n_times);

  // Re-assemble the first frame and check orthonormality.
  Matrix v(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const auto& row = basis.rows[j];
    for (int i = 0; i < dim; ++i)
      v(i, j) = Complex(row[4 + 2 * i], row[5 + 2 * i]);
  }
  CHECK((v.adjoint() * v - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-9);

  // Diagonality stays below its reported bound.
  int c_mass = diag.column("offdiag_mass");
  int c_bound = diag.column("bound");
  for (const auto& row : diag.rows)
    CHECK(row[c_mass] <= row[c_bound] + 1e-12);
}

TEST_CASE("timescales from sampled data") {
  std::string dir = tmp_dir("samples");
  std::string csv = dir + "/signal.csv";
  {
    std::FILE* f = std::fopen(csv.c_str(), "w");
    REQUIRE(f);
    std::fprintf(f, "time,value\n");
    for (int k = 0; k < 80; ++k) {
      double t = 0.25 * k;
      double v = 0.4 + 1.5 * std::exp(-0.2 * t) + 0.7 * std::exp(-1.1 * t);
      std::fprintf(f, "%.17g,%.17g\n", t, v);
    }
    std::fclose(f);
  }
  RunReport rep = run_timescales_samples(csv, 2, 1.0, dir);
  CHECK(rep.value("mode_count") == 2.0);
  CHECK(rep.value("gamma0") == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(rep.value("equilibrium") == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(rep.value("t_d") == doctest::Approx(1.0 / 1.1).epsilon(1e-5));
}

TEST_CASE("tabulated density scenario matches its parametric twin") {
  std::string dir = tmp_dir("tabulated");
  {
    std::FILE* f = std::fopen((dir + "/density.csv").c_str(), "w");
    REQUIRE(f);
    std::fprintf(f, "omega,J\n");
    for (int i = 0; i < 2001; ++i) {
      double w = 101.0 * i / 2000.0;
      std::fprintf(f, "%.17g,%.17g\n", w, 0.01 * w * std::exp(-w / 10.0));
    }
    std::fclose(f);
  }
  {
    std::ofstream sc(dir + "/tab.scn");
    sc << "density.kind = tabulated\n";
    sc << "density.csv = density.csv\n";  // resolved relative to the scenario
    sc << "fock.dim = 36\n";
    sc << "separation = 4.2511827340189203\n";
    sc << "grid.count = 12\n";
  }
  Scenario tab = load_scenario(dir + "/tab.scn");
  ResolvedScenario rt = resolve(tab);
  ResolvedScenario rp = resolve(small_scenario());
  CHECK(std::abs(rt.pole.gamma - rp.pole.gamma) < 1e-6);
  CHECK(std::abs(rt.pole.omega_prime - rp.pole.omega_prime) < 1e-6);
  RunReport rep = run_poles(rt, dir);
  CHECK(std::abs(rep.value("gamma0") - rp.pole.gamma) < 1e-6);
}

TEST_CASE("scenario validation rejects undersized grids") {
  Scenario sc = default_scenario();
  sc.grid.count = 7;
  CHECK_THROWS_AS(sc.validate(), Error);
}

TEST_CASE("diagonality ratio after three decoherence times") {
  // d(3 t_D) / d(0) stays under the fast-mode envelope e^{-3} + tolerance.
  ResolvedScenario rs = resolve(small_scenario());
  TwoBranchDecomposition decomp = rs.decomposition();
  double td = rs.sc.hbar / offdiag_gamma_eff(decomp);
  std::vector<double> times = {0.0, 3.0 * td};
  PreferredStateTrajectory traj = preferred_trajectory(
      decomp, times, rs.space, decomp.pooled_cut_rate(), rs.sc.tol);
  BasisTrajectory basis = moving_basis(traj, rs.sc.tol);
  std::vector<Matrix> rho_s;
  for (double t : times)
    rho_s.push_back(decomp.rho_s(t, rs.space, rs.sc.tol).entries);
  std::vector<double> d = diagonality_series(rho_s, basis);
  REQUIRE(d[0] > 0.0);
  CHECK(d[1] / d[0] <= std::exp(-3.0) + 0.05);
}
