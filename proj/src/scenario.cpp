#include "polebasis/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polebasis/csv.hpp"

namespace polebasis {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    fail(ErrorKind::InvalidScenario, "scenario: bad numeric value for " + key);
  }
}

int to_int(const std::string& key, const std::string& v) {
  double x = to_double(key, v);
  if (x != double(int(x)))
    fail(ErrorKind::InvalidScenario, "scenario: expected integer for " + key);
  return int(x);
}

void apply_env_tolerances(Tolerances& tol) {
  auto env = [](const char* name, double& slot) {
    if (const char* v = std::getenv(name)) slot = std::atof(v);
  };
  env("POLEBASIS_TOL_EPS_HERM", tol.eps_herm);
  env("POLEBASIS_TOL_EPS_TRACE", tol.eps_trace);
  env("POLEBASIS_TOL_EPS_ORTH", tol.eps_orth);
  env("POLEBASIS_TOL_EPS_PSD", tol.eps_psd);
  env("POLEBASIS_TOL_EPS_TRUNC", tol.eps_trunc);
  env("POLEBASIS_TOL_EPS_DEGEN", tol.eps_degen);
}

}  // namespace

void Scenario::validate() const {
  if (density_kind != "ohmic" && density_kind != "tabulated")
    fail(ErrorKind::InvalidScenario, "scenario: density.kind must be ohmic or tabulated");
  if (density_kind == "ohmic") {
    if (eta < 0.0) fail(ErrorKind::InvalidScenario, "scenario: density.eta < 0");
    if (!(cutoff > 0.0))
      fail(ErrorKind::InvalidScenario, "scenario: density.cutoff <= 0");
  }
  if (!(hbar > 0.0) || !(mass > 0.0) || !(omega_unit > 0.0))
    fail(ErrorKind::InvalidScenario, "scenario: physical constants must be > 0");
  if (!(separation >= 0.0))
    fail(ErrorKind::InvalidScenario, "scenario: separation < 0");
  if (std::abs(weight_a) == 0.0 && std::abs(weight_b) == 0.0)
    fail(ErrorKind::InvalidScenario, "scenario: weights must not both vanish");
  if (dim < 1) fail(ErrorKind::InvalidScenario, "scenario: fock.dim < 1");
  if (grid.count < 8)
    fail(ErrorKind::InvalidScenario, "scenario: grid.count must be >= 8");
  if (!(grid.t_min < grid.t_max))
    fail(ErrorKind::InvalidScenario, "scenario: grid.t_min >= grid.t_max");
  if (grid.log_scale && !(grid.t_min > 0.0))
    fail(ErrorKind::InvalidScenario, "scenario: log grid needs t_min > 0");
  if (!grid.log_scale && grid.t_min < 0.0)
    fail(ErrorKind::InvalidScenario, "scenario: t_min < 0");
}

SpectralDensity Scenario::density() const {
  if (density_kind == "ohmic") return SpectralDensity::ohmic(eta, cutoff);
  return SpectralDensity::tabulated(tab_grid, tab_values);
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  Scenario sc;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::InvalidScenario, "scenario: expected key = value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      fail(ErrorKind::InvalidScenario, "scenario: empty key or value");
    if (!kv.emplace(key, val).second)
      fail(ErrorKind::InvalidScenario, "scenario: duplicate key " + key);
  }

  auto take = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    return &it->second;
  };
  auto num = [&](const char* key, double& slot) {
    if (const std::string* v = take(key)) slot = to_double(key, *v);
  };

  if (const std::string* v = take("density.kind")) sc.density_kind = *v;
  num("density.eta", sc.eta);
  num("density.cutoff", sc.cutoff);
  if (const std::string* v = take("density.csv")) {
    sc.density_csv = *v;
    std::filesystem::path p(sc.density_csv);
    if (p.is_relative() && !base_dir.empty())
      p = std::filesystem::path(base_dir) / p;
    read_two_column(p.string(), sc.tab_grid, sc.tab_values);
  }
  num("omega", sc.omega);
  num("hbar", sc.hbar);
  num("mass", sc.mass);
  num("omega_unit", sc.omega_unit);
  num("separation", sc.separation);
  double are = sc.weight_a.real(), aim = sc.weight_a.imag();
  double bre = sc.weight_b.real(), bim = sc.weight_b.imag();
  num("weight.a.re", are);
  num("weight.a.im", aim);
  num("weight.b.re", bre);
  num("weight.b.im", bim);
  sc.weight_a = Complex(are, aim);
  sc.weight_b = Complex(bre, bim);
  if (const std::string* v = take("fock.dim")) sc.dim = to_int("fock.dim", *v);
  num("grid.t_min", sc.grid.t_min);
  num("grid.t_max", sc.grid.t_max);
  if (const std::string* v = take("grid.count"))
    sc.grid.count = to_int("grid.count", *v);
  if (const std::string* v = take("grid.scale")) {
    if (*v == "log")
      sc.grid.log_scale = true;
    else if (*v == "linear")
      sc.grid.log_scale = false;
    else
      fail(ErrorKind::InvalidScenario, "scenario: grid.scale must be log or linear");
  }
  if (const std::string* v = take("grid.unit")) {
    if (*v == "relaxation")
      sc.grid.relative = true;
    else if (*v == "absolute")
      sc.grid.relative = false;
    else
      fail(ErrorKind::InvalidScenario,
           "scenario: grid.unit must be relaxation or absolute");
  }
  num("tol.eps_herm", sc.tol.eps_herm);
  num("tol.eps_trace", sc.tol.eps_trace);
  num("tol.eps_orth", sc.tol.eps_orth);
  num("tol.eps_psd", sc.tol.eps_psd);
  num("tol.eps_trunc", sc.tol.eps_trunc);
  num("tol.eps_degen", sc.tol.eps_degen);
  apply_env_tolerances(sc.tol);
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoFailure, "scenario: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_scenario(buf.str(), dir);
}

Scenario default_scenario() {
  Scenario sc;  // field defaults are the shipped defaults
  apply_env_tolerances(sc.tol);
  sc.validate();
  return sc;
}

std::string scenario_to_text(const Scenario& sc) {
  std::ostringstream os;
  os.precision(17);
  os << "density.kind = " << sc.density_kind << "\n";
  if (sc.density_kind == "ohmic") {
    os << "density.eta = " << sc.eta << "\n";
    os << "density.cutoff = " << sc.cutoff << "\n";
  } else {
    os << "density.csv = " << sc.density_csv << "\n";
  }
  os << "omega = " << sc.omega << "\n";
  os << "hbar = " << sc.hbar << "\n";
  os << "mass = " << sc.mass << "\n";
  os << "omega_unit = " << sc.omega_unit << "\n";
  os << "separation = " << sc.separation << "\n";
  os << "weight.a.re = " << sc.weight_a.real() << "\n";
  os << "weight.a.im = " << sc.weight_a.imag() << "\n";
  os << "weight.b.re = " << sc.weight_b.real() << "\n";
  os << "weight.b.im = " << sc.weight_b.imag() << "\n";
  os << "fock.dim = " << sc.dim << "\n";
  os << "grid.t_min = " << sc.grid.t_min << "\n";
  os << "grid.t_max = " << sc.grid.t_max << "\n";
  os << "grid.count = " << sc.grid.count << "\n";
  os << "grid.scale = " << (sc.grid.log_scale ? "log" : "linear") << "\n";
  os << "grid.unit = " << (sc.grid.relative ? "relaxation" : "absolute") << "\n";
  return os.str();
}

}  // namespace polebasis
