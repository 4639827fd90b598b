// Command-line front end. Talks to the library exclusively through the
// extern-C interface in polebasis/capi.h.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "polebasis/capi.h"

namespace {

struct ScenarioGuard {
  pb_scenario* sc = nullptr;
  ~ScenarioGuard() { pb_scenario_free(sc); }
};

struct ReportGuard {
  pb_report* rep = nullptr;
  ~ReportGuard() { pb_report_free(rep); }
};

int load_scenario(const std::string& path, ScenarioGuard& guard) {
  pb_status st = path.empty() ? pb_scenario_default(&guard.sc)
                              : pb_scenario_load(path.c_str(), &guard.sc);
  if (st != PB_OK) std::fprintf(stderr, "error: %s\n", pb_last_error());
  return st;
}

void print_report(const pb_report* rep, bool quiet) {
  if (quiet || !rep) return;
  for (const char* key : {"gamma0", "omega0_prime", "t_r", "t_d", "gamma_eff",
                          "gamma_eff_all", "gamma_eff_excl", "pooled_cut_rate",
                          "gamma_cut", "alpha2_sq", "n_max", "d_initial",
                          "d_final", "max_trace_correction", "equilibrium",
                          "mode_count"}) {
    int ok = 0;
    double v = pb_report_value(rep, key, &ok);
    if (ok) std::printf("%s = %.17g\n", key, v);
  }
  for (const char* key : {"poles", "trajectory", "timescales", "basis",
                          "diagonality", "fidelity"}) {
    if (const char* p = pb_report_path(rep, key))
      std::printf("wrote %s\n", p);
  }
  for (int i = 0; i < pb_report_warning_count(rep); ++i)
    std::printf("warning: %s\n", pb_report_warning(rep, i));
}

int run_stage(pb_status (*stage)(const pb_scenario*, const char*, pb_report**),
              const std::string& scenario, const std::string& out, bool quiet) {
  ScenarioGuard sc;
  if (int st = load_scenario(scenario, sc); st != PB_OK) return st;
  ReportGuard rep;
  pb_status st = stage(sc.sc, out.c_str(), &rep.rep);
  if (st != PB_OK) {
    std::fprintf(stderr, "error: %s\n", pb_last_error());
    return st;
  }
  print_report(rep.rep, quiet);
  return PB_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pole-based relaxation/decoherence timescales and the moving "
               "preferred basis"};
  app.require_subcommand(1);

  std::string scenario, out = ".";
  bool quiet = false;
  app.add_option("--scenario", scenario,
                 "scenario file (omit to use the built-in default)");
  app.add_option("--out", out, "output directory");
  app.add_flag("--quiet", quiet, "suppress informational output");

  auto* poles = app.add_subcommand("poles", "pole ladder z_n = n z0");
  auto* evolve = app.add_subcommand("evolve", "reduced-state trajectory");
  auto* times = app.add_subcommand("timescales", "t_R, t_D and gamma_eff");
  std::string samples;
  int model_order = 3;
  double hbar = 1.0;
  times->add_option("--samples", samples,
                    "two-column (time, value) CSV to analyze instead of the "
                    "scenario closed forms");
  times->add_option("--model-order", model_order,
                    "mode count for --samples extraction");
  times->add_option("--hbar", hbar, "hbar used with --samples");
  auto* basis = app.add_subcommand("basis", "moving preferred basis outputs");
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  bool list_only = false;
  verify->add_flag("--list", list_only, "list criteria without running");

  CLI11_PARSE(app, argc, argv);

  if (poles->parsed()) return run_stage(pb_run_poles, scenario, out, quiet);
  if (evolve->parsed()) return run_stage(pb_run_evolve, scenario, out, quiet);
  if (times->parsed()) {
    if (!samples.empty()) {
      ReportGuard rep;
      pb_status st = pb_run_timescales_samples(samples.c_str(), model_order,
                                               hbar, out.c_str(), &rep.rep);
      if (st != PB_OK) {
        std::fprintf(stderr, "error: %s\n", pb_last_error());
        return st;
      }
      print_report(rep.rep, quiet);
      return PB_OK;
    }
    return run_stage(pb_run_timescales, scenario, out, quiet);
  }
  if (basis->parsed()) return run_stage(pb_run_basis, scenario, out, quiet);
  if (verify->parsed()) return pb_verify(list_only ? 1 : 0, quiet ? 1 : 0);
  return PB_ERR_INTERNAL;
}
