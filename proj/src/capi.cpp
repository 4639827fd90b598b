#include "polebasis/capi.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "polebasis/pipeline.hpp"
#include "polebasis/scenario.hpp"
#include "polebasis/verify.hpp"

using namespace polebasis;

struct pb_scenario {
  Scenario sc;
};

struct pb_report {
  RunReport rep;
};

namespace {

thread_local std::string g_last_error;

pb_status status_of(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidScenario:
    case ErrorKind::TruncationInadequate:
    case ErrorKind::ZeroState:
    case ErrorKind::FreeSystem:
    case ErrorKind::OutOfHull:
    case ErrorKind::OutsideSupport:
    case ErrorKind::IoFailure:
      return PB_ERR_SCENARIO;
    default:
      return PB_ERR_INTERNAL;
  }
}

template <typename Fn>
pb_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PB_ERR_INTERNAL;
  }
}

pb_status run_stage(const pb_scenario* sc, const char* out_dir,
                    pb_report** report,
                    RunReport (*stage)(const ResolvedScenario&,
                                       const std::string&)) {
  if (!sc || !out_dir) {
    g_last_error = "null argument";
    return PB_ERR_INTERNAL;
  }
  return guarded([&]() {
    ResolvedScenario rs = resolve(sc->sc);
    RunReport rep = stage(rs, out_dir);
    if (report) *report = new pb_report{std::move(rep)};
    return PB_OK;
  });
}

}  // namespace

extern "C" {

const char* pb_version(void) { return "polebasis 1.0.0"; }

const char* pb_last_error(void) { return g_last_error.c_str(); }

pb_status pb_scenario_load(const char* path, pb_scenario** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return PB_ERR_INTERNAL;
  }
  return guarded([&]() {
    *out = new pb_scenario{load_scenario(path)};
    return PB_OK;
  });
}

pb_status pb_scenario_default(pb_scenario** out) {
  if (!out) {
    g_last_error = "null argument";
    return PB_ERR_INTERNAL;
  }
  return guarded([&]() {
    *out = new pb_scenario{default_scenario()};
    return PB_OK;
  });
}

void pb_scenario_free(pb_scenario* sc) { delete sc; }

pb_status pb_run_poles(const pb_scenario* sc, const char* out_dir,
                       pb_report** report) {
  return run_stage(sc, out_dir, report, run_poles);
}

pb_status pb_run_evolve(const pb_scenario* sc, const char* out_dir,
                        pb_report** report) {
  return run_stage(sc, out_dir, report, run_evolve);
}

pb_status pb_run_timescales(const pb_scenario* sc, const char* out_dir,
                            pb_report** report) {
  return run_stage(sc, out_dir, report, run_timescales);
}

pb_status pb_run_basis(const pb_scenario* sc, const char* out_dir,
                       pb_report** report) {
  return run_stage(sc, out_dir, report, run_basis);
}

pb_status pb_run_timescales_samples(const char* samples_csv, int model_order,
                                    double hbar, const char* out_dir,
                                    pb_report** report) {
  if (!samples_csv || !out_dir) {
    g_last_error = "null argument";
    return PB_ERR_INTERNAL;
  }
  return guarded([&]() {
    RunReport rep = run_timescales_samples(samples_csv, model_order, hbar,
                                           out_dir);
    if (report) *report = new pb_report{std::move(rep)};
    return PB_OK;
  });
}

void pb_report_free(pb_report* rep) { delete rep; }

double pb_report_value(const pb_report* rep, const char* key, int* ok) {
  if (ok) *ok = 0;
  if (!rep || !key) return 0.0;
  auto it = rep->rep.values.find(key);
  if (it == rep->rep.values.end()) return 0.0;
  if (ok) *ok = 1;
  return it->second;
}

const char* pb_report_path(const pb_report* rep, const char* key) {
  if (!rep || !key) return nullptr;
  auto it = rep->rep.paths.find(key);
  if (it == rep->rep.paths.end()) return nullptr;
  return it->second.c_str();
}

int pb_report_warning_count(const pb_report* rep) {
  return rep ? int(rep->rep.warnings.size()) : 0;
}

const char* pb_report_warning(const pb_report* rep, int index) {
  if (!rep || index < 0 || index >= int(rep->rep.warnings.size()))
    return nullptr;
  return rep->rep.warnings[std::size_t(index)].c_str();
}

pb_status pb_verify(int list_only, int quiet) {
  return guarded([&]() {
    if (list_only) {
      for (const std::string& name : verify_criteria())
        if (!quiet) std::printf("%s\n", name.c_str());
      return PB_OK;
    }
    VerifyOptions opt;
    opt.quiet = quiet != 0;
    Scenario sc = default_scenario();  // picks up POLEBASIS_TOL_* overrides
    opt.tol = sc.tol;
    auto results = run_verify(opt);
    return all_passed(results) ? PB_OK : PB_ERR_VERIFY;
  });
}

}  // extern "C"
