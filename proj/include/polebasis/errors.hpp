#ifndef POLEBASIS_ERRORS_HPP
#define POLEBASIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polebasis {

// Structured failure kinds. The C API and the CLI map these onto stable
// error codes, so add new kinds at the end only.
enum class ErrorKind {
  Internal,
  InvalidScenario,
  TruncationInadequate,
  ZeroState,
  SpaceMismatch,
  NonOrthonormalBasis,
  OutOfHull,
  OutsideSupport,
  FreeSystem,
  QuadratureNonConvergence,
  DegenerateExpansion,
  NonPositiveAmplitudeSum,
  NonUniformSampling,
  RankDeficient,
  AntiCausal,
  LengthMismatch,
  GridMismatch,
  StateInvariant,
  IoFailure,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

const char* error_kind_name(ErrorKind kind);

// Numerical tolerances used by structural checks. All overridable from a
// scenario file or the POLEBASIS_TOL_* environment variables.
struct Tolerances {
  double eps_herm = 1e-10;
  double eps_trace = 1e-10;
  double eps_orth = 1e-10;
  double eps_psd = 1e-8;
  double eps_trunc = 1e-9;
  double eps_degen = 1e-8;

  static Tolerances defaults() { return Tolerances{}; }
};

}  // namespace polebasis

#endif
