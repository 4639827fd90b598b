#include "polebasis/modes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace polebasis {

using Complex = std::complex<double>;

double DecayMode::amplitude0() const { return amplitude * std::cos(phase); }

ModeExpansion ModeExpansion::make(double equilibrium,
                                  std::vector<DecayMode> modes) {
  for (DecayMode& m : modes) {
    if (!(m.gamma > 0.0))
      fail(ErrorKind::StateInvariant, "ModeExpansion: mode with gamma <= 0");
    if (!std::isfinite(m.amplitude) || !std::isfinite(m.omega))
      fail(ErrorKind::StateInvariant, "ModeExpansion: non-finite mode");
    // Canonical oscillating form: amplitude >= 0, phase in (-pi, pi].
    if (m.omega != 0.0) {
      if (m.amplitude < 0.0) {
        m.amplitude = -m.amplitude;
        m.phase += M_PI;
      }
      m.phase = std::remainder(m.phase, 2.0 * M_PI);
      if (m.phase <= -M_PI + 1e-15) m.phase += 2.0 * M_PI;
    }
  }
  std::sort(modes.begin(), modes.end(), [](const DecayMode& a, const DecayMode& b) {
    if (a.gamma != b.gamma) return a.gamma < b.gamma;
    return a.omega < b.omega;
  });
  // Merge coincident (gamma, omega) pairs by phasor addition.
  std::vector<DecayMode> merged;
  for (const DecayMode& m : modes) {
    if (!merged.empty()) {
      DecayMode& last = merged.back();
      double scale = std::max({last.gamma, m.gamma, 1.0});
      if (std::abs(last.gamma - m.gamma) <= 1e-9 * scale &&
          std::abs(last.omega - m.omega) <= 1e-9 * std::max(scale, std::abs(m.omega))) {
        Complex sum = last.amplitude * std::exp(Complex(0.0, last.phase)) +
                      m.amplitude * std::exp(Complex(0.0, m.phase));
        last.amplitude = std::abs(sum);
        last.phase = (last.amplitude > 0.0) ? std::arg(sum) : 0.0;
        continue;
      }
    }
    merged.push_back(m);
  }
  // Drop modes that merged to nothing.
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const DecayMode& m) {
                                return m.amplitude == 0.0;
                              }),
               merged.end());
  return ModeExpansion{equilibrium, std::move(merged)};
}

double evaluate_expansion(const ModeExpansion& exp, double t, double hbar) {
  if (t < 0.0) fail(ErrorKind::AntiCausal, "evaluate_expansion: t < 0");
  double v = exp.equilibrium;
  for (const DecayMode& m : exp.modes)
    v += m.amplitude * std::cos(m.omega * t / hbar + m.phase) *
         std::exp(-m.gamma * t / hbar);
  return v;
}

double relaxation_time(const ModeExpansion& exp, double hbar) {
  if (exp.modes.empty())
    fail(ErrorKind::DegenerateExpansion, "relaxation_time: empty expansion");
  double gmin = exp.modes.front().gamma;  // sorted ascending
  return hbar / gmin;
}

namespace {

// End of the leading gamma group; the exclude-slowest convention removes
// the whole group, i.e. the separately-listed relaxational a0 term.
std::size_t slowest_group_end(const ModeExpansion& exp) {
  double g0 = exp.modes.front().gamma;
  std::size_t i = 0;
  while (i < exp.modes.size() &&
         std::abs(exp.modes[i].gamma - g0) <= 1e-12 * std::max(g0, 1.0))
    ++i;
  return i;
}

}  // namespace

GammaEffResult gamma_eff_checked(const ModeExpansion& exp,
                                 GammaEffConvention conv) {
  if (exp.modes.empty())
    fail(ErrorKind::DegenerateExpansion, "gamma_eff: empty expansion");
  std::size_t begin = 0;
  if (conv == GammaEffConvention::ExcludeSlowest && exp.modes.size() > 1)
    begin = slowest_group_end(exp);
  if (begin >= exp.modes.size()) begin = 0;  // single-group expansion

  double num = 0.0, den = 0.0, abs_den = 0.0;
  double gmin = exp.modes[begin].gamma, gmax = exp.modes[begin].gamma;
  for (std::size_t i = begin; i < exp.modes.size(); ++i) {
    double a0 = exp.modes[i].amplitude0();
    num += a0 * exp.modes[i].gamma;
    den += a0;
    abs_den += std::abs(a0);
    gmin = std::min(gmin, exp.modes[i].gamma);
    gmax = std::max(gmax, exp.modes[i].gamma);
  }
  if (std::abs(den) <= 1e-12 * abs_den)
    fail(ErrorKind::DegenerateExpansion,
         "gamma_eff: amplitude sum vanishes, the average is singular");
  GammaEffResult r;
  r.value = num / den;
  r.mixed_sign_warning = (r.value < gmin || r.value > gmax);
  return r;
}

double decoherence_time(const ModeExpansion& exp, GammaEffConvention conv,
                        double hbar) {
  return hbar / gamma_eff(exp, conv);
}

ModeClassification classify_modes(const ModeExpansion& exp,
                                  GammaEffConvention conv) {
  ModeClassification out;
  out.gamma_eff = gamma_eff(exp, conv);
  for (const DecayMode& m : exp.modes) {
    if (m.gamma <= out.gamma_eff)
      out.slow.push_back(m);
    else
      out.fast.push_back(m);
  }
  return out;
}

std::pair<double, double> short_time_log_expansion(const ModeExpansion& exp,
                                                   double hbar) {
  if (exp.modes.empty())
    fail(ErrorKind::DegenerateExpansion, "short_time_log_expansion: no modes");
  double s = 0.0, sg = 0.0;
  for (const DecayMode& m : exp.modes) {
    s += m.amplitude0();
    sg += m.amplitude0() * m.gamma;
  }
  if (!(s > 0.0))
    fail(ErrorKind::NonPositiveAmplitudeSum,
         "short_time_log_expansion: amplitude sum not positive");
  return {std::log(s), -sg / (s * hbar)};
}

// ---------------------------------------------------------------------------
// Matrix-pencil extraction
// ---------------------------------------------------------------------------

namespace {

struct RawMode {
  Complex amplitude;  // coefficient on z^k
  Complex s;          // continuous exponent, z = exp(s dt)
};

}  // namespace

ExtractionResult extract_modes(
    const std::vector<std::pair<double, double>>& samples, int model_order,
    double hbar) {
  const int n = int(samples.size());
  if (model_order < 1)
    fail(ErrorKind::InvalidScenario, "extract_modes: model_order < 1");
  if (n < 2 * model_order + 2)
    fail(ErrorKind::InvalidScenario,
         "extract_modes: need at least 2*model_order + 2 samples");

  const double dt = samples[1].first - samples[0].first;
  if (!(dt > 0.0))
    fail(ErrorKind::NonUniformSampling, "extract_modes: non-increasing times");
  for (int k = 1; k < n; ++k) {
    double step = samples[k].first - samples[k - 1].first;
    if (std::abs(step - dt) > 1e-9 * dt)
      fail(ErrorKind::NonUniformSampling,
           "extract_modes: samples are not uniformly spaced");
  }

  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) y(k) = samples[k].second;
  const double yscale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);

  // Differencing removes the constant term before the pencil; the constant
  // is restored by the final least-squares fit.
  Eigen::VectorXd d(n - 1);
  for (int k = 0; k + 1 < n; ++k) d(k) = y(k + 1) - y(k);

  ExtractionResult result;
  if (d.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, yscale)) {
    // Stationary signal: nothing decays. Report the requested mode as an
    // unstable gamma ~ 0 recovery.
    result.expansion = ModeExpansion::make(y.mean(), {});
    result.unstable = true;
    result.note = "constant signal: recovered gamma ~ 0 flagged unstable";
    result.rejected.push_back(DecayMode{0.0, 0.0, 0.0, 0.0});
    return result;
  }

  const int nd = n - 1;
  int pencil = nd / 3;
  pencil = std::max(pencil, model_order + 1);
  pencil = std::min(pencil, nd - model_order - 1);
  if (pencil < model_order + 1)
    fail(ErrorKind::RankDeficient, "extract_modes: too few samples for order");

  const int rows = nd - pencil;
  Eigen::MatrixXd h1(rows, pencil), h2(rows, pencil);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < pencil; ++j) {
      h1(i, j) = d(i + j);
      h2(i, j) = d(i + j + 1);
    }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(h1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || model_order > int(sv.size()) ||
      sv(model_order - 1) <= 1e-12 * sv(0)) {
    std::ostringstream os;
    os << "extract_modes: data rank below requested model order " << model_order;
    fail(ErrorKind::RankDeficient, os.str());
  }

  Eigen::MatrixXd u = svd.matrixU().leftCols(model_order);
  Eigen::MatrixXd v = svd.matrixV().leftCols(model_order);
  Eigen::VectorXd sinv = sv.head(model_order).cwiseInverse();
  Eigen::MatrixXd a = sinv.asDiagonal() * (u.transpose() * h2 * v);

  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  std::vector<Complex> zs(es.eigenvalues().data(),
                          es.eigenvalues().data() + model_order);

  // Amplitudes and the constant by complex Vandermonde least squares on the
  // original samples.
  Eigen::MatrixXcd design(n, model_order + 1);
  for (int k = 0; k < n; ++k) {
    design(k, 0) = 1.0;
    for (int i = 0; i < model_order; ++i) design(k, i + 1) = std::pow(zs[i], k);
  }
  Eigen::VectorXcd rhs = y.cast<Complex>();
  Eigen::VectorXcd coef = design.colPivHouseholderQr().solve(rhs);

  std::vector<RawMode> raw;
  for (int i = 0; i < model_order; ++i) {
    RawMode m;
    m.amplitude = coef(i + 1);
    m.s = std::log(zs[i]) / dt;
    raw.push_back(m);
  }

  // Fold conjugate pairs into cosine modes; reject non-decaying recoveries.
  std::vector<bool> used(raw.size(), false);
  std::vector<DecayMode> modes;
  const double im_tol = 1e-7;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    double gamma = -hbar * raw[i].s.real();
    double om = hbar * raw[i].s.imag();
    DecayMode mode;
    if (std::abs(om) <= im_tol * std::max(1.0, gamma)) {
      mode = DecayMode{raw[i].amplitude.real(), gamma, 0.0, 0.0};
    } else {
      // Look for the conjugate partner.
      std::size_t partner = i;
      for (std::size_t j = i + 1; j < raw.size(); ++j) {
        if (used[j]) continue;
        if (std::abs(raw[j].s.real() - raw[i].s.real()) <
                1e-6 * std::max(1.0, std::abs(raw[i].s.real())) &&
            std::abs(raw[j].s.imag() + raw[i].s.imag()) <
                1e-6 * std::max(1.0, std::abs(raw[i].s.imag()))) {
          partner = j;
          break;
        }
      }
      if (partner != i) used[partner] = true;
      Complex amp = (raw[i].s.imag() > 0.0) ? raw[i].amplitude
                                            : std::conj(raw[i].amplitude);
      mode = DecayMode{2.0 * std::abs(amp), gamma, std::abs(om), std::arg(amp)};
      if (partner == i) result.note += "unpaired oscillatory mode; ";
    }
    if (!(mode.gamma > 0.0)) {
      result.unstable = true;
      result.rejected.push_back(mode);
      continue;
    }
    modes.push_back(mode);
  }
  if (result.unstable && result.note.empty())
    result.note = "recovered non-decaying mode(s) excluded from the expansion";

  result.expansion = ModeExpansion::make(coef(0).real(), std::move(modes));
  return result;
}

}  // namespace polebasis
