#include "mmw/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmw {

double pathloss_uma(double d2d, double fc, double h_bs, double h_ut, bool los) {
  if (!(d2d >= 10.0)) throw std::domain_error("pathloss_uma: d2d below the 10 m validity limit");
  const double fc_ghz = fc / 1e9;
  const double dh = h_bs - h_ut;
  const double d3d = std::sqrt(d2d * d2d + dh * dh);
  // Effective heights above a 1 m environment height.
  const double d_bp = 4.0 * (h_bs - 1.0) * (h_ut - 1.0) * fc / kSpeedOfLight;

  double pl_los;
  if (d2d <= d_bp || d_bp <= 0) {
    pl_los = 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  } else {
    pl_los = 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) - 9.0 * std::log10(d_bp * d_bp + dh * dh);
  }
  if (los) return pl_los;
  const double pl_nlos = 13.54 + 39.08 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) - 0.6 * (h_ut - 1.5);
  return std::max(pl_los, pl_nlos);
}

double los_probability(double d2d) {
  if (d2d <= 18.0) return 1.0;
  return 18.0 / d2d + std::exp(-d2d / 63.0) * (1.0 - 18.0 / d2d);
}

double doppler_frequency(double velocity_kmph, double fc) {
  if (velocity_kmph < 0) throw std::invalid_argument("doppler_frequency: negative velocity");
  return velocity_kmph / 3.6 * fc / kSpeedOfLight;
}

double perpendicular_coherence(double doppler_hz, double coherence_time) {
  constexpr double kFirstZeroJ0 = 2.404825557695773;
  const double x = 2.0 * kPi * doppler_hz * coherence_time;
  if (x >= kFirstZeroJ0) return 0.0;
  const double j0 = std::cyl_bessel_j(0.0, x);
  return j0 * j0;
}

namespace {

constexpr double kRelativeDelays[] = {0.0, 0.4, 0.9, 1.5, 2.2, 3.0, 4.0, 5.2};
constexpr double kPowerDecay = 1.5;

double correlation_at(const std::vector<double>& powers, const double* rel, double x) {
  cd s{0.0, 0.0};
  for (std::size_t l = 0; l < powers.size(); ++l) s += powers[l] * std::polar(1.0, -2.0 * kPi * x * rel[l]);
  return std::abs(s);
}

}  // namespace

TapProfile TapProfile::for_coherence(double coherence_rbs) {
  if (!(coherence_rbs > 0)) throw std::invalid_argument("TapProfile: coherence_rbs must be > 0");
  const std::size_t n = std::size(kRelativeDelays);
  TapProfile p;
  p.powers.resize(n);
  double total = 0.0;
  for (std::size_t l = 0; l < n; ++l) total += p.powers[l] = std::exp(-kRelativeDelays[l] / kPowerDecay);
  for (auto& w : p.powers) w /= total;

  // First crossing of |rho| = 0.5 in x = df * scale, then bisection.
  double lo = 0.0;
  double hi = 0.0;
  for (double x = 0.001;; x += 0.001) {
    if (correlation_at(p.powers, kRelativeDelays, x) <= 0.5) {
      hi = x;
      lo = x - 0.001;
      break;
    }
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (correlation_at(p.powers, kRelativeDelays, mid) > 0.5 ? lo : hi) = mid;
  }
  const double scale = 0.5 * (lo + hi) / (coherence_rbs * kRbBandwidth);
  p.delays.resize(n);
  for (std::size_t l = 0; l < n; ++l) p.delays[l] = kRelativeDelays[l] * scale;
  return p;
}

double TapProfile::frequency_correlation(double df) const {
  cd s{0.0, 0.0};
  for (std::size_t l = 0; l < powers.size(); ++l) s += powers[l] * std::polar(1.0, -2.0 * kPi * df * delays[l]);
  return std::abs(s);
}

std::vector<cd> TapProfile::rb_tap_table(int n_rb) const {
  std::vector<cd> t(static_cast<std::size_t>(n_rb) * delays.size());
  for (int rb = 0; rb < n_rb; ++rb)
    for (std::size_t l = 0; l < delays.size(); ++l)
      t[rb * delays.size() + l] = std::polar(1.0, -2.0 * kPi * rb * kRbBandwidth * delays[l]);
  return t;
}

JakesFading::JakesFading(int n_rx, int n_tx, const TapProfile& profile, double doppler_hz, double tti,
                         std::optional<LosComponent> los, Rng& rng, long start_tti)
    : n_rx_(n_rx), n_tx_(n_tx), n_taps_(static_cast<int>(profile.powers.size())), doppler_(doppler_hz),
      tti_(start_tti) {
  if (n_rx < 1 || n_tx < 1 || n_rx > kMaxAntennas || n_tx > kMaxAntennas)
    throw std::invalid_argument("JakesFading: antenna counts must be in [1, 4]");
  if (doppler_hz < 0) throw std::invalid_argument("JakesFading: negative Doppler");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int M = kSinusoids;

  double diffuse = 1.0;
  if (los) diffuse = 1.0 / (1.0 + db_to_linear(los->k_factor_db));
  tap_scale_.resize(n_taps_);
  for (int l = 0; l < n_taps_; ++l) tap_scale_[l] = std::sqrt(profile.powers[l] / M * diffuse);

  const std::size_t count = static_cast<std::size_t>(n_rx * n_tx) * n_taps_ * M;
  phasor_.resize(count);
  rotator_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int n = static_cast<int>(i % M);
    const double angle = (2.0 * kPi * (n + unit(rng))) / M;
    const double phase = 2.0 * kPi * unit(rng);
    const double f = doppler_hz * std::cos(angle);
    rotator_[i] = std::polar(1.0, 2.0 * kPi * f * tti);
    phasor_[i] = std::polar(1.0, phase + 2.0 * kPi * f * tti * static_cast<double>(start_tti));
  }

  if (los) {
    const double amp = std::sqrt(1.0 - diffuse);
    std::vector<double> rx_phase(n_rx), tx_phase(n_tx);
    for (auto& p : rx_phase) p = 2.0 * kPi * unit(rng);
    for (auto& p : tx_phase) p = 2.0 * kPi * unit(rng);
    const double f = doppler_hz * los->doppler_cos;
    los_rotator_ = std::polar(1.0, 2.0 * kPi * f * tti);
    los_phasor_.resize(static_cast<std::size_t>(n_rx * n_tx));
    for (int r = 0; r < n_rx; ++r)
      for (int t = 0; t < n_tx; ++t)
        los_phasor_[r * n_tx + t] =
            std::polar(amp, rx_phase[r] + tx_phase[t] + 2.0 * kPi * f * tti * static_cast<double>(start_tti));
  }
}

void JakesFading::evaluate(const std::vector<cd>& rb_tap, int n_rb, std::vector<CMatrix>& out) const {
  if (rb_tap.size() != static_cast<std::size_t>(n_rb) * n_taps_)
    throw std::invalid_argument("JakesFading::evaluate: RB/tap table does not match the profile");
  out.resize(n_rb);

  constexpr int M = kSinusoids;
  const int n_pairs = n_rx_ * n_tx_;
  // Tap gains of every antenna pair, then one short sum per RB.
  std::vector<cd>& taps = scratch_;
  taps.resize(static_cast<std::size_t>(n_pairs) * n_taps_);
  for (int pair = 0; pair < n_pairs; ++pair) {
    const cd* z = &phasor_[static_cast<std::size_t>(pair) * n_taps_ * M];
    for (int l = 0; l < n_taps_; ++l) {
      cd s{0.0, 0.0};
      for (int n = 0; n < M; ++n) s += z[l * M + n];
      taps[pair * n_taps_ + l] = s * tap_scale_[l];
    }
  }
  for (int rb = 0; rb < n_rb; ++rb) {
    CMatrix& m = out[rb];
    m.resize(n_rx_, n_tx_);
    const cd* e = &rb_tap[static_cast<std::size_t>(rb) * n_taps_];
    for (int r = 0; r < n_rx_; ++r)
      for (int t = 0; t < n_tx_; ++t) {
        const int pair = r * n_tx_ + t;
        const cd* tp = &taps[static_cast<std::size_t>(pair) * n_taps_];
        cd h = los_phasor_.empty() ? cd{0.0, 0.0} : los_phasor_[pair];
        for (int l = 0; l < n_taps_; ++l) h += tp[l] * e[l];
        m(r, t) = h;
      }
  }
}

void JakesFading::advance() {
  ++tti_;
  if (doppler_ == 0.0) return;
  for (std::size_t i = 0; i < phasor_.size(); ++i) phasor_[i] *= rotator_[i];
  for (auto& p : los_phasor_) p *= los_rotator_;
}

PhaseProcess::PhaseProcess(double doppler_hz, double tti, Rng& rng, long start_tti) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int M = JakesFading::kSinusoids;
  for (int n = 0; n < M; ++n) {
    const double angle = (2.0 * kPi * (n + unit(rng))) / M;
    const double phase = 2.0 * kPi * unit(rng);
    const double f = doppler_hz * std::cos(angle);
    rotator_[n] = std::polar(1.0, 2.0 * kPi * f * tti);
    phasor_[n] = std::polar(1.0, phase + 2.0 * kPi * f * tti * static_cast<double>(start_tti));
  }
}

cd PhaseProcess::value() const {
  cd s{0.0, 0.0};
  for (const auto& z : phasor_) s += z;
  const double mag = std::abs(s);
  return mag > 0 ? s / mag : cd{1.0, 0.0};
}

void PhaseProcess::advance() {
  for (int n = 0; n < JakesFading::kSinusoids; ++n) phasor_[n] *= rotator_[n];
}

FadingProcess generate_fading(double doppler_hz, int n_tti, double tti, int n_rb, std::optional<double> rician_k_db,
                              Rng& rng, int n_rx, int n_tx, double coherence_rbs) {
  if (doppler_hz < 0) throw std::invalid_argument("generate_fading: negative Doppler");
  const auto profile = TapProfile::for_coherence(coherence_rbs);
  const auto table = profile.rb_tap_table(n_rb);
  std::optional<JakesFading::LosComponent> los;
  if (rician_k_db) los = JakesFading::LosComponent{*rician_k_db, 1.0};
  JakesFading gen(n_rx, n_tx, profile, doppler_hz, tti, los, rng);

  FadingProcess fp;
  fp.doppler_hz = doppler_hz;
  fp.n_tti = n_tti;
  fp.n_rb = n_rb;
  fp.coefficients.reserve(static_cast<std::size_t>(n_tti) * n_rb);
  std::vector<CMatrix> rb;
  for (int t = 0; t < n_tti; ++t) {
    gen.evaluate(table, n_rb, rb);
    fp.coefficients.insert(fp.coefficients.end(), rb.begin(), rb.end());
    gen.advance();
  }
  return fp;
}

CMatrix assemble_channel(const LargeScaleState& ls, const CMatrix& fading, const CVector& port_coupling) {
  if (fading.cols() != port_coupling.size())
    throw std::invalid_argument("assemble_channel: fading has " + std::to_string(fading.cols()) +
                                " transmit ports but coupling has " + std::to_string(port_coupling.size()));
  return ls.amplitude() * (fading * port_coupling.asDiagonal());
}

}  // namespace mmw
