#include "mmw/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmw {

namespace {

// Phase-rotated DFT base: column m is exp(j 2 pi n (m O + k) / (N O)) / sqrt(N).
CMatrix rotated_dft(int n, int oversampling, int k) {
  CMatrix u(n, n);
  for (int row = 0; row < n; ++row)
    for (int m = 0; m < n; ++m)
      u(row, m) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                             2.0 * kPi * row * (m * oversampling + k) / static_cast<double>(n * oversampling));
  return u;
}

Precoder make_precoder(const Codebook& cb, int base, std::initializer_list<int> cols) {
  Precoder p;
  p.rank = static_cast<int>(cols.size());
  p.base = base;
  int i = 0;
  for (int c : cols) p.columns[i++] = c;
  p.matrix.resize(cb.n_tx, p.rank);
  for (int j = 0; j < p.rank; ++j) p.matrix.col(j) = cb.bases[base].col(p.columns[j]);
  return p;
}

Eigen::LLT<CMatrix> regularized_cholesky(CMatrix cov) {
  Eigen::LLT<CMatrix> llt(cov);
  if (llt.info() == Eigen::Success) return llt;
  const double scale = std::max(cov.trace().real() / static_cast<double>(cov.rows()), 1e-30);
  double eps = 1e-12 * scale;
  for (int attempt = 0; attempt < 40; ++attempt, eps *= 10.0) {
    CMatrix reg = cov;
    reg.diagonal().array() += eps;
    llt.compute(reg);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw std::runtime_error("interference covariance cannot be regularized (non-finite entries?)");
}

// Layer SINRs from a whitened Gram block g (r x r, row stride 4):
// A = I + p g, SINR_l = 1 / [A^-1]_ll - 1 via A = L L^H and A^-1 = L^-H L^-1.
void sinr_from_gram(const cd* g, int r, double p, double* out) {
  if (r == 1) {
    out[0] = std::max(0.0, p * g[0].real());
    return;
  }
  if (r == 2) {
    // Schur complements of the 2 x 2 case.
    const double a = 1.0 + p * g[0].real();
    const double d = 1.0 + p * g[5].real();
    const double b2 = p * p * std::norm(g[1]);
    out[0] = std::max(0.0, a - b2 / d - 1.0);
    out[1] = std::max(0.0, d - b2 / a - 1.0);
    return;
  }
  cd l[16];
  for (int j = 0; j < r; ++j) {
    double d = 1.0 + p * g[j * 4 + j].real();
    for (int k = 0; k < j; ++k) d -= std::norm(l[j * 4 + k]);
    d = std::sqrt(std::max(d, 1e-300));
    l[j * 4 + j] = d;
    for (int i = j + 1; i < r; ++i) {
      cd s = p * g[i * 4 + j];
      for (int k = 0; k < j; ++k) s -= l[i * 4 + k] * std::conj(l[j * 4 + k]);
      l[i * 4 + j] = s / d;
    }
  }
  cd x[16];  // L^-1, lower triangular
  for (int c = 0; c < r; ++c) {
    x[c * 4 + c] = 1.0 / l[c * 4 + c].real();
    for (int i = c + 1; i < r; ++i) {
      cd s{0.0, 0.0};
      for (int k = c; k < i; ++k) s -= l[i * 4 + k] * x[k * 4 + c];
      x[i * 4 + c] = s / l[i * 4 + i].real();
    }
  }
  for (int c = 0; c < r; ++c) {
    double diag = 0.0;
    for (int i = c; i < r; ++i) diag += std::norm(x[i * 4 + c]);
    out[c] = std::max(0.0, 1.0 / diag - 1.0);
  }
}

LayerSinr sinr_from_gram(const CMatrix& gram, double layer_power) {
  const int r = static_cast<int>(gram.rows());
  cd g[16];
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) g[a * 4 + b] = gram(a, b);
  double s[4];
  sinr_from_gram(g, r, layer_power, s);
  LayerSinr out(r);
  for (int l = 0; l < r; ++l) out(l) = s[l];
  return out;
}

}  // namespace

std::size_t Codebook::size() const {
  std::size_t n = 0;
  for (const auto& r : by_rank) n += r.size();
  return n;
}

Codebook build_codebook(int n_tx) {
  Codebook cb;
  cb.n_tx = n_tx;
  switch (n_tx) {
    case 1: {
      CMatrix one(1, 1);
      one(0, 0) = 1.0;
      cb.bases.push_back(one);
      cb.by_rank.resize(1);
      cb.by_rank[0].push_back(make_precoder(cb, 0, {0}));
      break;
    }
    case 2: {
      constexpr int O = 4;
      for (int k = 0; k < O; ++k) cb.bases.push_back(rotated_dft(2, O, k));
      cb.by_rank.resize(2);
      for (int k = 0; k < O; ++k) {
        cb.by_rank[0].push_back(make_precoder(cb, k, {0}));
        cb.by_rank[0].push_back(make_precoder(cb, k, {1}));
        cb.by_rank[1].push_back(make_precoder(cb, k, {0, 1}));
      }
      break;
    }
    case 4: {
      // Column subsets are closed under a shift by two, so flipping the sign
      // of every other port maps the codebook onto itself.
      constexpr int O = 8;
      for (int k = 0; k < O; ++k) cb.bases.push_back(rotated_dft(4, O, k));
      cb.by_rank.resize(4);
      for (int k = 0; k < O; ++k) {
        for (int m = 0; m < 4; ++m) cb.by_rank[0].push_back(make_precoder(cb, k, {m}));
        cb.by_rank[1].push_back(make_precoder(cb, k, {0, 2}));
        cb.by_rank[1].push_back(make_precoder(cb, k, {1, 3}));
        cb.by_rank[2].push_back(make_precoder(cb, k, {0, 1, 2}));
        cb.by_rank[2].push_back(make_precoder(cb, k, {0, 2, 3}));
        cb.by_rank[3].push_back(make_precoder(cb, k, {0, 1, 2, 3}));
      }
      break;
    }
    default:
      throw std::invalid_argument("build_codebook: unsupported n_tx " + std::to_string(n_tx) + " (expected 1, 2 or 4)");
  }
  return cb;
}

void add_interference(CMatrix& covariance, const CMatrix& channel, const CMatrix& precoder, double power) {
  const int nr = static_cast<int>(channel.rows());
  const int nt = static_cast<int>(channel.cols());
  const int r = static_cast<int>(precoder.cols());
  cd g[16];  // H P, row stride 4
  for (int i = 0; i < nr; ++i)
    for (int l = 0; l < r; ++l) {
      cd s{0.0, 0.0};
      for (int t = 0; t < nt; ++t) s += channel(i, t) * precoder(t, l);
      g[i * 4 + l] = s;
    }
  const double w = power / r;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j <= i; ++j) {
      cd s{0.0, 0.0};
      for (int l = 0; l < r; ++l) s += g[i * 4 + l] * std::conj(g[j * 4 + l]);
      s *= w;
      covariance(i, j) += s;
      if (j != i) covariance(j, i) += std::conj(s);
    }
}

CMatrix interference_covariance(int n_rx, std::span<const Interferer> interferers, double noise_power) {
  CMatrix cov = CMatrix::Identity(n_rx, n_rx) * noise_power;
  for (const auto& i : interferers) {
    if (i.channel.rows() != n_rx || i.channel.cols() != i.precoder.rows())
      throw std::invalid_argument("interference_covariance: interferer dimensions do not match");
    add_interference(cov, i.channel, i.precoder, i.power);
  }
  return cov;
}

LayerSinr mmse_sinr(const CMatrix& channel, const CMatrix& precoder, double signal_power, const CMatrix& covariance) {
  if (channel.cols() != precoder.rows() || covariance.rows() != channel.rows())
    throw std::invalid_argument("mmse_sinr: dimension mismatch");
  const auto llt = regularized_cholesky(covariance);
  const CMatrix g = llt.matrixL().solve(channel * precoder);
  const CMatrix gram = g.adjoint() * g;
  return sinr_from_gram(gram, signal_power / static_cast<double>(precoder.cols()));
}

LayerSinr compute_sinr(const CMatrix& channel, const CMatrix& precoder, double signal_power,
                       std::span<const Interferer> interferers, double noise_power) {
  return mmse_sinr(channel, precoder, signal_power,
                   interference_covariance(static_cast<int>(channel.rows()), interferers, noise_power));
}

PrecoderSearch::PrecoderSearch(const Codebook& codebook, double signal_power)
    : codebook_(&codebook), signal_power_(signal_power) {
  std::size_t off = 0;
  for (const auto& r : codebook.by_rank) {
    offset_.push_back(off);
    off += r.size();
  }
  capacity_.assign(off, 0.0);
}

void PrecoderSearch::reset() {
  n_rb_ = 0;
  std::fill(capacity_.begin(), capacity_.end(), 0.0);
  sinr_.clear();
}

void PrecoderSearch::add_rb(const CMatrix& channel, const CMatrix& covariance) {
  const auto& cb = *codebook_;
  if (channel.cols() != cb.n_tx || covariance.rows() != channel.rows())
    throw std::invalid_argument("PrecoderSearch::add_rb: dimension mismatch");

  const auto llt = regularized_cholesky(covariance);
  const CMatrix white = llt.matrixL().solve(channel);
  const CMatrix q = white.adjoint() * white;

  projected_.resize(cb.bases.size());
  for (std::size_t b = 0; b < cb.bases.size(); ++b)
    projected_[b].noalias() = cb.bases[b].adjoint() * (q * cb.bases[b]);

  const std::size_t n_entries = capacity_.size();
  sinr_.resize(sinr_.size() + n_entries);
  LayerSinr* row = &sinr_[static_cast<std::size_t>(n_rb_) * n_entries];
  cd g[16];
  double s[4];
  for (int r = 1; r <= cb.max_rank(); ++r) {
    const double layer_power = signal_power_ / r;
    const auto& entries = cb.by_rank[r - 1];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& p = entries[i];
      const CMatrix& m = projected_[p.base];
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) g[a * 4 + b] = m(p.columns[a], p.columns[b]);
      sinr_from_gram(g, r, layer_power, s);
      const std::size_t flat = offset_[r - 1] + i;
      row[flat].resize(r);
      double c = 0.0;
      for (int l = 0; l < r; ++l) {
        row[flat](l) = s[l];
        c += std::log2(1.0 + s[l]);
      }
      capacity_[flat] += c;
    }
  }
  ++n_rb_;
}

PrecoderChoice PrecoderSearch::best() const {
  PrecoderChoice best{1, 0, -1.0};
  for (int r = 1; r <= codebook_->max_rank(); ++r) {
    const auto n = codebook_->by_rank[r - 1].size();
    for (std::size_t i = 0; i < n; ++i) {
      const double c = capacity_[offset_[r - 1] + i];
      if (c > best.capacity) best = {r, static_cast<int>(i), c};
    }
  }
  return best;
}

const LayerSinr& PrecoderSearch::layer_sinr(int rank, int index, int rb) const {
  return sinr_.at(static_cast<std::size_t>(rb) * capacity_.size() + offset_.at(rank - 1) + index);
}

PrecoderChoice select_precoder(const CMatrix& channel, const Codebook& codebook,
                               std::span<const double> noise_plus_interference, double signal_power) {
  if (noise_plus_interference.size() != static_cast<std::size_t>(channel.rows()))
    throw std::invalid_argument("select_precoder: need one noise-plus-interference power per receive antenna");
  CMatrix cov = CMatrix::Zero(channel.rows(), channel.rows());
  for (int r = 0; r < channel.rows(); ++r) cov(r, r) = noise_plus_interference[r];
  PrecoderSearch search(codebook, signal_power);
  search.add_rb(channel, cov);
  return search.best();
}

double sinr_to_rate(double sinr, const RateModel& m) {
  if (sinr < 0) throw std::invalid_argument("sinr_to_rate: negative SINR");
  const double se = std::min(m.efficiency * std::log2(1.0 + sinr), m.se_cap);
  return m.tti * m.rb_bandwidth * se;
}

double layers_to_rate(const LayerSinr& sinr, const RateModel& m) {
  double bits = 0.0;
  for (int l = 0; l < sinr.size(); ++l) bits += sinr_to_rate(sinr(l), m);
  return bits;
}

double thermal_noise(double bandwidth_hz, double noise_figure_db) {
  return dbm_to_watt(kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

}  // namespace mmw
