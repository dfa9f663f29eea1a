#include "mmw/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <memory>
#include <sstream>

#include "mmw/antenna.hpp"
#include "mmw/channel.hpp"
#include "mmw/link.hpp"
#include "mmw/random.hpp"

namespace mmw {

namespace {

struct Link {
  int cell = -1;
  LargeScaleState ls;
  std::unique_ptr<JakesFading> fading;
  std::vector<CMatrix> fading_rb;  // current TTI, per RB
  std::vector<CMatrix> h;          // assembled, per RB
};

struct UeRuntime {
  std::vector<Link> links;  // links[0] serves
  // Leakage phases of the serving link's depolarization.
  std::unique_ptr<PhaseProcess> leak0;
  std::unique_ptr<PhaseProcess> leak1;
  double coherent = 1.0;  // share of serving power that stays coherent with CSI
};

struct Report {
  int rank = 1;
  int index = 0;
  std::vector<double> rb_bits;
};

struct CellRuntime {
  std::vector<int> ues;  // attached ids, ascending
  SchedulerState state;
  Allocation allocation;
};

// Tracks where the loop is so failures carry context.
struct Where {
  long tti = -1;
  int cell = -1;
  int ue = -1;

  std::string str() const {
    std::ostringstream s;
    s << "tti " << tti << ", cell " << cell << ", ue " << ue;
    return s.str();
  }
};

class Engine {
 public:
  Engine(const ScenarioConfig& cfg, const RunOptions& opt)
      : cfg_(cfg),
        opt_(opt),
        antenna_(AntennaConfig::from(cfg)),
        pol_(PolarizationSpec::from(cfg)),
        profile_(TapProfile::for_coherence(cfg.coherence_rbs)),
        codebook_(build_codebook(cfg.n_tx)),
        n_rb_(cfg.n_rb()),
        rb_tap_(profile_.rb_tap_table(n_rb_)),
        p_rb_(cfg.bs_tx_power / n_rb_),
        noise_(thermal_noise(kRbBandwidth, cfg.noise_figure)),
        rate_{cfg.rate_efficiency, cfg.se_cap, kRbBandwidth, cfg.tti_duration},
        doppler_(doppler_frequency(cfg.ue_velocity, cfg.carrier_frequency)),
        isotropic_(CMatrix::Identity(cfg.n_tx, cfg.n_tx)) {}

  RunResult run();

 private:
  void setup();
  void refresh_large_scale(int ue);
  void update_channels();
  CMatrix covariance(int ue, int rb) const;
  void compute_reports(std::vector<Report>& out, const std::vector<Allocation*>* scheduled);
  void open_traces();

  const ScenarioConfig& cfg_;
  const RunOptions& opt_;
  AntennaConfig antenna_;
  PolarizationSpec pol_;
  TapProfile profile_;
  Codebook codebook_;
  int n_rb_;
  std::vector<cd> rb_tap_;
  double p_rb_;
  double noise_;
  RateModel rate_;
  double doppler_;
  CMatrix isotropic_;

  SiteLayout layout_;
  std::vector<UeState> ues_;
  std::vector<UeRuntime> rt_;
  std::vector<CellRuntime> cells_;
  // Precoder each cell transmits with on each RB this TTI: [cell][rb].
  std::vector<std::vector<const CMatrix*>> active_;
  std::vector<std::pair<int, int>> in_use_;  // (rank, index) each UE is served with this TTI
  std::vector<double> total_bits_;
  Where where_;

  std::ofstream alloc_trace_;
  std::ofstream channel_trace_;
};

void Engine::setup() {
  layout_ = build_hex_layout(cfg_.n_site_rings, cfg_.inter_site_distance, cfg_.azimuth_offset_deg);
  Rng drop = make_stream(cfg_.seed, StreamTag::Drop);
  ues_ = drop_ues(layout_, cfg_.ues_per_sector, drop, cfg_.min_ue_distance, cfg_.ue_height);
  for (auto& u : ues_) {
    u.velocity = cfg_.ue_velocity;
    u.rx_polarization = cfg_.ue_polarization;
  }

  const int n_cells = layout_.n_cells();
  const int n_ues = static_cast<int>(ues_.size());
  rt_.resize(n_ues);
  cells_.resize(n_cells);

  std::vector<double> rx_dbm(n_cells);
  const double tx_dbm = watt_to_dbm(cfg_.bs_tx_power);
  for (int k = 0; k < n_ues; ++k) {
    where_.ue = k;
    auto& u = ues_[k];
    // LOS state and shadowing belong to the propagation path, which the
    // co-located sectors of a site share.
    std::vector<Link> all(n_cells);
    for (std::size_t s = 0; s < layout_.sites.size(); ++s) {
      Rng rng = make_stream(cfg_.seed, StreamTag::LargeScale, {s, static_cast<std::uint64_t>(k)});
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const auto& site = layout_.sites[s];
      const double d2d = std::hypot(u.position.x - site.x, u.position.y - site.y);
      const bool los = unit(rng) < los_probability(d2d);
      const double shadow = gauss(rng) * (los ? cfg_.shadowing_std_los_db : cfg_.shadowing_std_nlos_db);
      for (int j = 0; j < 3; ++j) {
        auto& l = all[3 * s + j];
        l.cell = static_cast<int>(3 * s + j);
        l.ls.los = los;
        l.ls.shadowing = shadow;
      }
    }
    rt_[k].links = std::move(all);
    refresh_large_scale(k);
    for (int c = 0; c < n_cells; ++c) rx_dbm[c] = tx_dbm + rt_[k].links[c].ls.gain_db();
    u.serving_cell = assign_serving_cell(rx_dbm);

    // Keep the serving link first, then every cell within the margin.
    std::vector<Link> kept;
    const double floor = rx_dbm[u.serving_cell] - cfg_.interference_margin_db;
    kept.push_back(std::move(rt_[k].links[u.serving_cell]));
    for (int c = 0; c < n_cells; ++c)
      if (c != u.serving_cell && rx_dbm[c] >= floor) kept.push_back(std::move(rt_[k].links[c]));
    rt_[k].links = std::move(kept);

    const long start = -static_cast<long>(cfg_.feedback_delay_tti);
    for (auto& l : rt_[k].links) {
      Rng rng = make_stream(cfg_.seed, StreamTag::Fading, {static_cast<std::uint64_t>(l.cell), static_cast<std::uint64_t>(k)});
      std::optional<JakesFading::LosComponent> los;
      if (l.ls.los) {
        const auto& site = layout_.site_of(l.cell);
        const double to_bs = std::atan2(site.y - u.position.y, site.x - u.position.x);
        los = JakesFading::LosComponent{cfg_.rician_k_db, std::cos(deg_to_rad(u.heading_deg) - to_bs)};
      }
      l.fading = std::make_unique<JakesFading>(cfg_.n_rx, cfg_.n_tx, profile_, doppler_, cfg_.tti_duration, los, rng,
                                               start);
    }
    Rng dep = make_stream(cfg_.seed, StreamTag::Depolarization, {static_cast<std::uint64_t>(k)});
    rt_[k].leak0 = std::make_unique<PhaseProcess>(doppler_, cfg_.tti_duration, dep, start);
    rt_[k].leak1 = std::make_unique<PhaseProcess>(doppler_, cfg_.tti_duration, dep, start);
    rt_[k].coherent =
        coherent_fraction(pol_.rx_slant, perpendicular_coherence(doppler_, cfg_.depolarization_coherence_time));

    cells_[u.serving_cell].ues.push_back(k);
  }
  where_.ue = -1;

  for (auto& c : cells_)
    c.state = SchedulerState::make(cfg_.scheduler, c.ues.size(), cfg_.pf_initial_throughput, cfg_.pf_time_constant_tc);
  active_.assign(n_cells, std::vector<const CMatrix*>(n_rb_, &isotropic_));
  in_use_.assign(n_ues, {1, 0});
  total_bits_.assign(n_ues, 0.0);
}

void Engine::refresh_large_scale(int k) {
  const auto& u = ues_[k];
  for (auto& l : rt_[k].links) {
    const auto& sector = layout_.sectors[l.cell];
    const auto& site = layout_.sites[sector.site_id];
    const double dx = u.position.x - site.x;
    const double dy = u.position.y - site.y;
    const double d2d = std::max(std::hypot(dx, dy), 10.0);
    l.ls.pathloss = pathloss_uma(d2d, cfg_.carrier_frequency, cfg_.bs_height, cfg_.ue_height, l.ls.los);
    const double az = rad_to_deg(std::atan2(dy, dx)) - sector.boresight_deg;
    const double el = rad_to_deg(std::atan2(cfg_.ue_height - cfg_.bs_height, d2d));
    l.ls.antenna_gain = bs_antenna_gain(antenna_, az, el);
  }
}

void Engine::update_channels() {
  const int n_ports = cfg_.n_tx;
  for (std::size_t k = 0; k < rt_.size(); ++k) {
    where_.ue = static_cast<int>(k);
    auto& r = rt_[k];
    const CouplingMatrix c = polarization_coupling(pol_, {r.leak0->value(), r.leak1->value()});
    // Ports alternate between the two transmit slants; the single-polarized
    // receiver sees row 0 of the coupling.
    CVector port(n_ports);
    for (int p = 0; p < n_ports; ++p) port(p) = c(0, p % 2);
    for (auto& l : r.links) {
      where_.cell = l.cell;
      l.fading->evaluate(rb_tap_, n_rb_, l.fading_rb);
      l.h.resize(n_rb_);
      for (int rb = 0; rb < n_rb_; ++rb) l.h[rb] = assemble_channel(l.ls, l.fading_rb[rb], port);
      l.fading->advance();
    }
    r.leak0->advance();
    r.leak1->advance();
  }
  where_.ue = where_.cell = -1;
}

CMatrix Engine::covariance(int k, int rb) const {
  const auto& r = rt_[k];
  const double white = p_rb_ / cfg_.n_tx;
  CMatrix cov = CMatrix::Identity(cfg_.n_rx, cfg_.n_rx) * noise_;
  for (std::size_t i = 1; i < r.links.size(); ++i) {
    const auto& l = r.links[i];
    const CMatrix* p = active_[l.cell][rb];
    if (p == &isotropic_)
      cov.noalias() += white * (l.h[rb] * l.h[rb].adjoint());
    else
      add_interference(cov, l.h[rb], *p, p_rb_);
  }
  // Power that lost coherence with the CSI behaves like a spatially white
  // self-interferer.
  if (r.coherent < 1.0) {
    const auto& h = r.links[0].h[rb];
    cov.noalias() += (1.0 - r.coherent) * white * (h * h.adjoint());
  }
  return cov;
}

void Engine::compute_reports(std::vector<Report>& out, const std::vector<Allocation*>* scheduled) {
  out.resize(rt_.size());
  PrecoderSearch search(codebook_, p_rb_);
  for (std::size_t k = 0; k < rt_.size(); ++k) {
    where_.ue = static_cast<int>(k);
    const auto& r = rt_[k];
    where_.cell = r.links[0].cell;
    const double amp = std::sqrt(r.coherent);
    Allocation* a = scheduled ? (*scheduled)[r.links[0].cell] : nullptr;
    search.reset();
    for (int rb = 0; rb < n_rb_; ++rb) {
      const CMatrix cov = covariance(static_cast<int>(k), rb);
      const CMatrix h = amp * r.links[0].h[rb];
      if (a && a->grants[rb].ue == static_cast<int>(k)) {
        const auto& p = codebook_.at(in_use_[k].first, in_use_[k].second);
        const double bits = layers_to_rate(mmse_sinr(h, p.matrix, p_rb_, cov), rate_);
        a->grants[rb].bits = bits;
      }
      search.add_rb(h, cov);
    }
    const auto best = search.best();
    auto& rep = out[k];
    rep.rank = best.rank;
    rep.index = best.index;
    rep.rb_bits.resize(n_rb_);
    for (int rb = 0; rb < n_rb_; ++rb) rep.rb_bits[rb] = layers_to_rate(search.layer_sinr(best.rank, best.index, rb), rate_);
  }
  where_.ue = where_.cell = -1;
}

void Engine::open_traces() {
  if (!opt_.trace_dir) return;
  std::filesystem::create_directories(*opt_.trace_dir);
  const auto base = *opt_.trace_dir / opt_.trace_label;
  write_layout_csv(layout_, base);
  alloc_trace_.open(base.string() + "_allocation.csv", std::ios::binary);
  channel_trace_.open(base.string() + "_channel.csv", std::ios::binary);
  if (!alloc_trace_ || !channel_trace_)
    throw std::runtime_error("cannot open trace files under " + opt_.trace_dir->string());
  alloc_trace_ << "tti,cell_id,rb,ue_id,bits\n";
  channel_trace_ << "tti,ue_id,rb,frobenius_norm\n";
}

RunResult Engine::run() {
  try {
    setup();
    open_traces();

    const int delay = cfg_.feedback_delay_tti;
    std::deque<std::vector<Report>> queue;
    // Pre-roll: reports measured before the first TTI, against isotropic
    // interference from every cell.
    for (int t = -delay; t < 0; ++t) {
      where_.tti = t;
      update_channels();
      queue.emplace_back();
      compute_reports(queue.back(), nullptr);
    }

    const RbGrid grid{n_rb_, kRbBandwidth};
    std::vector<Allocation*> scheduled(cells_.size(), nullptr);
    char buf[128];
    for (int t = 0; t < cfg_.n_tti; ++t) {
      where_.tti = t;
      update_channels();
      if (delay == 0) {
        // Same-TTI CSI is measured against last TTI's interference.
        queue.emplace_back();
        compute_reports(queue.back(), nullptr);
      }
      const std::vector<Report> reports = std::move(queue.front());
      queue.pop_front();

      for (std::size_t c = 0; c < cells_.size(); ++c) {
        where_.cell = static_cast<int>(c);
        auto& cell = cells_[c];
        scheduled[c] = nullptr;
        if (cell.ues.empty()) {
          std::fill(active_[c].begin(), active_[c].end(), &isotropic_);
          continue;
        }
        RateTable table{cell.ues.size(), n_rb_, {}};
        table.bits.reserve(cell.ues.size() * n_rb_);
        for (int k : cell.ues) table.bits.insert(table.bits.end(), reports[k].rb_bits.begin(), reports[k].rb_bits.end());
        cell.allocation = cfg_.scheduler == SchedulerKind::PF ? schedule_pf(cell.ues, grid, table, cell.state)
                                                              : schedule_rr(cell.ues, grid, table, cell.state);
        for (int rb = 0; rb < n_rb_; ++rb) {
          const int k = cell.allocation.grants[rb].ue;
          in_use_[k] = {reports[k].rank, reports[k].index};
          active_[c][rb] = &codebook_.at(reports[k].rank, reports[k].index).matrix;
          cell.allocation.grants[rb].bits = 0.0;
        }
        scheduled[c] = &cell.allocation;
      }
      where_.cell = -1;

      queue.emplace_back();
      compute_reports(queue.back(), &scheduled);
      if (delay == 0) queue.pop_back();

      for (std::size_t c = 0; c < cells_.size(); ++c) {
        where_.cell = static_cast<int>(c);
        auto& cell = cells_[c];
        if (cell.ues.empty()) continue;
        const auto granted = cell.allocation.bits_per_ue(cell.ues);
        update_average_throughput(cell.state, granted, cfg_.pf_time_constant_tc);
        for (std::size_t i = 0; i < cell.ues.size(); ++i) total_bits_[cell.ues[i]] += granted[i];
        if (opt_.on_allocation) opt_.on_allocation(t, static_cast<int>(c), cell.allocation);
        if (alloc_trace_.is_open())
          for (int rb = 0; rb < n_rb_; ++rb) {
            const auto& g = cell.allocation.grants[rb];
            std::snprintf(buf, sizeof buf, "%d,%zu,%d,%d,%.6g\n", t, c, rb, g.ue, g.bits);
            alloc_trace_ << buf;
          }
      }
      where_.cell = -1;

      if (channel_trace_.is_open())
        for (std::size_t k = 0; k < rt_.size(); ++k)
          for (int rb = 0; rb < n_rb_; ++rb) {
            std::snprintf(buf, sizeof buf, "%d,%zu,%d,%.6g\n", t, k, rb, rt_[k].links[0].h[rb].norm());
            channel_trace_ << buf;
          }

      if (cfg_.position_update && cfg_.ue_velocity > 0) {
        for (std::size_t k = 0; k < ues_.size(); ++k) {
          where_.ue = static_cast<int>(k);
          ues_[k] = step_mobility(ues_[k], cfg_.tti_duration, true);
          refresh_large_scale(static_cast<int>(k));
        }
        where_.ue = -1;
      }
    }
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError("run aborted at " + where_.str() + ": " + e.what());
  }

  RunResult res;
  for (const auto& u : ues_) {
    const bool counted = cfg_.kpi_all_sites || layout_.sectors[u.serving_cell].site_id == 0;
    if (!counted) continue;
    res.counted_ues.push_back(u.ue_id);
    res.ledger.bits.push_back(total_bits_[u.ue_id]);
  }
  res.ledger.duration = cfg_.run_duration();
  res.ledger.bandwidth = cfg_.bandwidth;

  auto& kpi = res.kpi;
  kpi.scheduler = cfg_.scheduler;
  kpi.rx_polarization = cfg_.ue_polarization;
  kpi.velocity = cfg_.ue_velocity;
  kpi.seed = cfg_.seed;
  kpi.n_ues = res.ledger.n();
  kpi.bandwidth = cfg_.bandwidth;
  kpi.avg_ue_throughput = average_ue_throughput(res.ledger);
  kpi.spectral_efficiency = spectral_efficiency(res.ledger);
  kpi.fairness_index = jain_fairness(res.ledger);

  res.ues = ues_;
  res.layout = layout_;
  return res;
}

}  // namespace

RunResult run_simulation_detailed(const ScenarioConfig& cfg, const RunOptions& options) {
  validate(cfg);
  Engine engine(cfg, options);
  return engine.run();
}

KpiRecord run_simulation(const ScenarioConfig& cfg, const RunOptions& options) {
  return run_simulation_detailed(cfg, options).kpi;
}

}  // namespace mmw
