// Acceptance checks on the desk-scale "small" preset. One PASS/FAIL line per
// criterion; exit status is non-zero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mmw/channel.hpp"
#include "mmw/kpi.hpp"
#include "mmw/scheduler.hpp"
#include "mmw/simulation.hpp"
#include "mmw/sweep.hpp"

using namespace mmw;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %2d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

const KpiRecord* find(const std::vector<KpiRecord>& means, SchedulerKind s, Polarization p, double v) {
  for (const auto& m : means)
    if (m.scheduler == s && m.rx_polarization == p && m.velocity == v) return &m;
  return nullptr;
}

void kpi_exactness() {
  const double fi = jain_fairness(std::vector<double>{1, 2, 3});
  bool ok = std::abs(fi - 0.857142857) <= 1e-9;
  ok = ok && jain_fairness(std::vector<double>(7, 3.5)) == 1.0;
  for (std::size_t n = 1; n <= 60; ++n) {
    std::vector<double> v(n, 0.0);
    v[n - 1] = 42.0;
    ok = ok && jain_fairness(v) == 1.0 / static_cast<double>(n);
  }
  report(1, "KPI exactness", ok, fmt("FI([1,2,3]) = %.10f", fi));
}

void moving_average_recurrence() {
  SchedulerState s;
  s.avg_throughput = {4.0};
  update_average_throughput(s, std::vector<double>{8.0}, 2.0);
  bool ok = s.avg_throughput[0] == 6.0;
  s.avg_throughput = {123.0};
  update_average_throughput(s, std::vector<double>{7.0}, 1.0);
  ok = ok && s.avg_throughput[0] == 7.0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(1e-3, 1e7);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    SchedulerState f;
    f.avg_throughput = {t};
    update_average_throughput(f, std::vector<double>{t}, 1.0 + u(rng) * 1e-5);
    worst = std::max(worst, std::abs(f.avg_throughput[0] - t) / t);
  }
  ok = ok && worst <= 1e-12;
  report(2, "moving-average recurrence", ok, fmt("worst fixed-point rel. error %.2e", worst));
}

void fading_statistics() {
  const auto start = std::chrono::steady_clock::now();
  TapProfile flat{{0.0}, {1.0}};
  const auto table = flat.rb_tap_table(1);
  const int n = 10000;
  bool ok = true;
  std::string detail;
  std::vector<CMatrix> out;
  for (double fd : {0.0, 100.0, 1000.0, 3113.0}) {
    double power = 0, corr = 0;
    for (int i = 0; i < n; ++i) {
      Rng rng = make_stream(99, StreamTag::Fading, {static_cast<std::uint64_t>(i)});
      JakesFading f(1, 1, flat, fd, 1e-3, std::nullopt, rng);
      f.evaluate(table, 1, out);
      const cd h0 = out[0](0, 0);
      f.advance();
      f.evaluate(table, 1, out);
      power += std::norm(h0);
      corr += (h0 * std::conj(out[0](0, 0))).real();
    }
    power /= n;
    const double rho = corr / n / power;
    const double j0 = std::cyl_bessel_j(0.0, 2 * kPi * fd * 1e-3);
    ok = ok && std::abs(rho - j0) <= 0.03 && std::abs(power - 1.0) <= 0.05;
    detail += fmt("fd=%g: rho=%.3f J0=%.3f P=%.3f; ", fd, rho, j0, power);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 10.0;
  report(4, "fading statistics", ok, detail + fmt("%.1f s", secs));
}

void pathloss_oracle() {
  const double d2d = std::sqrt(100.0 * 100.0 - 23.5 * 23.5);
  const double pl = pathloss_uma(d2d, 28e9, 25.0, 1.5, true);
  bool ok = std::abs(pl - 100.94) <= 0.01;
  double prev_l = 0, prev_n = 0;
  for (double d = 10; d <= 1000; d += 1) {
    const double l = pathloss_uma(d, 28e9, 25.0, 1.5, true);
    const double nl = pathloss_uma(d, 28e9, 25.0, 1.5, false);
    ok = ok && l >= prev_l && nl >= prev_n;
    prev_l = l;
    prev_n = nl;
  }
  report(5, "pathloss oracle", ok, fmt("PL(100 m LOS) = %.4f dB", pl));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto small = scenario_preset("small");
  std::printf("small preset: %d sites, %d UEs/sector, %d TTI; %d worker(s)\n", small.n_sites(), small.ues_per_sector,
              small.n_tti, workers());

  kpi_exactness();
  moving_average_recurrence();

  // Trend sweep shared by criteria 3 and 6 to 8, and 10.
  SweepAxes axes;
  axes.velocities = {0, 120};
  axes.seeds = {1, 2, 3, 4, 5};
  SweepOptions opt;
  opt.parallelism = workers();
  std::atomic<long> bad_tti{0}, tti_seen{0};
  opt.run.on_allocation = [&](int, int, const Allocation& a) {
    ++tti_seen;
    const auto n_rb = static_cast<std::size_t>(small.n_rb());
    bool ok = a.grants.size() == n_rb;
    for (const auto& g : a.grants) ok = ok && g.ue >= 0;
    if (!ok) ++bad_tti;
  };
  const auto sweep = run_sweep(small, axes, opt);
  for (const auto& f : sweep.failures) std::printf("sweep point failed: %s\n", f.error.c_str());
  const auto means = seed_means(sweep);
  for (const auto& m : means)
    std::printf("  %s %s %5.0f km/h  %8.3f Mbps  %7.3f bit/s/Hz  FI %.4f  (%llu seeds)\n", to_string(m.scheduler).c_str(),
                to_string(m.rx_polarization).c_str(), m.velocity, m.avg_ue_throughput / 1e6, m.spectral_efficiency,
                m.fairness_index, static_cast<unsigned long long>(m.seed));
  const bool sweep_ok = sweep.complete() && sweep.records.size() == 40;

  {
    const std::vector<int> ues{0, 1, 2};
    RbGrid grid;
    grid.n_rb = 50;
    RateTable rates{3, 50, std::vector<double>(150, 1.0)};
    auto st = SchedulerState::make(SchedulerKind::RR, 3, 1.0, 20.0);
    std::vector<int> total(3, 0);
    for (int t = 0; t < 3; ++t) {
      const auto c = schedule_rr(ues, grid, rates, st).rb_counts(ues);
      for (int k = 0; k < 3; ++k) total[k] += c[k];
    }
    const bool ok = total == std::vector<int>{50, 50, 50} && bad_tti == 0 && tti_seen > 0 && sweep_ok;
    report(3, "RR uniformity", ok,
           fmt("RB counts %g/%g/%g; %g cell-TTIs checked for conservation", total[0], total[1], total[2],
               static_cast<double>(tti_seen.load())));
  }

  fading_statistics();
  pathloss_oracle();

  {
    bool ok = sweep_ok;
    std::string detail;
    for (auto s : {SchedulerKind::RR, SchedulerKind::PF})
      for (auto p : {Polarization::LPOL, Polarization::XPOL}) {
        const auto* lo = find(means, s, p, 0);
        const auto* hi = find(means, s, p, 120);
        ok = ok && lo && hi && lo->seed >= 5 && hi->avg_ue_throughput < lo->avg_ue_throughput;
        if (lo && hi)
          detail += to_string(s) + "/" + to_string(p) +
                    fmt(" %.2f->%.2f; ", lo->avg_ue_throughput / 1e6, hi->avg_ue_throughput / 1e6);
      }
    report(6, "velocity decay", ok, detail + "Mbps");
  }

  {
    const auto* l120 = find(means, SchedulerKind::RR, Polarization::LPOL, 120);
    const auto* x120 = find(means, SchedulerKind::RR, Polarization::XPOL, 120);
    const auto* l0 = find(means, SchedulerKind::RR, Polarization::LPOL, 0);
    const auto* x0 = find(means, SchedulerKind::RR, Polarization::XPOL, 0);
    bool ok = sweep_ok && l120 && x120 && l0 && x0;
    double gap0 = 1;
    if (ok) {
      gap0 = std::abs(l0->avg_ue_throughput - x0->avg_ue_throughput) /
             std::max(l0->avg_ue_throughput, x0->avg_ue_throughput);
      ok = l120->avg_ue_throughput > x120->avg_ue_throughput && gap0 < 0.10;
    }
    report(7, "polarization gap at speed", ok,
           ok || (l120 && x120)
               ? fmt("RR 120 km/h LPOL %.2f vs XPOL %.2f Mbps; 0 km/h gap %.1f%%", l120->avg_ue_throughput / 1e6,
                     x120->avg_ue_throughput / 1e6, 100 * gap0)
               : std::string("missing sweep points"));
  }

  {
    bool ok = sweep_ok;
    for (const auto& r : sweep.records) ok = ok && r.fairness_index > 0 && r.fairness_index <= 1.0;
    std::string detail;
    for (auto p : {Polarization::LPOL, Polarization::XPOL}) {
      const auto* rr = find(means, SchedulerKind::RR, p, 120);
      const auto* pf = find(means, SchedulerKind::PF, p, 120);
      ok = ok && rr && pf && rr->fairness_index > pf->fairness_index;
      if (rr && pf) detail += to_string(p) + fmt(" FI RR %.4f vs PF %.4f; ", rr->fairness_index, pf->fairness_index);
    }
    report(8, "scheduler fairness", ok, detail + "all FI in (0, 1]");
  }

  {
    auto base = small;
    base.n_tti = 5;
    SweepAxes d;
    d.velocities = {0, 120};
    d.seeds = {1, 2};
    const auto a = format_csv(run_sweep(base, d, 1));
    const auto b = format_csv(run_sweep(base, d, 1));
    const auto c = format_csv(run_sweep(base, d, 8));
    const bool ok = a == b && a == c && std::count(a.begin(), a.end(), '\n') == 17;
    report(9, "determinism", ok, fmt("%g-byte CSV; repeat and 8 workers identical", static_cast<double>(a.size())));
  }

  {
    bool ok = sweep_ok;
    double worst = 0;
    for (const auto& r : sweep.records) {
      const double lhs = r.spectral_efficiency * r.bandwidth;
      const double rhs = static_cast<double>(r.n_ues) * r.avg_ue_throughput;
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
    }
    ok = ok && worst <= 1e-9;
    report(10, "cross-consistency", ok, fmt("worst relative mismatch %.2e over %g records", worst,
                                            static_cast<double>(sweep.records.size())));
  }

  {
    auto base = small;
    base.xpd_mean = std::numeric_limits<double>::infinity();
    SweepAxes s;
    s.velocities = {0};
    s.seeds = {1, 2, 3, 4, 5};
    const auto table = run_sweep(base, s, workers());
    const auto m = seed_means(table);
    bool ok = table.complete() && m.size() == 4;
    std::string detail;
    for (auto sched : {SchedulerKind::RR, SchedulerKind::PF}) {
      const auto* l = find(m, sched, Polarization::LPOL, 0);
      const auto* x = find(m, sched, Polarization::XPOL, 0);
      if (!l || !x) {
        ok = false;
        continue;
      }
      const double dt = std::abs(l->avg_ue_throughput - x->avg_ue_throughput) / l->avg_ue_throughput;
      const double ds = std::abs(l->spectral_efficiency - x->spectral_efficiency) / l->spectral_efficiency;
      const double df = std::abs(l->fairness_index - x->fairness_index) / l->fairness_index;
      ok = ok && dt < 0.02 && ds < 0.02 && df < 0.02;
      detail += to_string(sched) + fmt(" dT %.1e dSE %.1e dFI %.1e  ", dt, ds, df);
    }
    report(11, "symmetry null test", ok, detail);
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s: %d criterion(s) failed, %.0f s\n", failures ? "FAIL" : "PASS", failures, secs);
  return failures ? 1 : 0;
}
