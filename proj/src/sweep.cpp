#include "mmw/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace mmw {

namespace {

auto sort_key(const KpiRecord& r) { return std::make_tuple(r.scheduler, r.rx_polarization, r.velocity, r.seed); }

std::string label_for(const ScenarioConfig& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_%s_v%g_s%llu", to_string(c.scheduler).c_str(), to_string(c.ue_polarization).c_str(),
                c.ue_velocity, static_cast<unsigned long long>(c.seed));
  return buf;
}

}  // namespace

std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize_scenario(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ResultsTable run_sweep(const ScenarioConfig& base, const SweepAxes& axes, int parallelism) {
  SweepOptions o;
  o.parallelism = parallelism;
  return run_sweep(base, axes, o);
}

ResultsTable run_sweep(const ScenarioConfig& base, const SweepAxes& axes, const SweepOptions& options) {
  const auto points = expand_sweep(base, axes.velocities, axes.polarizations, axes.schedulers, axes.seeds);
  std::vector<std::optional<KpiRecord>> done(points.size());
  std::vector<std::string> errors(points.size());

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        RunOptions run = options.run;
        run.trace_label = label_for(points[i]);
        done[i] = run_simulation(points[i], run);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      const std::size_t n = ++finished;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(n, points.size());
      }
    }
  };

  const int n_workers = std::clamp<int>(options.parallelism, 1, std::max<int>(1, static_cast<int>(points.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  ResultsTable table;
  table.config_hash = config_hash(base);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (done[i]) {
      table.records.push_back(*done[i]);
    } else {
      const auto& p = points[i];
      table.failures.push_back({p.scheduler, p.ue_polarization, p.ue_velocity, p.seed, errors[i]});
    }
  }
  std::stable_sort(table.records.begin(), table.records.end(),
                   [](const KpiRecord& a, const KpiRecord& b) { return sort_key(a) < sort_key(b); });
  return table;
}

std::string format_csv(const ResultsTable& table) {
  std::string out =
      "scheduler,rx_polarization,velocity_kmph,seed,avg_ue_throughput_mbps,spectral_efficiency_bps_hz,fairness_index\n";
  char buf[256];
  for (const auto& r : table.records) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.6g,%llu,%.6g,%.6g,%.6g\n", to_string(r.scheduler).c_str(),
                  to_string(r.rx_polarization).c_str(), r.velocity, static_cast<unsigned long long>(r.seed),
                  r.avg_ue_throughput / 1e6, r.spectral_efficiency, r.fairness_index);
    out += buf;
  }
  return out;
}

void emit_csv(const ResultsTable& table, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << format_csv(table);
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

void emit_metadata(const ResultsTable& table, const ScenarioConfig& base, const SweepAxes& axes,
                   const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["tool_version"] = table.tool_version;
  j["config_hash"] = table.config_hash;
  j["seeds_per_point"] = axes.seeds.size();
  j["aggregation"] = "arithmetic mean over seeds; each seed is an independent drop";
  j["velocities_kmph"] = axes.velocities;
  std::vector<std::string> pols, scheds;
  for (auto p : axes.polarizations) pols.push_back(to_string(p));
  for (auto s : axes.schedulers) scheds.push_back(to_string(s));
  j["polarizations"] = pols;
  j["schedulers"] = scheds;
  j["seeds"] = axes.seeds;
  j["records"] = table.records.size();
  auto& f = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& e : table.failures)
    f.push_back({{"scheduler", to_string(e.scheduler)},
                 {"rx_polarization", to_string(e.rx_polarization)},
                 {"velocity_kmph", e.velocity},
                 {"seed", e.seed},
                 {"error", e.error}});
  j["scenario"] = serialize_scenario(base);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<KpiRecord> seed_means(const ResultsTable& table) {
  std::vector<KpiRecord> means;
  std::size_t count = 0;
  auto flush = [&] {
    if (!count) return;
    auto& m = means.back();
    m.avg_ue_throughput /= count;
    m.spectral_efficiency /= count;
    m.fairness_index /= count;
    m.seed = count;  // number of seeds averaged
  };
  for (const auto& r : table.records) {
    const bool same = !means.empty() && means.back().scheduler == r.scheduler &&
                      means.back().rx_polarization == r.rx_polarization && means.back().velocity == r.velocity;
    if (same) {
      auto& m = means.back();
      m.avg_ue_throughput += r.avg_ue_throughput;
      m.spectral_efficiency += r.spectral_efficiency;
      m.fairness_index += r.fairness_index;
      ++count;
    } else {
      flush();
      means.push_back(r);
      count = 1;
    }
  }
  flush();
  return means;
}

}  // namespace mmw
