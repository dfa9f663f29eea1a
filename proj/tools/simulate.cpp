// simulate: run one scenario or a velocity/polarization/scheduler/seed sweep
// and write the KPI table as CSV.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mmw/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s[0] == '-') throw std::invalid_argument("not a seed: " + s);
  std::size_t used = 0;
  const auto v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a seed: " + s);
  return v;
}

// "0,20,40" or "0..120:20".
std::vector<double> parse_velocities(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_double(part));
      continue;
    }
    const auto colon = part.find(':', dots);
    const double lo = parse_double(part.substr(0, dots));
    const double hi = parse_double(part.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
    const double step = colon == std::string::npos ? 20.0 : parse_double(part.substr(colon + 1));
    if (!(step > 0) || hi < lo) throw std::invalid_argument("bad velocity range: " + part);
    for (int i = 0; lo + i * step <= hi + 1e-9; ++i) out.push_back(lo + i * step);
  }
  if (out.empty()) throw std::invalid_argument("empty velocity list");
  return out;
}

// "1..5" or "1,2,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_u64(part));
      continue;
    }
    const auto lo = parse_u64(part.substr(0, dots));
    const auto hi = parse_u64(part.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("bad seed range: " + part);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("simulate");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("MMWSIM_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"mmWave downlink system-level simulator"};
  std::string config_path, out_path, velocities, polarizations, schedulers, seeds, trace_dir, preset;
  int parallel = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", config_path, "scenario file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--preset", preset, "starting point the config is applied on")->check(CLI::IsMember({"small", "paper"}));
  app.add_option("--out", out_path, "results CSV (stdout when omitted)");
  app.add_option("--sweep-velocities", velocities, "km/h list, e.g. 0,20,40 or 0..120:20");
  app.add_option("--polarizations", polarizations, "lpol,xpol");
  app.add_option("--schedulers", schedulers, "rr,pf");
  app.add_option("--seeds", seeds, "1..5 or 1,2,3");
  app.add_option("--parallel", parallel, "worker threads (default: hardware threads)")->check(CLI::PositiveNumber);
  app.add_option("--trace-dir", trace_dir, "write per-run allocation/channel/layout traces here");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }
  if (config_path.empty() && preset.empty()) {
    spdlog::error("either --config or --preset is required");
    return kExitConfig;
  }

  mmw::ScenarioConfig base;
  mmw::SweepAxes axes;
  try {
    if (!preset.empty()) base = mmw::scenario_preset(preset);
    if (!config_path.empty()) base = mmw::load_scenario(config_path, base);
    mmw::validate(base);

    // Unswept axes take the scenario's own value.
    axes.velocities = velocities.empty() ? std::vector<double>{base.ue_velocity} : parse_velocities(velocities);
    axes.polarizations.clear();
    if (polarizations.empty()) axes.polarizations.push_back(base.ue_polarization);
    for (const auto& p : split(polarizations, ',')) axes.polarizations.push_back(mmw::parse_polarization(p));
    axes.schedulers.clear();
    if (schedulers.empty()) axes.schedulers.push_back(base.scheduler);
    for (const auto& s : split(schedulers, ',')) axes.schedulers.push_back(mmw::parse_scheduler(s));
    axes.seeds = seeds.empty() ? std::vector<std::uint64_t>{base.seed} : parse_seeds(seeds);
    // Fails early on invalid points (e.g. negative velocity).
    mmw::expand_sweep(base, axes.velocities, axes.polarizations, axes.schedulers, axes.seeds);
  } catch (const std::exception& e) {
    spdlog::error("configuration: {}", e.what());
    return kExitConfig;
  }

  const std::size_t n_points =
      axes.velocities.size() * axes.polarizations.size() * axes.schedulers.size() * axes.seeds.size();
  spdlog::info("{} points, {} worker(s), config hash {}", n_points, parallel, mmw::config_hash(base));

  mmw::SweepOptions opts;
  opts.parallelism = parallel;
  if (!trace_dir.empty()) opts.run.trace_dir = trace_dir;
  opts.progress = [](std::size_t done, std::size_t total) { spdlog::debug("finished {}/{}", done, total); };

  const auto table = mmw::run_sweep(base, axes, opts);
  for (const auto& f : table.failures)
    spdlog::error("{} {} {} km/h seed {}: {}", mmw::to_string(f.scheduler), mmw::to_string(f.rx_polarization), f.velocity,
                  f.seed, f.error);

  try {
    if (out_path.empty()) {
      std::cout << mmw::format_csv(table);
    } else {
      mmw::emit_csv(table, out_path);
      mmw::emit_metadata(table, base, axes, out_path + ".meta.json");
      spdlog::info("wrote {} ({} records)", out_path, table.records.size());
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitPartial;
  }

  for (const auto& m : mmw::seed_means(table))
    spdlog::info("{:>3} {:>4} {:>5g} km/h  {:>9.3f} Mbps  {:.4f} bit/s/Hz  FI {:.4f}  ({} seeds)",
                 mmw::to_string(m.scheduler), mmw::to_string(m.rx_polarization), m.velocity, m.avg_ue_throughput / 1e6,
                 m.spectral_efficiency, m.fairness_index, m.seed);

  return table.complete() ? kExitOk : kExitPartial;
}
