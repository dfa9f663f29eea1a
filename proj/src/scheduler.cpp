#include "mmw/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mmw {

namespace {

void check_rates(std::span<const int> ues, const RbGrid& grid, const RateTable& rates) {
  if (ues.empty()) throw std::invalid_argument("scheduler: no attached UEs");
  if (rates.n_ues != ues.size() || rates.n_rb != grid.n_rb ||
      rates.bits.size() != ues.size() * static_cast<std::size_t>(grid.n_rb))
    throw std::invalid_argument("scheduler: rate table is " + std::to_string(rates.n_ues) + "x" +
                                std::to_string(rates.n_rb) + ", expected " + std::to_string(ues.size()) + "x" +
                                std::to_string(grid.n_rb));
}

}  // namespace

RbGrid RbGrid::for_bandwidth(double bandwidth_hz) {
  RbGrid g;
  g.n_rb = static_cast<int>(bandwidth_hz / 200e3);
  if (g.n_rb < 1) throw std::invalid_argument("RbGrid: bandwidth too small for one resource block");
  return g;
}

double priority(double throughput, double rate, double alpha, double beta) {
  if (!(throughput > 0)) throw std::invalid_argument("priority: throughput must be > 0");
  if (rate < 0) throw std::invalid_argument("priority: rate must be >= 0");
  const double num = alpha == 0.0 ? 1.0 : std::pow(throughput, alpha);
  if (beta == 0.0) return num;
  if (rate == 0.0) return 0.0;
  return num / std::pow(rate, beta);
}

SchedulerState SchedulerState::make(SchedulerKind kind, std::size_t n_ues, double initial_throughput, double tc) {
  if (!(initial_throughput > 0)) throw std::invalid_argument("SchedulerState: initial throughput must be > 0");
  SchedulerState s;
  s.avg_throughput.assign(n_ues, initial_throughput);
  s.tc = tc;
  if (kind == SchedulerKind::PF) {
    s.alpha = -1.0;
    s.beta = -1.0;
  }
  return s;
}

std::vector<int> Allocation::rb_counts(std::span<const int> ues) const {
  std::vector<int> counts(ues.size(), 0);
  for (const auto& g : grants)
    for (std::size_t k = 0; k < ues.size(); ++k)
      if (ues[k] == g.ue) ++counts[k];
  return counts;
}

std::vector<double> Allocation::bits_per_ue(std::span<const int> ues) const {
  std::vector<double> bits(ues.size(), 0.0);
  for (const auto& g : grants)
    for (std::size_t k = 0; k < ues.size(); ++k)
      if (ues[k] == g.ue) bits[k] += g.bits;
  return bits;
}

Allocation schedule_rr(std::span<const int> ues, const RbGrid& grid, const RateTable& rates, SchedulerState& state) {
  check_rates(ues, grid, rates);
  const std::size_t n = ues.size();
  if (state.rr_cursor >= n) state.rr_cursor %= n;
  Allocation a;
  a.grants.resize(grid.n_rb);
  for (int rb = 0; rb < grid.n_rb; ++rb) {
    const std::size_t k = (state.rr_cursor + static_cast<std::size_t>(rb)) % n;
    a.grants[rb] = {ues[k], rates.at(k, rb)};
  }
  state.rr_cursor = (state.rr_cursor + static_cast<std::size_t>(grid.n_rb)) % n;
  return a;
}

Allocation schedule_pf(std::span<const int> ues, const RbGrid& grid, const RateTable& rates,
                       const SchedulerState& state) {
  check_rates(ues, grid, rates);
  if (state.avg_throughput.size() != ues.size())
    throw std::invalid_argument("schedule_pf: scheduler state does not match the UE list");
  Allocation a;
  a.grants.resize(grid.n_rb);
  for (int rb = 0; rb < grid.n_rb; ++rb) {
    std::size_t best = 0;
    double best_metric = -1.0;
    for (std::size_t k = 0; k < ues.size(); ++k) {
      const double t = std::max(state.avg_throughput[k], std::numeric_limits<double>::min());
      const double m = priority(t, rates.at(k, rb), state.alpha, state.beta);
      if (m > best_metric) {
        best_metric = m;
        best = k;
      }
    }
    a.grants[rb] = {ues[best], rates.at(best, rb)};
  }
  return a;
}

void update_average_throughput(SchedulerState& state, std::span<const double> granted, double tc) {
  if (!(tc >= 1.0)) throw std::invalid_argument("update_average_throughput: tc must be >= 1");
  if (granted.size() != state.avg_throughput.size())
    throw std::invalid_argument("update_average_throughput: one grant total per UE required");
  const double w = 1.0 / tc;
  for (std::size_t k = 0; k < granted.size(); ++k)
    state.avg_throughput[k] = (1.0 - w) * state.avg_throughput[k] + w * granted[k];
}

}  // namespace mmw
