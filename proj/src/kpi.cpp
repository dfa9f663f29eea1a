#include "mmw/kpi.hpp"

#include <numeric>

namespace mmw {

std::vector<double> ThroughputLedger::throughputs() const {
  if (!(duration > 0)) throw std::invalid_argument("ThroughputLedger: duration must be > 0");
  std::vector<double> t(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) t[k] = bits[k] / duration;
  return t;
}

double average_ue_throughput(const ThroughputLedger& ledger) {
  if (ledger.n() == 0) throw std::invalid_argument("average_ue_throughput: no UEs");
  const auto t = ledger.throughputs();
  return std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
}

double spectral_efficiency(const ThroughputLedger& ledger) {
  if (!(ledger.bandwidth > 0)) throw std::invalid_argument("spectral_efficiency: bandwidth must be > 0");
  const auto t = ledger.throughputs();
  return std::accumulate(t.begin(), t.end(), 0.0) / ledger.bandwidth;
}

double jain_fairness(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("jain_fairness: no UEs");
  double sum = 0.0;
  double sq = 0.0;
  for (double v : values) {
    if (v < 0) throw std::invalid_argument("jain_fairness: negative throughput");
    sum += v;
    sq += v * v;
  }
  if (sq == 0.0) throw DegenerateFairnessError("jain_fairness: undefined for an all-zero throughput vector");
  return sum * sum / (static_cast<double>(values.size()) * sq);
}

double jain_fairness(const ThroughputLedger& ledger) { return jain_fairness(ledger.throughputs()); }

}  // namespace mmw
