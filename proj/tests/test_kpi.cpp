#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "mmw/kpi.hpp"

using namespace mmw;

namespace {

// One-second run, so bits equal bit/s.
ThroughputLedger ledger(std::vector<double> bits, double bandwidth = 10e6) {
  ThroughputLedger l;
  l.bits = std::move(bits);
  l.duration = 1.0;
  l.bandwidth = bandwidth;
  return l;
}

}  // namespace

TEST_CASE("average UE throughput") {
  CHECK(average_ue_throughput(ledger({10e6, 20e6, 30e6})) == doctest::Approx(20e6));
  CHECK(average_ue_throughput(ledger({7.5e6})) == doctest::Approx(7.5e6));
  CHECK(average_ue_throughput(ledger({0, 0, 0})) == 0.0);
  auto l = ledger({1000, 3000});
  l.duration = 0.05;  // 50 TTIs
  CHECK(average_ue_throughput(l) == doctest::Approx(40000.0));
  CHECK_THROWS_AS(average_ue_throughput(ledger({})), std::invalid_argument);
  l.duration = 0;
  CHECK_THROWS_AS(average_ue_throughput(l), std::invalid_argument);
}

TEST_CASE("spectral efficiency") {
  CHECK(spectral_efficiency(ledger({20e6, 30e6})) == doctest::Approx(5.0));
  CHECK(spectral_efficiency(ledger({0, 0})) == 0.0);
  CHECK(spectral_efficiency(ledger({2e6, 6e6})) == doctest::Approx(2.0 * spectral_efficiency(ledger({1e6, 3e6}))));
  CHECK_THROWS_AS(spectral_efficiency(ledger({1.0}, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(spectral_efficiency(ledger({1.0}, -5.0)), std::invalid_argument);
}

TEST_CASE("Jain fairness") {
  CHECK(jain_fairness(std::vector<double>{1, 2, 3}) == doctest::Approx(36.0 / 42.0));
  CHECK(jain_fairness(std::vector<double>{1, 2, 3}) == doctest::Approx(0.857142857));
  for (std::size_t n : {1u, 2u, 7u, 57u}) {
    CHECK(jain_fairness(std::vector<double>(n, 4.2)) == doctest::Approx(1.0));
    std::vector<double> one(n, 0.0);
    one[n / 2] = 9.0;
    CHECK(jain_fairness(one) == doctest::Approx(1.0 / n));
  }
  CHECK_THROWS_AS(jain_fairness(std::vector<double>{0, 0, 0}), DegenerateFairnessError);
  CHECK_THROWS_AS(jain_fairness(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(jain_fairness(std::vector<double>{1, -1}), std::invalid_argument);
  CHECK(jain_fairness(ledger({1, 2, 3})) == doctest::Approx(36.0 / 42.0));
}

TEST_CASE("KPI properties on random ledgers") {
  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> dist(15.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 40;
    std::vector<double> bits(n);
    for (auto& b : bits) b = dist(rng);
    auto l = ledger(bits, 1e6 * (1 + trial % 100));
    l.duration = 0.001 * (1 + trial % 60);

    const double avg = average_ue_throughput(l);
    const double se = spectral_efficiency(l);
    const double fi = jain_fairness(l);
    CHECK(se * l.bandwidth == doctest::Approx(static_cast<double>(n) * avg).epsilon(1e-12));
    CHECK(fi >= 1.0 / n - 1e-12);
    CHECK(fi <= 1.0 + 1e-12);

    auto scaled = l;
    for (auto& b : scaled.bits) b *= 3.7;
    CHECK(jain_fairness(scaled) == doctest::Approx(fi).epsilon(1e-12));

    auto permuted = l;
    std::shuffle(permuted.bits.begin(), permuted.bits.end(), rng);
    CHECK(average_ue_throughput(permuted) == doctest::Approx(avg).epsilon(1e-12));
    CHECK(spectral_efficiency(permuted) == doctest::Approx(se).epsilon(1e-12));
    CHECK(jain_fairness(permuted) == doctest::Approx(fi).epsilon(1e-12));
  }
}
