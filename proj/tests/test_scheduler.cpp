#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mmw/kpi.hpp"
#include "mmw/scheduler.hpp"

using namespace mmw;

namespace {

RateTable table(std::size_t n_ues, int n_rb, std::vector<double> bits) {
  RateTable t;
  t.n_ues = n_ues;
  t.n_rb = n_rb;
  t.bits = std::move(bits);
  return t;
}

RateTable constant_table(std::size_t n_ues, int n_rb, double v) {
  return table(n_ues, n_rb, std::vector<double>(n_ues * n_rb, v));
}

RbGrid grid(int n) {
  RbGrid g;
  g.n_rb = n;
  return g;
}

}  // namespace

TEST_CASE("priority function") {
  CHECK(priority(3.0, 5.0, 0.0, 1.0) == doctest::Approx(0.2));
  CHECK(priority(7.0, 9.0, 1.0, 0.0) == doctest::Approx(7.0));
  CHECK(priority(4.0, 2.0, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(priority(4.0, 2.0, -1.0, -1.0) == doctest::Approx(0.5));  // rate over throughput
  CHECK(priority(4.0, 0.0, 0.0, 1.0) == 0.0);
  CHECK(priority(4.0, 0.0, 0.0, 0.0) == 1.0);
  CHECK_THROWS_AS(priority(0.0, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(priority(-1.0, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("scheduler state") {
  const auto rr = SchedulerState::make(SchedulerKind::RR, 3, 5.0, 20.0);
  CHECK(rr.alpha == 0.0);
  CHECK(rr.beta == 1.0);
  CHECK(rr.avg_throughput == std::vector<double>{5.0, 5.0, 5.0});
  const auto pf = SchedulerState::make(SchedulerKind::PF, 2, 5.0, 20.0);
  CHECK(pf.alpha == -1.0);
  CHECK(pf.beta == -1.0);
  CHECK_THROWS_AS(SchedulerState::make(SchedulerKind::PF, 2, 0.0, 20.0), std::invalid_argument);
  CHECK(RbGrid::for_bandwidth(10e6).n_rb == 50);
}

TEST_CASE("round robin") {
  SUBCASE("3 UEs, 6 RBs") {
    const std::vector<int> ues{4, 7, 9};
    auto st = SchedulerState::make(SchedulerKind::RR, 3, 1.0, 20);
    const auto a = schedule_rr(ues, grid(6), constant_table(3, 6, 10), st);
    CHECK(a.rb_counts(ues) == std::vector<int>{2, 2, 2});
    CHECK(a.bits_per_ue(ues) == std::vector<double>{20, 20, 20});
  }
  SUBCASE("3 UEs, 50 RBs, 3 TTIs") {
    const std::vector<int> ues{0, 1, 2};
    auto st = SchedulerState::make(SchedulerKind::RR, 3, 1.0, 20);
    std::vector<int> total(3, 0);
    for (int t = 0; t < 3; ++t) {
      const auto a = schedule_rr(ues, grid(50), constant_table(3, 50, 1), st);
      const auto c = a.rb_counts(ues);
      CHECK(std::accumulate(c.begin(), c.end(), 0) == 50);
      for (int k = 0; k < 3; ++k) total[k] += c[k];
    }
    CHECK(total == std::vector<int>{50, 50, 50});
  }
  SUBCASE("30 UEs over 50 RBs see every UE within one TTI") {
    std::vector<int> ues(30);
    std::iota(ues.begin(), ues.end(), 100);
    auto st = SchedulerState::make(SchedulerKind::RR, 30, 1.0, 20);
    const auto c = schedule_rr(ues, grid(50), constant_table(30, 50, 1), st).rb_counts(ues);
    for (int x : c) CHECK(x >= 1);
    CHECK(st.rr_cursor == 50 % 30);
  }
  SUBCASE("single UE takes everything") {
    const std::vector<int> ues{5};
    auto st = SchedulerState::make(SchedulerKind::RR, 1, 1.0, 20);
    const auto a = schedule_rr(ues, grid(50), constant_table(1, 50, 3), st);
    for (const auto& g : a.grants) CHECK(g.ue == 5);
  }
  SUBCASE("ignores channel quality") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1000);
    const std::vector<int> ues{0, 1, 2, 3};
    std::vector<double> bits(4 * 12);
    for (auto& b : bits) b = u(rng);
    auto shuffled = bits;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto s1 = SchedulerState::make(SchedulerKind::RR, 4, 1.0, 20);
    auto s2 = s1;
    for (int t = 0; t < 5; ++t) {
      const auto a = schedule_rr(ues, grid(12), table(4, 12, bits), s1);
      const auto b = schedule_rr(ues, grid(12), table(4, 12, shuffled), s2);
      for (int rb = 0; rb < 12; ++rb) {
        CHECK(a.grants[rb].ue == b.grants[rb].ue);
        CHECK(a.grants[rb].bits == bits[a.grants[rb].ue * 12 + rb]);
      }
    }
  }
  SUBCASE("errors") {
    auto st = SchedulerState::make(SchedulerKind::RR, 1, 1.0, 20);
    CHECK_THROWS_AS(schedule_rr({}, grid(4), constant_table(0, 4, 1), st), std::invalid_argument);
    const std::vector<int> ues{0, 1};
    CHECK_THROWS_AS(schedule_rr(ues, grid(4), constant_table(1, 4, 1), st), std::invalid_argument);
  }
}

TEST_CASE("proportional fair") {
  const std::vector<int> two{1, 2};
  SUBCASE("equal history, better rate wins") {
    auto st = SchedulerState::make(SchedulerKind::PF, 2, 3.0, 20);
    const auto a = schedule_pf(two, grid(1), table(2, 1, {2, 4}), st);
    CHECK(a.grants[0].ue == 2);
    CHECK(a.grants[0].bits == 4.0);
  }
  SUBCASE("starved UE wins on equal rates") {
    auto st = SchedulerState::make(SchedulerKind::PF, 2, 1.0, 20);
    st.avg_throughput = {1.0, 10.0};
    CHECK(schedule_pf(two, grid(1), table(2, 1, {2, 2}), st).grants[0].ue == 1);
  }
  SUBCASE("all-zero rates go to the lowest id with zero bits") {
    auto st = SchedulerState::make(SchedulerKind::PF, 2, 1.0, 20);
    st.avg_throughput = {10.0, 1.0};
    const auto a = schedule_pf(two, grid(3), constant_table(2, 3, 0), st);
    for (const auto& g : a.grants) {
      CHECK(g.ue == 1);
      CHECK(g.bits == 0.0);
    }
  }
  SUBCASE("mismatched state is rejected") {
    auto st = SchedulerState::make(SchedulerKind::PF, 3, 1.0, 20);
    CHECK_THROWS_AS(schedule_pf(two, grid(1), table(2, 1, {1, 1}), st), std::invalid_argument);
  }
  SUBCASE("scaling rates and history together keeps every choice") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 100);
    const std::vector<int> ues{0, 1, 2, 3, 4};
    for (int trial = 0; trial < 50; ++trial) {
      auto st = SchedulerState::make(SchedulerKind::PF, 5, 1.0, 20);
      std::vector<double> bits(5 * 10);
      for (auto& b : bits) b = u(rng);
      for (auto& t : st.avg_throughput) t = u(rng);
      const double c = u(rng);
      auto scaled = st;
      for (auto& t : scaled.avg_throughput) t *= c;
      auto sbits = bits;
      for (auto& b : sbits) b *= c;
      const auto a = schedule_pf(ues, grid(10), table(5, 10, bits), st);
      const auto b = schedule_pf(ues, grid(10), table(5, 10, sbits), scaled);
      for (int rb = 0; rb < 10; ++rb) CHECK(a.grants[rb].ue == b.grants[rb].ue);
    }
  }
  SUBCASE("i.i.d. symmetric channels share RBs evenly in the long run") {
    std::mt19937_64 rng(17);
    std::exponential_distribution<double> fade(1.0);
    auto st = SchedulerState::make(SchedulerKind::PF, 2, 1.0, 20);
    std::vector<double> rbs(2, 0.0);
    for (int t = 0; t < 600; ++t) {
      std::vector<double> bits(2 * 10);
      for (auto& b : bits) b = 100.0 * std::log2(1.0 + 10.0 * fade(rng));
      const auto a = schedule_pf(two, grid(10), table(2, 10, bits), st);
      const auto c = a.rb_counts(two);
      CHECK(c[0] + c[1] == 10);
      rbs[0] += c[0];
      rbs[1] += c[1];
      update_average_throughput(st, a.bits_per_ue(two), st.tc);
    }
    CHECK(jain_fairness(rbs) >= 0.95);
  }
}

TEST_CASE("average throughput recurrence") {
  auto st = SchedulerState::make(SchedulerKind::PF, 2, 4.0, 2);
  SUBCASE("hand evaluation") {
    update_average_throughput(st, std::vector<double>{8.0, 0.0}, 2.0);
    CHECK(st.avg_throughput[0] == doctest::Approx(6.0));
    CHECK(st.avg_throughput[1] == doctest::Approx(2.0));  // unscheduled UEs decay
  }
  SUBCASE("memoryless limit") {
    update_average_throughput(st, std::vector<double>{8.0, 3.0}, 1.0);
    CHECK(st.avg_throughput == std::vector<double>{8.0, 3.0});
  }
  SUBCASE("fixed point") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 1e6);
    for (int i = 0; i < 100; ++i) {
      const double t = u(rng);
      const double tc = 1.0 + u(rng) / 1e4;
      SchedulerState s;
      s.avg_throughput = {t};
      update_average_throughput(s, std::vector<double>{t}, tc);
      CHECK(s.avg_throughput[0] == doctest::Approx(t).epsilon(1e-12));
    }
  }
  SUBCASE("geometric convergence under constant grants") {
    const double tc = 20, g = 100;
    SchedulerState s;
    s.avg_throughput = {1.0};
    double err = std::abs(1.0 - g);
    for (int t = 0; t < 200; ++t) {
      update_average_throughput(s, std::vector<double>{g}, tc);
      err *= (1.0 - 1.0 / tc);
      CHECK(std::abs(s.avg_throughput[0] - g) == doctest::Approx(err).epsilon(1e-9));
    }
    CHECK(s.avg_throughput[0] == doctest::Approx(g).epsilon(1e-3));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(update_average_throughput(st, std::vector<double>{1, 1}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(update_average_throughput(st, std::vector<double>{1}, 2.0), std::invalid_argument);
  }
}
