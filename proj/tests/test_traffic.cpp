#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "leoroute/traffic.hpp"

using namespace leoroute;

namespace {

TrafficConfig make_config(double lambda0, long period = 1000) {
  TrafficConfig c;
  c.base_rate_lambda0 = lambda0;
  c.period_slots = period;
  return c;
}

}  // namespace

TEST_CASE("arrival_rate endpoints of the sinusoidal modulation") {
  TrafficConfig c = make_config(2.0, 1000);
  CHECK(arrival_rate(0, 0, c) == 2.0);        // sin 0 = 0
  CHECK(arrival_rate(0, 250, c) == 4.0);      // sin(pi/2) = 1
  CHECK(arrival_rate(0, 750, c) == 0.0);      // sin(3pi/2) = -1
  for (long t : {0L, 1L, 137L, 999L})
    CHECK(arrival_rate(3, t, c) == arrival_rate(3, t + 1000, c));
}

TEST_CASE("arrival_rate stays within [0, 2 lambda0]") {
  TrafficConfig c = make_config(3.5, 360);
  for (long t = 0; t < 720; ++t) {
    double r = arrival_rate(1, t, c);
    CHECK(r >= 0.0);
    CHECK(r <= 7.0 + 1e-12);
  }
}

TEST_CASE("sample_arrivals degenerate and statistical behavior") {
  Rng rng(99);
  for (int k = 0; k < 100; ++k) CHECK(sample_arrivals(rng, 0.0) == 0);

  // mean of 1e5 draws at rate 5 within 3 sigma of the Poisson mean
  Rng rng2(1234);
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) sum += static_cast<double>(sample_arrivals(rng2, 5.0));
  double mean = sum / n;
  CHECK(std::abs(mean - 5.0) < 3.0 * std::sqrt(5.0 / n));
}

TEST_CASE("sample_arrivals is deterministic per seed") {
  Rng a(7), b(7);
  for (int k = 0; k < 1000; ++k)
    CHECK(sample_arrivals(a, 2.5) == sample_arrivals(b, 2.5));
}

TEST_CASE("generate_packets basics") {
  TrafficConfig c = make_config(1.0);
  Rng rng(5);
  long next_id = 0;
  CHECK(generate_packets(rng, 3, 0, 10, 45, next_id, c).empty());

  auto pkts = generate_packets(rng, 3, 500, 10, 45, next_id, c);
  REQUIRE(pkts.size() == 500);
  std::set<long> ids;
  for (const Packet& p : pkts) {
    CHECK(p.src == 3);
    CHECK(p.dst != 3);
    CHECK(p.dst >= 0);
    CHECK(p.dst < 45);
    CHECK(p.ttl == 30);
    CHECK(p.size_bytes == 1500);
    CHECK(p.created_slot == 10);
    REQUIRE(p.trace.size() == 1);
    CHECK(p.trace[0] == 3);
    ids.insert(p.id);
  }
  CHECK(ids.size() == 500);  // globally unique
}

TEST_CASE("generate_packets destinations are uniform (chi-squared)") {
  TrafficConfig c = make_config(1.0);
  Rng rng(2024);
  long next_id = 0;
  const int n = 100000;
  auto pkts = generate_packets(rng, 7, n, 0, 45, next_id, c);
  std::vector<long> counts(45, 0);
  for (const Packet& p : pkts) counts[static_cast<size_t>(p.dst)]++;
  CHECK(counts[7] == 0);
  double expected = static_cast<double>(n) / 44.0;
  double chi2 = 0.0;
  for (int d = 0; d < 45; ++d) {
    if (d == 7) continue;
    double diff = counts[static_cast<size_t>(d)] - expected;
    chi2 += diff * diff / expected;
  }
  // 99th percentile of chi-squared with 43 degrees of freedom
  CHECK(chi2 < 67.459347922325820);
}

TEST_CASE("calibrate_lambda0 reproduces the load identity") {
  TrafficConfig c = make_config(0.0);
  double l120 = calibrate_lambda0(120.0, c, 45, 0.01);
  // 120e6 bps * 0.01 s / (12000 bits * 45 nodes)
  CHECK(l120 == doctest::Approx(2.2222222222222223).epsilon(1e-12));
  double l240 = calibrate_lambda0(240.0, c, 45, 0.01);
  CHECK(l240 == doctest::Approx(2.0 * l120).epsilon(1e-12));
  CHECK_THROWS_AS(calibrate_lambda0(0.0, c, 45, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_lambda0(-5.0, c, 45, 0.01), std::invalid_argument);
}

TEST_CASE("total arrivals over one period track lambda0 * T") {
  TrafficConfig c = make_config(2.0, 1000);
  Rng rng(31337);
  long total = 0;
  for (long t = 0; t < 1000; ++t)
    total += sample_arrivals(rng, arrival_rate(0, t, c));
  double expect = 2.0 * 1000.0;
  CHECK(std::abs(static_cast<double>(total) - expect) <=
        3.0 * std::sqrt(expect));
}

TEST_CASE("stationary mode and per-node phase stride") {
  TrafficConfig c = make_config(1.5);
  c.sin_amplitude = 0.0;
  for (long t : {0L, 250L, 750L}) CHECK(arrival_rate(0, t, c) == 1.5);

  TrafficConfig d = make_config(1.0, 100);
  d.node_phase_stride_slots = 25.0;
  CHECK(arrival_rate(1, 0, d) == doctest::Approx(arrival_rate(0, 25, d)));
}

TEST_CASE("traffic config validation paths") {
  TrafficConfig c = make_config(-1.0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_config(1.0, 0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_config(1.0);
  c.ttl_hops = 31;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_config(1.0);
  c.hot_flows.push_back({2, 2, 1.0});
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
