#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>

#include "leoroute/transport.hpp"

using namespace leoroute;

TEST_CASE("service capacity at the nominal operating point") {
  LinkParams link;  // 300 Mbps
  // floor(300e6 * 0.01 / 12000) = 250 per link
  CHECK(per_link_share(link, 0.01, 1500) == 250);
  CHECK(service_capacity(4, link, 0.01, 1500) == 1000);
  CHECK(service_capacity(0, link, 0.01, 1500) == 0);
  // doubling the slot duration doubles mu
  CHECK(service_capacity(4, link, 0.02, 1500) == 2000);
}

TEST_CASE("step_queue direct substitutions") {
  CHECK(step_queue(5, 3, 2).next_q == 4);
  CHECK(step_queue(5, 3, 2).dropped == 0);
  CHECK(step_queue(2, 5, 1).next_q == 1);
  QueueStep s = step_queue(640, 0, 10);
  CHECK(s.next_q == 640);
  CHECK(s.dropped == 10);
  CHECK_THROWS_AS(step_queue(-1, 0, 0), std::invalid_argument);
}

namespace {

// Independent oracle: simulate the queue packet by packet.
QueueStep naive_fifo(long q, long mu, long a, long max_queue) {
  std::deque<int> queue(static_cast<size_t>(q), 0);
  for (long k = 0; k < mu && !queue.empty(); ++k) queue.pop_front();
  long dropped = 0;
  for (long k = 0; k < a; ++k) {
    if (static_cast<long>(queue.size()) < max_queue) {
      queue.push_back(0);
    } else {
      ++dropped;
    }
  }
  return {static_cast<long>(queue.size()), dropped};
}

}  // namespace

TEST_CASE("step_queue agrees with a per-packet FIFO simulation") {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<long> q_pick(0, 640);
  std::uniform_int_distribution<long> mu_pick(0, 1200);
  std::uniform_int_distribution<long> a_pick(0, 1200);
  for (int k = 0; k < 10000; ++k) {
    long q = q_pick(rng), mu = mu_pick(rng), a = a_pick(rng);
    QueueStep fast = step_queue(q, mu, a);
    QueueStep slow = naive_fifo(q, mu, a, 640);
    REQUIRE(fast.next_q == slow.next_q);
    REQUIRE(fast.dropped == slow.dropped);
  }
}

TEST_CASE("link_delay components") {
  LinkParams link;
  DelayBreakdown d = link_delay(link, 1000.0, 0, 1500);
  CHECK(d.prop_s == doctest::Approx(1000.0 / 299792.458).epsilon(1e-12));
  CHECK(d.trans_s == doctest::Approx(12000.0 / 300e6).epsilon(1e-12));
  CHECK(d.trans_s == doctest::Approx(4e-5).epsilon(1e-12));

  DelayBreakdown zero = link_delay(link, 0.0, 0, 1500);
  CHECK(zero.total_s() == doctest::Approx(zero.trans_s + zero.proc_s));

  DelayBreakdown queued = link_delay(link, 500.0, 7, 1500);
  CHECK(queued.queue_s == doctest::Approx(7.0 * queued.trans_s));
  CHECK(queued.total_s() == doctest::Approx(queued.prop_s + queued.trans_s +
                                            queued.queue_s + queued.proc_s));
}

TEST_CASE("link_delay rejects negative distance") {
  LinkParams link;
  CHECK_THROWS_AS(link_delay(link, -1.0, 0, 1500), std::invalid_argument);
}
