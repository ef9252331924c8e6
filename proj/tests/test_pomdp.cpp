#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "leoroute/pomdp.hpp"

using namespace leoroute;

namespace {

struct Fixture {
  Constellation c;
  std::vector<SatellitePosition> pos;
  TopologySnapshot snap;
  std::vector<long> queues;
  LinkParams link;
  PomdpConfig pc;

  explicit Fixture(int planes, int spp) {
    ConstellationConfig cfg;
    cfg.num_planes = planes;
    cfg.sats_per_plane = spp;
    cfg.num_satellites = planes * spp;
    cfg.inclination_deg = 50.0;
    c = build_constellation(cfg);
    pos = propagate(c, 0);
    snap = snapshot(pos, c, 0);
    queues.assign(static_cast<size_t>(planes * spp), 0);
    pc.altitude_norm_km = cfg.altitude_km;
  }
};

}  // namespace

TEST_CASE("observation layout is exactly 33 entries for max_degree 4") {
  CHECK(ObsLayout{4}.size() == 33);
  Fixture f(3, 3);
  auto obs = observe(0, 4, f.snap, f.pos, f.queues, f.link, f.pc);
  CHECK(obs.size() == 33);
}

TEST_CASE("observe on an empty-queue degree-4 node") {
  Fixture f(3, 3);
  REQUIRE(f.snap.degree(0) == 4);
  auto obs = observe(0, 4, f.snap, f.pos, f.queues, f.link, f.pc);
  ObsLayout L{4};
  CHECK(obs[static_cast<size_t>(L.own_queue())] == 0.0);
  int valid = 0;
  for (int k = 0; k < 4; ++k) valid += obs[static_cast<size_t>(L.mask(k))] == 1.0;
  CHECK(valid == 4);
  // unit directions are unit length, distances positive
  for (int k = 0; k < 4; ++k) {
    int base = L.topo(k);
    double n = std::sqrt(obs[base] * obs[base] + obs[base + 1] * obs[base + 1] +
                         obs[base + 2] * obs[base + 2]);
    CHECK(n == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(obs[base + 3] > 0.0);
    CHECK(obs[base + 4] == 1.0);
  }
}

TEST_CASE("observe masks absent neighbors with zero fill") {
  Fixture f(1, 5);  // ring, degree 2
  REQUIRE(f.snap.degree(1) == 2);
  auto obs = observe(1, 3, f.snap, f.pos, f.queues, f.link, f.pc);
  ObsLayout L{4};
  CHECK(obs[static_cast<size_t>(L.mask(0))] == 1.0);
  CHECK(obs[static_cast<size_t>(L.mask(1))] == 1.0);
  CHECK(obs[static_cast<size_t>(L.mask(2))] == 0.0);
  CHECK(obs[static_cast<size_t>(L.mask(3))] == 0.0);
  for (int k = 2; k < 4; ++k) {
    CHECK(obs[static_cast<size_t>(L.delay(k))] == 0.0);
    for (int d = 0; d < 5; ++d)
      CHECK(obs[static_cast<size_t>(L.topo(k) + d)] == 0.0);
  }
}

TEST_CASE("observation delay entries equal transport link_delay totals") {
  Fixture f(3, 3);
  f.queues[0] = 17;
  auto obs = observe(0, 5, f.snap, f.pos, f.queues, f.link, f.pc);
  ObsLayout L{4};
  CHECK(obs[static_cast<size_t>(L.own_queue())] ==
        doctest::Approx(17.0 / 640.0));
  for (int k = 0; k < f.snap.degree(0); ++k) {
    double dist = f.snap.neighbor_dist[0][static_cast<size_t>(k)];
    double expect = link_delay(f.link, dist, 17, f.pc.packet_size_bytes).total_s();
    CHECK(obs[static_cast<size_t>(L.delay(k))] == expect);
  }
}

TEST_CASE("reward substitution in normalized units") {
  // alpha=1, beta=2, D_norm=3, Q_norm=4 -> -11
  RewardWeights w;
  w.alpha = 1.0;
  w.beta = 2.0;
  w.delay_norm_s = 0.1;
  w.max_queue = 640;
  CHECK(reward(w, 0.3, 2560) == doctest::Approx(-11.0).epsilon(1e-12));
  CHECK(reward(w, 0.0, 0) == 0.0);
}

TEST_CASE("reward monotonicity and argmax scale invariance") {
  RewardWeights w;  // defaults alpha 0.4, beta 0.6
  CHECK(reward(w, 0.01, 10) > reward(w, 0.02, 10));
  CHECK(reward(w, 0.01, 10) > reward(w, 0.01, 20));
  CHECK(reward(w, 0.05, 100) <= 0.0);

  // candidate next hops: argmax of -(alpha D + beta Q) invariant under
  // joint positive rescaling of (alpha, beta)
  std::vector<std::pair<double, long>> candidates = {
      {0.010, 300}, {0.013, 40}, {0.020, 100}, {0.011, 600}};
  RewardWeights scaled = w;
  scaled.alpha *= 7.3;
  scaled.beta *= 7.3;
  auto argmax = [&candidates](const RewardWeights& rw) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
      if (reward(rw, candidates[static_cast<size_t>(i)].first,
                 candidates[static_cast<size_t>(i)].second) >
          reward(rw, candidates[static_cast<size_t>(best)].first,
                 candidates[static_cast<size_t>(best)].second))
        best = i;
    }
    return best;
  };
  CHECK(argmax(w) == argmax(scaled));
}

TEST_CASE("reward weights validation keeps congestion dominant") {
  RewardWeights w;
  w.alpha = 0.6;
  w.beta = 0.4;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w.alpha = 0.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  RewardWeights ok;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("discounted_return") {
  std::vector<double> r3 = {-1.0, -1.0, -1.0};
  CHECK(discounted_return(r3, 0.99) == doctest::Approx(-2.9701).epsilon(1e-12));
  CHECK(discounted_return({}, 0.99) == 0.0);

  std::vector<double> ones(50, -1.0);
  double gamma = 0.99;
  double closed = -(1.0 - std::pow(gamma, 50)) / (1.0 - gamma);
  CHECK(std::abs(discounted_return(ones, gamma) - closed) < 1e-12);

  CHECK_THROWS_AS(discounted_return(r3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(discounted_return(r3, 0.0), std::invalid_argument);
}

TEST_CASE("episode_step terminal protocol") {
  RewardWeights w;
  Packet p;
  p.src = 0;
  p.dst = 5;
  p.ttl = 10;

  StepOutcome to_dst = episode_step(p, 5, 0.01, 3, w);
  CHECK(to_dst.done);
  CHECK(to_dst.kind == StepKind::kDelivered);
  CHECK(to_dst.reward == reward(w, 0.01, 3));  // no delivery bonus

  Packet dying = p;
  dying.ttl = 1;
  StepOutcome ttl = episode_step(dying, 2, 0.01, 3, w);
  CHECK(ttl.done);
  CHECK(ttl.kind == StepKind::kDroppedTtl);
  CHECK(ttl.reward == doctest::Approx(reward(w, 0.01, 3) + w.drop_penalty));

  StepOutcome mid = episode_step(p, 2, 0.01, 3, w);
  CHECK_FALSE(mid.done);
  CHECK(mid.reward == reward(w, 0.01, 3));
}
