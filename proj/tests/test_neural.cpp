#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "leoroute/neural.hpp"
#include "leoroute/obs_layout.hpp"

using namespace leoroute;

namespace {

NetConfig small_config() {
  NetConfig cfg;
  cfg.max_degree = 3;
  cfg.gat_heads = 2;
  cfg.gat_dim = 8;
  cfg.lstm_dim = 5;
  cfg.qhead_hidden = 4;
  cfg.window = 3;
  return cfg;
}

// Random observation window with plausible ranges; the final row always has
// at least one valid action and the first row is zero padding.
std::vector<double> random_window(const NetConfig& cfg, Rng& rng) {
  ObsLayout L{cfg.max_degree};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> w(static_cast<size_t>(cfg.window) * L.size(), 0.0);
  for (int t = 1; t < cfg.window; ++t) {
    double* row = w.data() + static_cast<size_t>(t) * L.size();
    row[L.own_queue()] = u01(rng);
    int valid = 0;
    for (int k = 0; k < cfg.max_degree; ++k) {
      bool alive = u01(rng) < 0.7 || (t == cfg.window - 1 && k == 0);
      if (!alive) continue;
      ++valid;
      row[L.mask(k)] = 1.0;
      row[L.delay(k)] = 0.05 * u01(rng);
      for (int d = 0; d < 3; ++d) row[L.topo(k) + d] = u(rng);
      row[L.topo(k) + 3] = 1.0 + u01(rng);
      row[L.topo(k) + 4] = 1.0;
    }
    (void)valid;
    for (int d = 0; d < 3; ++d) row[L.dst() + d] = u(rng);
    row[L.dst() + 3] = 2.0 * u01(rng);
  }
  return w;
}

int first_valid_action(const NetConfig& cfg, const std::vector<double>& window) {
  ObsLayout L{cfg.max_degree};
  const double* last =
      window.data() + static_cast<size_t>(cfg.window - 1) * L.size();
  for (int k = 0; k < cfg.max_degree; ++k)
    if (last[L.mask(k)] != 0.0) return k;
  return -1;
}

// Relative-error finite-difference check of every parameter gradient.
void check_gradients(QNetwork& net, const std::vector<double>& window,
                     int action, double eps = 1e-5, double tol = 1e-4) {
  const int md = net.config().max_degree;
  net.zero_grad();
  net.forward_cached(window.data());
  std::vector<double> dq(static_cast<size_t>(md), 0.0);
  dq[static_cast<size_t>(action)] = 1.0;
  net.backward_from_cache(dq.data());

  std::vector<std::vector<double>> grads;
  net.for_each_gradient([&grads](const std::string&, const Tensor& g) {
    grads.push_back(g.data);
  });

  size_t tensor_idx = 0;
  long checked = 0, failed = 0;
  net.for_each_parameter([&](const std::string& name, Tensor& p) {
    const std::vector<double>& g = grads[tensor_idx++];
    for (size_t i = 0; i < p.size(); ++i) {
      double keep = p.data[i];
      p.data[i] = keep + eps;
      double up = net.q_values(window.data())[static_cast<size_t>(action)];
      p.data[i] = keep - eps;
      double dn = net.q_values(window.data())[static_cast<size_t>(action)];
      p.data[i] = keep;
      double fd = (up - dn) / (2.0 * eps);
      double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-8});
      double rel = std::abs(fd - g[i]) / denom;
      ++checked;
      if (rel > tol) {
        ++failed;
        if (failed <= 3) {
          MESSAGE("gradient mismatch at " << name << "[" << i << "]: analytic "
                                          << g[i] << " vs fd " << fd);
        }
      }
    }
  });
  CHECK(failed == 0);
  CHECK(checked == static_cast<long>(net.param_count()));
}

}  // namespace

TEST_CASE("gat_attention softmax basics") {
  NetConfig cfg = small_config();
  Rng rng(11);
  auto net = make_gat_lstm_net(cfg, rng);
  GatParams params;
  // pull the initialized gat tensors back out of the network
  net->for_each_parameter([&](const std::string& name, Tensor& t) {
    if (name == "gat.proj.0" || name == "gat.proj.1") params.proj.push_back(t);
    if (name == "gat.attn.0" || name == "gat.attn.1") params.attn.push_back(t);
    if (name == "gat.self") params.self_proj = t;
  });

  std::vector<double> self_f = {0.3, -0.2, 0.5, 0.1, 1.2, 1.0};
  std::vector<double> nb(3 * 6, 0.4);

  SUBCASE("single unmasked neighbor gets alpha exactly 1") {
    std::vector<char> mask = {0, 1, 0};
    auto alphas = gat_attention(cfg, params, self_f.data(), nb.data(), mask.data());
    for (int h = 0; h < cfg.gat_heads; ++h) {
      CHECK(alphas[static_cast<size_t>(h * 3 + 1)] == 1.0);
      CHECK(alphas[static_cast<size_t>(h * 3 + 0)] == 0.0);
      CHECK(alphas[static_cast<size_t>(h * 3 + 2)] == 0.0);
    }
  }

  SUBCASE("identical neighbors share attention equally") {
    std::vector<char> mask = {1, 1, 1};
    auto alphas = gat_attention(cfg, params, self_f.data(), nb.data(), mask.data());
    for (int h = 0; h < cfg.gat_heads; ++h)
      for (int k = 0; k < 3; ++k)
        CHECK(alphas[static_cast<size_t>(h * 3 + k)] ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }

  SUBCASE("random inputs: rows sum to 1, nonnegative") {
    Rng r2(77);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> nbf(3 * 6);
      for (double& v : nbf) v = u(r2);
      std::vector<char> mask = {1, static_cast<char>(trial % 2), 1};
      auto alphas =
          gat_attention(cfg, params, self_f.data(), nbf.data(), mask.data());
      for (int h = 0; h < cfg.gat_heads; ++h) {
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) {
          double a = alphas[static_cast<size_t>(h * 3 + k)];
          CHECK(a >= 0.0);
          if (!mask[static_cast<size_t>(k)]) CHECK(a == 0.0);
          sum += a;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }

  SUBCASE("all-masked input throws") {
    std::vector<char> mask = {0, 0, 0};
    CHECK_THROWS_AS(
        gat_attention(cfg, params, self_f.data(), nb.data(), mask.data()),
        std::invalid_argument);
  }
}

TEST_CASE("gat_aggregate matches a hand-rolled evaluation") {
  NetConfig cfg = small_config();
  Rng rng(13);
  auto net = make_gat_lstm_net(cfg, rng);
  GatParams params;
  net->for_each_parameter([&](const std::string& name, Tensor& t) {
    if (name.rfind("gat.proj.", 0) == 0) params.proj.push_back(t);
    if (name.rfind("gat.attn.", 0) == 0) params.attn.push_back(t);
    if (name == "gat.self") params.self_proj = t;
  });
  int m = cfg.head_dim();

  std::vector<double> self_f = {0.1, 0.2, -0.3, 0.4, 0.5, 1.0};
  Rng r2(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> nbf(3 * 6);
  for (double& v : nbf) v = u(r2);

  SUBCASE("one neighbor: aggregation equals its projected feature") {
    std::vector<char> mask = {0, 0, 1};
    auto alphas = gat_attention(cfg, params, self_f.data(), nbf.data(), mask.data());
    auto z = gat_aggregate(cfg, params, alphas, nbf.data(), mask.data());
    REQUIRE(z.size() == static_cast<size_t>(cfg.gat_dim));
    for (int h = 0; h < cfg.gat_heads; ++h) {
      for (int d = 0; d < m; ++d) {
        double expect = 0.0;
        for (int f = 0; f < 6; ++f)
          expect += params.proj[static_cast<size_t>(h)]
                        .data[static_cast<size_t>(d * 6 + f)] *
                    nbf[static_cast<size_t>(2 * 6 + f)];
        CHECK(z[static_cast<size_t>(h * m + d)] == doctest::Approx(expect));
      }
    }
  }

  SUBCASE("all-zero neighbor features aggregate to zero") {
    std::vector<double> zeros(3 * 6, 0.0);
    std::vector<char> mask = {1, 1, 1};
    auto alphas =
        gat_attention(cfg, params, self_f.data(), zeros.data(), mask.data());
    auto z = gat_aggregate(cfg, params, alphas, zeros.data(), mask.data());
    for (double v : z) CHECK(v == 0.0);
  }

  SUBCASE("three neighbors against an independent direct evaluation") {
    std::vector<char> mask = {1, 1, 1};
    auto alphas = gat_attention(cfg, params, self_f.data(), nbf.data(), mask.data());
    auto z = gat_aggregate(cfg, params, alphas, nbf.data(), mask.data());
    for (int h = 0; h < cfg.gat_heads; ++h) {
      for (int d = 0; d < m; ++d) {
        double expect = 0.0;
        for (int k = 0; k < 3; ++k) {
          double proj = 0.0;
          for (int f = 0; f < 6; ++f)
            proj += params.proj[static_cast<size_t>(h)]
                        .data[static_cast<size_t>(d * 6 + f)] *
                    nbf[static_cast<size_t>(k * 6 + f)];
          expect += alphas[static_cast<size_t>(h * 3 + k)] * proj;
        }
        CHECK(z[static_cast<size_t>(h * m + d)] ==
              doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("raw aggregation realizes the unprojected variant") {
  NetConfig cfg = small_config();
  cfg.aggregate_projected = false;
  cfg.gat_dim = cfg.gat_heads * NetConfig::kFeatDim;  // 12
  Rng rng(17);
  auto net = make_gat_lstm_net(cfg, rng);
  GatParams params;
  net->for_each_parameter([&](const std::string& name, Tensor& t) {
    if (name.rfind("gat.proj.", 0) == 0) params.proj.push_back(t);
    if (name.rfind("gat.attn.", 0) == 0) params.attn.push_back(t);
  });
  std::vector<double> self_f = {0.1, 0.2, -0.3, 0.4, 0.5, 1.0};
  std::vector<double> nbf(3 * 6);
  Rng r2(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : nbf) v = u(r2);
  std::vector<char> mask = {1, 0, 1};
  auto alphas = gat_attention(cfg, params, self_f.data(), nbf.data(), mask.data());
  auto z = gat_aggregate(cfg, params, alphas, nbf.data(), mask.data());
  REQUIRE(z.size() == static_cast<size_t>(cfg.gat_heads * 6));
  for (int h = 0; h < cfg.gat_heads; ++h) {
    for (int f = 0; f < 6; ++f) {
      double expect = 0.0;
      for (int k = 0; k < 3; ++k)
        expect += alphas[static_cast<size_t>(h * 3 + k)] *
                  nbf[static_cast<size_t>(k * 6 + f)];
      CHECK(z[static_cast<size_t>(h * 6 + f)] == doctest::Approx(expect));
    }
  }
}

TEST_CASE("lstm_step closed forms") {
  int in_dim = 4, hidden = 6;
  LstmParams p;
  for (auto* w : {&p.wf, &p.wi, &p.wo, &p.wg})
    *w = Tensor::zeros({static_cast<size_t>(hidden), static_cast<size_t>(in_dim)});
  for (auto* u : {&p.uf, &p.ui, &p.uo, &p.ug})
    *u = Tensor::zeros({static_cast<size_t>(hidden), static_cast<size_t>(hidden)});
  for (auto* b : {&p.bf, &p.bi, &p.bo, &p.bg})
    *b = Tensor::zeros({static_cast<size_t>(hidden)});

  std::vector<double> z(static_cast<size_t>(in_dim), 0.7);
  std::vector<double> h0(static_cast<size_t>(hidden), 0.0);
  std::vector<double> c0(static_cast<size_t>(hidden), 0.0);

  SUBCASE("all-zero parameters and state stay at zero") {
    LstmState s = lstm_step(p, z, h0, c0);
    for (double v : s.h) CHECK(v == 0.0);
    for (double v : s.c) CHECK(v == 0.0);
  }

  SUBCASE("zero parameters halve the carried cell state") {
    std::vector<double> cv = {0.5, -1.0, 2.0, 0.0, -0.25, 3.0};
    LstmState s = lstm_step(p, z, h0, cv);
    for (int d = 0; d < hidden; ++d) {
      CHECK(s.c[static_cast<size_t>(d)] ==
            doctest::Approx(0.5 * cv[static_cast<size_t>(d)]).epsilon(1e-14));
      CHECK(s.h[static_cast<size_t>(d)] ==
            doctest::Approx(0.5 * std::tanh(0.5 * cv[static_cast<size_t>(d)]))
                .epsilon(1e-14));
    }
  }

  SUBCASE("random parameters keep gates and outputs in range") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (auto* t : {&p.wf, &p.wi, &p.wo, &p.wg, &p.uf, &p.ui, &p.uo, &p.ug,
                    &p.bf, &p.bi, &p.bo, &p.bg})
      for (double& v : t->data) v = u(rng);
    std::vector<double> zi(static_cast<size_t>(in_dim));
    std::vector<double> hv(static_cast<size_t>(hidden));
    std::vector<double> cv(static_cast<size_t>(hidden));
    for (double& v : zi) v = u(rng);
    for (double& v : hv) v = u(rng) * 0.5;
    for (double& v : cv) v = u(rng);
    LstmState s = lstm_step(p, zi, hv, cv);
    for (double v : s.h) CHECK(std::abs(v) < 1.0);
    for (size_t d = 0; d < s.c.size(); ++d)
      CHECK(std::abs(s.c[d]) <= std::abs(cv[d]) + 1.0);
  }
}

TEST_CASE("q head masking and argmax invariance") {
  QHeadParams p;
  p.w1 = Tensor::zeros({4, 5});
  p.b1 = Tensor::zeros({4});
  p.w2 = Tensor::zeros({3, 4});
  p.b2 = Tensor::zeros({3});
  Rng rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto* t : {&p.w1, &p.w2})
    for (double& v : t->data) v = u(rng);
  std::vector<double> h = {0.3, -0.8, 0.5, 0.9, -0.1};

  SUBCASE("hand computation matches") {
    std::vector<char> mask = {1, 1, 1};
    auto q = q_head_forward(p, h, mask.data(), 3);
    for (int a = 0; a < 3; ++a) {
      double expect = 0.0;
      for (int d = 0; d < 4; ++d) {
        double hid = 0.0;
        for (int e = 0; e < 5; ++e)
          hid += p.w1.data[static_cast<size_t>(d * 5 + e)] *
                 h[static_cast<size_t>(e)];
        if (hid < 0.0) hid = 0.0;
        expect += p.w2.data[static_cast<size_t>(a * 4 + d)] * hid;
      }
      CHECK(q[static_cast<size_t>(a)] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  SUBCASE("single valid action dominates regardless of weights") {
    std::vector<char> mask = {0, 1, 0};
    auto q = q_head_forward(p, h, mask.data(), 3);
    CHECK(std::isinf(q[0]));
    CHECK(std::isfinite(q[1]));
    CHECK(std::isinf(q[2]));
  }

  SUBCASE("adding a constant to valid outputs keeps the argmax") {
    std::vector<char> mask = {1, 1, 1};
    auto q1 = q_head_forward(p, h, mask.data(), 3);
    for (double& v : p.b2.data) v += 5.5;
    auto q2 = q_head_forward(p, h, mask.data(), 3);
    auto arg = [](const std::vector<double>& q) {
      return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
    };
    CHECK(arg(q1) == arg(q2));
  }

  SUBCASE("all-invalid mask throws") {
    std::vector<char> mask = {0, 0, 0};
    CHECK_THROWS_AS(q_head_forward(p, h, mask.data(), 3), std::invalid_argument);
  }
}

TEST_CASE("full pipeline gradients match central finite differences") {
  for (std::uint64_t seed = 1; seed <= 22; ++seed) {
    NetConfig cfg = small_config();
    Rng rng(seed);
    auto net = make_gat_lstm_net(cfg, rng);
    Rng wrng(seed * 1000 + 1);
    auto window = random_window(cfg, wrng);
    int action = first_valid_action(cfg, window);
    REQUIRE(action >= 0);
    check_gradients(*net, window, action);
  }
}

TEST_CASE("mlp baseline gradients match central finite differences") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    NetConfig cfg = small_config();
    cfg.mlp_hidden = 7;
    Rng rng(seed);
    auto net = make_mlp_net(cfg, rng);
    Rng wrng(seed * 1000 + 7);
    auto window = random_window(cfg, wrng);
    int action = first_valid_action(cfg, window);
    REQUIRE(action >= 0);
    check_gradients(*net, window, action);
  }
}

TEST_CASE("raw-aggregation pipeline gradients also match finite differences") {
  NetConfig cfg = small_config();
  cfg.aggregate_projected = false;
  cfg.gat_dim = cfg.gat_heads * NetConfig::kFeatDim;
  Rng rng(5);
  auto net = make_gat_lstm_net(cfg, rng);
  Rng wrng(555);
  auto window = random_window(cfg, wrng);
  int action = first_valid_action(cfg, window);
  REQUIRE(action >= 0);
  check_gradients(*net, window, action);
}

TEST_CASE("zero upstream gradient leaves all parameter gradients zero") {
  NetConfig cfg = small_config();
  Rng rng(9);
  auto net = make_gat_lstm_net(cfg, rng);
  Rng wrng(900);
  auto window = random_window(cfg, wrng);
  net->zero_grad();
  net->forward_cached(window.data());
  std::vector<double> dq(static_cast<size_t>(cfg.max_degree), 0.0);
  net->backward_from_cache(dq.data());
  net->for_each_gradient([](const std::string&, const Tensor& g) {
    for (double v : g.data) CHECK(v == 0.0);
  });
}

TEST_CASE("masked action branch carries exactly zero gradient") {
  NetConfig cfg = small_config();
  Rng rng(10);
  auto net = make_gat_lstm_net(cfg, rng);
  Rng wrng(1001);
  auto window = random_window(cfg, wrng);
  ObsLayout L{cfg.max_degree};
  double* last = window.data() + static_cast<size_t>(cfg.window - 1) * L.size();
  last[L.mask(2)] = 0.0;  // force action 2 invalid
  last[L.mask(0)] = 1.0;

  net->zero_grad();
  net->forward_cached(window.data());
  std::vector<double> dq = {0.0, 0.0, 1.0};  // only the masked slot
  net->backward_from_cache(dq.data());
  net->for_each_gradient([](const std::string&, const Tensor& g) {
    for (double v : g.data) CHECK(v == 0.0);
  });
}

TEST_CASE("forward pipeline is bit-stable") {
  NetConfig cfg = small_config();
  Rng rng(21);
  auto net = make_gat_lstm_net(cfg, rng);
  Rng wrng(2100);
  auto window = random_window(cfg, wrng);
  auto q1 = net->q_values(window.data());
  auto q2 = net->q_values(window.data());
  REQUIRE(q1.size() == q2.size());
  for (size_t k = 0; k < q1.size(); ++k) CHECK(q1[k] == q2[k]);
}

TEST_CASE("checkpoint round-trip preserves behavior exactly") {
  NetConfig cfg = small_config();
  Rng rng(33);
  auto net = make_gat_lstm_net(cfg, rng);
  Rng wrng(3300);
  auto window = random_window(cfg, wrng);
  auto q1 = net->q_values(window.data());

  std::stringstream buf;
  net->save(buf);
  auto restored = load_network(buf);
  CHECK(restored->kind() == "gat_lstm");
  auto q2 = restored->q_values(window.data());
  for (size_t k = 0; k < q1.size(); ++k) CHECK(q1[k] == q2[k]);

  Rng rng2(34);
  auto mlp = make_mlp_net(cfg, rng2);
  CHECK(mlp->param_count() != net->param_count());
  std::stringstream buf2;
  mlp->save(buf2);
  auto mlp2 = load_network(buf2);
  CHECK(mlp2->kind() == "mlp");
}
