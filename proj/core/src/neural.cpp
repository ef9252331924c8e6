#include "leoroute/neural.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "leoroute/obs_layout.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace leoroute {

Tensor Tensor::zeros(std::initializer_list<std::size_t> dims) {
  Tensor t;
  t.shape.assign(dims);
  std::size_t n = 1;
  for (std::size_t d : t.shape) n *= d;
  t.data.assign(n, 0.0);
  return t;
}

void NetConfig::validate() const {
  if (max_degree < 1) throw std::invalid_argument("agent.max_degree: must be >= 1");
  if (gat_heads < 1) throw std::invalid_argument("agent.gat_heads: must be >= 1");
  if (gat_dim < 1 || gat_dim % gat_heads != 0)
    throw std::invalid_argument("agent.gat_dim: must be a positive multiple of gat_heads");
  if (lstm_dim < 1) throw std::invalid_argument("agent.lstm_dim: must be >= 1");
  if (qhead_hidden < 1) throw std::invalid_argument("agent.qhead_hidden: must be >= 1");
  if (window < 1) throw std::invalid_argument("agent.window: must be >= 1");
  if (mlp_hidden < 1) throw std::invalid_argument("agent.mlp_hidden: must be >= 1");
  if (leak < 0.0 || leak >= 1.0)
    throw std::invalid_argument("agent.gat_leak: must be in [0, 1)");
  if (!aggregate_projected && gat_dim != gat_heads * kFeatDim)
    throw std::invalid_argument(
        "agent.gat_dim: raw aggregation requires gat_dim == gat_heads * 6");
}

double masked_q_sentinel() { return -std::numeric_limits<double>::infinity(); }

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// y = W x  (W is rows x cols, row-major)
void matvec(const Tensor& w, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  const double* wd = w.data.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = wd + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void matvec_acc(const Tensor& w, const double* x, double* y, std::size_t rows,
                std::size_t cols) {
  const double* wd = w.data.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = wd + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// dx += W^T dy
void matvec_t_acc(const Tensor& w, const double* dy, double* dx,
                  std::size_t rows, std::size_t cols) {
  const double* wd = w.data.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double d = dy[r];
    if (d == 0.0) continue;
    const double* row = wd + r * cols;
    for (std::size_t c = 0; c < cols; ++c) dx[c] += row[c] * d;
  }
}

// dW += dy x^T
void outer_acc(Tensor& dw, const double* dy, const double* x, std::size_t rows,
               std::size_t cols) {
  double* wd = dw.data.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double d = dy[r];
    if (d == 0.0) continue;
    double* row = wd + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += d * x[c];
  }
}

void glorot_init(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (double& v : t.data) v = u(rng);
}

constexpr int kFeat = NetConfig::kFeatDim;

// Splits one observation row into GAT node features.
// self:      [own_queue, dst unit (3), dst distance, 1]
// neighbor k: [delay_k, unit (3), distance, alive]
void extract_features(const NetConfig& cfg, const double* row, double* self_f,
                      double* nb_f, char* mask, int* valid_count) {
  ObsLayout L{cfg.max_degree};
  self_f[0] = row[L.own_queue()];
  for (int d = 0; d < 4; ++d) self_f[1 + d] = row[L.dst() + d];
  self_f[5] = 1.0;
  int valid = 0;
  for (int k = 0; k < cfg.max_degree; ++k) {
    mask[k] = row[L.mask(k)] != 0.0 ? 1 : 0;
    nb_f[k * kFeat + 0] = row[L.delay(k)];
    for (int d = 0; d < 5; ++d) nb_f[k * kFeat + 1 + d] = row[L.topo(k) + d];
    valid += mask[k];
  }
  *valid_count = valid;
}

void ensure_gat_cache(const NetConfig& cfg, GatStepCache& gc) {
  std::size_t h = static_cast<std::size_t>(cfg.gat_heads);
  std::size_t m = static_cast<std::size_t>(cfg.head_dim());
  std::size_t md = static_cast<std::size_t>(cfg.max_degree);
  gc.proj_self.assign(h * m, 0.0);
  gc.proj_nb.assign(h * md * m, 0.0);
  gc.pre.assign(h * md, 0.0);
  gc.alpha.assign(h * md, 0.0);
  gc.valid_count = 0;
}

// Projections + attention coefficients for one ego-star. Requires >= 1 valid
// neighbor.
void gat_project_and_attend(const NetConfig& cfg, const GatParams& p,
                            const double* self_f, const double* nb_f,
                            const char* mask, GatStepCache& gc) {
  int H = cfg.gat_heads, m = cfg.head_dim(), md = cfg.max_degree;
  for (int h = 0; h < H; ++h) {
    double* ps = gc.proj_self.data() + static_cast<std::size_t>(h) * m;
    matvec(p.proj[static_cast<std::size_t>(h)], self_f, ps,
           static_cast<std::size_t>(m), kFeat);
    const Tensor& w = p.attn[static_cast<std::size_t>(h)];
    double self_term = 0.0;
    for (int d = 0; d < m; ++d) self_term += w[static_cast<std::size_t>(d)] * ps[d];

    double max_act = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < md; ++k) {
      if (!mask[k]) {
        gc.pre[static_cast<std::size_t>(h * md + k)] = 0.0;
        gc.alpha[static_cast<std::size_t>(h * md + k)] = 0.0;
        continue;
      }
      double* pn = gc.proj_nb.data() +
                   (static_cast<std::size_t>(h) * md + k) * m;
      matvec(p.proj[static_cast<std::size_t>(h)], nb_f + k * kFeat, pn,
             static_cast<std::size_t>(m), kFeat);
      double pre = self_term;
      for (int d = 0; d < m; ++d)
        pre += w[static_cast<std::size_t>(m + d)] * pn[d];
      gc.pre[static_cast<std::size_t>(h * md + k)] = pre;
      double act = pre > 0.0 ? pre : cfg.leak * pre;
      if (act > max_act) max_act = act;
    }
    double denom = 0.0;
    for (int k = 0; k < md; ++k) {
      if (!mask[k]) continue;
      double pre = gc.pre[static_cast<std::size_t>(h * md + k)];
      double act = pre > 0.0 ? pre : cfg.leak * pre;
      double e = std::exp(act - max_act);
      gc.alpha[static_cast<std::size_t>(h * md + k)] = e;
      denom += e;
    }
    for (int k = 0; k < md; ++k) {
      if (!mask[k]) continue;
      gc.alpha[static_cast<std::size_t>(h * md + k)] /= denom;
    }
  }
}

}  // namespace

std::vector<double> gat_attention(const NetConfig& cfg, const GatParams& p,
                                  const double* self_feat,
                                  const double* neighbor_feats,
                                  const char* mask) {
  int valid = 0;
  for (int k = 0; k < cfg.max_degree; ++k) valid += mask[k] ? 1 : 0;
  if (valid == 0)
    throw std::invalid_argument("gat_attention: no unmasked neighbor");
  GatStepCache gc;
  ensure_gat_cache(cfg, gc);
  gat_project_and_attend(cfg, p, self_feat, neighbor_feats, mask, gc);
  return gc.alpha;
}

std::vector<double> gat_aggregate(const NetConfig& cfg, const GatParams& p,
                                  const std::vector<double>& alphas,
                                  const double* neighbor_feats,
                                  const char* mask) {
  int H = cfg.gat_heads, m = cfg.head_dim(), md = cfg.max_degree;
  int out_dim = cfg.aggregate_projected ? cfg.gat_dim : H * kFeat;
  std::vector<double> z(static_cast<std::size_t>(out_dim), 0.0);
  std::vector<double> pn(static_cast<std::size_t>(m));
  for (int h = 0; h < H; ++h) {
    for (int k = 0; k < md; ++k) {
      if (!mask[k]) continue;
      double a = alphas[static_cast<std::size_t>(h * md + k)];
      if (cfg.aggregate_projected) {
        matvec(p.proj[static_cast<std::size_t>(h)], neighbor_feats + k * kFeat,
               pn.data(), static_cast<std::size_t>(m), kFeat);
        for (int d = 0; d < m; ++d) z[static_cast<std::size_t>(h * m + d)] += a * pn[d];
      } else {
        for (int d = 0; d < kFeat; ++d)
          z[static_cast<std::size_t>(h * kFeat + d)] +=
              a * neighbor_feats[k * kFeat + d];
      }
    }
  }
  return z;
}

LstmState lstm_step(const LstmParams& p, const std::vector<double>& input,
                    const std::vector<double>& h_prev,
                    const std::vector<double>& c_prev) {
  std::size_t H = p.bf.size();
  std::size_t in = input.size();
  LstmState s;
  s.h.resize(H);
  s.c.resize(H);
  std::vector<double> f(H), i(H), o(H), g(H);
  matvec(p.wf, input.data(), f.data(), H, in);
  matvec(p.wi, input.data(), i.data(), H, in);
  matvec(p.wo, input.data(), o.data(), H, in);
  matvec(p.wg, input.data(), g.data(), H, in);
  matvec_acc(p.uf, h_prev.data(), f.data(), H, H);
  matvec_acc(p.ui, h_prev.data(), i.data(), H, H);
  matvec_acc(p.uo, h_prev.data(), o.data(), H, H);
  matvec_acc(p.ug, h_prev.data(), g.data(), H, H);
  for (std::size_t d = 0; d < H; ++d) {
    double fd = sigmoid(f[d] + p.bf[d]);
    double id = sigmoid(i[d] + p.bi[d]);
    double od = sigmoid(o[d] + p.bo[d]);
    double gd = std::tanh(g[d] + p.bg[d]);
    s.c[d] = fd * c_prev[d] + id * gd;
    s.h[d] = od * std::tanh(s.c[d]);
  }
  return s;
}

std::vector<double> q_head_forward(const QHeadParams& p,
                                   const std::vector<double>& hidden,
                                   const char* mask, int num_actions) {
  int valid = 0;
  for (int k = 0; k < num_actions; ++k) valid += mask[k] ? 1 : 0;
  if (valid == 0) throw std::invalid_argument("q_head_forward: no valid action");
  std::size_t nh = p.b1.size();
  std::vector<double> hid(nh);
  matvec(p.w1, hidden.data(), hid.data(), nh, hidden.size());
  for (std::size_t d = 0; d < nh; ++d) {
    hid[d] += p.b1[d];
    if (hid[d] < 0.0) hid[d] = 0.0;
  }
  std::vector<double> q(static_cast<std::size_t>(num_actions));
  matvec(p.w2, hid.data(), q.data(), static_cast<std::size_t>(num_actions), nh);
  for (int k = 0; k < num_actions; ++k) {
    q[static_cast<std::size_t>(k)] += p.b2[static_cast<std::size_t>(k)];
    if (!mask[k]) q[static_cast<std::size_t>(k)] = masked_q_sentinel();
  }
  return q;
}

// ---------------------------------------------------------------------------
// Trainable networks
// ---------------------------------------------------------------------------

namespace {

struct ParamRef {
  std::string name;
  Tensor* param;
  Tensor* grad;
  Tensor* adam_m;
  Tensor* adam_v;
};

constexpr std::uint32_t kCheckpointMagic = 0x4E51524Cu;  // "LRQN"
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::string read_string(std::istream& in) {
  std::uint32_t n = read_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

// Shared bookkeeping: registry-driven updates, sync, io.
class NetBase : public QNetwork {
 public:
  explicit NetBase(const NetConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  const NetConfig& config() const override { return cfg_; }

  void zero_grad() override {
    for (auto& r : refs_) std::fill(r.grad->data.begin(), r.grad->data.end(), 0.0);
  }

  double sgd_update(double lr, double grad_clip) override {
    double scale = clip_scale(grad_clip);
    for (auto& r : refs_) {
      double* p = r.param->data.data();
      const double* g = r.grad->data.data();
      for (std::size_t k = 0; k < r.param->size(); ++k) p[k] -= lr * scale * g[k];
    }
    return last_grad_norm_;
  }

  double adam_update(double lr, double grad_clip) override {
    double scale = clip_scale(grad_clip);
    ++adam_t_;
    double b1c = 1.0 - std::pow(0.9, static_cast<double>(adam_t_));
    double b2c = 1.0 - std::pow(0.999, static_cast<double>(adam_t_));
    for (auto& r : refs_) {
      double* p = r.param->data.data();
      const double* g = r.grad->data.data();
      double* m = r.adam_m->data.data();
      double* v = r.adam_v->data.data();
      for (std::size_t k = 0; k < r.param->size(); ++k) {
        double gk = scale * g[k];
        m[k] = 0.9 * m[k] + 0.1 * gk;
        v[k] = 0.999 * v[k] + 0.001 * gk * gk;
        p[k] -= lr * (m[k] / b1c) / (std::sqrt(v[k] / b2c) + 1e-8);
      }
    }
    return last_grad_norm_;
  }

  void copy_from(const QNetwork& other) override {
    const auto* o = dynamic_cast<const NetBase*>(&other);
    if (o == nullptr || o->kind() != kind() || o->refs_.size() != refs_.size())
      throw std::invalid_argument("copy_from: incompatible network");
    for (std::size_t i = 0; i < refs_.size(); ++i)
      refs_[i].param->data = o->refs_[i].param->data;
  }

  std::size_t param_count() const override {
    std::size_t n = 0;
    for (const auto& r : refs_) n += r.param->size();
    return n;
  }

  void for_each_parameter(
      const std::function<void(const std::string&, Tensor&)>& fn) override {
    for (auto& r : refs_) fn(r.name, *r.param);
  }

  void for_each_gradient(const std::function<void(const std::string&, const Tensor&)>&
                             fn) const override {
    for (const auto& r : refs_) fn(r.name, *r.grad);
  }

  void save(std::ostream& out) const override {
    write_u32(out, kCheckpointMagic);
    write_u32(out, kCheckpointVersion);
    write_string(out, kind());
    write_u32(out, static_cast<std::uint32_t>(cfg_.max_degree));
    write_u32(out, static_cast<std::uint32_t>(cfg_.gat_heads));
    write_u32(out, static_cast<std::uint32_t>(cfg_.gat_dim));
    write_u32(out, static_cast<std::uint32_t>(cfg_.lstm_dim));
    write_u32(out, static_cast<std::uint32_t>(cfg_.qhead_hidden));
    write_u32(out, static_cast<std::uint32_t>(cfg_.window));
    write_u32(out, static_cast<std::uint32_t>(cfg_.mlp_hidden));
    write_u32(out, cfg_.aggregate_projected ? 1 : 0);
    write_f64(out, cfg_.leak);
    write_u32(out, static_cast<std::uint32_t>(refs_.size()));
    for (const auto& r : refs_) {
      write_string(out, r.name);
      write_u32(out, static_cast<std::uint32_t>(r.param->shape.size()));
      for (std::size_t d : r.param->shape) write_u64(out, d);
      for (double v : r.param->data) write_f64(out, v);
    }
  }

  void load_tensors(std::istream& in, std::uint32_t count) {
    if (count != refs_.size())
      throw std::runtime_error("checkpoint: tensor count mismatch");
    for (auto& r : refs_) {
      std::string name = read_string(in);
      if (name != r.name)
        throw std::runtime_error("checkpoint: unexpected tensor '" + name + "'");
      std::uint32_t ndim = read_u32(in);
      std::vector<std::size_t> shape(ndim);
      for (auto& d : shape) d = static_cast<std::size_t>(read_u64(in));
      if (shape != r.param->shape)
        throw std::runtime_error("checkpoint: shape mismatch for '" + name + "'");
      for (double& v : r.param->data) v = read_f64(in);
    }
    if (!in) throw std::runtime_error("checkpoint: truncated file");
  }

 protected:
  void register_tensor(const std::string& name, Tensor* param, Tensor* grad,
                       Tensor* m, Tensor* v) {
    *grad = *param;
    std::fill(grad->data.begin(), grad->data.end(), 0.0);
    *m = *grad;
    *v = *grad;
    refs_.push_back({name, param, grad, m, v});
  }

  double clip_scale(double grad_clip) {
    double sq = 0.0;
    for (const auto& r : refs_)
      for (double g : r.grad->data) sq += g * g;
    last_grad_norm_ = std::sqrt(sq);
    if (grad_clip > 0.0 && last_grad_norm_ > grad_clip)
      return grad_clip / last_grad_norm_;
    return 1.0;
  }

  NetConfig cfg_;
  std::vector<ParamRef> refs_;
  long adam_t_ = 0;
  double last_grad_norm_ = 0.0;
};

// ---------------------------------------------------------------------------

struct GatLstmTensors {
  GatParams gat;
  LstmParams lstm;
  QHeadParams qhead;
};

class GatLstmNet final : public NetBase {
 public:
  GatLstmNet(const NetConfig& cfg, Rng* rng) : NetBase(cfg) {
    shape(p_);
    shape(g_);
    shape(m_);
    shape(v_);
    for (int h = 0; h < cfg_.gat_heads; ++h) {
      auto hs = std::to_string(h);
      std::size_t sh = static_cast<std::size_t>(h);
      register_tensor("gat.proj." + hs, &p_.gat.proj[sh], &g_.gat.proj[sh],
                      &m_.gat.proj[sh], &v_.gat.proj[sh]);
      register_tensor("gat.attn." + hs, &p_.gat.attn[sh], &g_.gat.attn[sh],
                      &m_.gat.attn[sh], &v_.gat.attn[sh]);
    }
    register_tensor("gat.self", &p_.gat.self_proj, &g_.gat.self_proj,
                    &m_.gat.self_proj, &v_.gat.self_proj);
    const char* gate_names[4] = {"f", "i", "o", "g"};
    Tensor LstmParams::* ws[4] = {&LstmParams::wf, &LstmParams::wi,
                                  &LstmParams::wo, &LstmParams::wg};
    Tensor LstmParams::* us[4] = {&LstmParams::uf, &LstmParams::ui,
                                  &LstmParams::uo, &LstmParams::ug};
    Tensor LstmParams::* bs[4] = {&LstmParams::bf, &LstmParams::bi,
                                  &LstmParams::bo, &LstmParams::bg};
    for (int k = 0; k < 4; ++k) {
      std::string n(gate_names[k]);
      register_tensor("lstm.w" + n, &(p_.lstm.*ws[k]), &(g_.lstm.*ws[k]),
                      &(m_.lstm.*ws[k]), &(v_.lstm.*ws[k]));
      register_tensor("lstm.u" + n, &(p_.lstm.*us[k]), &(g_.lstm.*us[k]),
                      &(m_.lstm.*us[k]), &(v_.lstm.*us[k]));
      register_tensor("lstm.b" + n, &(p_.lstm.*bs[k]), &(g_.lstm.*bs[k]),
                      &(m_.lstm.*bs[k]), &(v_.lstm.*bs[k]));
    }
    register_tensor("qhead.w1", &p_.qhead.w1, &g_.qhead.w1, &m_.qhead.w1,
                    &v_.qhead.w1);
    register_tensor("qhead.b1", &p_.qhead.b1, &g_.qhead.b1, &m_.qhead.b1,
                    &v_.qhead.b1);
    register_tensor("qhead.w2", &p_.qhead.w2, &g_.qhead.w2, &m_.qhead.w2,
                    &v_.qhead.w2);
    register_tensor("qhead.b2", &p_.qhead.b2, &g_.qhead.b2, &m_.qhead.b2,
                    &v_.qhead.b2);
    if (rng != nullptr) init_params(*rng);
    cache_.resize_for(cfg_);
  }

  std::string kind() const override { return "gat_lstm"; }

  std::vector<double> q_values(const double* window) const override {
    Cache scratch;
    scratch.resize_for(cfg_);
    run_forward(window, scratch);
    return scratch.q_masked;
  }

  std::vector<double> forward_cached(const double* window) override {
    run_forward(window, cache_);
    return cache_.q_masked;
  }

  void backward_from_cache(const double* dq) override { run_backward(dq); }

  std::unique_ptr<QNetwork> clone() const override {
    auto n = std::make_unique<GatLstmNet>(cfg_, nullptr);
    n->copy_from(*this);
    return n;
  }

 private:
  struct StepCache {
    std::vector<double> self_f;   // feat
    std::vector<double> nb_f;     // md * feat
    std::vector<char> mask;       // md
    int valid_count = 0;
    GatStepCache gat;
    std::vector<double> z;        // gat input to lstm (gat_dim or heads*feat)
    std::vector<double> f, i, o, g, c, tanh_c, h;  // lstm internals
  };
  struct Cache {
    std::vector<StepCache> steps;
    std::vector<double> q_hidden;      // post-relu
    std::vector<char> q_hidden_alive;  // relu gate
    std::vector<double> q_raw;
    std::vector<double> q_masked;

    void resize_for(const NetConfig& cfg) {
      int zdim = cfg.aggregate_projected ? cfg.gat_dim
                                         : cfg.gat_heads * kFeat;
      steps.assign(static_cast<std::size_t>(cfg.window), {});
      for (auto& s : steps) {
        s.self_f.assign(kFeat, 0.0);
        s.nb_f.assign(static_cast<std::size_t>(cfg.max_degree) * kFeat, 0.0);
        s.mask.assign(static_cast<std::size_t>(cfg.max_degree), 0);
        ensure_gat_cache(cfg, s.gat);
        s.z.assign(static_cast<std::size_t>(zdim), 0.0);
        std::size_t H = static_cast<std::size_t>(cfg.lstm_dim);
        for (auto* vec : {&s.f, &s.i, &s.o, &s.g, &s.c, &s.tanh_c, &s.h})
          vec->assign(H, 0.0);
      }
      q_hidden.assign(static_cast<std::size_t>(cfg.qhead_hidden), 0.0);
      q_hidden_alive.assign(static_cast<std::size_t>(cfg.qhead_hidden), 0);
      q_raw.assign(static_cast<std::size_t>(cfg.max_degree), 0.0);
      q_masked.assign(static_cast<std::size_t>(cfg.max_degree), 0.0);
    }
  };

  void shape(GatLstmTensors& t) const {
    std::size_t m = static_cast<std::size_t>(cfg_.head_dim());
    std::size_t H = static_cast<std::size_t>(cfg_.lstm_dim);
    std::size_t zdim = static_cast<std::size_t>(
        cfg_.aggregate_projected ? cfg_.gat_dim : cfg_.gat_heads * kFeat);
    t.gat.proj.clear();
    t.gat.attn.clear();
    for (int h = 0; h < cfg_.gat_heads; ++h) {
      t.gat.proj.push_back(Tensor::zeros({m, kFeat}));
      t.gat.attn.push_back(Tensor::zeros({2 * m}));
    }
    t.gat.self_proj = Tensor::zeros({zdim, kFeat});
    for (auto* w : {&t.lstm.wf, &t.lstm.wi, &t.lstm.wo, &t.lstm.wg})
      *w = Tensor::zeros({H, zdim});
    for (auto* u : {&t.lstm.uf, &t.lstm.ui, &t.lstm.uo, &t.lstm.ug})
      *u = Tensor::zeros({H, H});
    for (auto* b : {&t.lstm.bf, &t.lstm.bi, &t.lstm.bo, &t.lstm.bg})
      *b = Tensor::zeros({H});
    std::size_t nh = static_cast<std::size_t>(cfg_.qhead_hidden);
    std::size_t na = static_cast<std::size_t>(cfg_.max_degree);
    t.qhead.w1 = Tensor::zeros({nh, H});
    t.qhead.b1 = Tensor::zeros({nh});
    t.qhead.w2 = Tensor::zeros({na, nh});
    t.qhead.b2 = Tensor::zeros({na});
  }

  void init_params(Rng& rng) {
    std::size_t m = static_cast<std::size_t>(cfg_.head_dim());
    std::size_t H = static_cast<std::size_t>(cfg_.lstm_dim);
    std::size_t zdim = p_.gat.self_proj.shape[0];
    for (int h = 0; h < cfg_.gat_heads; ++h) {
      glorot_init(p_.gat.proj[static_cast<std::size_t>(h)], kFeat, m, rng);
      glorot_init(p_.gat.attn[static_cast<std::size_t>(h)], 2 * m, 1, rng);
    }
    glorot_init(p_.gat.self_proj, kFeat, zdim, rng);
    for (auto* w : {&p_.lstm.wf, &p_.lstm.wi, &p_.lstm.wo, &p_.lstm.wg})
      glorot_init(*w, zdim, H, rng);
    for (auto* u : {&p_.lstm.uf, &p_.lstm.ui, &p_.lstm.uo, &p_.lstm.ug})
      glorot_init(*u, H, H, rng);
    std::fill(p_.lstm.bf.data.begin(), p_.lstm.bf.data.end(), 1.0);
    glorot_init(p_.qhead.w1, H, static_cast<std::size_t>(cfg_.qhead_hidden), rng);
    glorot_init(p_.qhead.w2, static_cast<std::size_t>(cfg_.qhead_hidden),
                static_cast<std::size_t>(cfg_.max_degree), rng);
  }

  void run_forward(const double* window, Cache& c) const {
    int W = cfg_.window;
    int obs = cfg_.obs_size();
    int md = cfg_.max_degree;
    std::size_t H = static_cast<std::size_t>(cfg_.lstm_dim);
    std::size_t zdim = c.steps[0].z.size();

    const std::vector<double>* h_prev = nullptr;
    const std::vector<double>* c_prev = nullptr;
    for (int t = 0; t < W; ++t) {
      StepCache& s = c.steps[static_cast<std::size_t>(t)];
      const double* row = window + static_cast<std::size_t>(t) * obs;
      extract_features(cfg_, row, s.self_f.data(), s.nb_f.data(), s.mask.data(),
                       &s.valid_count);
      std::fill(s.z.begin(), s.z.end(), 0.0);
      if (s.valid_count > 0) {
        gat_project_and_attend(cfg_, p_.gat, s.self_f.data(), s.nb_f.data(),
                               s.mask.data(), s.gat);
        int m = cfg_.head_dim();
        for (int h = 0; h < cfg_.gat_heads; ++h) {
          for (int k = 0; k < md; ++k) {
            if (!s.mask[static_cast<std::size_t>(k)]) continue;
            double a = s.gat.alpha[static_cast<std::size_t>(h * md + k)];
            if (cfg_.aggregate_projected) {
              const double* pn = s.gat.proj_nb.data() +
                                 (static_cast<std::size_t>(h) * md + k) * m;
              for (int d = 0; d < m; ++d)
                s.z[static_cast<std::size_t>(h * m + d)] += a * pn[d];
            } else {
              const double* xn = s.nb_f.data() + k * kFeat;
              for (int d = 0; d < kFeat; ++d)
                s.z[static_cast<std::size_t>(h * kFeat + d)] += a * xn[d];
            }
          }
        }
      } else {
        // zero-padded history rows reset the attention stage; the self-loop
        // term below still feeds the ego features through
      }
      matvec_acc(p_.gat.self_proj, s.self_f.data(), s.z.data(), zdim, kFeat);

      matvec(p_.lstm.wf, s.z.data(), s.f.data(), H, zdim);
      matvec(p_.lstm.wi, s.z.data(), s.i.data(), H, zdim);
      matvec(p_.lstm.wo, s.z.data(), s.o.data(), H, zdim);
      matvec(p_.lstm.wg, s.z.data(), s.g.data(), H, zdim);
      if (h_prev != nullptr) {
        matvec_acc(p_.lstm.uf, h_prev->data(), s.f.data(), H, H);
        matvec_acc(p_.lstm.ui, h_prev->data(), s.i.data(), H, H);
        matvec_acc(p_.lstm.uo, h_prev->data(), s.o.data(), H, H);
        matvec_acc(p_.lstm.ug, h_prev->data(), s.g.data(), H, H);
      }
      for (std::size_t d = 0; d < H; ++d) {
        s.f[d] = sigmoid(s.f[d] + p_.lstm.bf[d]);
        s.i[d] = sigmoid(s.i[d] + p_.lstm.bi[d]);
        s.o[d] = sigmoid(s.o[d] + p_.lstm.bo[d]);
        s.g[d] = std::tanh(s.g[d] + p_.lstm.bg[d]);
        double cp = c_prev != nullptr ? (*c_prev)[d] : 0.0;
        s.c[d] = s.f[d] * cp + s.i[d] * s.g[d];
        s.tanh_c[d] = std::tanh(s.c[d]);
        s.h[d] = s.o[d] * s.tanh_c[d];
      }
      h_prev = &s.h;
      c_prev = &s.c;
    }

    const StepCache& last = c.steps[static_cast<std::size_t>(W - 1)];
    if (last.valid_count == 0)
      throw std::invalid_argument("q_values: no valid action in final mask");

    std::size_t nh = static_cast<std::size_t>(cfg_.qhead_hidden);
    matvec(p_.qhead.w1, last.h.data(), c.q_hidden.data(), nh, H);
    for (std::size_t d = 0; d < nh; ++d) {
      c.q_hidden[d] += p_.qhead.b1[d];
      c.q_hidden_alive[d] = c.q_hidden[d] > 0.0 ? 1 : 0;
      if (!c.q_hidden_alive[d]) c.q_hidden[d] = 0.0;
    }
    matvec(p_.qhead.w2, c.q_hidden.data(), c.q_raw.data(),
           static_cast<std::size_t>(md), nh);
    for (int k = 0; k < md; ++k) {
      c.q_raw[static_cast<std::size_t>(k)] += p_.qhead.b2[static_cast<std::size_t>(k)];
      c.q_masked[static_cast<std::size_t>(k)] =
          last.mask[static_cast<std::size_t>(k)]
              ? c.q_raw[static_cast<std::size_t>(k)]
              : masked_q_sentinel();
    }
  }

  void run_backward(const double* dq) {
    const Cache& c = cache_;
    int W = cfg_.window;
    int md = cfg_.max_degree;
    int m = cfg_.head_dim();
    std::size_t H = static_cast<std::size_t>(cfg_.lstm_dim);
    std::size_t nh = static_cast<std::size_t>(cfg_.qhead_hidden);
    std::size_t zdim = c.steps[0].z.size();

    const StepCache& last = c.steps[static_cast<std::size_t>(W - 1)];
    // Masked outputs are sentinel-overwritten; their gradient is exactly zero.
    std::vector<double> dq_eff(static_cast<std::size_t>(md), 0.0);
    for (int k = 0; k < md; ++k)
      if (last.mask[static_cast<std::size_t>(k)])
        dq_eff[static_cast<std::size_t>(k)] = dq[k];

    std::vector<double> dhid(nh, 0.0);
    outer_acc(g_.qhead.w2, dq_eff.data(), c.q_hidden.data(),
              static_cast<std::size_t>(md), nh);
    for (int k = 0; k < md; ++k)
      g_.qhead.b2[static_cast<std::size_t>(k)] += dq_eff[static_cast<std::size_t>(k)];
    matvec_t_acc(p_.qhead.w2, dq_eff.data(), dhid.data(),
                 static_cast<std::size_t>(md), nh);
    for (std::size_t d = 0; d < nh; ++d)
      if (!c.q_hidden_alive[d]) dhid[d] = 0.0;

    std::vector<double> dh(H, 0.0);
    outer_acc(g_.qhead.w1, dhid.data(), last.h.data(), nh, H);
    for (std::size_t d = 0; d < nh; ++d) g_.qhead.b1[d] += dhid[d];
    matvec_t_acc(p_.qhead.w1, dhid.data(), dh.data(), nh, H);

    std::vector<double> dc(H, 0.0);
    std::vector<double> dpre_f(H), dpre_i(H), dpre_o(H), dpre_g(H);
    std::vector<double> dz(zdim);
    std::vector<double> dps(static_cast<std::size_t>(m));
    std::vector<double> dpn(static_cast<std::size_t>(m));
    std::vector<double> dalpha(static_cast<std::size_t>(md));

    for (int t = W - 1; t >= 0; --t) {
      const StepCache& s = c.steps[static_cast<std::size_t>(t)];
      const std::vector<double>* h_prev =
          t > 0 ? &c.steps[static_cast<std::size_t>(t - 1)].h : nullptr;
      const std::vector<double>* c_prev =
          t > 0 ? &c.steps[static_cast<std::size_t>(t - 1)].c : nullptr;

      for (std::size_t d = 0; d < H; ++d) {
        double do_ = dh[d] * s.tanh_c[d];
        double dcd = dc[d] + dh[d] * s.o[d] * (1.0 - s.tanh_c[d] * s.tanh_c[d]);
        double cp = c_prev != nullptr ? (*c_prev)[d] : 0.0;
        double df = dcd * cp;
        double di = dcd * s.g[d];
        double dg = dcd * s.i[d];
        dc[d] = dcd * s.f[d];  // flows to c_prev
        dpre_f[d] = df * s.f[d] * (1.0 - s.f[d]);
        dpre_i[d] = di * s.i[d] * (1.0 - s.i[d]);
        dpre_o[d] = do_ * s.o[d] * (1.0 - s.o[d]);
        dpre_g[d] = dg * (1.0 - s.g[d] * s.g[d]);
      }
      outer_acc(g_.lstm.wf, dpre_f.data(), s.z.data(), H, zdim);
      outer_acc(g_.lstm.wi, dpre_i.data(), s.z.data(), H, zdim);
      outer_acc(g_.lstm.wo, dpre_o.data(), s.z.data(), H, zdim);
      outer_acc(g_.lstm.wg, dpre_g.data(), s.z.data(), H, zdim);
      for (std::size_t d = 0; d < H; ++d) {
        g_.lstm.bf[d] += dpre_f[d];
        g_.lstm.bi[d] += dpre_i[d];
        g_.lstm.bo[d] += dpre_o[d];
        g_.lstm.bg[d] += dpre_g[d];
      }
      std::fill(dh.begin(), dh.end(), 0.0);
      if (h_prev != nullptr) {
        outer_acc(g_.lstm.uf, dpre_f.data(), h_prev->data(), H, H);
        outer_acc(g_.lstm.ui, dpre_i.data(), h_prev->data(), H, H);
        outer_acc(g_.lstm.uo, dpre_o.data(), h_prev->data(), H, H);
        outer_acc(g_.lstm.ug, dpre_g.data(), h_prev->data(), H, H);
        matvec_t_acc(p_.lstm.uf, dpre_f.data(), dh.data(), H, H);
        matvec_t_acc(p_.lstm.ui, dpre_i.data(), dh.data(), H, H);
        matvec_t_acc(p_.lstm.uo, dpre_o.data(), dh.data(), H, H);
        matvec_t_acc(p_.lstm.ug, dpre_g.data(), dh.data(), H, H);
      }
      std::fill(dz.begin(), dz.end(), 0.0);
      matvec_t_acc(p_.lstm.wf, dpre_f.data(), dz.data(), H, zdim);
      matvec_t_acc(p_.lstm.wi, dpre_i.data(), dz.data(), H, zdim);
      matvec_t_acc(p_.lstm.wo, dpre_o.data(), dz.data(), H, zdim);
      matvec_t_acc(p_.lstm.wg, dpre_g.data(), dz.data(), H, zdim);

      // GAT backward for this step.
      outer_acc(g_.gat.self_proj, dz.data(), s.self_f.data(), zdim, kFeat);
      if (s.valid_count == 0) continue;
      for (int h = 0; h < cfg_.gat_heads; ++h) {
        std::size_t sh = static_cast<std::size_t>(h);
        const Tensor& w = p_.gat.attn[sh];
        Tensor& dw = g_.gat.attn[sh];
        Tensor& dproj = g_.gat.proj[sh];
        const double* ps = s.gat.proj_self.data() + sh * static_cast<std::size_t>(m);
        std::fill(dps.begin(), dps.end(), 0.0);

        // d alpha from the aggregation target
        double adot = 0.0;
        for (int k = 0; k < md; ++k) {
          if (!s.mask[static_cast<std::size_t>(k)]) {
            dalpha[static_cast<std::size_t>(k)] = 0.0;
            continue;
          }
          double acc = 0.0;
          if (cfg_.aggregate_projected) {
            const double* pn =
                s.gat.proj_nb.data() + (sh * static_cast<std::size_t>(md) + k) * m;
            for (int d = 0; d < m; ++d)
              acc += dz[static_cast<std::size_t>(h * m + d)] * pn[d];
          } else {
            const double* xn = s.nb_f.data() + k * kFeat;
            for (int d = 0; d < kFeat; ++d)
              acc += dz[static_cast<std::size_t>(h * kFeat + d)] * xn[d];
          }
          dalpha[static_cast<std::size_t>(k)] = acc;
          adot += s.gat.alpha[static_cast<std::size_t>(h * md + k)] * acc;
        }

        for (int k = 0; k < md; ++k) {
          if (!s.mask[static_cast<std::size_t>(k)]) continue;
          std::size_t sk = static_cast<std::size_t>(k);
          double a = s.gat.alpha[static_cast<std::size_t>(h * md + k)];
          // softmax backward, then LeakyReLU backward
          double de = a * (dalpha[sk] - adot);
          double pre = s.gat.pre[static_cast<std::size_t>(h * md + k)];
          double dpre = de * (pre > 0.0 ? 1.0 : cfg_.leak);

          const double* pn =
              s.gat.proj_nb.data() + (sh * static_cast<std::size_t>(md) + k) * m;
          for (int d = 0; d < m; ++d) {
            dw[static_cast<std::size_t>(d)] += dpre * ps[d];
            dw[static_cast<std::size_t>(m + d)] += dpre * pn[d];
            dps[static_cast<std::size_t>(d)] += dpre * w[static_cast<std::size_t>(d)];
          }

          // d proj_nb: from aggregation (projected mode) + attention logit
          std::fill(dpn.begin(), dpn.end(), 0.0);
          if (cfg_.aggregate_projected) {
            for (int d = 0; d < m; ++d)
              dpn[static_cast<std::size_t>(d)] +=
                  a * dz[static_cast<std::size_t>(h * m + d)];
          }
          for (int d = 0; d < m; ++d)
            dpn[static_cast<std::size_t>(d)] +=
                dpre * w[static_cast<std::size_t>(m + d)];
          outer_acc(dproj, dpn.data(), s.nb_f.data() + k * kFeat,
                    static_cast<std::size_t>(m), kFeat);
        }
        outer_acc(dproj, dps.data(), s.self_f.data(),
                  static_cast<std::size_t>(m), kFeat);
      }
    }
  }

  GatLstmTensors p_, g_, m_, v_;
  Cache cache_;
};

class MlpNet final : public NetBase {
 public:
  MlpNet(const NetConfig& cfg, Rng* rng) : NetBase(cfg) {
    std::size_t E = static_cast<std::size_t>(cfg_.mlp_hidden);
    std::size_t obs = static_cast<std::size_t>(cfg_.obs_size());
    std::size_t nh = static_cast<std::size_t>(cfg_.qhead_hidden);
    std::size_t na = static_cast<std::size_t>(cfg_.max_degree);
    w1_ = Tensor::zeros({E, obs});
    b1_ = Tensor::zeros({E});
    w2_ = Tensor::zeros({E, E});
    b2_ = Tensor::zeros({E});
    q_.w1 = Tensor::zeros({nh, E});
    q_.b1 = Tensor::zeros({nh});
    q_.w2 = Tensor::zeros({na, nh});
    q_.b2 = Tensor::zeros({na});
    gw1_ = w1_; gb1_ = b1_; gw2_ = w2_; gb2_ = b2_;
    gq_.w1 = q_.w1; gq_.b1 = q_.b1; gq_.w2 = q_.w2; gq_.b2 = q_.b2;
    mw1_ = w1_; mb1_ = b1_; mw2_ = w2_; mb2_ = b2_;
    mq_.w1 = q_.w1; mq_.b1 = q_.b1; mq_.w2 = q_.w2; mq_.b2 = q_.b2;
    vw1_ = w1_; vb1_ = b1_; vw2_ = w2_; vb2_ = b2_;
    vq_.w1 = q_.w1; vq_.b1 = q_.b1; vq_.w2 = q_.w2; vq_.b2 = q_.b2;
    register_tensor("enc.w1", &w1_, &gw1_, &mw1_, &vw1_);
    register_tensor("enc.b1", &b1_, &gb1_, &mb1_, &vb1_);
    register_tensor("enc.w2", &w2_, &gw2_, &mw2_, &vw2_);
    register_tensor("enc.b2", &b2_, &gb2_, &mb2_, &vb2_);
    register_tensor("qhead.w1", &q_.w1, &gq_.w1, &mq_.w1, &vq_.w1);
    register_tensor("qhead.b1", &q_.b1, &gq_.b1, &mq_.b1, &vq_.b1);
    register_tensor("qhead.w2", &q_.w2, &gq_.w2, &mq_.w2, &vq_.w2);
    register_tensor("qhead.b2", &q_.b2, &gq_.b2, &mq_.b2, &vq_.b2);
    if (rng != nullptr) {
      glorot_init(w1_, obs, E, *rng);
      glorot_init(w2_, E, E, *rng);
      glorot_init(q_.w1, E, nh, *rng);
      glorot_init(q_.w2, nh, na, *rng);
    }
    cache_.resize_for(cfg_);
  }

  std::string kind() const override { return "mlp"; }

  std::vector<double> q_values(const double* window) const override {
    Cache scratch;
    scratch.resize_for(cfg_);
    run_forward(window, scratch);
    return scratch.q_masked;
  }

  std::vector<double> forward_cached(const double* window) override {
    run_forward(window, cache_);
    return cache_.q_masked;
  }

  void backward_from_cache(const double* dq) override { run_backward(dq); }

  std::unique_ptr<QNetwork> clone() const override {
    auto n = std::make_unique<MlpNet>(cfg_, nullptr);
    n->copy_from(*this);
    return n;
  }

 private:
  struct Cache {
    std::vector<double> obs;  // last window row
    std::vector<double> e1, e2, hid;
    std::vector<char> a1, a2, ah;
    std::vector<double> q_raw, q_masked;
    std::vector<char> mask;

    void resize_for(const NetConfig& cfg) {
      obs.assign(static_cast<std::size_t>(cfg.obs_size()), 0.0);
      e1.assign(static_cast<std::size_t>(cfg.mlp_hidden), 0.0);
      e2.assign(static_cast<std::size_t>(cfg.mlp_hidden), 0.0);
      hid.assign(static_cast<std::size_t>(cfg.qhead_hidden), 0.0);
      a1.assign(e1.size(), 0);
      a2.assign(e2.size(), 0);
      ah.assign(hid.size(), 0);
      q_raw.assign(static_cast<std::size_t>(cfg.max_degree), 0.0);
      q_masked.assign(static_cast<std::size_t>(cfg.max_degree), 0.0);
      mask.assign(static_cast<std::size_t>(cfg.max_degree), 0);
    }
  };

  void run_forward(const double* window, Cache& c) const {
    ObsLayout L{cfg_.max_degree};
    std::size_t obs = static_cast<std::size_t>(cfg_.obs_size());
    const double* row = window + static_cast<std::size_t>(cfg_.window - 1) * obs;
    std::copy(row, row + obs, c.obs.begin());
    int valid = 0;
    for (int k = 0; k < cfg_.max_degree; ++k) {
      c.mask[static_cast<std::size_t>(k)] = row[L.mask(k)] != 0.0 ? 1 : 0;
      valid += c.mask[static_cast<std::size_t>(k)];
    }
    if (valid == 0)
      throw std::invalid_argument("q_values: no valid action in final mask");

    std::size_t E = static_cast<std::size_t>(cfg_.mlp_hidden);
    matvec(w1_, c.obs.data(), c.e1.data(), E, obs);
    for (std::size_t d = 0; d < E; ++d) {
      c.e1[d] += b1_[d];
      c.a1[d] = c.e1[d] > 0.0 ? 1 : 0;
      if (!c.a1[d]) c.e1[d] = 0.0;
    }
    matvec(w2_, c.e1.data(), c.e2.data(), E, E);
    for (std::size_t d = 0; d < E; ++d) {
      c.e2[d] += b2_[d];
      c.a2[d] = c.e2[d] > 0.0 ? 1 : 0;
      if (!c.a2[d]) c.e2[d] = 0.0;
    }
    std::size_t nh = static_cast<std::size_t>(cfg_.qhead_hidden);
    matvec(q_.w1, c.e2.data(), c.hid.data(), nh, E);
    for (std::size_t d = 0; d < nh; ++d) {
      c.hid[d] += q_.b1[d];
      c.ah[d] = c.hid[d] > 0.0 ? 1 : 0;
      if (!c.ah[d]) c.hid[d] = 0.0;
    }
    matvec(q_.w2, c.hid.data(), c.q_raw.data(),
           static_cast<std::size_t>(cfg_.max_degree), nh);
    for (int k = 0; k < cfg_.max_degree; ++k) {
      std::size_t sk = static_cast<std::size_t>(k);
      c.q_raw[sk] += q_.b2[sk];
      c.q_masked[sk] = c.mask[sk] ? c.q_raw[sk] : masked_q_sentinel();
    }
  }

  void run_backward(const double* dq) {
    const Cache& c = cache_;
    std::size_t E = static_cast<std::size_t>(cfg_.mlp_hidden);
    std::size_t nh = static_cast<std::size_t>(cfg_.qhead_hidden);
    std::size_t na = static_cast<std::size_t>(cfg_.max_degree);
    std::size_t obs = static_cast<std::size_t>(cfg_.obs_size());

    std::vector<double> dq_eff(na, 0.0);
    for (std::size_t k = 0; k < na; ++k)
      if (c.mask[k]) dq_eff[k] = dq[k];

    std::vector<double> dhid(nh, 0.0);
    outer_acc(gq_.w2, dq_eff.data(), c.hid.data(), na, nh);
    for (std::size_t k = 0; k < na; ++k) gq_.b2[k] += dq_eff[k];
    matvec_t_acc(q_.w2, dq_eff.data(), dhid.data(), na, nh);
    for (std::size_t d = 0; d < nh; ++d)
      if (!c.ah[d]) dhid[d] = 0.0;

    std::vector<double> de2(E, 0.0);
    outer_acc(gq_.w1, dhid.data(), c.e2.data(), nh, E);
    for (std::size_t d = 0; d < nh; ++d) gq_.b1[d] += dhid[d];
    matvec_t_acc(q_.w1, dhid.data(), de2.data(), nh, E);
    for (std::size_t d = 0; d < E; ++d)
      if (!c.a2[d]) de2[d] = 0.0;

    std::vector<double> de1(E, 0.0);
    outer_acc(gw2_, de2.data(), c.e1.data(), E, E);
    for (std::size_t d = 0; d < E; ++d) gb2_[d] += de2[d];
    matvec_t_acc(w2_, de2.data(), de1.data(), E, E);
    for (std::size_t d = 0; d < E; ++d)
      if (!c.a1[d]) de1[d] = 0.0;

    outer_acc(gw1_, de1.data(), c.obs.data(), E, obs);
    for (std::size_t d = 0; d < E; ++d) gb1_[d] += de1[d];
  }

  Tensor w1_, b1_, w2_, b2_;
  QHeadParams q_;
  Tensor gw1_, gb1_, gw2_, gb2_;
  QHeadParams gq_;
  Tensor mw1_, mb1_, mw2_, mb2_;
  QHeadParams mq_;
  Tensor vw1_, vb1_, vw2_, vb2_;
  QHeadParams vq_;
  Cache cache_;
};

}  // namespace

std::unique_ptr<QNetwork> make_gat_lstm_net(const NetConfig& cfg, Rng& rng) {
  return std::make_unique<GatLstmNet>(cfg, &rng);
}

std::unique_ptr<QNetwork> make_mlp_net(const NetConfig& cfg, Rng& rng) {
  return std::make_unique<MlpNet>(cfg, &rng);
}

std::unique_ptr<QNetwork> load_network(std::istream& in) {
  if (read_u32(in) != kCheckpointMagic)
    throw std::runtime_error("checkpoint: bad magic");
  if (read_u32(in) != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  std::string kind = read_string(in);
  NetConfig cfg;
  cfg.max_degree = static_cast<int>(read_u32(in));
  cfg.gat_heads = static_cast<int>(read_u32(in));
  cfg.gat_dim = static_cast<int>(read_u32(in));
  cfg.lstm_dim = static_cast<int>(read_u32(in));
  cfg.qhead_hidden = static_cast<int>(read_u32(in));
  cfg.window = static_cast<int>(read_u32(in));
  cfg.mlp_hidden = static_cast<int>(read_u32(in));
  cfg.aggregate_projected = read_u32(in) != 0;
  cfg.leak = read_f64(in);
  std::uint32_t count = read_u32(in);
  if (!in) throw std::runtime_error("checkpoint: truncated header");

  std::unique_ptr<NetBase> net;
  if (kind == "gat_lstm") {
    net = std::make_unique<GatLstmNet>(cfg, nullptr);
  } else if (kind == "mlp") {
    net = std::make_unique<MlpNet>(cfg, nullptr);
  } else {
    throw std::runtime_error("checkpoint: unknown network kind '" + kind + "'");
  }
  net->load_tensors(in, count);
  return net;
}

}  // namespace leoroute
