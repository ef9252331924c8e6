#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "leoroute/rng.hpp"

namespace leoroute {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  static Tensor zeros(std::initializer_list<std::size_t> dims);
  std::size_t size() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

struct NetConfig {
  static constexpr int kFeatDim = 6;  // per-node feature width from ObsLayout

  int max_degree = 4;
  int gat_heads = 4;
  int gat_dim = 64;       // concatenated across heads
  int lstm_dim = 128;
  int qhead_hidden = 64;
  int window = 8;         // LSTM unroll length
  double leak = 0.2;      // LeakyReLU slope inside the attention logit
  bool aggregate_projected = true;  // false = aggregate raw neighbor features
  int mlp_hidden = 128;   // dense-encoder baseline width

  int obs_size() const { return 5 + 7 * max_degree; }
  int head_dim() const { return gat_dim / gat_heads; }
  void validate() const;
};

struct GatParams {
  std::vector<Tensor> proj;  // per head: head_dim x feat
  std::vector<Tensor> attn;  // per head: 2 * head_dim
  Tensor self_proj;          // gat_dim x feat
};

struct LstmParams {
  Tensor wf, wi, wo, wg;  // lstm_dim x input
  Tensor uf, ui, uo, ug;  // lstm_dim x lstm_dim
  Tensor bf, bi, bo, bg;  // lstm_dim
};

struct QHeadParams {
  Tensor w1, b1;  // hidden x lstm_dim, hidden
  Tensor w2, b2;  // actions x hidden, actions
};

// Sentinel for masked action slots.
double masked_q_sentinel();

// --- layer-level operations (also used by the full pipeline) ---

struct GatStepCache {
  std::vector<double> proj_self;  // heads * head_dim
  std::vector<double> proj_nb;    // heads * md * head_dim
  std::vector<double> pre;        // heads * md, attention logits before LeakyReLU
  std::vector<double> alpha;      // heads * md, masked entries exactly 0
  int valid_count = 0;
};

// Attention coefficients per head over unmasked neighbors (softmax of the
// LeakyReLU'd logits). Throws std::invalid_argument when everything is masked.
// Returns heads x max_degree, row-major.
std::vector<double> gat_attention(const NetConfig& cfg, const GatParams& p,
                                  const double* self_feat,
                                  const double* neighbor_feats,
                                  const char* mask);

// Neighbor-only aggregation, heads concatenated: projected features by
// default, raw features when cfg.aggregate_projected is false. The self-loop
// term is applied by the pipeline, not here.
std::vector<double> gat_aggregate(const NetConfig& cfg, const GatParams& p,
                                  const std::vector<double>& alphas,
                                  const double* neighbor_feats,
                                  const char* mask);

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

LstmState lstm_step(const LstmParams& p, const std::vector<double>& input,
                    const std::vector<double>& h_prev,
                    const std::vector<double>& c_prev);

// Action values with masked entries at the sentinel. Throws when no action
// is valid.
std::vector<double> q_head_forward(const QHeadParams& p,
                                   const std::vector<double>& hidden,
                                   const char* mask, int num_actions);

// --- trainable Q-networks ---

class QNetwork {
 public:
  virtual ~QNetwork() = default;

  virtual const NetConfig& config() const = 0;
  virtual std::string kind() const = 0;

  // window points at config().window rows of config().obs_size() doubles.
  virtual std::vector<double> q_values(const double* window) const = 0;

  // Forward keeping the activation tape, then reverse-mode accumulation into
  // the internal gradient buffers.
  virtual std::vector<double> forward_cached(const double* window) = 0;
  virtual void backward_from_cache(const double* dq) = 0;

  virtual void zero_grad() = 0;
  // Returns the pre-clip gradient L2 norm.
  virtual double sgd_update(double lr, double grad_clip) = 0;
  virtual double adam_update(double lr, double grad_clip) = 0;

  virtual void copy_from(const QNetwork& other) = 0;
  virtual std::unique_ptr<QNetwork> clone() const = 0;

  virtual std::size_t param_count() const = 0;
  virtual void for_each_parameter(
      const std::function<void(const std::string&, Tensor&)>& fn) = 0;
  virtual void for_each_gradient(
      const std::function<void(const std::string&, const Tensor&)>& fn) const = 0;

  virtual void save(std::ostream& out) const = 0;
};

std::unique_ptr<QNetwork> make_gat_lstm_net(const NetConfig& cfg, Rng& rng);
std::unique_ptr<QNetwork> make_mlp_net(const NetConfig& cfg, Rng& rng);

// Reads a checkpoint written by QNetwork::save (either kind).
std::unique_ptr<QNetwork> load_network(std::istream& in);

}  // namespace leoroute
