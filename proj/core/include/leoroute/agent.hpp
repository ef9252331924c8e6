#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "leoroute/neural.hpp"
#include "leoroute/rng.hpp"

namespace leoroute {

struct Transition {
  std::vector<double> obs_window;       // window * obs_size, front zero-padded
  int action = 0;                       // neighbor slot index
  double reward = 0.0;
  std::vector<double> next_obs_window;  // zeros when done
  bool done = false;
};

// Fixed-capacity ring, strictly FIFO eviction, uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  // Logical index: 0 is the oldest element.
  const Transition& at(std::size_t i) const;
  const Transition& sample(Rng& rng) const;

 private:
  std::vector<Transition> ring_;
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write position
  std::size_t size_ = 0;
};

struct EpsilonSchedule {
  enum class Mode { kExponential, kMultiplicative };

  double eps0 = 1.0;
  double eps_min = 0.01;
  Mode mode = Mode::kExponential;
  double k_decay = 199.5;  // e^(-1/199.5) == 0.995 per step
  double factor = 0.995;

  double at(long t) const;
  void validate() const;
};

// Epsilon-greedy over the valid actions; greedy ties break to the lowest
// index. Throws when no action is valid.
int select_action_from_q(std::span<const double> q, std::span<const char> mask,
                         double eps, Rng& rng);

// Same, with q from the network and the mask taken from the final window row.
int select_action(const QNetwork& net, const double* window, double eps,
                  Rng& rng);

// y = r if done, else r + gamma * max over valid a' of the target network.
double td_target(double r, const double* next_window, bool done,
                 const QNetwork& target, double gamma);

// Copies net into target exactly when step % period == 0; returns whether the
// copy happened.
bool sync_target(const QNetwork& net, QNetwork& target, long step, long period);

struct TrainerConfig {
  double learning_rate = 1e-4;
  double gamma = 0.99;
  int batch_size = 128;
  std::size_t replay_capacity = 100000;
  long target_sync_steps = 200;
  double grad_clip = 10.0;
  bool use_adam = false;

  void validate() const;
};

struct TrainResult {
  double loss = 0.0;
  double mean_batch_reward = 0.0;
  double grad_norm = 0.0;
};

class Trainer {
 public:
  Trainer(std::unique_ptr<QNetwork> net, TrainerConfig cfg);

  QNetwork& net() { return *net_; }
  const QNetwork& net() const { return *net_; }
  const QNetwork& target() const { return *target_; }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  long train_steps() const { return steps_; }
  const TrainerConfig& config() const { return cfg_; }

  // One mini-batch update from the buffer; no-op (nullopt) while the buffer
  // holds fewer than batch_size transitions.
  std::optional<TrainResult> train_step(Rng& rng);

  // Gradient step on an explicit batch (no sampling, no target sync).
  TrainResult train_on_batch(std::span<const Transition* const> batch);

 private:
  std::unique_ptr<QNetwork> net_;
  std::unique_ptr<QNetwork> target_;
  ReplayBuffer buffer_;
  TrainerConfig cfg_;
  long steps_ = 0;
};

}  // namespace leoroute
