#include "leoroute/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "leoroute/obs_layout.hpp"

namespace leoroute {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0)
    throw std::invalid_argument("agent.replay_capacity: must be positive");
  ring_.reserve(capacity_ < 4096 ? capacity_ : 4096);
}

void ReplayBuffer::push(Transition t) {
  if (size_ < capacity_) {
    if (head_ >= ring_.size()) {
      ring_.push_back(std::move(t));
    } else {
      ring_[head_] = std::move(t);
    }
    ++size_;
  } else {
    ring_[head_] = std::move(t);  // overwrite the oldest
  }
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
  if (size_ < capacity_) return ring_[i];
  return ring_[(head_ + i) % capacity_];
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: empty");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  return at(pick(rng));
}

void EpsilonSchedule::validate() const {
  if (eps0 < 0.0 || eps0 > 1.0)
    throw std::invalid_argument("agent.eps_initial: must be in [0, 1]");
  if (eps_min < 0.0 || eps_min > eps0)
    throw std::invalid_argument("agent.eps_min: must be in [0, eps_initial]");
  if (k_decay <= 0.0) throw std::invalid_argument("agent.eps_decay_k: must be positive");
  if (factor <= 0.0 || factor > 1.0)
    throw std::invalid_argument("agent.eps_decay_factor: must be in (0, 1]");
}

double EpsilonSchedule::at(long t) const {
  if (t < 0) throw std::invalid_argument("epsilon: t must be >= 0");
  double eps = mode == Mode::kExponential
                   ? eps0 * std::exp(-static_cast<double>(t) / k_decay)
                   : eps0 * std::pow(factor, static_cast<double>(t));
  return eps < eps_min ? eps_min : eps;
}

int select_action_from_q(std::span<const double> q, std::span<const char> mask,
                         double eps, Rng& rng) {
  int valid = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) valid += mask[k] ? 1 : 0;
  if (valid == 0)
    throw std::invalid_argument("select_action: no valid action");

  if (eps > 0.0) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (u01(rng) < eps) {
      std::uniform_int_distribution<int> pick(0, valid - 1);
      int n = pick(rng);
      for (std::size_t k = 0; k < mask.size(); ++k) {
        if (!mask[k]) continue;
        if (n-- == 0) return static_cast<int>(k);
      }
    }
  }
  int best = -1;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    if (best < 0 || q[k] > q[static_cast<std::size_t>(best)])
      best = static_cast<int>(k);  // strict > keeps the lowest index on ties
  }
  return best;
}

int select_action(const QNetwork& net, const double* window, double eps,
                  Rng& rng) {
  const NetConfig& cfg = net.config();
  ObsLayout L{cfg.max_degree};
  const double* last =
      window + static_cast<std::size_t>(cfg.window - 1) * cfg.obs_size();
  std::vector<char> mask(static_cast<std::size_t>(cfg.max_degree));
  for (int k = 0; k < cfg.max_degree; ++k)
    mask[static_cast<std::size_t>(k)] = last[L.mask(k)] != 0.0 ? 1 : 0;
  std::vector<double> q = net.q_values(window);
  return select_action_from_q(q, mask, eps, rng);
}

double td_target(double r, const double* next_window, bool done,
                 const QNetwork& target, double gamma) {
  if (gamma <= 0.0 || gamma >= 1.0)
    throw std::invalid_argument("td_target: gamma must be in (0, 1)");
  if (done) return r;
  std::vector<double> q = target.q_values(next_window);
  double best = -std::numeric_limits<double>::infinity();
  for (double v : q)
    if (v > best) best = v;  // masked slots are -inf
  return r + gamma * best;
}

bool sync_target(const QNetwork& net, QNetwork& target, long step, long period) {
  if (period <= 0) throw std::invalid_argument("sync_target: period must be positive");
  if (step % period != 0) return false;
  target.copy_from(net);
  return true;
}

void TrainerConfig::validate() const {
  if (learning_rate <= 0.0)
    throw std::invalid_argument("agent.learning_rate: must be positive");
  if (gamma <= 0.0 || gamma >= 1.0)
    throw std::invalid_argument("agent.gamma: must be in (0, 1)");
  if (batch_size <= 0) throw std::invalid_argument("agent.batch_size: must be positive");
  if (replay_capacity == 0)
    throw std::invalid_argument("agent.replay_capacity: must be positive");
  if (target_sync_steps <= 0)
    throw std::invalid_argument("agent.target_sync_steps: must be positive");
}

Trainer::Trainer(std::unique_ptr<QNetwork> net, TrainerConfig cfg)
    : net_(std::move(net)), buffer_(cfg.replay_capacity), cfg_(cfg) {
  cfg_.validate();
  target_ = net_->clone();
}

std::optional<TrainResult> Trainer::train_step(Rng& rng) {
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size))
    return std::nullopt;
  std::vector<const Transition*> batch;
  batch.reserve(static_cast<std::size_t>(cfg_.batch_size));
  for (int k = 0; k < cfg_.batch_size; ++k) batch.push_back(&buffer_.sample(rng));
  TrainResult res = train_on_batch(batch);
  ++steps_;
  sync_target(*net_, *target_, steps_, cfg_.target_sync_steps);
  return res;
}

TrainResult Trainer::train_on_batch(std::span<const Transition* const> batch) {
  if (batch.empty()) throw std::invalid_argument("train_on_batch: empty batch");
  net_->zero_grad();
  double inv = 1.0 / static_cast<double>(batch.size());
  TrainResult res;
  std::vector<double> dq(static_cast<std::size_t>(net_->config().max_degree));
  for (const Transition* t : batch) {
    double y = td_target(t->reward, t->next_obs_window.data(), t->done,
                         *target_, cfg_.gamma);
    std::vector<double> q = net_->forward_cached(t->obs_window.data());
    double resid = q[static_cast<std::size_t>(t->action)] - y;
    res.loss += resid * resid * inv;
    res.mean_batch_reward += t->reward * inv;
    std::fill(dq.begin(), dq.end(), 0.0);
    dq[static_cast<std::size_t>(t->action)] = 2.0 * resid * inv;
    net_->backward_from_cache(dq.data());
  }
  res.grad_norm = cfg_.use_adam
                      ? net_->adam_update(cfg_.learning_rate, cfg_.grad_clip)
                      : net_->sgd_update(cfg_.learning_rate, cfg_.grad_clip);
  return res;
}

}  // namespace leoroute
