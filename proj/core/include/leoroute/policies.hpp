#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "leoroute/agent.hpp"
#include "leoroute/engine.hpp"

namespace leoroute {

class RandomPolicy final : public Policy {
 public:
  const char* name() const override { return "random"; }
  int decide(const DecisionContext& dc, Rng& rng) override;
};

// All-pairs next hops under edge weight prop + trans, optionally plus the
// receiving node's queueing estimate; -1 where the destination is
// unreachable. Recomputed per snapshot by DijkstraPolicy.
std::vector<std::vector<int>> compute_next_hops(
    const TopologySnapshot& snap, const LinkParams& link,
    int packet_size_bytes, const std::vector<long>* queue_len);

class DijkstraPolicy final : public Policy {
 public:
  DijkstraPolicy(LinkParams link, int packet_size_bytes, bool queue_aware)
      : link_(link), packet_size_bytes_(packet_size_bytes),
        queue_aware_(queue_aware) {}

  const char* name() const override { return "dijkstra"; }
  void begin_slot(const SlotContext& ctx) override;
  int decide(const DecisionContext& dc, Rng& rng) override;

 private:
  LinkParams link_;
  int packet_size_bytes_;
  bool queue_aware_;
  std::vector<std::vector<int>> next_hop_;
};

struct TrainLogRow {
  long step = 0;
  double epsilon = 0.0;
  double loss = 0.0;
  double mean_reward = 0.0;
  std::size_t buffer_size = 0;
};

struct DqnPolicyConfig {
  TrainerConfig trainer;
  EpsilonSchedule eps;
  long train_every_slots = 1;
  bool learning = true;
  double eval_epsilon = 0.0;
};

// The shared-parameter agent: every node reads one theta snapshot within a
// slot, transitions funnel into one replay buffer, and updates happen between
// slots.
class DqnPolicy final : public Policy {
 public:
  DqnPolicy(std::unique_ptr<QNetwork> net, DqnPolicyConfig cfg,
            std::uint64_t seed, std::string policy_name);

  const char* name() const override { return name_.c_str(); }
  int decide(const DecisionContext& dc, Rng& rng) override;
  void observe_transition(Transition&& tr) override;
  void end_slot(const SlotContext& ctx) override;

  double current_epsilon() const;
  long global_slot() const { return global_slot_; }
  Trainer& trainer() { return trainer_; }
  const Trainer& trainer() const { return trainer_; }
  const std::vector<TrainLogRow>& training_log() const { return log_; }
  void set_learning(bool learning) { cfg_.learning = learning; }

  void save_checkpoint(std::ostream& out) const;

 private:
  Trainer trainer_;
  DqnPolicyConfig cfg_;
  std::string name_;
  Rng replay_rng_;
  long global_slot_ = 0;
  std::vector<TrainLogRow> log_;
};

}  // namespace leoroute
