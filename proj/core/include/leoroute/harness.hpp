#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leoroute/config.hpp"
#include "leoroute/engine.hpp"
#include "leoroute/metrics.hpp"
#include "leoroute/policies.hpp"

namespace leoroute {

struct RunResult {
  RunMetrics metrics;
  Totals totals;
  std::vector<TrainLogRow> training_log;
  long decisions = 0;
  long disconnected_slots = 0;
};

// Policy instance for the configured kind, seeded from run.seed (and loaded
// from run.checkpoint when set).
std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg);

// Full loop: propagate -> snapshot -> observe -> act -> forward -> learn,
// episodes x slots, metrics over the post-warmup slots of every episode.
// Writes summary/training/slot CSVs (and a checkpoint when training a
// learning policy) under run.out_dir unless it is empty.
RunResult run_experiment(const ExperimentConfig& cfg);

// One run per load with identical seeds; only lambda0 differs between cells.
// Cells execute concurrently; the combined table keeps the given load order.
std::vector<RunMetrics> load_sweep(const ExperimentConfig& base,
                                   const std::vector<double>& loads_mbps);

// Deterministic shortest round-trip formatting for CSV doubles.
std::string format_double(double v);

void write_summary_csv(std::ostream& out, std::span<const RunMetrics> rows);
std::vector<RunMetrics> parse_summary_csv(std::istream& in);

void write_training_log_csv(std::ostream& out, std::span<const TrainLogRow> rows);

void write_slot_log_csv(std::ostream& out, std::span<const SlotStats> slots);
void write_arrivals_csv(std::ostream& out, std::span<const SlotStats> slots);

void write_green_csv(
    std::ostream& out,
    std::span<const std::pair<std::string, GreenReport>> rows);

// One positions file and one edge list file per slot under `dir`.
void dump_topology_csvs(const Constellation& c, long slots,
                        const std::string& dir);

}  // namespace leoroute
