// Copyright 2026 The Stackelberg Assembly Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment harness: optimal-schedule oracle, perturbation runs, random
// task generation and the multi-seed comparison suite.

#ifndef STACKELBERG_EVAL_HARNESS_H_
#define STACKELBERG_EVAL_HARNESS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stackelberg/environment.h"
#include "stackelberg/learning.h"
#include "stackelberg/task_model.h"

namespace stackelberg {

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScheduledRound {
  JointAction action;              // columns on the board at that round
  SubTaskId leader_subtask = kNoSubTask;
  SubTaskId follower_subtask = kNoSubTask;
};

struct OracleResult {
  int steps = 0;
  std::vector<ScheduledRound> witness;
  long states_expanded = 0;
};

// Minimum number of rounds to finish the task with every attempt succeeding.
// Breadth-first search over completed sets; each round the leader and the
// follower each take at most one sub-task they can do alone, or both take
// the same joint sub-task. Throws OracleBudgetExceeded after `max_states`
// expansions and std::invalid_argument for tasks with more than 64 sub-tasks.
OracleResult optimal_steps_oracle(const AssemblyTask& task, long max_states = 5'000'000);

// Rounds (1-based) at which an agent's planned action is replaced by a no-op.
struct PerturbationSchedule {
  std::vector<std::pair<Agent, int>> entries;

  bool forces_noop(Agent agent, int round) const;
  void validate() const;
  // "L:1,L:4,F:6,F:8"; an empty string is the empty schedule.
  static PerturbationSchedule parse(const std::string& text);
  std::string to_string() const;
};

struct PerturbedRun {
  EpisodeRecord episode;
  std::vector<double> cumulative_leader;    // after each round
  std::vector<double> cumulative_follower;
};

struct PerturbedMetrics {
  int n_runs = 0;
  double completion_rate = 0.0;
  double mean_steps = 0.0;
  double std_steps = 0.0;
  std::vector<PerturbedRun> runs;
};

// Greedy rollouts in the deterministic environment with scheduled no-ops.
// `env_config` supplies rewards and the step budget; determinism is forced.
PerturbedMetrics run_perturbed_eval(const QNetwork& leader, const QNetwork& follower,
                                    const AssemblyTask& task,
                                    const PerturbationSchedule& schedule, int n_runs,
                                    EnvConfig env_config, std::uint64_t seed = 0,
                                    Algorithm algorithm = Algorithm::kStackelberg);

struct TaskGenSpec {
  std::string name = "generated";
  int n_columns = 4;
  int n_subtasks = 18;
  // Relative weights of types 1..4; the default mirrors the bracket task mix.
  std::array<double, 4> type_weights = {4.0, 4.0, 8.0, 2.0};
  int rows = 0;  // 0: as many as needed
  double merge_probability = 0.5;  // chance a joint sub-task spans two columns
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

class InfeasibleSpec : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Random stacked chessboard with exactly n_subtasks sub-tasks. Deterministic
// in the spec. Throws InfeasibleSpec when no valid task is found within the
// retry budget.
AssemblyTask generate_task(const TaskGenSpec& spec);

// Deterministic heuristic schedule used as a generation-time completability
// check; returns the number of rounds it needs.
int greedy_schedule_length(const AssemblyTask& task);

struct SuiteTask {
  std::string label;
  AssemblyTask task;
};

struct SuiteConfig {
  std::vector<SuiteTask> tasks;
  std::vector<Algorithm> algorithms = {Algorithm::kStackelberg, Algorithm::kNash,
                                       Algorithm::kIndependent};
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  TrainConfig train;            // seed is overridden per cell
  EnvConfig env;                // max_steps is taken per task
  int eval_episodes = 10;
  int threads = 1;
  std::filesystem::path output_dir;  // empty: nothing written
};

struct ResultRecord {
  std::string task;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

nlohmann::json to_json(const ResultRecord& r);

struct TableCell {
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

struct TableRow {
  std::string task;
  std::string algorithm;
  TableCell steps;
  TableCell reward_leader;
  TableCell reward_follower;
  TableCell deterministic_steps;
};

struct SuiteResults {
  std::vector<ResultRecord> records;
  std::vector<TableRow> table;
};

// Metric names written per (task, algorithm, seed) cell.
inline constexpr const char* kMetricSteps = "steps";
inline constexpr const char* kMetricRewardLeader = "reward_leader";
inline constexpr const char* kMetricRewardFollower = "reward_follower";
inline constexpr const char* kMetricDeterministicSteps = "deterministic_steps";
inline constexpr const char* kMetricTrainFinalSteps = "train_final100_steps";

// Mean (std) across seeds for each (task, algorithm), in first-seen order.
std::vector<TableRow> aggregate_results(const std::vector<ResultRecord>& records);
std::string render_table(const std::vector<TableRow>& table);

// Trains every (task, algorithm, seed) cell, evaluates the learned greedy
// policy, and aggregates. With an output directory it writes results.jsonl,
// table.txt and per-cell episode logs under logs/ (<task>_<algo>_seed<k>.jsonl
// for the stochastic evaluation, ..._det.jsonl for the deterministic one).
SuiteResults run_experiment_suite(const SuiteConfig& config);

}  // namespace stackelberg

#endif  // STACKELBERG_EVAL_HARNESS_H_
