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

#ifndef STACKELBERG_ENVIRONMENT_H_
#define STACKELBERG_ENVIRONMENT_H_

#include <array>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackelberg/task_model.h"

namespace stackelberg {

using Rng = std::mt19937_64;

struct EnvConfig {
  double p_individual = 0.9;
  double p_cooperative = 0.7;
  double r_cop = 2.0;
  double r_ind = 1.0;
  double r_cost = -1.0;
  int max_steps = 40;
  bool deterministic = false;  // forces both success probabilities to 1

  double individual_probability() const { return deterministic ? 1.0 : p_individual; }
  double cooperative_probability() const { return deterministic ? 1.0 : p_cooperative; }

  // Throws std::invalid_argument.
  void validate() const;
};

// Default configuration for a task: paper rewards and probabilities with the
// task's own step budget.
EnvConfig default_env_config(const AssemblyTask& task);

nlohmann::json to_json(const EnvConfig& config);
// Rejects unknown keys; missing keys keep the values in `base`.
EnvConfig env_config_from_json(const nlohmann::json& j, EnvConfig base = {});

struct JointAction {
  Action leader = kNoOp;
  Action follower = kNoOp;
  bool operator==(const JointAction&) const = default;
};

// Which reward rule scored an agent on a step.
enum class RewardRule {
  kCooperative,  // both on the same joint sub-task: r_cop each
  kIndividual,   // right-type individual sub-task: r_ind
  kInvalid,      // wrong type, joint sub-task alone, or empty column: r_cost
  kConflict,     // both on the same non-joint sub-task: r_cost each
  kBothIdle,     // both no-op: r_cost / 2 each
  kSoloIdle,     // this agent idles while the other acts: 0
};

const char* rule_name(RewardRule rule);

enum class StepEvent {
  kCompleted,
  kFailedRoll,
  kWrongType,
  kConflict,
  kBlocked,
  kIdle,
  kJointSuccess,
  kJointFail,
};

const char* event_name(StepEvent event);

// The rng-free part of a step: rewards, rules and the completion attempts.
struct ScoredAction {
  std::array<double, 2> rewards{};      // indexed by Agent
  std::array<RewardRule, 2> rules{};
  std::array<SubTaskId, 2> targets{};   // sub-task under each agent's column
  // Sub-tasks that may complete this step with their success probability.
  std::vector<std::pair<SubTaskId, double>> attempts;
};

ScoredAction score_joint_action(const ChessboardState& state,
                                const AssemblyTask& task,
                                const JointAction& action,
                                const EnvConfig& config);

struct StepOutcome {
  double reward_leader = 0.0;
  double reward_follower = 0.0;
  ChessboardState next_state;
  bool done = false;
  std::array<StepEvent, 2> events{};
};

bool is_terminal(const ChessboardState& state, const EnvConfig& config);

// Throws std::logic_error when `state` is already terminal and
// std::out_of_range for actions outside {0..n}.
StepOutcome step(const ChessboardState& state, const AssemblyTask& task,
                 const JointAction& action, const EnvConfig& config, Rng& rng);

struct StepRecord {
  int step = 0;  // 1-based index of the round
  ChessboardState state;
  JointAction action;
  double reward_leader = 0.0;
  double reward_follower = 0.0;
  std::array<StepEvent, 2> events{};
  ChessboardState next_state;
  bool done = false;
};

struct EpisodeRecord {
  std::vector<StepRecord> steps;
  int completion_steps = 0;
  bool completed = false;  // every sub-task finished before the budget ran out
  double cumulative_leader = 0.0;
  double cumulative_follower = 0.0;

  double averaged_leader() const;
  double averaged_follower() const;
};

using Policy = std::function<JointAction(const ChessboardState&)>;

EpisodeRecord rollout(const AssemblyTask& task, const Policy& policy,
                      const EnvConfig& config, Rng& rng);

// One JSON object per line: step, state, actions, rewards, events,
// next_state, done.
nlohmann::json step_record_to_json(const StepRecord& record);
void write_episode_log(std::ostream& out, const EpisodeRecord& episode);

}  // namespace stackelberg

#endif  // STACKELBERG_ENVIRONMENT_H_
