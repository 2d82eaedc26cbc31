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

// Centralized training of the two robots' joint-action Q-networks:
// Stackelberg double deep Q-learning plus the Nash-Q and independent-Q
// baselines.

#ifndef STACKELBERG_LEARNING_H_
#define STACKELBERG_LEARNING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackelberg/environment.h"
#include "stackelberg/games.h"
#include "stackelberg/neural.h"
#include "stackelberg/replay_buffer.h"
#include "stackelberg/task_model.h"

namespace stackelberg {

using QNetwork = QApproximator<float>;
using QMatrix = MatrixX<float>;

enum class Algorithm { kStackelberg, kNash, kIndependent };

// "sg", "nash", "ind".
const char* algorithm_name(Algorithm algorithm);
// Throws std::invalid_argument for unknown names.
Algorithm parse_algorithm(const std::string& name);

struct TrainConfig {
  int episodes = 10000;
  int max_steps = 0;  // 0: use the task's step budget
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;  // linear decay over this share of episodes
  int batch_size = 64;
  int buffer_capacity = 100000;
  double learning_rate = 1e-4;
  double tau = 0.1;
  int target_period = 50;  // C: soft update every C environment steps
  std::vector<int> hidden_sizes = {128, 128};
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void validate() const;
  double epsilon_at(int episode) const;  // episode is 0-based
};

nlohmann::json to_json(const TrainConfig& config);
// Rejects unknown keys; missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);

// One replay record. States are stored as bottom-row vectors and one-hot
// encoded when a batch is assembled.
struct Transition {
  std::vector<SubTaskId> state;
  Action action_leader = kNoOp;
  Action action_follower = kNoOp;
  double reward_leader = 0.0;
  double reward_follower = 0.0;
  std::vector<SubTaskId> next_state;
  bool done = false;
};

struct AgentModel {
  QNetwork online;
  QNetwork target;
  AdamState<float> optimizer;
};

// Online + target networks with identical initial parameters.
AgentModel make_agent(const AssemblyTask& task, const TrainConfig& config, Rng& rng);

struct EquilibriumChoice {
  ActionPair pair;
  bool fallback = false;  // Nash-Q found no pure equilibrium and used the SE
};

// Greedy joint action for the bimatrix game <Q^L(s), Q^F(s)> under each
// algorithm's solution concept.
EquilibriumChoice equilibrium_actions(const QMatrix& q_leader,
                                      const QMatrix& q_follower,
                                      Algorithm algorithm);

// Replaces `greedy` by a uniform draw from the other actions with
// probability epsilon.
Action explore(Action greedy, int n_actions, double epsilon, Rng& rng);

struct ActionSelection {
  JointAction action;
  ActionPair greedy;
  bool fallback = false;
};

// Epsilon-greedy equilibrium action from per-state Q-matrices.
ActionSelection select_actions(const QMatrix& q_leader, const QMatrix& q_follower,
                               double epsilon, Rng& rng, Algorithm algorithm);

ActionSelection select_actions(const QNetwork& leader, const QNetwork& follower,
                               std::span<const SubTaskId> frontier, int n_subtasks,
                               double epsilon, Rng& rng, Algorithm algorithm);

// Stacks one-hot encodings of the given states column by column.
MatrixX<float> encode_batch(std::span<const std::vector<SubTaskId>* const> states,
                            int n_subtasks);

// Selection half of the double-Q target: a' from the online networks only.
// Returns leader-major joint indices, one per column of next_inputs.
std::vector<int> select_next_actions(const QNetwork& online_leader,
                                     const QNetwork& online_follower,
                                     const MatrixX<float>& next_inputs,
                                     Algorithm algorithm);

// Valuation half: Q-hat(s', a') read from a target network only.
VectorX<float> value_at(const QNetwork& target, const MatrixX<float>& next_inputs,
                        std::span<const int> joint_actions);

struct TdTargets {
  VectorX<float> leader;
  VectorX<float> follower;
  std::vector<int> next_actions;
};

// l^i = r^i                                   if the transition is terminal,
// l^i = r^i + gamma * Qhat^i(s', a'_eq)        otherwise,
// where a'_eq is selected by the online networks.
TdTargets compute_td_targets(const AgentModel& leader, const AgentModel& follower,
                             std::span<const Transition* const> batch,
                             int n_subtasks, double gamma, Algorithm algorithm);

struct EpisodeMetrics {
  int episode = 0;  // 1-based
  int steps = 0;
  bool completed = false;
  double cumulative_leader = 0.0;
  double cumulative_follower = 0.0;
  double averaged_leader = 0.0;
  double averaged_follower = 0.0;
  double epsilon = 0.0;
  int equilibrium_fallbacks = 0;
  double wall_seconds = 0.0;  // not part of the reproducible metrics stream
};

// The reproducible part of the record (no wall time).
nlohmann::json to_json(const EpisodeMetrics& metrics);

class Trainer {
 public:
  Trainer(AssemblyTask task, EnvConfig env_config, TrainConfig config,
          Algorithm algorithm);

  EpisodeMetrics run_episode();
  bool finished() const { return episodes_done_ >= config_.episodes; }
  int episodes_done() const { return episodes_done_; }
  long total_steps() const { return total_steps_; }

  const AssemblyTask& task() const { return task_; }
  const EnvConfig& env_config() const { return env_config_; }
  const TrainConfig& config() const { return config_; }
  Algorithm algorithm() const { return algorithm_; }
  const AgentModel& leader() const { return leader_; }
  const AgentModel& follower() const { return follower_; }
  const ReplayBuffer<Transition>& buffer() const { return buffer_; }

  nlohmann::json checkpoint() const;

 private:
  void update_networks();

  AssemblyTask task_;
  EnvConfig env_config_;
  TrainConfig config_;
  Algorithm algorithm_;
  Rng rng_;
  AgentModel leader_;
  AgentModel follower_;
  ReplayBuffer<Transition> buffer_;
  int episodes_done_ = 0;
  long total_steps_ = 0;
};

struct TrainResult {
  AgentModel leader;
  AgentModel follower;
  std::vector<EpisodeMetrics> metrics;
};

using EpisodeCallback = std::function<void(const EpisodeMetrics&, const Trainer&)>;

TrainResult train(const AssemblyTask& task, const EnvConfig& env_config,
                  const TrainConfig& config, Algorithm algorithm,
                  const EpisodeCallback& on_episode = {});

// Loaded view of a trainer checkpoint.
struct Checkpoint {
  Algorithm algorithm = Algorithm::kStackelberg;
  QNetwork leader_online, leader_target, follower_online, follower_target;
  AdamState<float> leader_optimizer, follower_optimizer;
  std::string rng_state;
  long total_steps = 0;
  int episodes_done = 0;
};

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const nlohmann::json& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Greedy decentralized policy: each robot evaluates its own network, and the
// pair plays the algorithm's equilibrium of the resulting bimatrix game.
Policy greedy_policy(const QNetwork& leader, const QNetwork& follower,
                     const AssemblyTask& task, Algorithm algorithm);

struct EvalMetrics {
  int n_episodes = 0;
  double completion_rate = 0.0;
  double mean_steps = 0.0;
  double std_steps = 0.0;
  double mean_averaged_leader = 0.0;
  double std_averaged_leader = 0.0;
  double mean_averaged_follower = 0.0;
  double std_averaged_follower = 0.0;
  std::vector<EpisodeRecord> episodes;
};

// Population mean and standard deviation.
std::pair<double, double> mean_std(std::span<const double> values);

EvalMetrics summarize(std::vector<EpisodeRecord> episodes);

EvalMetrics evaluate(const QNetwork& leader, const QNetwork& follower,
                     const AssemblyTask& task, const EnvConfig& env_config,
                     int n_episodes, Rng& rng,
                     Algorithm algorithm = Algorithm::kStackelberg);

}  // namespace stackelberg

#endif  // STACKELBERG_LEARNING_H_
