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

#include "stackelberg/environment.h"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace stackelberg {
namespace {

constexpr int kL = static_cast<int>(Agent::kLeader);
constexpr int kF = static_cast<int>(Agent::kFollower);

SubTaskId target_of(const ChessboardState& state, Action a) {
  return a == kNoOp ? kNoSubTask : state.frontier_at(a);
}

void score_alone(Agent agent, SubTaskId id, const AssemblyTask& task,
                 const EnvConfig& config, ScoredAction& out) {
  int i = static_cast<int>(agent);
  if (id != kNoSubTask && can_perform_alone(agent, task.type_of(id))) {
    out.rules[i] = RewardRule::kIndividual;
    out.rewards[i] = config.r_ind;
    out.attempts.emplace_back(id, config.individual_probability());
  } else {
    out.rules[i] = RewardRule::kInvalid;
    out.rewards[i] = config.r_cost;
  }
}

}  // namespace

void EnvConfig::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(p_individual) || !in_unit(p_cooperative)) {
    throw std::invalid_argument("success probabilities must lie in [0, 1]");
  }
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

EnvConfig default_env_config(const AssemblyTask& task) {
  EnvConfig config;
  config.max_steps = default_max_steps(task);
  return config;
}

nlohmann::json to_json(const EnvConfig& c) {
  return {{"p_individual", c.p_individual},
          {"p_cooperative", c.p_cooperative},
          {"r_cop", c.r_cop},
          {"r_ind", c.r_ind},
          {"r_cost", c.r_cost},
          {"max_steps", c.max_steps},
          {"deterministic", c.deterministic}};
}

EnvConfig env_config_from_json(const nlohmann::json& j, EnvConfig c) {
  static const char* kKnown[] = {"p_individual", "p_cooperative", "r_cop",   "r_ind",
                                 "r_cost",       "max_steps",     "deterministic"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw std::invalid_argument("unknown env config key: " + key);
    }
  }
  c.p_individual = j.value("p_individual", c.p_individual);
  c.p_cooperative = j.value("p_cooperative", c.p_cooperative);
  c.r_cop = j.value("r_cop", c.r_cop);
  c.r_ind = j.value("r_ind", c.r_ind);
  c.r_cost = j.value("r_cost", c.r_cost);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.deterministic = j.value("deterministic", c.deterministic);
  c.validate();
  return c;
}

const char* rule_name(RewardRule rule) {
  switch (rule) {
    case RewardRule::kCooperative: return "cooperative";
    case RewardRule::kIndividual: return "individual";
    case RewardRule::kInvalid: return "invalid";
    case RewardRule::kConflict: return "conflict";
    case RewardRule::kBothIdle: return "both-idle";
    case RewardRule::kSoloIdle: return "solo-idle";
  }
  return "?";
}

const char* event_name(StepEvent event) {
  switch (event) {
    case StepEvent::kCompleted: return "completed";
    case StepEvent::kFailedRoll: return "failed-roll";
    case StepEvent::kWrongType: return "wrong-type";
    case StepEvent::kConflict: return "conflict";
    case StepEvent::kBlocked: return "blocked";
    case StepEvent::kIdle: return "idle";
    case StepEvent::kJointSuccess: return "joint-success";
    case StepEvent::kJointFail: return "joint-fail";
  }
  return "?";
}

ScoredAction score_joint_action(const ChessboardState& state,
                                const AssemblyTask& task,
                                const JointAction& action,
                                const EnvConfig& config) {
  for (Action a : {action.leader, action.follower}) {
    if (a < kNoOp || a > task.n_columns()) {
      throw std::out_of_range("action " + std::to_string(a) + " outside 0.." +
                              std::to_string(task.n_columns()));
    }
  }
  ScoredAction out;
  out.targets[kL] = target_of(state, action.leader);
  out.targets[kF] = target_of(state, action.follower);
  const bool leader_idle = action.leader == kNoOp;
  const bool follower_idle = action.follower == kNoOp;

  if (leader_idle && follower_idle) {
    out.rules = {RewardRule::kBothIdle, RewardRule::kBothIdle};
    out.rewards = {config.r_cost / 2.0, config.r_cost / 2.0};
    return out;
  }
  if (leader_idle || follower_idle) {
    Agent actor = leader_idle ? Agent::kFollower : Agent::kLeader;
    int idle = leader_idle ? kL : kF;
    out.rules[idle] = RewardRule::kSoloIdle;
    out.rewards[idle] = 0.0;
    score_alone(actor, out.targets[static_cast<int>(actor)], task, config, out);
    return out;
  }

  const SubTaskId id = out.targets[kL];
  if (id != kNoSubTask && id == out.targets[kF]) {
    // Same sub-task, possibly through different columns of a merged block.
    if (task.type_of(id) == SubTaskType::kJoint) {
      out.rules = {RewardRule::kCooperative, RewardRule::kCooperative};
      out.rewards = {config.r_cop, config.r_cop};
      out.attempts.emplace_back(id, config.cooperative_probability());
    } else {
      out.rules = {RewardRule::kConflict, RewardRule::kConflict};
      out.rewards = {config.r_cost, config.r_cost};
    }
    return out;
  }
  score_alone(Agent::kLeader, out.targets[kL], task, config, out);
  score_alone(Agent::kFollower, out.targets[kF], task, config, out);
  return out;
}

bool is_terminal(const ChessboardState& state, const EnvConfig& config) {
  return state.all_completed() || state.step_index >= config.max_steps;
}

StepOutcome step(const ChessboardState& state, const AssemblyTask& task,
                 const JointAction& action, const EnvConfig& config, Rng& rng) {
  if (is_terminal(state, config)) {
    throw std::logic_error("cannot step a terminal state");
  }
  ScoredAction scored = score_joint_action(state, task, action, config);

  // One uniform draw per attempt, in attempt order, even when p == 1, so the
  // rng stream does not depend on the probabilities.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StepOutcome outcome;
  outcome.next_state = state;
  std::vector<std::pair<SubTaskId, bool>> rolled;
  for (const auto& [id, p] : scored.attempts) {
    bool success = unit(rng) < p;
    rolled.emplace_back(id, success);
    if (success) outcome.next_state = complete_subtask(outcome.next_state, task, id);
  }
  auto succeeded = [&](SubTaskId id) {
    for (const auto& [rid, ok] : rolled) {
      if (rid == id) return ok;
    }
    return false;
  };

  for (int i : {kL, kF}) {
    switch (scored.rules[i]) {
      case RewardRule::kCooperative:
        outcome.events[i] = succeeded(scored.targets[i]) ? StepEvent::kJointSuccess
                                                         : StepEvent::kJointFail;
        break;
      case RewardRule::kIndividual:
        outcome.events[i] = succeeded(scored.targets[i]) ? StepEvent::kCompleted
                                                         : StepEvent::kFailedRoll;
        break;
      case RewardRule::kInvalid:
        outcome.events[i] = scored.targets[i] == kNoSubTask ? StepEvent::kBlocked
                                                            : StepEvent::kWrongType;
        break;
      case RewardRule::kConflict:
        outcome.events[i] = StepEvent::kConflict;
        break;
      case RewardRule::kBothIdle:
      case RewardRule::kSoloIdle:
        outcome.events[i] = StepEvent::kIdle;
        break;
    }
  }
  outcome.reward_leader = scored.rewards[kL];
  outcome.reward_follower = scored.rewards[kF];
  outcome.next_state.step_index = state.step_index + 1;
  outcome.done = is_terminal(outcome.next_state, config);
  return outcome;
}

double EpisodeRecord::averaged_leader() const {
  return completion_steps > 0 ? cumulative_leader / completion_steps : 0.0;
}

double EpisodeRecord::averaged_follower() const {
  return completion_steps > 0 ? cumulative_follower / completion_steps : 0.0;
}

EpisodeRecord rollout(const AssemblyTask& task, const Policy& policy,
                      const EnvConfig& config, Rng& rng) {
  EpisodeRecord episode;
  ChessboardState state = initial_state(task);
  while (!is_terminal(state, config)) {
    JointAction action = policy(state);
    StepOutcome outcome = step(state, task, action, config, rng);
    StepRecord record;
    record.step = outcome.next_state.step_index;
    record.state = state;
    record.action = action;
    record.reward_leader = outcome.reward_leader;
    record.reward_follower = outcome.reward_follower;
    record.events = outcome.events;
    record.next_state = outcome.next_state;
    record.done = outcome.done;
    episode.cumulative_leader += outcome.reward_leader;
    episode.cumulative_follower += outcome.reward_follower;
    episode.steps.push_back(std::move(record));
    state = std::move(outcome.next_state);
  }
  episode.completion_steps = state.step_index;
  episode.completed = state.all_completed();
  return episode;
}

nlohmann::json step_record_to_json(const StepRecord& r) {
  return {
      {"step", r.step},
      {"state", r.state.frontier},
      {"actions", {r.action.leader, r.action.follower}},
      {"rewards", {r.reward_leader, r.reward_follower}},
      {"events", {event_name(r.events[kL]), event_name(r.events[kF])}},
      {"next_state", r.next_state.frontier},
      {"done", r.done},
  };
}

void write_episode_log(std::ostream& out, const EpisodeRecord& episode) {
  for (const StepRecord& r : episode.steps) {
    out << step_record_to_json(r).dump() << "\n";
  }
}

}  // namespace stackelberg
