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

#include "stackelberg/learning.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stackelberg {
namespace {

template <typename Derived>
Index argmax_lowest(const Eigen::DenseBase<Derived>& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

nlohmann::json agent_json(const QNetwork& online, const QNetwork& target,
                          const AdamState<float>& optimizer) {
  return {{"online", to_json(online)},
          {"target", to_json(target)},
          {"optimizer", to_json(optimizer)}};
}

}  // namespace

const char* algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kStackelberg: return "sg";
    case Algorithm::kNash: return "nash";
    case Algorithm::kIndependent: return "ind";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "sg" || name == "stackelberg") return Algorithm::kStackelberg;
  if (name == "nash") return Algorithm::kNash;
  if (name == "ind" || name == "independent") return Algorithm::kIndependent;
  throw std::invalid_argument("unknown algorithm '" + name + "' (expected sg, nash or ind)");
}

void TrainConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("episodes must be positive");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be non-negative");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(epsilon_start) || !unit(epsilon_end)) {
    throw std::invalid_argument("epsilon bounds must lie in [0, 1]");
  }
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0)) {
    throw std::invalid_argument("epsilon_decay_fraction must lie in (0, 1]");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (buffer_capacity < 1) throw std::invalid_argument("buffer_capacity must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!unit(tau)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (target_period < 1) throw std::invalid_argument("target_period must be positive");
  for (int h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("hidden sizes must be positive");
  }
}

double TrainConfig::epsilon_at(int episode) const {
  double horizon = epsilon_decay_fraction * episodes;
  double progress = horizon > 0.0 ? std::min(1.0, episode / horizon) : 1.0;
  return epsilon_start + (epsilon_end - epsilon_start) * progress;
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"episodes", c.episodes},
          {"max_steps", c.max_steps},
          {"gamma", c.gamma},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"epsilon_decay_fraction", c.epsilon_decay_fraction},
          {"batch_size", c.batch_size},
          {"buffer_capacity", c.buffer_capacity},
          {"learning_rate", c.learning_rate},
          {"tau", c.tau},
          {"target_period", c.target_period},
          {"hidden_sizes", c.hidden_sizes},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  static const std::set<std::string> kKnown = {
      "episodes", "max_steps", "gamma", "epsilon_start", "epsilon_end",
      "epsilon_decay_fraction", "batch_size", "buffer_capacity", "learning_rate",
      "tau", "target_period", "hidden_sizes", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) throw std::invalid_argument("unknown train config key: " + key);
  }
  c.episodes = j.value("episodes", c.episodes);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.gamma = j.value("gamma", c.gamma);
  c.epsilon_start = j.value("epsilon_start", c.epsilon_start);
  c.epsilon_end = j.value("epsilon_end", c.epsilon_end);
  c.epsilon_decay_fraction = j.value("epsilon_decay_fraction", c.epsilon_decay_fraction);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.tau = j.value("tau", c.tau);
  c.target_period = j.value("target_period", c.target_period);
  c.hidden_sizes = j.value("hidden_sizes", c.hidden_sizes);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

AgentModel make_agent(const AssemblyTask& task, const TrainConfig& config, Rng& rng) {
  std::vector<int> sizes;
  sizes.push_back(encoding_size(task.n_columns(), task.n_subtasks()));
  sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
  sizes.push_back((task.n_columns() + 1) * (task.n_columns() + 1));
  AgentModel agent;
  agent.online = QNetwork::glorot(sizes, rng);
  agent.target = agent.online;
  agent.optimizer = AdamState<float>(agent.online, config.learning_rate);
  return agent;
}

EquilibriumChoice equilibrium_actions(const QMatrix& q_leader, const QMatrix& q_follower,
                                      Algorithm algorithm) {
  EquilibriumChoice choice;
  switch (algorithm) {
    case Algorithm::kStackelberg: {
      // Decentralized execution is a two-phase exchange. Phase 1, leader:
      // with the follower's Q^F(s, ., .) in hand, solve the bilevel problem
      // and announce a^L. Phase 2, follower: observe the announced a^L and
      // best-respond with its own Q^F.
      const Index leader = stackelberg_equilibrium(q_leader, q_follower).leader;
      const Index follower = follower_best_response(q_follower, leader);
      choice.pair = {leader, follower};
      break;
    }
    case Algorithm::kNash: {
      // Simultaneous play: both robots solve the same shared game.
      if (auto ne = select_nash_equilibrium(q_leader, q_follower)) {
        choice.pair = *ne;
      } else {
        choice.pair = stackelberg_equilibrium(q_leader, q_follower);
        choice.fallback = true;
      }
      break;
    }
    case Algorithm::kIndependent: {
      // Each robot maximizes its own joint Q over the partner's action.
      choice.pair.leader = argmax_lowest(q_leader.rowwise().maxCoeff());
      choice.pair.follower = argmax_lowest(q_follower.colwise().maxCoeff().transpose());
      break;
    }
  }
  return choice;
}

Action explore(Action greedy, int n_actions, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (n_actions < 2 || !(unit(rng) < epsilon)) return greedy;
  std::uniform_int_distribution<int> other(0, n_actions - 2);
  int a = other(rng);
  return a < greedy ? a : a + 1;
}

ActionSelection select_actions(const QMatrix& q_leader, const QMatrix& q_follower,
                               double epsilon, Rng& rng, Algorithm algorithm) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  EquilibriumChoice eq = equilibrium_actions(q_leader, q_follower, algorithm);
  ActionSelection sel;
  sel.greedy = eq.pair;
  sel.fallback = eq.fallback;
  sel.action.leader = explore(static_cast<Action>(eq.pair.leader),
                              static_cast<int>(q_leader.rows()), epsilon, rng);
  sel.action.follower = explore(static_cast<Action>(eq.pair.follower),
                                static_cast<int>(q_leader.cols()), epsilon, rng);
  return sel;
}

ActionSelection select_actions(const QNetwork& leader, const QNetwork& follower,
                               std::span<const SubTaskId> frontier, int n_subtasks,
                               double epsilon, Rng& rng, Algorithm algorithm) {
  VectorX<float> x = encode_state<float>(frontier, n_subtasks);
  return select_actions(q_matrix(leader, x), q_matrix(follower, x), epsilon, rng,
                        algorithm);
}

MatrixX<float> encode_batch(std::span<const std::vector<SubTaskId>* const> states,
                            int n_subtasks) {
  if (states.empty()) return {};
  const int block = n_subtasks + 1;
  const Index n_columns = static_cast<Index>(states.front()->size());
  MatrixX<float> x = MatrixX<float>::Zero(n_columns * block, static_cast<Index>(states.size()));
  for (size_t j = 0; j < states.size(); ++j) {
    const auto& frontier = *states[j];
    for (Index c = 0; c < n_columns; ++c) {
      x(c * block + frontier[c], static_cast<Index>(j)) = 1.0f;
    }
  }
  return x;
}

std::vector<int> select_next_actions(const QNetwork& online_leader,
                                     const QNetwork& online_follower,
                                     const MatrixX<float>& next_inputs,
                                     Algorithm algorithm) {
  const int m = online_leader.n_actions();
  const MatrixX<float> out_l = forward(online_leader, next_inputs);
  const MatrixX<float> out_f = forward(online_follower, next_inputs);
  std::vector<int> joint(static_cast<size_t>(next_inputs.cols()));
  for (Index j = 0; j < next_inputs.cols(); ++j) {
    ActionPair p = equilibrium_actions(q_matrix_from_output(out_l, j, m),
                                       q_matrix_from_output(out_f, j, m), algorithm)
                       .pair;
    joint[j] = joint_index(static_cast<int>(p.leader), static_cast<int>(p.follower), m);
  }
  return joint;
}

VectorX<float> value_at(const QNetwork& target, const MatrixX<float>& next_inputs,
                        std::span<const int> joint_actions) {
  const MatrixX<float> out = forward(target, next_inputs);
  VectorX<float> values(next_inputs.cols());
  for (Index j = 0; j < next_inputs.cols(); ++j) values(j) = out(joint_actions[j], j);
  return values;
}

TdTargets compute_td_targets(const AgentModel& leader, const AgentModel& follower,
                             std::span<const Transition* const> batch, int n_subtasks,
                             double gamma, Algorithm algorithm) {
  std::vector<const std::vector<SubTaskId>*> next;
  next.reserve(batch.size());
  for (const Transition* t : batch) next.push_back(&t->next_state);
  const MatrixX<float> next_inputs = encode_batch(next, n_subtasks);

  TdTargets targets;
  targets.next_actions =
      select_next_actions(leader.online, follower.online, next_inputs, algorithm);
  const VectorX<float> future_l = value_at(leader.target, next_inputs, targets.next_actions);
  const VectorX<float> future_f = value_at(follower.target, next_inputs, targets.next_actions);

  const Index b = static_cast<Index>(batch.size());
  targets.leader.resize(b);
  targets.follower.resize(b);
  const float g = static_cast<float>(gamma);
  for (Index j = 0; j < b; ++j) {
    const Transition& t = *batch[j];
    const float keep = t.done ? 0.0f : g;
    targets.leader(j) = static_cast<float>(t.reward_leader) + keep * future_l(j);
    targets.follower(j) = static_cast<float>(t.reward_follower) + keep * future_f(j);
  }
  return targets;
}

nlohmann::json to_json(const EpisodeMetrics& m) {
  return {{"episode", m.episode},
          {"steps", m.steps},
          {"completed", m.completed},
          {"cumulative_leader", m.cumulative_leader},
          {"cumulative_follower", m.cumulative_follower},
          {"averaged_leader", m.averaged_leader},
          {"averaged_follower", m.averaged_follower},
          {"epsilon", m.epsilon},
          {"equilibrium_fallbacks", m.equilibrium_fallbacks}};
}

Trainer::Trainer(AssemblyTask task, EnvConfig env_config, TrainConfig config,
                 Algorithm algorithm)
    : task_(std::move(task)),
      env_config_(env_config),
      config_(std::move(config)),
      algorithm_(algorithm),
      rng_(config_.seed),
      buffer_(static_cast<size_t>(std::max(1, config_.buffer_capacity))) {
  config_.validate();
  if (config_.max_steps > 0) env_config_.max_steps = config_.max_steps;
  env_config_.validate();
  leader_ = make_agent(task_, config_, rng_);
  follower_ = make_agent(task_, config_, rng_);
}

EpisodeMetrics Trainer::run_episode() {
  if (finished()) throw std::logic_error("training already finished");
  const auto start = std::chrono::steady_clock::now();
  EpisodeMetrics metrics;
  metrics.episode = episodes_done_ + 1;
  metrics.epsilon = config_.epsilon_at(episodes_done_);

  ChessboardState state = initial_state(task_);
  while (!is_terminal(state, env_config_)) {
    ActionSelection sel = select_actions(leader_.online, follower_.online, state.frontier,
                                         task_.n_subtasks(), metrics.epsilon, rng_,
                                         algorithm_);
    if (sel.fallback) ++metrics.equilibrium_fallbacks;
    StepOutcome outcome = step(state, task_, sel.action, env_config_, rng_);
    buffer_.push({state.frontier, sel.action.leader, sel.action.follower,
                  outcome.reward_leader, outcome.reward_follower,
                  outcome.next_state.frontier, outcome.done});
    metrics.cumulative_leader += outcome.reward_leader;
    metrics.cumulative_follower += outcome.reward_follower;
    state = std::move(outcome.next_state);

    ++total_steps_;
    if (buffer_.size() >= static_cast<size_t>(config_.batch_size)) update_networks();
    if (total_steps_ % config_.target_period == 0) {
      soft_update(leader_.target, leader_.online, config_.tau);
      soft_update(follower_.target, follower_.online, config_.tau);
    }
  }
  metrics.steps = state.step_index;
  metrics.completed = state.all_completed();
  metrics.averaged_leader = metrics.cumulative_leader / metrics.steps;
  metrics.averaged_follower = metrics.cumulative_follower / metrics.steps;
  ++episodes_done_;
  metrics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return metrics;
}

void Trainer::update_networks() {
  const auto batch = buffer_.sample(static_cast<size_t>(config_.batch_size), rng_);
  std::vector<const std::vector<SubTaskId>*> states;
  states.reserve(batch.size());
  for (const Transition* t : batch) states.push_back(&t->state);
  const MatrixX<float> inputs = encode_batch(states, task_.n_subtasks());

  // Both targets come from the networks as they were before this update.
  TdTargets targets = compute_td_targets(leader_, follower_, batch, task_.n_subtasks(),
                                         config_.gamma, algorithm_);
  const int m = leader_.online.n_actions();
  std::vector<int> joint;
  joint.reserve(batch.size());
  for (const Transition* t : batch) {
    joint.push_back(joint_index(t->action_leader, t->action_follower, m));
  }
  auto grad_l = td_gradient(leader_.online, inputs, std::span<const int>(joint), targets.leader);
  auto grad_f = td_gradient(follower_.online, inputs, std::span<const int>(joint), targets.follower);
  optimizer_step(leader_.online, grad_l.grads, leader_.optimizer);
  optimizer_step(follower_.online, grad_f.grads, follower_.optimizer);
}

nlohmann::json Trainer::checkpoint() const {
  std::ostringstream rng_state;
  rng_state << rng_;
  return {
      {"format", "stackelberg-checkpoint"},
      {"version", 1},
      {"algorithm", algorithm_name(algorithm_)},
      {"total_steps", total_steps_},
      {"episodes_done", episodes_done_},
      {"rng_state", rng_state.str()},
      {"leader", agent_json(leader_.online, leader_.target, leader_.optimizer)},
      {"follower", agent_json(follower_.online, follower_.target, follower_.optimizer)},
  };
}

nlohmann::json checkpoint_to_json(const Checkpoint& ck) {
  return {
      {"format", "stackelberg-checkpoint"},
      {"version", 1},
      {"algorithm", algorithm_name(ck.algorithm)},
      {"total_steps", ck.total_steps},
      {"episodes_done", ck.episodes_done},
      {"rng_state", ck.rng_state},
      {"leader", agent_json(ck.leader_online, ck.leader_target, ck.leader_optimizer)},
      {"follower", agent_json(ck.follower_online, ck.follower_target, ck.follower_optimizer)},
  };
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "stackelberg-checkpoint") {
      throw std::runtime_error("not a checkpoint document");
    }
    if (j.at("version").get<int>() != 1) {
      throw std::runtime_error("unsupported checkpoint version");
    }
    Checkpoint ck;
    ck.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    ck.total_steps = j.at("total_steps").get<long>();
    ck.episodes_done = j.at("episodes_done").get<int>();
    ck.rng_state = j.at("rng_state").get<std::string>();
    const auto& l = j.at("leader");
    const auto& f = j.at("follower");
    ck.leader_online = network_from_json<float>(l.at("online"));
    ck.leader_target = network_from_json<float>(l.at("target"));
    ck.leader_optimizer = adam_from_json<float>(l.at("optimizer"));
    ck.follower_online = network_from_json<float>(f.at("online"));
    ck.follower_target = network_from_json<float>(f.at("target"));
    ck.follower_optimizer = adam_from_json<float>(f.at("optimizer"));
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const nlohmann::json& checkpoint, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << checkpoint.dump() << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

TrainResult train(const AssemblyTask& task, const EnvConfig& env_config,
                  const TrainConfig& config, Algorithm algorithm,
                  const EpisodeCallback& on_episode) {
  Trainer trainer(task, env_config, config, algorithm);
  TrainResult result;
  result.metrics.reserve(static_cast<size_t>(config.episodes));
  while (!trainer.finished()) {
    result.metrics.push_back(trainer.run_episode());
    if (on_episode) on_episode(result.metrics.back(), trainer);
  }
  result.leader = trainer.leader();
  result.follower = trainer.follower();
  return result;
}

Policy greedy_policy(const QNetwork& leader, const QNetwork& follower,
                     const AssemblyTask& task, Algorithm algorithm) {
  const int k = task.n_subtasks();
  return [leader, follower, k, algorithm](const ChessboardState& state) {
    VectorX<float> x = encode_state<float>(state.frontier, k);
    ActionPair p = equilibrium_actions(q_matrix(leader, x), q_matrix(follower, x), algorithm).pair;
    return JointAction{static_cast<Action>(p.leader), static_cast<Action>(p.follower)};
  };
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

EvalMetrics summarize(std::vector<EpisodeRecord> episodes) {
  EvalMetrics m;
  m.n_episodes = static_cast<int>(episodes.size());
  std::vector<double> steps, avg_l, avg_f;
  int completed = 0;
  for (const EpisodeRecord& e : episodes) {
    steps.push_back(e.completion_steps);
    avg_l.push_back(e.averaged_leader());
    avg_f.push_back(e.averaged_follower());
    completed += e.completed ? 1 : 0;
  }
  if (!episodes.empty()) m.completion_rate = double(completed) / double(episodes.size());
  std::tie(m.mean_steps, m.std_steps) = mean_std(steps);
  std::tie(m.mean_averaged_leader, m.std_averaged_leader) = mean_std(avg_l);
  std::tie(m.mean_averaged_follower, m.std_averaged_follower) = mean_std(avg_f);
  m.episodes = std::move(episodes);
  return m;
}

EvalMetrics evaluate(const QNetwork& leader, const QNetwork& follower,
                     const AssemblyTask& task, const EnvConfig& env_config,
                     int n_episodes, Rng& rng, Algorithm algorithm) {
  Policy policy = greedy_policy(leader, follower, task, algorithm);
  std::vector<EpisodeRecord> episodes;
  for (int i = 0; i < n_episodes; ++i) {
    episodes.push_back(rollout(task, policy, env_config, rng));
  }
  return summarize(std::move(episodes));
}

}  // namespace stackelberg
