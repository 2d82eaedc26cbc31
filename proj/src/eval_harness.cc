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

#include "stackelberg/eval_harness.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace stackelberg {
namespace {

std::vector<bool> mask_to_completed(std::uint64_t mask, int k) {
  std::vector<bool> completed(k + 1, false);
  for (int id = 1; id <= k; ++id) completed[id] = (mask >> (id - 1)) & 1u;
  return completed;
}

std::uint64_t bit(SubTaskId id) {
  return id == kNoSubTask ? 0 : (std::uint64_t{1} << (id - 1));
}

Action column_of(const std::vector<SubTaskId>& frontier, SubTaskId id) {
  if (id == kNoSubTask) return kNoOp;
  for (size_t c = 0; c < frontier.size(); ++c) {
    if (frontier[c] == id) return static_cast<Action>(c + 1);
  }
  return kNoOp;
}

}  // namespace

OracleResult optimal_steps_oracle(const AssemblyTask& task, long max_states) {
  const int k = task.n_subtasks();
  if (k > 64) throw std::invalid_argument("oracle supports at most 64 sub-tasks");
  const std::uint64_t full = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;

  struct Parent {
    std::uint64_t prev;
    ScheduledRound round;
  };
  std::unordered_map<std::uint64_t, Parent> parent;
  std::deque<std::uint64_t> queue;
  parent.emplace(0, Parent{0, {}});
  queue.push_back(0);

  OracleResult result;
  while (!queue.empty()) {
    const std::uint64_t mask = queue.front();
    queue.pop_front();
    if (mask == full) {
      for (std::uint64_t m = mask; m != 0; m = parent.at(m).prev) {
        result.witness.push_back(parent.at(m).round);
      }
      std::reverse(result.witness.begin(), result.witness.end());
      result.steps = static_cast<int>(result.witness.size());
      return result;
    }
    if (++result.states_expanded > max_states) {
      throw OracleBudgetExceeded("oracle search budget of " + std::to_string(max_states) +
                                 " states exceeded");
    }
    const std::vector<SubTaskId> frontier = compute_frontier(task, mask_to_completed(mask, k));
    std::vector<SubTaskId> ids;
    for (SubTaskId id : frontier) {
      if (id != kNoSubTask && std::find(ids.begin(), ids.end(), id) == ids.end()) {
        ids.push_back(id);
      }
    }
    std::vector<SubTaskId> leader_opts = {kNoSubTask};
    std::vector<SubTaskId> follower_opts = {kNoSubTask};
    std::vector<SubTaskId> joint_opts;
    for (SubTaskId id : ids) {
      SubTaskType t = task.type_of(id);
      if (t == SubTaskType::kJoint) joint_opts.push_back(id);
      if (can_perform_alone(Agent::kLeader, t)) leader_opts.push_back(id);
      if (can_perform_alone(Agent::kFollower, t)) follower_opts.push_back(id);
    }

    auto visit = [&](SubTaskId l, SubTaskId f) {
      const std::uint64_t next = mask | bit(l) | bit(f);
      if (next == mask || parent.count(next)) return;
      ScheduledRound round;
      round.leader_subtask = l;
      round.follower_subtask = f;
      round.action = {column_of(frontier, l), column_of(frontier, f)};
      parent.emplace(next, Parent{mask, round});
      queue.push_back(next);
    };
    for (SubTaskId l : leader_opts) {
      for (SubTaskId f : follower_opts) {
        if (l != kNoSubTask && l == f) continue;  // conflict, no progress
        visit(l, f);
      }
    }
    for (SubTaskId j : joint_opts) visit(j, j);
  }
  throw std::logic_error("task cannot be completed under the type rules");
}

bool PerturbationSchedule::forces_noop(Agent agent, int round) const {
  return std::find(entries.begin(), entries.end(), std::make_pair(agent, round)) !=
         entries.end();
}

void PerturbationSchedule::validate() const {
  for (const auto& [agent, round] : entries) {
    if (round < 1) throw std::invalid_argument("perturbation rounds are 1-based");
  }
}

PerturbationSchedule PerturbationSchedule::parse(const std::string& text) {
  PerturbationSchedule schedule;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) {
      throw std::invalid_argument("perturbation entries look like L:3 or F:6, got '" + item + "'");
    }
    std::string who = item.substr(0, colon);
    Agent agent;
    if (who == "L" || who == "l") {
      agent = Agent::kLeader;
    } else if (who == "F" || who == "f") {
      agent = Agent::kFollower;
    } else {
      throw std::invalid_argument("unknown agent '" + who + "' in perturbation schedule");
    }
    int round = 0;
    try {
      size_t used = 0;
      round = std::stoi(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad round in perturbation entry '" + item + "'");
    }
    schedule.entries.emplace_back(agent, round);
  }
  schedule.validate();
  return schedule;
}

std::string PerturbationSchedule::to_string() const {
  std::string out;
  for (const auto& [agent, round] : entries) {
    if (!out.empty()) out += ",";
    out += agent_name(agent) + std::string(":") + std::to_string(round);
  }
  return out;
}

PerturbedMetrics run_perturbed_eval(const QNetwork& leader, const QNetwork& follower,
                                    const AssemblyTask& task,
                                    const PerturbationSchedule& schedule, int n_runs,
                                    EnvConfig env_config, std::uint64_t seed,
                                    Algorithm algorithm) {
  schedule.validate();
  env_config.deterministic = true;
  env_config.validate();
  const Policy planned = greedy_policy(leader, follower, task, algorithm);
  const Policy perturbed = [&](const ChessboardState& state) {
    JointAction a = planned(state);
    const int round = state.step_index + 1;
    if (schedule.forces_noop(Agent::kLeader, round)) a.leader = kNoOp;
    if (schedule.forces_noop(Agent::kFollower, round)) a.follower = kNoOp;
    return a;
  };

  PerturbedMetrics metrics;
  metrics.n_runs = n_runs;
  std::vector<double> steps;
  int completed = 0;
  for (int run = 0; run < n_runs; ++run) {
    Rng rng(seed + static_cast<std::uint64_t>(run));
    PerturbedRun r;
    r.episode = rollout(task, perturbed, env_config, rng);
    double cl = 0.0, cf = 0.0;
    for (const StepRecord& s : r.episode.steps) {
      cl += s.reward_leader;
      cf += s.reward_follower;
      r.cumulative_leader.push_back(cl);
      r.cumulative_follower.push_back(cf);
    }
    steps.push_back(r.episode.completion_steps);
    completed += r.episode.completed ? 1 : 0;
    metrics.runs.push_back(std::move(r));
  }
  if (n_runs > 0) metrics.completion_rate = double(completed) / n_runs;
  std::tie(metrics.mean_steps, metrics.std_steps) = mean_std(steps);
  return metrics;
}

void TaskGenSpec::validate() const {
  if (n_columns < 1) throw std::invalid_argument("n_columns must be positive");
  if (n_subtasks < 1) throw std::invalid_argument("n_subtasks must be positive");
  if (n_subtasks > 64) throw std::invalid_argument("at most 64 sub-tasks are supported");
  if (rows < 0) throw std::invalid_argument("rows must be non-negative");
  if (rows > 0 && static_cast<long>(rows) * n_columns < n_subtasks) {
    throw std::invalid_argument("rows x columns cannot hold the requested sub-tasks");
  }
  double total = 0.0;
  for (double w : type_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("type weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("at least one type weight must be positive");
  if (!(merge_probability >= 0.0 && merge_probability <= 1.0)) {
    throw std::invalid_argument("merge_probability must lie in [0, 1]");
  }
}

int greedy_schedule_length(const AssemblyTask& task) {
  EnvConfig env;
  env.deterministic = true;
  env.max_steps = 4 * task.n_subtasks() + 4;
  Rng rng(0);
  ChessboardState state = initial_state(task);
  while (!is_terminal(state, env)) {
    Action lead = kNoOp, follow = kNoOp, joint = kNoOp;
    SubTaskId lead_id = kNoSubTask;
    // Prefer work only this robot can do, then shared work.
    for (SubTaskType wanted : {SubTaskType::kLeaderOnly, SubTaskType::kEither}) {
      for (int c = 1; c <= task.n_columns() && lead == kNoOp; ++c) {
        SubTaskId id = state.frontier_at(c);
        if (id != kNoSubTask && task.type_of(id) == wanted) {
          lead = c;
          lead_id = id;
        }
      }
    }
    for (SubTaskType wanted : {SubTaskType::kFollowerOnly, SubTaskType::kEither}) {
      for (int c = 1; c <= task.n_columns() && follow == kNoOp; ++c) {
        SubTaskId id = state.frontier_at(c);
        if (id != kNoSubTask && id != lead_id && task.type_of(id) == wanted) follow = c;
      }
    }
    for (int c = 1; c <= task.n_columns() && joint == kNoOp; ++c) {
      SubTaskId id = state.frontier_at(c);
      if (id != kNoSubTask && task.type_of(id) == SubTaskType::kJoint) joint = c;
    }
    JointAction action{lead, follow};
    if (joint != kNoOp && (lead == kNoOp || follow == kNoOp)) action = {joint, joint};
    if (action.leader == kNoOp && action.follower == kNoOp) break;
    state = step(state, task, action, env, rng).next_state;
  }
  return state.all_completed() ? state.step_index : -1;
}

AssemblyTask generate_task(const TaskGenSpec& spec) {
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw InfeasibleSpec(std::string("infeasible task spec: ") + e.what());
  }
  constexpr int kAttempts = 64;
  const int n = spec.n_columns;
  const int k = spec.n_subtasks;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(spec.seed * 1000003ULL + static_cast<std::uint64_t>(attempt));
    std::discrete_distribution<int> pick_type(spec.type_weights.begin(),
                                              spec.type_weights.end());
    // Late attempts stop merging so a tight row budget can still be met.
    const double merge = attempt < kAttempts / 2 ? spec.merge_probability : 0.0;
    std::bernoulli_distribution merge_coin(merge);

    std::vector<SubTask> subtasks;
    std::vector<Placement> placement;
    // cell_owner[row][col - 1]
    std::vector<std::vector<SubTaskId>> cell_owner;
    int row = 0, col = 1;
    for (SubTaskId id = 1; id <= k; ++id) {
      if (col > n) {
        ++row;
        col = 1;
      }
      if (static_cast<int>(cell_owner.size()) <= row) cell_owner.emplace_back(n, kNoSubTask);
      auto type = static_cast<SubTaskType>(pick_type(rng) + 1);
      int width = 1;
      if (type == SubTaskType::kJoint && col < n && merge_coin(rng)) width = 2;
      subtasks.push_back({id, type, "G" + std::to_string(id)});
      placement.push_back({id, row, col, col + width - 1});
      for (int c = col; c < col + width; ++c) cell_owner[row][c - 1] = id;
      col += width;
    }
    if (spec.rows > 0 && row >= spec.rows) continue;

    std::vector<PrecedenceEdge> edges;
    std::set<std::pair<SubTaskId, SubTaskId>> seen;
    for (const Placement& p : placement) {
      if (p.row == 0) continue;
      for (int c = p.col_lo; c <= p.col_hi; ++c) {
        SubTaskId below = cell_owner[p.row - 1][c - 1];
        if (below != kNoSubTask && seen.insert({below, p.id}).second) {
          edges.push_back({below, p.id});
        }
      }
    }
    AssemblyTask task(spec.name, n, std::move(subtasks), std::move(edges),
                      std::move(placement));
    const int needed = greedy_schedule_length(task);
    if (needed > 0 && needed <= default_max_steps(task)) return task;
  }
  throw InfeasibleSpec("no feasible task found for the spec within the retry budget");
}

nlohmann::json to_json(const ResultRecord& r) {
  return {{"task", r.task},
          {"algorithm", r.algorithm},
          {"seed", r.seed},
          {"metric", r.metric},
          {"value", r.value}};
}

std::vector<TableRow> aggregate_results(const std::vector<ResultRecord>& records) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>>
      values;
  for (const ResultRecord& r : records) {
    auto key = std::make_pair(r.task, r.algorithm);
    if (!values.count(key)) order.push_back(key);
    values[key][r.metric].push_back(r.value);
  }
  auto cell = [](const std::vector<double>& v) {
    TableCell c;
    std::tie(c.mean, c.std) = mean_std(v);
    c.n = static_cast<int>(v.size());
    return c;
  };
  std::vector<TableRow> table;
  for (const auto& key : order) {
    auto& m = values[key];
    TableRow row;
    row.task = key.first;
    row.algorithm = key.second;
    row.steps = cell(m[kMetricSteps]);
    row.reward_leader = cell(m[kMetricRewardLeader]);
    row.reward_follower = cell(m[kMetricRewardFollower]);
    row.deterministic_steps = cell(m[kMetricDeterministicSteps]);
    table.push_back(row);
  }
  return table;
}

std::string render_table(const std::vector<TableRow>& table) {
  auto fmt = [](const TableCell& c, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f(%.*f)", digits, c.mean, digits + 2, c.std);
    return std::string(buf);
  };
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %-6s %-16s %-16s %-16s %-16s\n", "task", "algo",
                "steps", "reward_l", "reward_f", "det_steps");
  out << line;
  for (const TableRow& r : table) {
    std::string algo = r.algorithm;
    std::transform(algo.begin(), algo.end(), algo.begin(), ::toupper);
    std::snprintf(line, sizeof(line), "%-16s %-6s %-16s %-16s %-16s %-16s\n",
                  r.task.c_str(), algo.c_str(), fmt(r.steps, 1).c_str(),
                  fmt(r.reward_leader, 3).c_str(), fmt(r.reward_follower, 3).c_str(),
                  fmt(r.deterministic_steps, 1).c_str());
    out << line;
  }
  return out.str();
}

SuiteResults run_experiment_suite(const SuiteConfig& config) {
  struct Cell {
    const SuiteTask* task;
    Algorithm algorithm;
    std::uint64_t seed;
    std::vector<ResultRecord> records;
    EvalMetrics eval;
    EvalMetrics deterministic;
  };
  std::vector<Cell> cells;
  for (const SuiteTask& t : config.tasks) {
    for (Algorithm a : config.algorithms) {
      for (std::uint64_t s : config.seeds) cells.push_back({&t, a, s, {}, {}, {}});
    }
  }

  auto run_cell = [&](Cell& cell) {
    const AssemblyTask& task = cell.task->task;
    TrainConfig tc = config.train;
    tc.seed = cell.seed;
    EnvConfig env = config.env;
    env.max_steps = tc.max_steps > 0 ? tc.max_steps : default_max_steps(task);
    TrainResult trained = train(task, env, tc, cell.algorithm);

    Rng eval_rng(cell.seed + 0x9E3779B97F4A7C15ULL);
    cell.eval = evaluate(trained.leader.online, trained.follower.online, task, env,
                         config.eval_episodes, eval_rng, cell.algorithm);
    EnvConfig det = env;
    det.deterministic = true;
    Rng det_rng(cell.seed);
    cell.deterministic = evaluate(trained.leader.online, trained.follower.online, task, det,
                                  1, det_rng, cell.algorithm);

    const size_t tail = std::min<size_t>(100, trained.metrics.size());
    double tail_steps = 0.0;
    for (size_t i = trained.metrics.size() - tail; i < trained.metrics.size(); ++i) {
      tail_steps += trained.metrics[i].steps;
    }
    tail_steps /= static_cast<double>(std::max<size_t>(1, tail));

    const std::string algo = algorithm_name(cell.algorithm);
    auto add = [&](const char* metric, double value) {
      cell.records.push_back({cell.task->label, algo, cell.seed, metric, value});
    };
    add(kMetricSteps, cell.eval.mean_steps);
    add(kMetricRewardLeader, cell.eval.mean_averaged_leader);
    add(kMetricRewardFollower, cell.eval.mean_averaged_follower);
    add(kMetricDeterministicSteps, cell.deterministic.mean_steps);
    add(kMetricTrainFinalSteps, tail_steps);
  };

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
  };
  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(cells.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SuiteResults results;
  for (const Cell& c : cells) {
    results.records.insert(results.records.end(), c.records.begin(), c.records.end());
  }
  results.table = aggregate_results(results.records);

  if (!config.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir / "logs");
    std::ofstream jsonl(config.output_dir / "results.jsonl");
    for (const ResultRecord& r : results.records) jsonl << to_json(r).dump() << "\n";
    std::ofstream txt(config.output_dir / "table.txt");
    txt << render_table(results.table);
    for (const Cell& c : cells) {
      const std::string stem = c.task->label + "_" + algorithm_name(c.algorithm) + "_seed" +
                               std::to_string(c.seed);
      std::ofstream log(config.output_dir / "logs" / (stem + ".jsonl"));
      for (const EpisodeRecord& e : c.eval.episodes) write_episode_log(log, e);
      std::ofstream det_log(config.output_dir / "logs" / (stem + "_det.jsonl"));
      for (const EpisodeRecord& e : c.deterministic.episodes) write_episode_log(det_log, e);
    }
  }
  return results;
}

}  // namespace stackelberg
