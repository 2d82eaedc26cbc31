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

#include "stackelberg/task_model.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace stackelberg {
namespace {

std::string join_ids(const std::vector<SubTaskId>& ids) {
  std::ostringstream out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out << ", ";
    out << ids[i];
  }
  return out.str();
}

[[noreturn]] void fail(const std::string& what, std::vector<SubTaskId> ids) {
  if (!ids.empty()) {
    throw TaskValidationError(what + " (ids: " + join_ids(ids) + ")",
                              std::move(ids));
  }
  throw TaskValidationError(what, {});
}

// Returns one directed cycle, or an empty vector when the graph is acyclic.
std::vector<SubTaskId> find_cycle(
    int n, const std::vector<std::vector<SubTaskId>>& succs) {
  enum Mark { kWhite, kGrey, kBlack };
  std::vector<Mark> mark(n + 1, kWhite);
  std::vector<SubTaskId> path;
  std::vector<SubTaskId> cycle;

  std::function<bool(SubTaskId)> visit = [&](SubTaskId u) {
    mark[u] = kGrey;
    path.push_back(u);
    for (SubTaskId v : succs[u - 1]) {
      if (mark[v] == kGrey) {
        auto it = std::find(path.begin(), path.end(), v);
        cycle.assign(it, path.end());
        return true;
      }
      if (mark[v] == kWhite && visit(v)) return true;
    }
    path.pop_back();
    mark[u] = kBlack;
    return false;
  };
  for (SubTaskId u = 1; u <= n; ++u) {
    if (mark[u] == kWhite && visit(u)) return cycle;
  }
  return {};
}

}  // namespace

const char* agent_name(Agent agent) {
  return agent == Agent::kLeader ? "L" : "F";
}

bool can_participate(Agent agent, SubTaskType type) {
  if (type == SubTaskType::kJoint) return true;
  return can_perform_alone(agent, type);
}

bool can_perform_alone(Agent agent, SubTaskType type) {
  switch (type) {
    case SubTaskType::kLeaderOnly:
      return agent == Agent::kLeader;
    case SubTaskType::kFollowerOnly:
      return agent == Agent::kFollower;
    case SubTaskType::kEither:
      return true;
    case SubTaskType::kJoint:
      return false;
  }
  return false;
}

AssemblyTask::AssemblyTask(std::string name, int n_columns,
                           std::vector<SubTask> subtasks,
                           std::vector<PrecedenceEdge> edges,
                           std::vector<Placement> placement, int max_steps)
    : name_(std::move(name)),
      n_columns_(n_columns),
      subtasks_(std::move(subtasks)),
      edges_(std::move(edges)),
      placement_(std::move(placement)),
      max_steps_(max_steps) {
  validate_and_index();
}

void AssemblyTask::validate_and_index() {
  if (n_columns_ < 1) fail("n_columns must be positive", {});
  if (subtasks_.empty()) fail("a task needs at least one sub-task", {});
  if (max_steps_ < 0) fail("max_steps must be non-negative", {});
  const int k = n_subtasks();

  std::sort(subtasks_.begin(), subtasks_.end(),
            [](const SubTask& a, const SubTask& b) { return a.id < b.id; });
  for (int i = 0; i < k; ++i) {
    if (subtasks_[i].id != i + 1) {
      fail("sub-task ids must be exactly 1.." + std::to_string(k),
           {subtasks_[i].id});
    }
    int t = static_cast<int>(subtasks_[i].type);
    if (t < 1 || t > 4) fail("sub-task type must be in 1..4", {subtasks_[i].id});
  }

  preds_.assign(k, {});
  std::vector<std::vector<SubTaskId>> succs(k);
  std::set<std::pair<SubTaskId, SubTaskId>> seen;
  for (const PrecedenceEdge& e : edges_) {
    if (e.pred < 1 || e.pred > k || e.succ < 1 || e.succ > k) {
      fail("edge references an unknown sub-task", {e.pred, e.succ});
    }
    if (e.pred == e.succ) fail("self-loop in precedence edges", {e.pred});
    if (!seen.insert({e.pred, e.succ}).second) {
      fail("duplicate precedence edge", {e.pred, e.succ});
    }
    preds_[e.succ - 1].push_back(e.pred);
    succs[e.pred - 1].push_back(e.succ);
  }
  for (auto& p : preds_) std::sort(p.begin(), p.end());

  std::vector<SubTaskId> cycle = find_cycle(k, succs);
  if (!cycle.empty()) fail("precedence edges contain a cycle", cycle);

  placement_by_id_.assign(k, Placement{});
  std::vector<bool> placed(k, false);
  for (const Placement& p : placement_) {
    if (p.id < 1 || p.id > k) fail("placement for unknown sub-task", {p.id});
    if (placed[p.id - 1]) fail("sub-task placed twice", {p.id});
    if (p.row < 0) fail("placement row must be non-negative", {p.id});
    if (p.col_lo < 1 || p.col_hi > n_columns_ || p.col_lo > p.col_hi) {
      fail("placement columns must be a range inside 1..n_columns", {p.id});
    }
    placed[p.id - 1] = true;
    placement_by_id_[p.id - 1] = p;
  }
  for (int i = 0; i < k; ++i) {
    if (!placed[i]) fail("sub-task has no placement", {i + 1});
  }

  column_stacks_.assign(n_columns_, {});
  for (int c = 1; c <= n_columns_; ++c) {
    std::map<int, SubTaskId> by_row;
    for (const Placement& p : placement_by_id_) {
      if (c < p.col_lo || c > p.col_hi) continue;
      auto [it, inserted] = by_row.emplace(p.row, p.id);
      if (!inserted) {
        fail("two sub-tasks share cell (row " + std::to_string(p.row) +
                 ", column " + std::to_string(c) + ")",
             {it->second, p.id});
      }
    }
    for (const auto& [row, id] : by_row) column_stacks_[c - 1].push_back(id);
  }

  for (const PrecedenceEdge& e : edges_) {
    const Placement& a = placement_by_id_[e.pred - 1];
    const Placement& b = placement_by_id_[e.succ - 1];
    bool share = a.col_lo <= b.col_hi && b.col_lo <= a.col_hi;
    if (share && a.row >= b.row) {
      fail("predecessor must sit below its successor in shared columns",
           {e.pred, e.succ});
    }
  }

  // ancestors[u][v]: v precedes u, directly or transitively.
  std::vector<std::vector<bool>> ancestors(k, std::vector<bool>(k + 1, false));
  std::vector<bool> done(k, false);
  std::function<void(SubTaskId)> close = [&](SubTaskId u) {
    if (done[u - 1]) return;
    for (SubTaskId p : preds_[u - 1]) {
      close(p);
      ancestors[u - 1][p] = true;
      for (int v = 1; v <= k; ++v) {
        if (ancestors[p - 1][v]) ancestors[u - 1][v] = true;
      }
    }
    done[u - 1] = true;
  };
  for (SubTaskId u = 1; u <= k; ++u) close(u);

  for (const auto& stack : column_stacks_) {
    for (size_t i = 0; i < stack.size(); ++i) {
      for (size_t j = 0; j < i; ++j) {
        if (!ancestors[stack[i] - 1][stack[j]]) {
          fail("sub-task stacked above a non-predecessor", {stack[j], stack[i]});
        }
      }
    }
  }
}

int default_max_steps(const AssemblyTask& task) {
  if (task.declared_max_steps() > 0) return task.declared_max_steps();
  // ceil(2.2 K / 10) * 10 in integer arithmetic: 2.2 K / 10 = 11 K / 50.
  int k = task.n_subtasks();
  return ((11 * k + 49) / 50) * 10;
}

int ChessboardState::completed_count() const {
  return static_cast<int>(std::count(completed.begin(), completed.end(), true));
}

std::vector<SubTaskId> ChessboardState::completed_ids() const {
  std::vector<SubTaskId> ids;
  for (size_t id = 1; id < completed.size(); ++id) {
    if (completed[id]) ids.push_back(static_cast<SubTaskId>(id));
  }
  return ids;
}

bool ChessboardState::all_completed() const {
  return completed.size() > 1 &&
         std::all_of(completed.begin() + 1, completed.end(),
                     [](bool b) { return b; });
}

std::vector<SubTaskId> compute_frontier(const AssemblyTask& task,
                                        const std::vector<bool>& completed) {
  std::vector<SubTaskId> frontier(task.n_columns(), kNoSubTask);
  for (int c = 1; c <= task.n_columns(); ++c) {
    for (SubTaskId id : task.column_stack(c)) {
      if (completed[id]) continue;
      const auto& preds = task.predecessors(id);
      bool ready = std::all_of(preds.begin(), preds.end(),
                               [&](SubTaskId p) { return completed[p]; });
      frontier[c - 1] = ready ? id : kNoSubTask;
      break;
    }
  }
  return frontier;
}

ChessboardState initial_state(const AssemblyTask& task) {
  ChessboardState state;
  state.completed.assign(task.n_subtasks() + 1, false);
  state.frontier = compute_frontier(task, state.completed);
  state.step_index = 0;
  return state;
}

bool is_available(const ChessboardState& state, SubTaskId id) {
  if (id == kNoSubTask) return false;
  return std::find(state.frontier.begin(), state.frontier.end(), id) !=
         state.frontier.end();
}

ChessboardState complete_subtask(const ChessboardState& state,
                                 const AssemblyTask& task, SubTaskId id) {
  if (!is_available(state, id)) {
    throw std::invalid_argument("sub-task " + std::to_string(id) +
                                " is not available");
  }
  ChessboardState next = state;
  next.completed[id] = true;
  next.frontier = compute_frontier(task, next.completed);
  return next;
}

ActionSet available_actions(const ChessboardState& state,
                            const AssemblyTask& task, Agent agent) {
  ActionSet set;
  for (Action a = kNoOp; a <= task.n_columns(); ++a) set.actions.push_back(a);
  for (int c = 1; c <= task.n_columns(); ++c) {
    SubTaskId id = state.frontier_at(c);
    if (id != kNoSubTask && can_participate(agent, task.type_of(id))) {
      set.productive.push_back(c);
    }
  }
  if (set.productive.empty()) set.productive.push_back(kNoOp);
  return set;
}

AssemblyTask task_from_json(const nlohmann::json& doc) {
  using nlohmann::json;
  try {
    if (!doc.is_object()) throw TaskParseError("task document must be an object");
    static const std::set<std::string> kKnown = {
        "name", "n_columns", "subtasks", "edges", "placement", "max_steps"};
    for (const auto& [key, value] : doc.items()) {
      if (!kKnown.count(key)) throw TaskParseError("unknown task field: " + key);
    }
    std::vector<SubTask> subtasks;
    for (const json& s : doc.at("subtasks")) {
      SubTask st;
      st.id = s.at("id").get<int>();
      int type = s.at("type").get<int>();
      if (type < 1 || type > 4) {
        throw TaskValidationError("sub-task type must be in 1..4", {st.id});
      }
      st.type = static_cast<SubTaskType>(type);
      st.label = s.value("label", std::string());
      subtasks.push_back(std::move(st));
    }
    std::vector<PrecedenceEdge> edges;
    for (const json& e : doc.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 2) {
        throw TaskParseError("each edge must be a [pred, succ] pair");
      }
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    std::vector<Placement> placement;
    for (const json& p : doc.at("placement")) {
      const json& cols = p.at("columns");
      if (!cols.is_array() || cols.size() != 2) {
        throw TaskParseError("placement columns must be [lo, hi]");
      }
      placement.push_back({p.at("id").get<int>(), p.at("row").get<int>(),
                           cols[0].get<int>(), cols[1].get<int>()});
    }
    return AssemblyTask(doc.at("name").get<std::string>(),
                        doc.at("n_columns").get<int>(), std::move(subtasks),
                        std::move(edges), std::move(placement),
                        doc.value("max_steps", 0));
  } catch (const json::exception& e) {
    throw TaskParseError(std::string("malformed task document: ") + e.what());
  }
}

nlohmann::json task_to_json(const AssemblyTask& task) {
  using nlohmann::json;
  json doc;
  doc["name"] = task.name();
  doc["n_columns"] = task.n_columns();
  if (task.declared_max_steps() > 0) doc["max_steps"] = task.declared_max_steps();
  json subtasks = json::array();
  for (const SubTask& s : task.subtasks()) {
    subtasks.push_back(
        {{"id", s.id}, {"type", static_cast<int>(s.type)}, {"label", s.label}});
  }
  doc["subtasks"] = std::move(subtasks);
  json edges = json::array();
  for (const PrecedenceEdge& e : task.edges()) edges.push_back({e.pred, e.succ});
  doc["edges"] = std::move(edges);
  json placement = json::array();
  for (SubTaskId id = 1; id <= task.n_subtasks(); ++id) {
    const Placement& p = task.placement_of(id);
    placement.push_back(
        {{"id", p.id}, {"row", p.row}, {"columns", {p.col_lo, p.col_hi}}});
  }
  doc["placement"] = std::move(placement);
  return doc;
}

AssemblyTask parse_task(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TaskParseError(std::string("task file is not valid JSON: ") + e.what());
  }
  return task_from_json(doc);
}

AssemblyTask load_task(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TaskParseError("task file not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_task(buffer.str());
}

void save_task(const AssemblyTask& task, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write task file: " + path.string());
  out << task_to_json(task).dump(2) << "\n";
}

}  // namespace stackelberg
