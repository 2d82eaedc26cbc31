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

#ifndef STACKELBERG_TASK_MODEL_H_
#define STACKELBERG_TASK_MODEL_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace stackelberg {

// Sub-task ids are 1-based; 0 marks a column with no available sub-task.
using SubTaskId = int;
inline constexpr SubTaskId kNoSubTask = 0;

// Actions are 0 for the no-op and 1..n for "work on the frontier of column j".
using Action = int;
inline constexpr Action kNoOp = 0;

enum class Agent { kLeader = 0, kFollower = 1 };

const char* agent_name(Agent agent);

// Sub-task categories:
//   1 leader only, 2 follower only, 3 either robot alone, 4 both jointly.
enum class SubTaskType { kLeaderOnly = 1, kFollowerOnly = 2, kEither = 3, kJoint = 4 };

// True if the agent may take the sub-task on by itself or, for joint
// sub-tasks, as one of the two participants.
bool can_participate(Agent agent, SubTaskType type);

// True if the agent completes the sub-task alone (types 1/3 for the leader,
// 2/3 for the follower).
bool can_perform_alone(Agent agent, SubTaskType type);

struct SubTask {
  SubTaskId id = kNoSubTask;
  SubTaskType type = SubTaskType::kEither;
  std::string label;
};

struct PrecedenceEdge {
  SubTaskId pred = kNoSubTask;
  SubTaskId succ = kNoSubTask;
  bool operator==(const PrecedenceEdge&) const = default;
};

// Row 0 is the bottom of the chessboard. Columns are 1-based and inclusive.
struct Placement {
  SubTaskId id = kNoSubTask;
  int row = 0;
  int col_lo = 1;
  int col_hi = 1;
  int width() const { return col_hi - col_lo + 1; }
};

class TaskParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TaskValidationError : public std::runtime_error {
 public:
  TaskValidationError(const std::string& what, std::vector<SubTaskId> ids)
      : std::runtime_error(what), offending_ids_(std::move(ids)) {}
  const std::vector<SubTaskId>& offending_ids() const { return offending_ids_; }

 private:
  std::vector<SubTaskId> offending_ids_;
};

// Decomposed assembly task in chessboard form. Instances are validated on
// construction and immutable afterwards.
class AssemblyTask {
 public:
  // Throws TaskValidationError when any structural invariant fails.
  AssemblyTask(std::string name, int n_columns, std::vector<SubTask> subtasks,
               std::vector<PrecedenceEdge> edges,
               std::vector<Placement> placement, int max_steps = 0);

  const std::string& name() const { return name_; }
  int n_columns() const { return n_columns_; }
  int n_subtasks() const { return static_cast<int>(subtasks_.size()); }
  // Episode step budget stored with the task, or 0 when the file has none.
  int declared_max_steps() const { return max_steps_; }

  const std::vector<SubTask>& subtasks() const { return subtasks_; }
  const std::vector<PrecedenceEdge>& edges() const { return edges_; }
  const std::vector<Placement>& placement() const { return placement_; }

  const SubTask& subtask(SubTaskId id) const { return subtasks_.at(id - 1); }
  SubTaskType type_of(SubTaskId id) const { return subtask(id).type; }
  const Placement& placement_of(SubTaskId id) const {
    return placement_by_id_.at(id - 1);
  }
  const std::vector<SubTaskId>& predecessors(SubTaskId id) const {
    return preds_.at(id - 1);
  }
  // Sub-tasks occupying the column, ordered bottom-up.
  const std::vector<SubTaskId>& column_stack(int column) const {
    return column_stacks_.at(column - 1);
  }

 private:
  void validate_and_index();

  std::string name_;
  int n_columns_;
  std::vector<SubTask> subtasks_;
  std::vector<PrecedenceEdge> edges_;
  std::vector<Placement> placement_;
  int max_steps_;

  std::vector<Placement> placement_by_id_;
  std::vector<std::vector<SubTaskId>> preds_;
  std::vector<std::vector<SubTaskId>> column_stacks_;
};

// Step budget for episodes on this task: the declared value, else 2.2 x the
// sub-task count rounded up to a multiple of ten.
int default_max_steps(const AssemblyTask& task);

// The bottom row of the chessboard plus the completed set.
struct ChessboardState {
  std::vector<SubTaskId> frontier;   // frontier[j] is the sub-task in column j+1
  std::vector<bool> completed;       // indexed by id; entry 0 unused
  int step_index = 0;

  bool is_completed(SubTaskId id) const { return completed.at(id); }
  int completed_count() const;
  std::vector<SubTaskId> completed_ids() const;
  SubTaskId frontier_at(int column) const { return frontier.at(column - 1); }
  bool all_completed() const;

  bool operator==(const ChessboardState&) const = default;
};

ChessboardState initial_state(const AssemblyTask& task);

// Bottom row implied by a completed set.
std::vector<SubTaskId> compute_frontier(const AssemblyTask& task,
                                        const std::vector<bool>& completed);

bool is_available(const ChessboardState& state, SubTaskId id);

// Marks `id` completed and lets successors drop down. Throws
// std::invalid_argument when `id` is not on the frontier.
ChessboardState complete_subtask(const ChessboardState& state,
                                 const AssemblyTask& task, SubTaskId id);

struct ActionSet {
  std::vector<Action> actions;     // always {0, 1, ..., n}
  std::vector<Action> productive;  // diagnostic only; {0} when nothing else is
};

ActionSet available_actions(const ChessboardState& state,
                            const AssemblyTask& task, Agent agent);

AssemblyTask task_from_json(const nlohmann::json& doc);
nlohmann::json task_to_json(const AssemblyTask& task);
AssemblyTask parse_task(std::string_view text);

// Throws TaskParseError (including for a missing file) or TaskValidationError.
AssemblyTask load_task(const std::filesystem::path& path);
void save_task(const AssemblyTask& task, const std::filesystem::path& path);

}  // namespace stackelberg

#endif  // STACKELBERG_TASK_MODEL_H_
