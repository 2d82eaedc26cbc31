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
#include <random>
#include <set>

#include "doctest.h"
#include "test_util.h"

namespace stackelberg {
namespace {

using testing::single_task;
using testing::task1;

// Frontier invariants checked from first principles on the raw task data.
void check_state_invariants(const AssemblyTask& task, const ChessboardState& s) {
  REQUIRE(static_cast<int>(s.frontier.size()) == task.n_columns());
  for (int c = 1; c <= task.n_columns(); ++c) {
    SubTaskId id = s.frontier_at(c);
    if (id == kNoSubTask) continue;
    CHECK_FALSE(s.is_completed(id));
    for (const PrecedenceEdge& e : task.edges()) {
      if (e.succ == id) CHECK(s.is_completed(e.pred));
    }
  }
  for (SubTaskId id = 1; id <= task.n_subtasks(); ++id) {
    const Placement& p = task.placement_of(id);
    int shown = 0;
    for (int c = p.col_lo; c <= p.col_hi; ++c) shown += s.frontier_at(c) == id ? 1 : 0;
    CHECK((shown == 0 || shown == p.width()));
    for (int c = 1; c <= task.n_columns(); ++c) {
      if (c < p.col_lo || c > p.col_hi) CHECK(s.frontier_at(c) != id);
    }
  }
}

std::vector<SubTaskId> available_ids(const ChessboardState& s) {
  std::set<SubTaskId> ids(s.frontier.begin(), s.frontier.end());
  ids.erase(kNoSubTask);
  return {ids.begin(), ids.end()};
}

TEST_CASE("task 1 loads with the documented structure") {
  AssemblyTask t = task1();
  CHECK(t.name() == "task1");
  CHECK(t.n_columns() == 4);
  CHECK(t.n_subtasks() == 18);
  CHECK(t.declared_max_steps() == 40);
  CHECK(t.edges().size() == 16);

  const int expected_types[] = {3, 3, 3, 3, 2, 2, 2, 2, 3, 3, 3, 3, 1, 1, 1, 1, 4, 4};
  for (SubTaskId id = 1; id <= 18; ++id) {
    CHECK(static_cast<int>(t.type_of(id)) == expected_types[id - 1]);
  }
  const std::vector<PrecedenceEdge> edges = {
      {1, 9},   {2, 10},  {3, 11},  {4, 12}, {9, 17}, {10, 17}, {11, 18}, {12, 18},
      {17, 5},  {17, 6},  {18, 7},  {18, 8}, {5, 13}, {6, 14},  {7, 15},  {8, 16}};
  for (const PrecedenceEdge& e : edges) {
    CHECK(std::find(t.edges().begin(), t.edges().end(), e) != t.edges().end());
  }
  CHECK(t.column_stack(1) == std::vector<SubTaskId>{1, 9, 17, 5, 13});
  CHECK(t.column_stack(2) == std::vector<SubTaskId>{2, 10, 17, 6, 14});
  CHECK(t.column_stack(4) == std::vector<SubTaskId>{4, 12, 18, 8, 16});
  CHECK(t.placement_of(18).col_lo == 3);
  CHECK(t.placement_of(18).col_hi == 4);
}

TEST_CASE("minimal single sub-task task is valid") {
  AssemblyTask t = single_task();
  CHECK(t.n_subtasks() == 1);
  CHECK(initial_state(t).frontier == std::vector<SubTaskId>{1});
}

TEST_CASE("two-cycle is rejected and named") {
  try {
    AssemblyTask("cyc", 2, {{1, SubTaskType::kEither, ""}, {2, SubTaskType::kEither, ""}},
                 {{1, 2}, {2, 1}}, {{1, 0, 1, 1}, {2, 0, 2, 2}});
    FAIL("expected a validation error");
  } catch (const TaskValidationError& e) {
    std::vector<SubTaskId> ids = e.offending_ids();
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<SubTaskId>{1, 2});
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
}

TEST_CASE("structural violations are rejected with offending ids") {
  using T = SubTaskType;
  SUBCASE("id gap") {
    CHECK_THROWS_AS(AssemblyTask("x", 1, {{2, T::kEither, ""}}, {}, {{2, 0, 1, 1}}),
                    TaskValidationError);
  }
  SUBCASE("cell co-occupancy") {
    try {
      AssemblyTask("x", 2, {{1, T::kEither, ""}, {2, T::kJoint, ""}}, {},
                   {{1, 0, 1, 1}, {2, 0, 1, 2}});
      FAIL("expected a validation error");
    } catch (const TaskValidationError& e) {
      CHECK(e.offending_ids() == std::vector<SubTaskId>{1, 2});
    }
  }
  SUBCASE("predecessor above successor") {
    CHECK_THROWS_AS(AssemblyTask("x", 1, {{1, T::kEither, ""}, {2, T::kEither, ""}},
                                 {{2, 1}}, {{1, 0, 1, 1}, {2, 1, 1, 1}}),
                    TaskValidationError);
  }
  SUBCASE("stacked without precedence") {
    CHECK_THROWS_AS(AssemblyTask("x", 1, {{1, T::kEither, ""}, {2, T::kEither, ""}}, {},
                                 {{1, 0, 1, 1}, {2, 1, 1, 1}}),
                    TaskValidationError);
  }
  SUBCASE("columns outside the board") {
    CHECK_THROWS_AS(AssemblyTask("x", 1, {{1, T::kEither, ""}}, {}, {{1, 0, 1, 2}}),
                    TaskValidationError);
  }
  SUBCASE("missing placement") {
    CHECK_THROWS_AS(AssemblyTask("x", 1, {{1, T::kEither, ""}}, {}, {}),
                    TaskValidationError);
  }
}

TEST_CASE("transitive stacking is accepted") {
  using T = SubTaskType;
  // 3 sits above 1 only through 2.
  AssemblyTask t("chain", 2,
                 {{1, T::kEither, ""}, {2, T::kEither, ""}, {3, T::kEither, ""}},
                 {{1, 2}, {2, 3}}, {{1, 0, 1, 1}, {2, 1, 2, 2}, {3, 2, 1, 1}});
  // Column 2 holds only a successor of column 1, so it starts blocked.
  CHECK(initial_state(t).frontier == std::vector<SubTaskId>{1, 0});
}

TEST_CASE("frontier evolves as in the worked example") {
  AssemblyTask t = task1();
  ChessboardState s = initial_state(t);
  CHECK(s.frontier == std::vector<SubTaskId>{1, 2, 3, 4});
  CHECK(s.completed_count() == 0);
  CHECK(s.step_index == 0);

  s = complete_subtask(s, t, 1);
  s = complete_subtask(s, t, 2);
  CHECK(s.frontier == std::vector<SubTaskId>{9, 10, 3, 4});
  s = complete_subtask(s, t, 9);
  CHECK(s.frontier == std::vector<SubTaskId>{0, 10, 3, 4});
  s = complete_subtask(s, t, 10);
  CHECK(s.frontier == std::vector<SubTaskId>{17, 17, 3, 4});
  CHECK(s.step_index == 0);
}

TEST_CASE("completing an unavailable sub-task is rejected") {
  AssemblyTask t = task1();
  ChessboardState s = initial_state(t);
  CHECK_THROWS_AS(complete_subtask(s, t, 9), std::invalid_argument);
  CHECK_THROWS_AS(complete_subtask(s, t, 0), std::invalid_argument);
  CHECK_THROWS_AS(complete_subtask(s, t, 19), std::invalid_argument);
}

TEST_CASE("last completion clears the board") {
  AssemblyTask t = single_task();
  ChessboardState s = complete_subtask(initial_state(t), t, 1);
  CHECK(s.frontier == std::vector<SubTaskId>{0});
  CHECK(s.all_completed());
  CHECK(s.completed_ids() == std::vector<SubTaskId>{1});
}

TEST_CASE("productive actions follow the type table") {
  AssemblyTask t = task1();
  ChessboardState s = initial_state(t);
  ActionSet leader = available_actions(s, t, Agent::kLeader);
  CHECK(leader.actions == std::vector<Action>{0, 1, 2, 3, 4});
  CHECK(leader.productive == std::vector<Action>{1, 2, 3, 4});

  // Reach the [5,6,7,8] row.
  for (SubTaskId id : {1, 2, 3, 4, 9, 10, 11, 12, 17, 18}) s = complete_subtask(s, t, id);
  REQUIRE(s.frontier == std::vector<SubTaskId>{5, 6, 7, 8});
  leader = available_actions(s, t, Agent::kLeader);
  CHECK(leader.productive == std::vector<Action>{0});
  CHECK(leader.actions == std::vector<Action>{0, 1, 2, 3, 4});
  CHECK(available_actions(s, t, Agent::kFollower).productive ==
        std::vector<Action>{1, 2, 3, 4});

  ChessboardState empty = complete_subtask(initial_state(single_task()), single_task(), 1);
  CHECK(available_actions(empty, single_task(), Agent::kFollower).productive ==
        std::vector<Action>{0});
}

TEST_CASE("random precedence-respecting trajectories keep the invariants") {
  AssemblyTask t = task1();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    ChessboardState s = initial_state(t);
    check_state_invariants(t, s);
    while (!s.all_completed()) {
      std::vector<SubTaskId> ids = available_ids(s);
      REQUIRE_FALSE(ids.empty());
      SubTaskId pick = ids[std::uniform_int_distribution<size_t>(0, ids.size() - 1)(rng)];
      ChessboardState next = complete_subtask(s, t, pick);
      for (SubTaskId id : ids) {
        if (id != pick) CHECK(is_available(next, id));
      }
      for (SubTaskId id : s.completed_ids()) CHECK(next.is_completed(id));
      CHECK(next.completed_count() == s.completed_count() + 1);
      check_state_invariants(t, next);
      s = next;
    }
    CHECK(s.frontier == std::vector<SubTaskId>(4, kNoSubTask));
  }
}

TEST_CASE("json round trip preserves the task") {
  AssemblyTask t = task1();
  auto dir = testing::scratch_dir("task_roundtrip");
  save_task(t, dir / "copy");
  AssemblyTask back = load_task(dir / "copy");
  CHECK(task_to_json(back) == task_to_json(t));
  CHECK(parse_task(task_to_json(t).dump()).n_subtasks() == 18);
}

TEST_CASE("loader errors") {
  CHECK_THROWS_WITH_AS(load_task("/nonexistent/task"), doctest::Contains("task file not found"),
                       TaskParseError);
  CHECK_THROWS_AS(parse_task("{not json"), TaskParseError);
  CHECK_THROWS_AS(parse_task(R"({"name":"x","n_columns":1,"subtasks":[],"bogus":1})"),
                  TaskParseError);
  CHECK_THROWS_AS(
      parse_task(R"({"name":"x","n_columns":1,"subtasks":[{"id":1,"type":7,"label":""}],)"
                 R"("edges":[],"placement":[{"id":1,"row":0,"columns":[1,1]}]})"),
      TaskValidationError);
}

TEST_CASE("default step budget rounds 2.2 K up to a multiple of ten") {
  CHECK(default_max_steps(task1()) == 40);
  CHECK(default_max_steps(single_task()) == 10);
  // Computed independently: 2.2 * 5 = 11 -> 20.
  CHECK(default_max_steps(testing::row_task(std::vector<SubTaskType>(5, SubTaskType::kEither))) ==
        20);
}

}  // namespace
}  // namespace stackelberg
