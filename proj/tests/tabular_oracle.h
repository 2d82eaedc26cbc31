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

// A hand-built two-state general-sum game and an independent value-iteration
// solver for its Stackelberg backup.

#ifndef STACKELBERG_TESTS_TABULAR_ORACLE_H_
#define STACKELBERG_TESTS_TABULAR_ORACLE_H_

#include <algorithm>
#include <array>
#include <cmath>

#include "stackelberg/tabular.h"

namespace stackelberg::testing {

// Flat index of (state, leader action, follower action).
inline int cell(int s, int a, int f) { return 4 * s + 2 * a + f; }

// Two states, two actions per robot.
struct TwoStateGame {
  using Table = std::array<double, 8>;
  Table reward_leader = {3.0, 0.0, 5.0, 1.0, 0.0, 2.0, 1.0, 4.0};
  Table reward_follower = {2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 2.0, 5.0};
  std::array<int, 8> next = {1, 0, 0, 1, 0, 1, 1, 0};
  double gamma = 0.9;
};

using TablePair = std::array<TwoStateGame::Table, 2>;  // leader, follower

// Lowest-index Stackelberg cell of the 2x2 game at state s.
inline std::pair<int, int> se_2x2(const TwoStateGame::Table& ql,
                                  const TwoStateGame::Table& qf, int s) {
  int best_l = -1, best_f = -1;
  for (int a = 0; a < 2; ++a) {
    int reply = qf[cell(s, a, 1)] > qf[cell(s, a, 0)] ? 1 : 0;
    if (best_l < 0 || ql[cell(s, a, reply)] > ql[cell(s, best_l, best_f)]) {
      best_l = a;
      best_f = reply;
    }
  }
  return {best_l, best_f};
}

// Synchronous value iteration Q <- r + gamma Q(s', SE(s')) until the sup-norm
// change drops below tol.
inline TablePair solve_two_state_game(const TwoStateGame& g, double tol = 1e-14) {
  TablePair q{};
  for (int iter = 0; iter < 100000; ++iter) {
    TablePair next{};
    double change = 0.0;
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        for (int f = 0; f < 2; ++f) {
          const int i = cell(s, a, f);
          const int sp = g.next[i];
          auto [el, ef] = se_2x2(q[0], q[1], sp);
          next[0][i] = g.reward_leader[i] + g.gamma * q[0][cell(sp, el, ef)];
          next[1][i] = g.reward_follower[i] + g.gamma * q[1][cell(sp, el, ef)];
          change = std::max({change, std::abs(next[0][i] - q[0][i]),
                             std::abs(next[1][i] - q[1][i])});
        }
      }
    }
    q = next;
    if (change < tol) break;
  }
  return q;
}

// Sweeps the tabular learner over every (s, a) until it stops moving.
inline TabularQ learn_two_state_game(const TwoStateGame& g, double alpha, int max_sweeps) {
  TabularQ q(2, 2, 2);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        for (int f = 0; f < 2; ++f) {
          const double old_l = q.leader[s](a, f), old_f = q.follower[s](a, f);
          const int i = cell(s, a, f);
          tabular_stackelberg_update(
              q, {s, a, f, g.reward_leader[i], g.reward_follower[i], g.next[i], false}, alpha,
              g.gamma);
          change = std::max({change, std::abs(q.leader[s](a, f) - old_l),
                             std::abs(q.follower[s](a, f) - old_f)});
        }
      }
    }
    if (change < 1e-13) break;
  }
  return q;
}

inline double sup_distance(const TabularQ& q, const TablePair& oracle) {
  double d = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) {
      for (int f = 0; f < 2; ++f) {
        d = std::max({d, std::abs(q.leader[s](a, f) - oracle[0][cell(s, a, f)]),
                      std::abs(q.follower[s](a, f) - oracle[1][cell(s, a, f)])});
      }
    }
  }
  return d;
}

}  // namespace stackelberg::testing

#endif  // STACKELBERG_TESTS_TABULAR_ORACLE_H_
