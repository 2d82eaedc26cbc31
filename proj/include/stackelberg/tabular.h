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

// Tabular Stackelberg Q-learning: the reference update that the deep learner
// approximates.

#ifndef STACKELBERG_TABULAR_H_
#define STACKELBERG_TABULAR_H_

#include <Eigen/Dense>

#include <vector>

#include "stackelberg/games.h"

namespace stackelberg {

struct TabularQ {
  std::vector<Eigen::MatrixXd> leader;    // one |A^L| x |A^F| table per state
  std::vector<Eigen::MatrixXd> follower;

  TabularQ(int n_states, int n_leader_actions, int n_follower_actions);
  int n_states() const { return static_cast<int>(leader.size()); }
};

struct TabularTransition {
  int state = 0;
  Index action_leader = 0;
  Index action_follower = 0;
  double reward_leader = 0.0;
  double reward_follower = 0.0;
  int next_state = 0;
  bool done = false;
};

// Q^i(s, a) <- (1 - alpha) Q^i(s, a) + alpha (r^i + gamma Q^i(s', a'_SE)),
// a'_SE the Stackelberg equilibrium of <Q^L(s'), Q^F(s')>. The future term is
// dropped for terminal transitions. Throws std::out_of_range on bad indices.
void tabular_stackelberg_update(TabularQ& q, const TabularTransition& t,
                                double alpha, double gamma);

}  // namespace stackelberg

#endif  // STACKELBERG_TABULAR_H_
