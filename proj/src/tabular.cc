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

#include "stackelberg/tabular.h"

#include <stdexcept>

namespace stackelberg {

TabularQ::TabularQ(int n_states, int n_leader_actions, int n_follower_actions) {
  if (n_states < 1 || n_leader_actions < 1 || n_follower_actions < 1) {
    throw std::invalid_argument("tabular Q needs positive dimensions");
  }
  leader.assign(n_states, Eigen::MatrixXd::Zero(n_leader_actions, n_follower_actions));
  follower = leader;
}

void tabular_stackelberg_update(TabularQ& q, const TabularTransition& t,
                                double alpha, double gamma) {
  auto in_states = [&](int s) { return s >= 0 && s < q.n_states(); };
  if (!in_states(t.state) || !in_states(t.next_state)) {
    throw std::out_of_range("state index outside the table");
  }
  const Eigen::MatrixXd& ql = q.leader[t.state];
  if (t.action_leader < 0 || t.action_leader >= ql.rows() || t.action_follower < 0 ||
      t.action_follower >= ql.cols()) {
    throw std::out_of_range("action index outside the table");
  }

  double future_l = 0.0;
  double future_f = 0.0;
  if (!t.done) {
    ActionPair se = stackelberg_equilibrium(q.leader[t.next_state], q.follower[t.next_state]);
    future_l = q.leader[t.next_state](se.leader, se.follower);
    future_f = q.follower[t.next_state](se.leader, se.follower);
  }
  double& l = q.leader[t.state](t.action_leader, t.action_follower);
  double& f = q.follower[t.state](t.action_leader, t.action_follower);
  l = (1.0 - alpha) * l + alpha * (t.reward_leader + gamma * future_l);
  f = (1.0 - alpha) * f + alpha * (t.reward_follower + gamma * future_f);
}

}  // namespace stackelberg
