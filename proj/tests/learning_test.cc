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

#include <map>

#include "doctest.h"
#include "stackelberg/replay_buffer.h"
#include "stackelberg/tabular.h"
#include "tabular_oracle.h"
#include "test_util.h"

namespace stackelberg {
namespace {

using testing::single_task;
using testing::task1;

TrainConfig small_config(int episodes, std::uint64_t seed = 0) {
  TrainConfig c;
  c.episodes = episodes;
  c.hidden_sizes = {16, 16};
  c.batch_size = 8;
  c.seed = seed;
  return c;
}

QMatrix qmat(std::initializer_list<std::initializer_list<float>> rows) {
  QMatrix m(rows.size(), rows.begin()->size());
  Index r = 0;
  for (auto row : rows) {
    Index c = 0;
    for (float v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

TEST_CASE("replay buffer evicts oldest first") {
  ReplayBuffer<int> buf(5);
  for (int i = 0; i < 5 + 3; ++i) buf.push(i);
  CHECK(buf.size() == 5);
  for (size_t i = 0; i < 5; ++i) CHECK(buf.at(i) == int(i) + 3);
  CHECK_THROWS_AS(buf.at(5), std::out_of_range);
  CHECK_THROWS_AS(ReplayBuffer<int>(0), std::invalid_argument);
}

TEST_CASE("replay sampling is uniform with replacement over current contents") {
  ReplayBuffer<int> buf(4);
  for (int i = 0; i < 6; ++i) buf.push(i);  // holds 2..5
  Rng rng(1);
  std::map<int, int> counts;
  const int n = 40000;
  for (const int* p : buf.sample(n, rng)) ++counts[*p];
  CHECK(counts.size() == 4);
  for (auto [v, c] : counts) {
    CHECK(v >= 2);
    CHECK(std::abs(double(c) / n - 0.25) <= 0.01);
  }
  ReplayBuffer<int> empty(3);
  CHECK_THROWS_AS(empty.sample(1, rng), std::logic_error);
}

TEST_CASE("epsilon schedule decays linearly then stays flat") {
  TrainConfig c;
  c.episodes = 1000;
  CHECK(c.epsilon_at(0) == doctest::Approx(1.0));
  CHECK(c.epsilon_at(300) == doctest::Approx(1.0 - 0.95 * 0.5));
  CHECK(c.epsilon_at(600) == doctest::Approx(0.05));
  CHECK(c.epsilon_at(999) == doctest::Approx(0.05));
  for (int e = 0; e < 1000; e += 37) {
    CHECK(c.epsilon_at(e) >= 0.0);
    CHECK(c.epsilon_at(e) <= 1.0);
  }
}

TEST_CASE("train config defaults, json round trip and unknown keys") {
  TrainConfig c;
  CHECK(c.episodes == 10000);
  CHECK(c.gamma == 0.95);
  CHECK(c.batch_size == 64);
  CHECK(c.buffer_capacity == 100000);
  CHECK(c.learning_rate == 1e-4);
  CHECK(c.tau == 0.1);
  CHECK(c.target_period == 50);
  CHECK(c.hidden_sizes == std::vector<int>{128, 128});
  c.seed = 42;
  c.gamma = 0.9;
  CHECK(to_json(train_config_from_json(to_json(c))) == to_json(c));
  CHECK_THROWS_AS(train_config_from_json({{"gama", 0.9}}), std::invalid_argument);
  CHECK_THROWS_AS(train_config_from_json({{"gamma", 1.0}}), std::invalid_argument);
  CHECK(parse_algorithm("nash") == Algorithm::kNash);
  CHECK_THROWS_AS(parse_algorithm("maddpg"), std::invalid_argument);
}

TEST_CASE("greedy selection at epsilon zero") {
  QMatrix ql = qmat({{1, 0}, {2, -1}});
  QMatrix qf = qmat({{0, 1}, {1, 0}});
  Rng rng(0);
  ActionSelection sel = select_actions(ql, qf, 0.0, rng, Algorithm::kStackelberg);
  CHECK(sel.action == JointAction{1, 0});
  CHECK_FALSE(sel.fallback);

  // Matching pennies has no pure Nash: fall back to the SE and flag it.
  QMatrix pl = qmat({{0, 1}, {1, 0}});
  QMatrix pf = qmat({{1, 0}, {0, 1}});
  sel = select_actions(pl, pf, 0.0, rng, Algorithm::kNash);
  CHECK(sel.fallback);
  CHECK(sel.greedy == stackelberg_equilibrium(pl, pf));

  QMatrix coord = qmat({{2, 0}, {0, 1}});
  CHECK(select_actions(coord, coord, 0.0, rng, Algorithm::kNash).greedy == ActionPair{0, 0});

  // Independent: row maxima of Q^L, column maxima of Q^F.
  QMatrix il = qmat({{0, 5, 0}, {4, 4, 4}, {0, 0, 1}});
  QMatrix iff = qmat({{0, 0, 3}, {0, 0, 0}, {0, 0, 0}});
  CHECK(select_actions(il, iff, 0.0, rng, Algorithm::kIndependent).action == JointAction{0, 2});
  CHECK_THROWS_AS(select_actions(il, iff, 1.5, rng, Algorithm::kIndependent),
                  std::invalid_argument);
}

TEST_CASE("epsilon one explores uniformly over the non-equilibrium actions") {
  const int m = 5;  // n = 4 columns
  QMatrix ql = QMatrix::Zero(m, m), qf = QMatrix::Zero(m, m);
  ql(2, 3) = 1.0f;
  qf(2, 3) = 1.0f;
  Rng rng(17);
  std::map<int, int> lead, follow;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    ActionSelection sel = select_actions(ql, qf, 1.0, rng, Algorithm::kStackelberg);
    REQUIRE(sel.greedy == ActionPair{2, 3});
    ++lead[sel.action.leader];
    ++follow[sel.action.follower];
  }
  CHECK(lead.count(2) == 0);
  CHECK(follow.count(3) == 0);
  for (auto* counts : {&lead, &follow}) {
    CHECK(counts->size() == 4);
    for (auto [a, c] : *counts) CHECK(std::abs(double(c) / draws - 0.25) <= 0.02);
  }
}

TEST_CASE("greedy stackelberg actions of frozen nets verify against their Q-matrices") {
  AssemblyTask t = task1();
  Rng rng(5);
  TrainConfig cfg;
  AgentModel leader = make_agent(t, cfg, rng);
  AgentModel follower = make_agent(t, cfg, rng);
  EnvConfig env = default_env_config(t);
  ChessboardState s = initial_state(t);
  for (int i = 0; i < 200 && !is_terminal(s, env); ++i) {
    ActionSelection sel = select_actions(leader.online, follower.online, s.frontier,
                                         t.n_subtasks(), 0.0, rng, Algorithm::kStackelberg);
    VectorX<float> x = encode_state<float>(s.frontier, t.n_subtasks());
    CHECK(verify_stackelberg(q_matrix(leader.online, x), q_matrix(follower.online, x),
                             sel.greedy));
    // Random walk so that many states are visited.
    std::uniform_int_distribution<int> pick(0, 4);
    s = step(s, t, {pick(rng), pick(rng)}, env, rng).next_state;
  }
}

std::vector<Transition> random_transitions(const AssemblyTask& t, int n, Rng& rng,
                                           bool all_terminal) {
  EnvConfig env = default_env_config(t);
  std::vector<Transition> out;
  std::uniform_int_distribution<int> pick(0, t.n_columns());
  ChessboardState s = initial_state(t);
  while (static_cast<int>(out.size()) < n) {
    JointAction a{pick(rng), pick(rng)};
    StepOutcome o = step(s, t, a, env, rng);
    out.push_back({s.frontier, a.leader, a.follower, o.reward_leader, o.reward_follower,
                   o.next_state.frontier, all_terminal || o.done});
    s = o.done ? initial_state(t) : o.next_state;
  }
  return out;
}

std::vector<const Transition*> pointers(const std::vector<Transition>& v) {
  std::vector<const Transition*> p;
  for (const Transition& t : v) p.push_back(&t);
  return p;
}

TEST_CASE("terminal transitions with gamma zero target the immediate rewards") {
  AssemblyTask t = task1();
  Rng rng(3);
  TrainConfig cfg;
  AgentModel leader = make_agent(t, cfg, rng), follower = make_agent(t, cfg, rng);
  std::vector<Transition> batch = random_transitions(t, 32, rng, true);
  auto ptrs = pointers(batch);
  for (double gamma : {0.0, 0.95}) {
    TdTargets targets = compute_td_targets(leader, follower, ptrs, t.n_subtasks(), gamma,
                                           Algorithm::kStackelberg);
    for (size_t j = 0; j < batch.size(); ++j) {
      CHECK(targets.leader(j) == static_cast<float>(batch[j].reward_leader));
      CHECK(targets.follower(j) == static_cast<float>(batch[j].reward_follower));
    }
  }
}

// Scales a network's output layer; exact in floating point for powers of two.
QNetwork scale_output(QNetwork net, float factor) {
  auto& last = net.parameters().back();
  last.weights *= factor;
  last.bias *= factor;
  return net;
}

TEST_CASE("double-Q targets: online nets select, target nets value") {
  AssemblyTask t = task1();
  Rng rng(21);
  TrainConfig cfg;
  AgentModel leader = make_agent(t, cfg, rng), follower = make_agent(t, cfg, rng);
  // Decouple target from online.
  leader.target = QNetwork::glorot(leader.online.layer_sizes(), rng);
  follower.target = QNetwork::glorot(follower.online.layer_sizes(), rng);
  std::vector<Transition> batch = random_transitions(t, 48, rng, false);
  auto ptrs = pointers(batch);
  const double gamma = 0.9;
  const int m = t.n_columns() + 1;

  TdTargets targets = compute_td_targets(leader, follower, ptrs, t.n_subtasks(), gamma,
                                         Algorithm::kStackelberg);

  SUBCASE("matches the hand-assembled rule") {
    for (size_t j = 0; j < batch.size(); ++j) {
      VectorX<float> x = encode_state<float>(batch[j].next_state, t.n_subtasks());
      ActionPair a = stackelberg_equilibrium(q_matrix(leader.online, x),
                                             q_matrix(follower.online, x));
      CHECK(targets.next_actions[j] == joint_index(int(a.leader), int(a.follower), m));
      float fl = q_matrix(leader.target, x)(a.leader, a.follower);
      float ff = q_matrix(follower.target, x)(a.leader, a.follower);
      float keep = batch[j].done ? 0.0f : static_cast<float>(gamma);
      CHECK(targets.leader(j) == doctest::Approx(batch[j].reward_leader + keep * fl));
      CHECK(targets.follower(j) == doctest::Approx(batch[j].reward_follower + keep * ff));
    }
  }

  SUBCASE("rescaling the online nets leaves the values untouched") {
    // Positive scaling keeps every argmax, so only a valuation that read the
    // online parameters could change the targets.
    AgentModel l2 = leader, f2 = follower;
    l2.online = scale_output(leader.online, 4.0f);
    f2.online = scale_output(follower.online, 0.25f);
    TdTargets again = compute_td_targets(l2, f2, ptrs, t.n_subtasks(), gamma,
                                         Algorithm::kStackelberg);
    CHECK(again.next_actions == targets.next_actions);
    CHECK(again.leader == targets.leader);
    CHECK(again.follower == targets.follower);
  }

  SUBCASE("shifting the target nets shifts the targets by gamma times the shift") {
    AgentModel l2 = leader, f2 = follower;
    l2.target.parameters().back().bias.array() += 1.0f;
    f2.target.parameters().back().bias.array() -= 2.0f;
    TdTargets shifted = compute_td_targets(l2, f2, ptrs, t.n_subtasks(), gamma,
                                           Algorithm::kStackelberg);
    CHECK(shifted.next_actions == targets.next_actions);
    for (size_t j = 0; j < batch.size(); ++j) {
      float keep = batch[j].done ? 0.0f : static_cast<float>(gamma);
      CHECK(shifted.leader(j) == doctest::Approx(targets.leader(j) + keep * 1.0f).epsilon(1e-5));
      CHECK(shifted.follower(j) ==
            doctest::Approx(targets.follower(j) - keep * 2.0f).epsilon(1e-5));
    }
  }
}

TEST_CASE("identical seeds give bit-identical metric streams and checkpoints") {
  AssemblyTask t = task1();
  EnvConfig env = default_env_config(t);
  auto run = [&](std::uint64_t seed) {
    Trainer trainer(t, env, small_config(15, seed), Algorithm::kStackelberg);
    std::string stream;
    while (!trainer.finished()) stream += to_json(trainer.run_episode()).dump() + "\n";
    return std::make_pair(stream, trainer.checkpoint().dump());
  };
  auto a = run(4), b = run(4), c = run(5);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(a.first != c.first);
}

TEST_CASE("training metrics respect the reward bounds") {
  AssemblyTask t = task1();
  EnvConfig env = default_env_config(t);
  for (Algorithm alg : {Algorithm::kStackelberg, Algorithm::kNash, Algorithm::kIndependent}) {
    TrainResult r = train(t, env, small_config(10), alg);
    REQUIRE(r.metrics.size() == 10);
    for (const EpisodeMetrics& m : r.metrics) {
      CHECK(m.steps <= env.max_steps);
      CHECK(m.cumulative_leader <= env.max_steps * env.r_cop);
      CHECK(m.cumulative_leader >= env.max_steps * env.r_cost);
      CHECK(m.cumulative_follower <= env.max_steps * env.r_cop);
      CHECK(m.cumulative_follower >= env.max_steps * env.r_cost);
      CHECK(m.averaged_leader == doctest::Approx(m.cumulative_leader / m.steps));
      if (alg != Algorithm::kNash) CHECK(m.equilibrium_fallbacks == 0);
    }
    CHECK(r.metrics.front().epsilon == 1.0);
  }
}

TEST_CASE("single type-3 sub-task converges to the one-step optimum within 500 episodes") {
  AssemblyTask t = single_task();
  EnvConfig env = default_env_config(t);
  TrainConfig cfg;
  cfg.episodes = 500;
  TrainResult r = train(t, env, cfg, Algorithm::kStackelberg);
  EnvConfig det = env;
  det.deterministic = true;
  Rng rng(0);
  EvalMetrics ev = evaluate(r.leader.online, r.follower.online, t, det, 1, rng);
  CHECK(ev.mean_steps == 1.0);
  CHECK(ev.std_steps == 0.0);
  // One robot works, the other idles: (r_ind, 0) in some order.
  CHECK(ev.mean_averaged_leader + ev.mean_averaged_follower == doctest::Approx(1.0));
}

TEST_CASE("checkpoint round trip") {
  AssemblyTask t = task1();
  Trainer trainer(t, default_env_config(t), small_config(3), Algorithm::kNash);
  while (!trainer.finished()) trainer.run_episode();
  nlohmann::json j = trainer.checkpoint();
  auto dir = testing::scratch_dir("checkpoint");
  save_checkpoint(j, dir / "ck.json");
  Checkpoint ck = load_checkpoint(dir / "ck.json");
  CHECK(ck.algorithm == Algorithm::kNash);
  CHECK(ck.episodes_done == 3);
  CHECK(ck.total_steps == trainer.total_steps());
  CHECK(ck.leader_online == trainer.leader().online);
  CHECK(ck.follower_target == trainer.follower().target);
  CHECK(ck.leader_optimizer.step == trainer.leader().optimizer.step);
  CHECK(checkpoint_to_json(ck) == j);
}

TEST_CASE("evaluation statistics") {
  std::vector<double> v = {1, 2, 3, 4};
  auto [mean, sd] = mean_std(v);
  CHECK(mean == 2.5);
  CHECK(sd == doctest::Approx(std::sqrt(1.25)));
  AssemblyTask t = task1();
  Rng rng(0);
  TrainConfig cfg = small_config(1);
  AgentModel l = make_agent(t, cfg, rng), f = make_agent(t, cfg, rng);
  EvalMetrics one = evaluate(l.online, f.online, t, default_env_config(t), 1, rng);
  CHECK(one.n_episodes == 1);
  CHECK(one.std_steps == 0.0);
}

// ---- tabular reference -------------------------------------------------

TEST_CASE("tabular update edge cases") {
  TabularQ q(2, 2, 2);
  q.leader[0](1, 1) = 3.0;
  TabularQ before = q;
  tabular_stackelberg_update(q, {0, 1, 1, 5.0, 5.0, 1, false}, 0.0, 0.9);
  CHECK(q.leader[0] == before.leader[0]);
  tabular_stackelberg_update(q, {0, 1, 1, 5.0, -2.0, 1, true}, 1.0, 0.9);
  CHECK(q.leader[0](1, 1) == 5.0);
  CHECK(q.follower[0](1, 1) == -2.0);
  CHECK_THROWS_AS(tabular_stackelberg_update(q, {2, 0, 0, 0, 0, 0, false}, 0.5, 0.9),
                  std::out_of_range);
  CHECK_THROWS_AS(tabular_stackelberg_update(q, {0, 2, 0, 0, 0, 0, false}, 0.5, 0.9),
                  std::out_of_range);
}

TEST_CASE("tabular learner converges to the value-iteration fixed point") {
  testing::TwoStateGame game;
  testing::TablePair oracle = testing::solve_two_state_game(game);
  for (double alpha : {0.3, 0.7, 1.0}) {
    TabularQ q = testing::learn_two_state_game(game, alpha, 20000);
    CHECK(testing::sup_distance(q, oracle) < 1e-6);
  }
}

}  // namespace
}  // namespace stackelberg
