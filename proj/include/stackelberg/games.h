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

// Pure-strategy equilibria of finite two-player bimatrix games.
//
// Rows index leader actions and columns index follower actions. All solvers
// accept any Eigen dense expression, so per-state Q-matrices can be passed
// straight from a network output without copying.

#ifndef STACKELBERG_GAMES_H_
#define STACKELBERG_GAMES_H_

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace stackelberg {

using Index = Eigen::Index;

// Lexicographic tie-breaking keeps equilibrium selection reproducible.
enum class TieBreak { kLowestIndex, kHighestIndex };

struct ActionPair {
  Index leader = 0;
  Index follower = 0;
  bool operator==(const ActionPair&) const = default;
};

template <typename Scalar>
struct BimatrixGame {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix leader;    // U^L
  Matrix follower;  // U^F

  BimatrixGame() = default;
  template <typename DL, typename DF>
  BimatrixGame(const Eigen::MatrixBase<DL>& u_leader,
               const Eigen::MatrixBase<DF>& u_follower)
      : leader(u_leader), follower(u_follower) {}

  Index rows() const { return leader.rows(); }
  Index cols() const { return leader.cols(); }
};

namespace internal {

template <typename Scalar>
bool better(Scalar candidate, Scalar best, Index cand_idx, Index best_idx,
            TieBreak tie) {
  if (candidate > best) return true;
  if (candidate < best) return false;
  return tie == TieBreak::kHighestIndex ? cand_idx > best_idx
                                        : cand_idx < best_idx;
}

template <typename DL, typename DF>
void check_game(const Eigen::MatrixBase<DL>& u_leader,
                const Eigen::MatrixBase<DF>& u_follower) {
  if (u_leader.rows() != u_follower.rows() ||
      u_leader.cols() != u_follower.cols()) {
    throw std::invalid_argument("bimatrix payoffs must share a shape");
  }
  if (u_leader.size() == 0) throw std::invalid_argument("empty bimatrix game");
  if (!u_leader.allFinite() || !u_follower.allFinite()) {
    throw std::invalid_argument("bimatrix payoffs must be finite");
  }
}

}  // namespace internal

// argmax_c U^F[row, c].
template <typename DF>
Index follower_best_response(const Eigen::MatrixBase<DF>& u_follower, Index row,
                             TieBreak tie = TieBreak::kLowestIndex) {
  if (row < 0 || row >= u_follower.rows()) {
    throw std::out_of_range("leader action outside the game");
  }
  Index best = 0;
  for (Index c = 1; c < u_follower.cols(); ++c) {
    if (internal::better(u_follower(row, c), u_follower(row, best), c, best, tie)) {
      best = c;
    }
  }
  return best;
}

// Pure Stackelberg equilibrium: the leader commits to the row maximizing her
// payoff against the follower's best response to that row.
template <typename DL, typename DF>
ActionPair stackelberg_equilibrium(const Eigen::MatrixBase<DL>& u_leader,
                                   const Eigen::MatrixBase<DF>& u_follower,
                                   TieBreak tie = TieBreak::kLowestIndex) {
  internal::check_game(u_leader, u_follower);
  ActionPair best{0, follower_best_response(u_follower, 0, tie)};
  for (Index r = 1; r < u_leader.rows(); ++r) {
    Index c = follower_best_response(u_follower, r, tie);
    if (internal::better(u_leader(r, c), u_leader(best.leader, best.follower), r,
                         best.leader, tie)) {
      best = {r, c};
    }
  }
  return best;
}

template <typename Scalar>
ActionPair stackelberg_equilibrium(const BimatrixGame<Scalar>& game,
                                   TieBreak tie = TieBreak::kLowestIndex) {
  return stackelberg_equilibrium(game.leader, game.follower, tie);
}

// Checks the pure-strategy equilibrium inequalities directly:
//   U^F[r*, c*] >= U^F[r*, c]        for all c
//   U^L[r*, c*] >= U^L[r, BR(r)]     for all r
template <typename DL, typename DF>
bool verify_stackelberg(const Eigen::MatrixBase<DL>& u_leader,
                        const Eigen::MatrixBase<DF>& u_follower,
                        const ActionPair& pair,
                        TieBreak tie = TieBreak::kLowestIndex) {
  internal::check_game(u_leader, u_follower);
  if (pair.leader < 0 || pair.leader >= u_leader.rows() || pair.follower < 0 ||
      pair.follower >= u_leader.cols()) {
    throw std::out_of_range("action pair outside the game");
  }
  const auto star_f = u_follower(pair.leader, pair.follower);
  for (Index c = 0; c < u_follower.cols(); ++c) {
    if (u_follower(pair.leader, c) > star_f) return false;
  }
  const auto star_l = u_leader(pair.leader, pair.follower);
  for (Index r = 0; r < u_leader.rows(); ++r) {
    if (u_leader(r, follower_best_response(u_follower, r, tie)) > star_l) {
      return false;
    }
  }
  return true;
}

template <typename Scalar>
bool verify_stackelberg(const BimatrixGame<Scalar>& game, const ActionPair& pair,
                        TieBreak tie = TieBreak::kLowestIndex) {
  return verify_stackelberg(game.leader, game.follower, pair, tie);
}

// All mutual best-response cells, lexicographic order.
template <typename DL, typename DF>
std::vector<ActionPair> pure_nash_equilibria(
    const Eigen::MatrixBase<DL>& u_leader,
    const Eigen::MatrixBase<DF>& u_follower) {
  internal::check_game(u_leader, u_follower);
  const auto row_max = u_follower.rowwise().maxCoeff().eval();
  const auto col_max = u_leader.colwise().maxCoeff().eval();
  std::vector<ActionPair> equilibria;
  for (Index r = 0; r < u_leader.rows(); ++r) {
    for (Index c = 0; c < u_leader.cols(); ++c) {
      if (u_follower(r, c) >= row_max(r) && u_leader(r, c) >= col_max(c)) {
        equilibria.push_back({r, c});
      }
    }
  }
  return equilibria;
}

template <typename Scalar>
std::vector<ActionPair> pure_nash_equilibria(const BimatrixGame<Scalar>& game) {
  return pure_nash_equilibria(game.leader, game.follower);
}

// Picks the pure Nash equilibrium with the largest U^L + U^F, first in
// lexicographic order among ties. Empty when no pure equilibrium exists.
template <typename DL, typename DF>
std::optional<ActionPair> select_nash_equilibrium(
    const Eigen::MatrixBase<DL>& u_leader,
    const Eigen::MatrixBase<DF>& u_follower) {
  std::optional<ActionPair> best;
  for (const ActionPair& p : pure_nash_equilibria(u_leader, u_follower)) {
    if (!best) {
      best = p;
      continue;
    }
    auto welfare = u_leader(p.leader, p.follower) + u_follower(p.leader, p.follower);
    auto best_welfare = u_leader(best->leader, best->follower) +
                        u_follower(best->leader, best->follower);
    if (welfare > best_welfare) best = p;
  }
  return best;
}

}  // namespace stackelberg

#endif  // STACKELBERG_GAMES_H_
