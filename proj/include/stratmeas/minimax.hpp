#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratmeas/measure.hpp"
#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"

namespace stratmeas {

/// Law of joint histories (x_0, a_0, ..., x_{H-1}, a_{H-1}) with joint action
/// ids, under stage kernels mu^1_n(a^1 | i_n) mu^2_n(a^2 | h_n).
StrategicMeasure pair_strategic_measure(const MinimaxModel& model, const MinimaxPolicyPair& pair,
                                        const std::vector<double>& p0, int horizon);

/// Player 1's information vector i_n = (x_0, a^1_0, ..., x_n) of a joint history prefix.
std::vector<int> information_vector(const MinimaxModel& model, const std::vector<int>& joint_history);

/// History policy on mdp_of_minimax(model) whose rows are the product kernels,
/// defined on all histories of length < horizon reachable from any state.
Policy joint_history_policy(const MinimaxModel& model, const MinimaxPolicyPair& pair, int horizon);

/// Every deterministic player-2 history policy over the joint histories of
/// length < horizon that start at `initial_state` and follow the support of pi1.
DeterministicEnumerator player2_enumerator(const MinimaxModel& model, const Policy& pi1, int initial_state,
                                           int horizon, std::size_t cap = 1'000'000);

struct AbsContinuityWitness {
  int stage = 0;
  int initial_state = 0;
  std::vector<int> info;
  Policy pi2_a;
  Policy pi2_b;
};

struct AbsContinuityReport {
  bool holds = true;
  std::optional<AbsContinuityWitness> witness;
};

/// Compares, for n <= horizon and each initial state, the supports of the
/// I_n marginals induced by pi1 together with each player-2 policy.
AbsContinuityReport check_abs_continuity(const MinimaxModel& model, const Policy& pi1, int horizon,
                                         const std::optional<std::vector<Policy>>& pi2_list = std::nullopt,
                                         std::size_t cap = 1'000'000);

/// Tables with the layout of `model.transition`: f[x][a1][a2][y] and eta[x][a1][y].
struct FactoredKernel {
  std::vector<std::vector<std::vector<std::vector<double>>>> f;
  std::vector<std::vector<std::vector<double>>> eta;
};

/// True iff f > 0 and q(y|x,a1,a2) = f(y,x,a1,a2) eta(y|x,a1) within 1e-10 on
/// admissible pairs.
ValidationReport verify_factored_kernel(const MinimaxModel& model, const FactoredKernel& kernel);

struct HatMembershipReport {
  bool member = true;
  std::vector<std::string> violations;
};

/// Relations between p' and p on player 1's information vectors: p' has the
/// same conditional of a^1_n given i_n wherever p' charges i_n, and the I_n
/// marginal of p' is absolutely continuous w.r.t. that of p, for n < H.
HatMembershipReport hat_sm_membership(const MinimaxModel& model, const StrategicMeasure& p,
                                      const StrategicMeasure& p_prime);

struct MatrixGame {
  /// Row player minimizes, column player maximizes.
  std::vector<std::vector<double>> payoff;
};

struct GameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;
  std::vector<double> column_strategy;
  /// max_j sum_i row_strategy_i payoff_ij.
  double certificate = 0.0;
};

/// Dense simplex with Bland's rule on the row player's LP.
GameSolution solve_matrix_game(const MatrixGame& game);

/// (Tv)(x): value of the game c(x,a1,a2) + beta sum_y q(y|x,a1,a2) v(y).
std::vector<double> minimax_operator(const MinimaxModel& model, const std::vector<double>& v, double beta);

/// Cost-free operator sum_y q(y|x,a1,a2) g(y) used by the average-cost equations.
std::vector<double> cost_free_operator(const MinimaxModel& model, const std::vector<double>& g);

struct ValueIterationResult {
  std::vector<double> values;
  int iterations = 0;
  double residual = 0.0;
};

/// Iterates T from v = 0 until the sup-norm step is at most tol (1-beta)/(2 beta),
/// which bounds the distance to the fixed point by tol. Throws NotConverged.
ValueIterationResult value_iteration(const MinimaxModel& model, double beta, double tol = 1e-8,
                                     int max_iter = 100000);

enum class ResidualKind { Equation, Inequality };

/// g(x) - (L g)(x) for the equation; max(g(x) - (L g)(x), 0) for g <= L g.
std::vector<double> oe_residual(const MinimaxModel& model, const std::vector<double>& g, ResidualKind kind);

/// V(x) - (T V)(x) for the discounted equation.
std::vector<double> discounted_oe_residual(const MinimaxModel& model, const std::vector<double>& v, double beta);

struct BestResponse {
  Policy player2;
  /// Value of the best response from each initial state.
  std::vector<double> values;
  /// Optimal value of the remaining problem after each reachable joint history.
  std::map<std::vector<int>, double> history_values;
};

/// Player 2's maximizing response to pi1 for the NSTAGE or truncated
/// DISCOUNTED criterion of `spec`, by backward induction over joint histories.
BestResponse best_response_p2(const MinimaxModel& model, const Policy& pi1, const CriterionSpec& spec,
                              double epsilon = 0.0, std::size_t cap = 1'000'000);

}  // namespace stratmeas
