#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "stratmeas/scalar.hpp"

namespace stratmeas {

// All model costs are finite reals. The extended-real convention
// inf - inf = -inf + inf = +inf is never exercised: every criterion below is
// finite on a finite model, and a non-finite intermediate is reported as an
// error instead of being propagated.

/// Finite MDP with integer ids for states and actions.
///
/// `transition[x][a]` is the successor distribution q(.|x,a) for admissible
/// pairs and an empty vector otherwise. `cost[x][a]` is read only on
/// admissible pairs.
template <class T>
struct BasicMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<std::vector<int>> admissible;
  std::vector<std::vector<std::vector<T>>> transition;
  std::vector<std::vector<double>> cost;

  bool is_admissible(int x, int a) const;
  /// Lowest-id admissible action, the fallback selection used off support.
  int default_action(int x) const { return admissible[x].front(); }
};

using FiniteMdp = BasicMdp<double>;
using ExactMdp = BasicMdp<Rational>;

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

template <class T>
ValidationReport validate_mdp(const BasicMdp<T>& model);

/// Throws ValidationError listing every violation.
template <class T>
void require_valid(const BasicMdp<T>& model);

FiniteMdp to_double(const ExactMdp& model);

/// Partially observed model with a deterministic observation function.
///
/// Admissible actions at stage n depend on the information vector
/// i_n = (z_0, a_0, ..., z_n). Entries of `admissible_info` override the
/// default, which is the intersection of A(x) over the states x with
/// f(x) = z_n.
struct FinitePomdp {
  FiniteMdp base;
  int num_observations = 0;
  std::vector<int> obs_fn;
  std::map<std::vector<int>, std::vector<int>> admissible_info;

  std::vector<int> admissible_actions(std::span<const int> info) const;
};

ValidationReport validate_pomdp(const FinitePomdp& model);

/// Two-player model: player 1 picks from A1(x), player 2 from A2(x).
struct MinimaxModel {
  int num_states = 0;
  int num_actions1 = 0;
  int num_actions2 = 0;
  std::vector<std::vector<int>> admissible1;
  std::vector<std::vector<int>> admissible2;
  /// [x][a1][a2] -> distribution over successor states.
  std::vector<std::vector<std::vector<std::vector<double>>>> transition;
  /// [x][a1][a2]
  std::vector<std::vector<std::vector<double>>> cost;

  int joint_action(int a1, int a2) const { return a1 * num_actions2 + a2; }
  int player1_action(int joint) const { return joint / num_actions2; }
  int player2_action(int joint) const { return joint % num_actions2; }
};

ValidationReport validate_minimax(const MinimaxModel& model);

/// Joint-action MDP with A = A1 x A2 and admissible(x) = A1(x) x A2(x).
FiniteMdp mdp_of_minimax(const MinimaxModel& model);

enum class CriterionKind {
  J1, J2, J3, J4,
  TJ1, TJ2, TJ3, TJ4,
  Psi, HatPsi,
  CVaR, VaR,
  Discounted, NStage,
};

enum class PsiKind { Identity, Exp };

struct CriterionSpec {
  CriterionKind kind = CriterionKind::NStage;
  int horizon = 1;
  /// Discount factor for Discounted, exponent for the exponential psi.
  double beta = 0.0;
  double alpha = 1.0;
  PsiKind psi = PsiKind::Identity;
};

/// Throws ValidationError on out-of-range parameters.
void validate_criterion(const CriterionSpec& spec);

std::string to_string(CriterionKind kind);
CriterionKind parse_criterion_kind(const std::string& name);

}  // namespace stratmeas
