#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stratmeas/measure.hpp"
#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"

namespace stratmeas {

/// A policy whose conditioning histories are information vectors
/// i_n = (z_0, a_0, ..., z_n). The class decides the key as for ordinary
/// policies with observations in place of states; `fallback` is indexed by
/// observation.
using PomdpPolicy = Policy;

PomdpPolicy make_pomdp_policy(const FinitePomdp& model, PolicyClass cls, int horizon, bool randomized);

/// i_n of an (x, z, a) history prefix of length 3n + 2.
std::vector<int> info_of(const std::vector<int>& xza_history);

/// Law of (x_0, z_0, a_0, ..., x_{H-1}, z_{H-1}, a_{H-1}) with z_n = f(x_n).
StrategicMeasure pomdp_strategic_measure(const FinitePomdp& model, const PomdpPolicy& policy,
                                         const std::vector<double>& p0, int horizon);

/// Same construction with actions drawn from an ordinary policy that sees the
/// states (x_0, a_0, ..., x_n); generally not information-measurable.
StrategicMeasure state_feedback_measure(const FinitePomdp& model, const Policy& policy,
                                        const std::vector<double>& p0, int horizon);

/// Checks admissibility w.r.t. the information-vector constraint, Q_n = q,
/// z_n = f(x_n), that nu_n(.|h_n) depends on h_n only through i_n, and, when
/// `nonrandomized`, that every nu_n row is a point mass.
MembershipReport verify_pomdp_membership(const FinitePomdp& model, const StrategicMeasure& measure,
                                         bool nonrandomized = false, double tol = kCompareTolerance);

/// History policy on information vectors with the measure's conditionals on
/// supported i_n. Throws NotInClass.
PomdpPolicy recover_pomdp_policy(const FinitePomdp& model, const StrategicMeasure& measure,
                                 double tol = kCompareTolerance);

/// History policy on state histories reachable from supp p0 that plays
/// policy(. | i_n) after h_n.
Policy lift_pomdp_policy(const FinitePomdp& model, const PomdpPolicy& policy, const std::vector<double>& p0,
                         int horizon);

/// Every deterministic information-vector policy over the i_n (n < horizon)
/// reachable from supp p0.
DeterministicEnumerator pomdp_enumerator(const FinitePomdp& model, const std::vector<double>& p0, int horizon,
                                         std::size_t cap = 1'000'000);

struct PomdpOptimum {
  std::vector<double> values;
  std::vector<PomdpPolicy> argmin;
};

/// Minimum of a finite-horizon criterion over deterministic information-vector
/// policies, one entry per initial distribution.
PomdpOptimum pomdp_optimal_value(const FinitePomdp& model, const CriterionSpec& criterion,
                                 const std::vector<std::vector<double>>& initial_distributions,
                                 std::size_t cap = 1'000'000);

}  // namespace stratmeas
