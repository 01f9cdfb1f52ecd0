#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stratmeas/criteria.hpp"
#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"

namespace stratmeas {

struct OptimizeOptions {
  std::size_t cap = 1'000'000;
  EvaluationOptions evaluation;
};

/// Minimum of a criterion over the deterministic members of a policy class,
/// per initial state.
struct ClassOptimum {
  PolicyClass policy_class = PolicyClass::Stationary;
  CriterionSpec criterion;
  std::vector<double> values;
  std::vector<Policy> argmin;
  std::string method = "enumeration";
  /// Expected-cost criteria are linear along mixtures, so no randomized
  /// member of the class does better than the deterministic minimum.
  bool randomization_certified = false;
  /// Per initial state: the enumeration and every candidate's value, in order.
  std::vector<DeterministicEnumerator> candidates;
  std::vector<std::vector<double>> candidate_values;

  std::string label() const {
    return randomization_certified ? "class optimum" : "deterministic-class optimum";
  }
};

/// Exhaustive search; ties go to the first candidate in enumeration order.
/// Pathwise and risk criteria of the pathwise average are accepted only for
/// the stationary classes.
ClassOptimum optimal_value(const FiniteMdp& model, PolicyClass cls, const CriterionSpec& criterion,
                           const OptimizeOptions& options = {});

struct EpsOptimalSelection {
  std::vector<Policy> per_state;
  std::vector<double> values;
  /// One policy serving every initial state, for classes whose kernels can
  /// be indexed by x_0.
  std::optional<Policy> combined;
};

/// First candidate per state, in enumeration order, with value <= g*(x) + epsilon.
EpsOptimalSelection eps_optimal_policy(const ClassOptimum& opt, double epsilon);

struct ClassComparison {
  std::vector<PolicyClass> classes;
  /// values[c][x]
  std::vector<std::vector<double>> values;
  /// all_equal[x]: every class attains the same g*(x) within 1e-9.
  std::vector<bool> all_equal;
};

ClassComparison class_comparison(const FiniteMdp& model, const CriterionSpec& criterion,
                                 const std::vector<PolicyClass>& classes, const OptimizeOptions& options = {});

}  // namespace stratmeas
