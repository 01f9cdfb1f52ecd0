#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"

namespace stratmeas {

/// Finite-support law of a real random variable; atoms sorted by value.
struct FiniteDistribution {
  std::vector<std::pair<double, double>> atoms;

  double mean() const;
};

/// Sorts, merges values within `merge_tol` and drops zero-probability atoms.
FiniteDistribution make_distribution(std::vector<std::pair<double, double>> atoms, double merge_tol = 1e-12);

/// min_z z + E[(Z - z)_+] / alpha, attained at a support point.
double cvar(const FiniteDistribution& dist, double alpha);

/// Smallest support value whose CDF is at least 1 - alpha.
double var(const FiniteDistribution& dist, double alpha);

enum class EvaluationMethod { Exact, ExactChain, Truncated, MonteCarlo };

std::string to_string(EvaluationMethod method);

struct EvaluationResult {
  double value = 0.0;
  EvaluationMethod method = EvaluationMethod::Exact;
  int horizon = 0;
  long samples = 0;
  /// Zero for exact results; empty when no bound is known.
  std::optional<double> error_bound;
  std::optional<double> standard_error;
  /// Running values per n for truncated criteria.
  std::vector<double> iterates;
};

struct EvaluationOptions {
  std::uint64_t seed = 0;
  long samples = 10000;
  /// Use truncation even where the chain structure allows an exact answer.
  bool force_truncated = false;
};

/// gamma_n(x, a) for n < horizon, by forward propagation.
std::vector<std::vector<std::vector<double>>> stage_marginals(const FiniteMdp& model, const Policy& policy,
                                                              const std::vector<double>& p0, int horizon);

/// J_{n,j} = E sum_{k<n} c(x_{k+j}, a_{k+j}).
double n_stage_cost(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0, int n,
                    int j = 0);

/// E sum_{k<horizon} beta^k c(x_k, a_k).
double discounted_cost(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                       double beta, int horizon);

/// Recurrent structure of the chain induced by a stationary policy.
struct ChainStructure {
  std::vector<std::vector<int>> classes;
  std::vector<double> class_average;
  /// absorption[x][c]: probability that the chain started at x ends in class c.
  std::vector<std::vector<double>> absorption;
};

ChainStructure analyze_chain(const FiniteMdp& model, const Policy& stationary);

/// Expected average cost. Stationary and semi-stationary policies are solved
/// exactly from the recurrent classes; other policies (or `force_truncated`)
/// use the tail n in [ceil(H/2), H] of the running averages up to `horizon`.
EvaluationResult average_cost(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                              CriterionKind kind, int horizon = 0, const EvaluationOptions& options = {});

/// Law of the pathwise average cost; requires a stationary-class policy.
FiniteDistribution pathwise_average_distribution(const FiniteMdp& model, const Policy& policy,
                                                 const std::vector<double>& p0);

/// TJ1..TJ4: exact for stationary classes, otherwise seeded Monte Carlo over
/// paths of length `horizon` with tail statistics as in average_cost.
EvaluationResult pathwise_criteria(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                                   CriterionKind kind, int horizon = 0, const EvaluationOptions& options = {});

/// (1/n) psi^{-1}(E psi(sum_{k<n} c)) at n = horizon, from the exact joint law
/// of state and accumulated cost. HAT_PSI takes the sup over window starts j.
EvaluationResult psi_criterion(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                               PsiKind psi, double beta, CriterionKind kind, int horizon);

/// Risk criteria of the pathwise average cost: exact law for stationary
/// classes, otherwise the empirical law of the Monte Carlo tail statistic.
EvaluationResult risk_criterion(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                                CriterionKind kind, double alpha, int horizon = 0,
                                const EvaluationOptions& options = {});

/// Dispatch on `spec.kind`.
EvaluationResult evaluate(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                          const CriterionSpec& spec, const EvaluationOptions& options = {});

}  // namespace stratmeas
