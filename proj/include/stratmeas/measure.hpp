#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"

namespace stratmeas {

/// Law of the truncated trajectory h'_{H-1} = (x_0, a_0, ..., x_{H-1}, a_{H-1}).
///
/// Only positive-probability histories are stored. `stride` is the number of
/// ids per stage: 2 for (x, a) trajectories, 3 for partially observed
/// (x, z, a) trajectories.
template <class T>
struct BasicStrategicMeasure {
  int horizon = 0;
  int stride = 2;
  std::map<std::vector<int>, T> prob;

  T total() const {
    T sum = 0;
    for (const auto& [h, p] : prob) sum += p;
    return sum;
  }
};

using StrategicMeasure = BasicStrategicMeasure<double>;
using ExactMeasure = BasicStrategicMeasure<Rational>;

/// p(h'_{H-1}) = p0(x_0) prod_k mu_k(a_k | .) prod_k q(x_{k+1} | x_k, a_k).
template <class T>
BasicStrategicMeasure<T> strategic_measure(const BasicMdp<T>& model, const BasicPolicy<T>& policy,
                                           const std::vector<T>& p0, int horizon);

StrategicMeasure to_double(const ExactMeasure& measure);

/// Largest absolute probability difference over the union of supports.
template <class T>
double max_abs_difference(const BasicStrategicMeasure<T>& a, const BasicStrategicMeasure<T>& b);

template <class T>
bool measures_equal(const BasicStrategicMeasure<T>& a, const BasicStrategicMeasure<T>& b,
                    double tol = kCompareTolerance);

/// Distribution of x_0.
template <class T>
std::vector<T> initial_distribution(const BasicStrategicMeasure<T>& measure, int num_states);

/// gamma_n(x, a), the law of (x_n, a_n), for n < horizon.
template <class T>
std::vector<std::vector<std::vector<T>>> state_action_marginals(const BasicStrategicMeasure<T>& measure,
                                                                int num_states, int num_actions);

/// Marginal of the prefix of `length` ids (h_n has 2n+1 ids, h'_n has 2n+2).
template <class T>
std::map<std::vector<int>, T> prefix_marginal(const BasicStrategicMeasure<T>& measure, int length);

/// Conditional kernels computed on supported conditioning values:
/// `action[n]` maps h_n to nu_n(.|h_n); `successor[n]` maps h'_n to
/// Q_n(.|h'_n) for n < H-1.
template <class T>
struct BasicConditionalKernels {
  std::vector<std::map<std::vector<int>, std::vector<T>>> action;
  std::vector<std::map<std::vector<int>, std::vector<T>>> successor;
};

template <class T>
BasicConditionalKernels<T> conditional_kernels(const BasicStrategicMeasure<T>& measure, int num_states,
                                               int num_actions);

/// Rebuilds a measure from its initial law, nu_n and the model kernel q.
template <class T>
BasicStrategicMeasure<T> rebuild_measure(const BasicMdp<T>& model, const std::vector<T>& p0,
                                         const BasicConditionalKernels<T>& kernels, int horizon);

enum class MeasureClass {
  S, SMarkov, SSemiMarkov, SStationary, SSemiStationary,
  SNonrand, SMarkovNonrand, SSemiMarkovNonrand, SStationaryNonrand, SSemiStationaryNonrand,
};

std::string to_string(MeasureClass cls);
MeasureClass parse_measure_class(const std::string& name);
PolicyClass policy_class_of(MeasureClass cls);
bool is_nonrandomized(MeasureClass cls);

/// Two supported histories whose action conditionals should agree but do not.
struct StructureWitness {
  int stage_a = 0;
  std::vector<int> history_a;
  int stage_b = 0;
  std::vector<int> history_b;
};

struct MembershipReport {
  bool member = true;
  std::vector<std::string> violations;
  std::optional<StructureWitness> witness;
  /// Normalized sum_{n<H} 2^{-n-1} gamma_n, reported for inspection only.
  std::vector<std::vector<double>> tilde_gamma;
};

/// Checks, on supported histories, admissibility of (x_n, a_n), Q_n = q, and
/// the structure of nu_n required by the class: dependence on x_n only
/// (Markov), on (x_0, x_n) (semi-Markov), the same across stages
/// (stationary), and point masses (nonrandomized).
template <class T>
MembershipReport verify_membership(const BasicMdp<T>& model, const BasicStrategicMeasure<T>& measure,
                                   MeasureClass cls, double tol = kCompareTolerance);

/// Policy of the class whose kernels are the measure's conditionals on
/// supported conditioning values and the fallback elsewhere. Throws NotInClass.
template <class T>
BasicPolicy<T> recover_policy(const BasicMdp<T>& model, const BasicStrategicMeasure<T>& measure,
                              MeasureClass cls, double tol = kCompareTolerance);

template <class T>
struct BasicMixture {
  std::vector<std::pair<BasicPolicy<T>, T>> components;

  T total_weight() const {
    T sum = 0;
    for (const auto& c : components) sum += c.second;
    return sum;
  }
};

using MixtureDecomposition = BasicMixture<double>;
using ExactMixture = BasicMixture<Rational>;

/// Exact finite mixture of nonrandomized policies reproducing the measure of
/// `policy`. Each stage n draws one uniform parameter theta_n shared by every
/// conditioning value; the cells cut out of [0,1] by the kernels' cumulative
/// breakpoints give the components and their weights. History, Markov and
/// semi-Markov inputs give components of the same class; stationary and
/// semi-stationary inputs give Markov and semi-Markov components.
template <class T>
BasicMixture<T> decompose_nonrandomized(const BasicMdp<T>& model, const BasicPolicy<T>& policy,
                                        const std::vector<T>& p0, int horizon,
                                        std::size_t cap = 1'000'000);

template <class T>
BasicStrategicMeasure<T> mixture_measure(const BasicMdp<T>& model, const BasicMixture<T>& mixture,
                                         const std::vector<T>& p0, int horizon);

/// Markov policy whose stage-n kernel at x is the law of a_n given x_n = x;
/// it reproduces every gamma_n of the original policy.
template <class T>
BasicPolicy<T> markov_reduction(const BasicMdp<T>& model, const BasicPolicy<T>& policy,
                                const std::vector<T>& p0, int horizon);

}  // namespace stratmeas
