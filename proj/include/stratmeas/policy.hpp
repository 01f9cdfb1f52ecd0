#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stratmeas/model.hpp"

namespace stratmeas {

enum class PolicyClass { History, Markov, SemiMarkov, Stationary, SemiStationary };

std::string to_string(PolicyClass cls);
PolicyClass parse_policy_class(const std::string& name);

/// True for classes whose kernels may change with the stage index.
bool is_stagewise(PolicyClass cls);

/// Conditioning key of a kernel lookup at stage n.
///
/// `history` is h_n = (x_0, a_0, ..., x_n). The key is h_n itself for
/// History, {n, x_n} for Markov, {n, x_0, x_n} for SemiMarkov, {x_n} for
/// Stationary and {x_0, x_n} for SemiStationary. At stage 0 a semi-stationary
/// policy reads its kernel at (x_0, x_0).
std::vector<int> conditioning_key(PolicyClass cls, int n, std::span<const int> history);

/// Current state x_n encoded in a conditioning key.
int key_state(PolicyClass cls, std::span<const int> key);

/// Stage of a History or stagewise key; nullopt for stationary classes.
std::optional<int> key_stage(PolicyClass cls, std::span<const int> key);

/// A policy of one of the structural classes.
///
/// Kernels are stored sparsely by conditioning key. A lookup on a key with no
/// entry falls back to the point mass on `fallback[x_n]`, the lowest-id
/// admissible action, so unreachable conditioning values need no kernel.
template <class T>
struct BasicPolicy {
  PolicyClass policy_class = PolicyClass::Stationary;
  bool randomized = true;
  /// Number of stages with kernels; ignored by the stationary classes.
  int horizon = 1;
  int num_actions = 0;
  std::vector<int> fallback;
  std::map<std::vector<int>, std::vector<T>> kernels;

  /// Action distribution at stage n given h_n. Throws HorizonMismatch past the
  /// horizon of a stagewise policy.
  std::vector<T> row(int n, std::span<const int> history) const;
  std::vector<T> row_for_key(std::span<const int> key) const;

  void set(std::vector<int> key, std::vector<T> probabilities) {
    kernels[std::move(key)] = std::move(probabilities);
  }
  void set_action(std::vector<int> key, int action);
};

using Policy = BasicPolicy<double>;
using ExactPolicy = BasicPolicy<Rational>;

/// Empty policy of the given class whose fallback is taken from `admissible`.
template <class T>
BasicPolicy<T> make_policy(const std::vector<std::vector<int>>& admissible, int num_actions,
                           PolicyClass cls, int horizon, bool randomized);

template <class T, class M>
BasicPolicy<T> make_policy(const BasicMdp<M>& model, PolicyClass cls, int horizon, bool randomized) {
  return make_policy<T>(model.admissible, model.num_actions, cls, horizon, randomized);
}

/// Nonrandomized stationary policy choosing `actions[x]` at x.
Policy stationary_policy(const FiniteMdp& model, const std::vector<int>& actions);

Policy to_double(const ExactPolicy& policy);

/// Row sums, control constraint and the Dirac requirement of nonrandomized
/// policies, checked on every stored kernel.
template <class T>
ValidationReport validate_policy(const std::vector<std::vector<int>>& admissible,
                                 const BasicPolicy<T>& policy);

template <class T, class M>
ValidationReport validate_policy(const BasicMdp<M>& model, const BasicPolicy<T>& policy) {
  return validate_policy(model.admissible, policy);
}

/// Inverse-CDF selection: the action whose half-open cumulative interval
/// [c_{k-1}, c_k), in action-id order, contains theta. theta = 1 selects the
/// last action with positive mass.
template <class T>
int select_action(const std::vector<T>& row, const T& theta);

/// Nonrandomized policy a_n = f_n(theta_n, .) whose image of the uniform law
/// reproduces every kernel. Stationary (semi-stationary) input keeps its class
/// when all thetas coincide and becomes Markov (semi-Markov) otherwise.
template <class T>
BasicPolicy<T> uniform_parameter_policy(const BasicPolicy<T>& policy, const std::vector<T>& thetas);

struct EnumerationOptions {
  std::size_t cap = 1'000'000;
  /// Restrict conditioning values to those reachable from this state.
  std::optional<int> initial_state;
};

/// Mixed-radix view of all nonrandomized policies of a class over a list of
/// conditioning sites. Index 0 selects the lowest action everywhere; the
/// first site (in lexicographic key order) is the most significant digit.
class DeterministicEnumerator {
 public:
  DeterministicEnumerator(PolicyClass cls, int horizon, int num_actions, std::vector<int> fallback,
                          std::vector<std::pair<std::vector<int>, std::vector<int>>> sites,
                          std::size_t cap);

  std::size_t size() const { return count_; }
  Policy at(std::size_t index) const;
  std::vector<int> choices_at(std::size_t index) const;
  const std::vector<std::pair<std::vector<int>, std::vector<int>>>& sites() const { return sites_; }

 private:
  PolicyClass cls_;
  int horizon_;
  int num_actions_;
  std::vector<int> fallback_;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> sites_;
  std::size_t count_ = 1;
};

/// Conditioning sites of the class. Without an initial state: every state for
/// the stationary classes, every (n, x) or (n, x0, x) for the stagewise
/// Markov classes, and every reachable history for History.
DeterministicEnumerator make_enumerator(const FiniteMdp& model, PolicyClass cls, int horizon,
                                        const EnumerationOptions& options = {});

std::vector<Policy> enumerate_deterministic(const FiniteMdp& model, PolicyClass cls, int horizon,
                                            const EnumerationOptions& options = {});

/// Histories h_n, n < horizon, reachable from `initial_states` under some
/// admissible action sequence.
std::vector<std::vector<int>> reachable_histories(const FiniteMdp& model,
                                                  const std::vector<int>& initial_states, int horizon);

/// Player 1 conditions on i_n = (x_0, a^1_0, ..., x_n), player 2 on the joint
/// history h_n whose actions are joint ids a1 * |A2| + a2.
struct MinimaxPolicyPair {
  Policy player1;
  Policy player2;
};

/// Shifted policy: stage-n kernel equals the original stage-(n+1) kernel with
/// `prefix` = (x~_0, a~_0) prepended. Semi classes become their Markov and
/// stationary counterparts because x_0 is fixed by the prefix.
Policy shift_policy(const Policy& policy, std::span<const int> prefix);

/// prefix1 = (x~_0, a~^1_0) for player 1, prefix2 = (x~_0, a~_0) for player 2.
MinimaxPolicyPair shift_policy(const MinimaxPolicyPair& pair, std::span<const int> prefix1,
                               std::span<const int> prefix2);

}  // namespace stratmeas
