#include "stratmeas/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "stratmeas/errors.hpp"
#include "stratmeas/rng.hpp"

namespace stratmeas {

namespace {

using Layer = std::map<std::vector<int>, double>;

bool stationary_class(const Policy& policy) {
  return policy.policy_class == PolicyClass::Stationary || policy.policy_class == PolicyClass::SemiStationary;
}

/// Shortest history summary from which the policy's next kernel can be read.
std::vector<int> compress(PolicyClass cls, std::vector<int> h) {
  switch (cls) {
    case PolicyClass::History: return h;
    case PolicyClass::SemiMarkov:
    case PolicyClass::SemiStationary: return {h.front(), h.back()};
    default: return {h.back()};
  }
}

std::vector<int> extend(PolicyClass cls, const std::vector<int>& key, int a, int y) {
  if (cls == PolicyClass::History) {
    auto out = key;
    out.push_back(a);
    out.push_back(y);
    return out;
  }
  return compress(cls, {key.front(), y});
}

/// Laws of the compressed h_n for n < count.
std::vector<Layer> state_layers(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                                int count) {
  if (static_cast<int>(p0.size()) != model.num_states) {
    throw ValidationError("initial distribution has wrong length");
  }
  std::vector<Layer> out;
  Layer layer;
  for (int x = 0; x < model.num_states; ++x) {
    if (p0[x] > 0) layer[compress(policy.policy_class, {x})] += p0[x];
  }
  for (int n = 0; n < count; ++n) {
    out.push_back(layer);
    if (n + 1 == count) break;
    Layer next;
    for (const auto& [key, p] : layer) {
      const int x = key.back();
      auto row = policy.row(n, key);
      for (int a = 0; a < model.num_actions; ++a) {
        if (!(row[a] > 0)) continue;
        const auto& q = model.transition[x][a];
        for (int y = 0; y < model.num_states; ++y) {
          if (q[y] > 0) next[extend(policy.policy_class, key, a, y)] += p * row[a] * q[y];
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

/// E c(x_n, a_n) for n < count.
std::vector<double> expected_stage_costs(const FiniteMdp& model, const Policy& policy,
                                         const std::vector<double>& p0, int count) {
  auto gamma = stage_marginals(model, policy, p0, count);
  std::vector<double> out(count, 0.0);
  for (int n = 0; n < count; ++n) {
    for (int x = 0; x < model.num_states; ++x) {
      for (int a : model.admissible[x]) out[n] += gamma[n][x][a] * model.cost[x][a];
    }
  }
  return out;
}

struct TailStats {
  double upper;
  double lower;
  double window_upper;
  double window_lower;
};

/// Running-average statistics over n in [ceil(H/2), H] of a cost sequence.
TailStats tail_stats(const std::vector<double>& costs) {
  const int H = static_cast<int>(costs.size());
  std::vector<double> prefix(H + 1, 0.0);
  for (int k = 0; k < H; ++k) prefix[k + 1] = prefix[k] + costs[k];
  TailStats s{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int n = (H + 1) / 2; n <= H; ++n) {
    if (n == 0) continue;
    double avg = prefix[n] / n;
    s.upper = std::max(s.upper, avg);
    s.lower = std::min(s.lower, avg);
    for (int j = 0; j + n <= H; ++j) {
      double w = (prefix[j + n] - prefix[j]) / n;
      s.window_upper = std::max(s.window_upper, w);
      s.window_lower = std::min(s.window_lower, w);
    }
  }
  return s;
}

double pick(const TailStats& s, CriterionKind kind) {
  switch (kind) {
    case CriterionKind::J1:
    case CriterionKind::TJ1: return s.upper;
    case CriterionKind::J2:
    case CriterionKind::TJ2: return s.lower;
    case CriterionKind::J3:
    case CriterionKind::TJ3: return s.window_upper;
    case CriterionKind::J4:
    case CriterionKind::TJ4: return s.window_lower;
    default: throw ValidationError("not an average-cost criterion: " + to_string(kind));
  }
}

int truncation_horizon(const Policy& policy, int horizon) {
  if (horizon > 0) return horizon;
  if (is_stagewise(policy.policy_class)) return policy.horizon;
  throw ValidationError("truncated evaluation needs a horizon");
}

/// Per-initial-state stationary views of a stationary-class policy.
Policy stationary_view(const Policy& policy, int x0) {
  if (policy.policy_class == PolicyClass::Stationary) return policy;
  std::vector<int> prefix{x0};
  return shift_policy(policy, prefix);
}

/// Pathwise averages and their probabilities from initial law p0.
std::vector<std::pair<double, double>> absorbed_atoms(const FiniteMdp& model, const Policy& policy,
                                                      const std::vector<double>& p0) {
  if (!stationary_class(policy)) {
    throw NonStationaryExact("exact chain evaluation needs a stationary or semi-stationary policy");
  }
  if (static_cast<int>(p0.size()) != model.num_states) {
    throw ValidationError("initial distribution has wrong length");
  }
  std::vector<std::pair<double, double>> atoms;
  if (policy.policy_class == PolicyClass::Stationary) {
    auto chain = analyze_chain(model, policy);
    for (std::size_t c = 0; c < chain.classes.size(); ++c) {
      double mass = 0.0;
      for (int x = 0; x < model.num_states; ++x) mass += p0[x] * chain.absorption[x][c];
      atoms.emplace_back(chain.class_average[c], mass);
    }
    return atoms;
  }
  for (int x0 = 0; x0 < model.num_states; ++x0) {
    if (!(p0[x0] > 0)) continue;
    auto chain = analyze_chain(model, stationary_view(policy, x0));
    for (std::size_t c = 0; c < chain.classes.size(); ++c) {
      atoms.emplace_back(chain.class_average[c], p0[x0] * chain.absorption[x0][c]);
    }
  }
  return atoms;
}

int sample_index(const std::vector<double>& probs, double u) {
  double cumulative = 0.0;
  int last = -1;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
    if (!(probs[i] > 0)) continue;
    cumulative += probs[i];
    last = i;
    if (u < cumulative) return i;
  }
  return last;
}

/// Per-path tail statistics of simulated cost sequences.
std::vector<TailStats> simulate_paths(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                                      int horizon, const EvaluationOptions& options) {
  if (options.samples < 1) throw ValidationError("at least one sample is required");
  std::vector<TailStats> out;
  out.reserve(options.samples);
  std::vector<double> costs(horizon);
  std::vector<int> h;
  for (long s = 0; s < options.samples; ++s) {
    CounterRng rng(options.seed, static_cast<std::uint64_t>(s));
    h.assign(1, sample_index(p0, rng.uniform()));
    for (int n = 0; n < horizon; ++n) {
      const int x = h.back();
      int a = sample_index(policy.row(n, h), rng.uniform());
      costs[n] = model.cost[x][a];
      if (n + 1 == horizon) break;
      int y = sample_index(model.transition[x][a], rng.uniform());
      h.push_back(a);
      h.push_back(y);
    }
    out.push_back(tail_stats(costs));
  }
  return out;
}

/// Atoms of (cost, probability) merged within 1e-12 after sorting.
void merge_atoms(std::vector<std::pair<double, double>>& atoms) {
  std::sort(atoms.begin(), atoms.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& [v, p] : atoms) {
    if (!merged.empty() && v - merged.back().first <= 1e-12) {
      merged.back().second += p;
    } else {
      merged.emplace_back(v, p);
    }
  }
  atoms = std::move(merged);
}

double certainty_equivalent(const std::vector<std::pair<double, double>>& atoms, PsiKind psi, double beta) {
  if (psi == PsiKind::Identity) {
    double mean = 0.0;
    for (const auto& [v, p] : atoms) mean += p * v;
    return mean;
  }
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& [v, p] : atoms) {
    if (p > 0) top = std::max(top, std::log(p) + beta * v);
  }
  double sum = 0.0;
  for (const auto& [v, p] : atoms) {
    if (p > 0) sum += std::exp(std::log(p) + beta * v - top);
  }
  double out = (top + std::log(sum)) / beta;
  if (!std::isfinite(out)) throw Overflow("exponential utility left the double range; use a smaller beta");
  return out;
}

/// Certainty-equivalent averages for n = 1..length of the window starting
/// at stage j with compressed-history law `start`.
std::vector<double> window_values(const FiniteMdp& model, const Policy& policy, const Layer& start, int j,
                                  int length, PsiKind psi, double beta) {
  std::map<std::vector<int>, std::vector<std::pair<double, double>>> state;
  for (const auto& [key, p] : start) state[key].emplace_back(0.0, p);
  std::vector<double> out;
  for (int k = 0; k < length; ++k) {
    std::vector<std::pair<double, double>> totals;
    std::map<std::vector<int>, std::vector<std::pair<double, double>>> next;
    for (const auto& [key, atoms] : state) {
      const int x = key.back();
      auto row = policy.row(j + k, key);
      for (int a = 0; a < model.num_actions; ++a) {
        if (!(row[a] > 0)) continue;
        const double c = model.cost[x][a];
        for (const auto& [s, p] : atoms) totals.emplace_back(s + c, p * row[a]);
        if (k + 1 == length) continue;
        const auto& q = model.transition[x][a];
        for (int y = 0; y < model.num_states; ++y) {
          if (!(q[y] > 0)) continue;
          auto& target = next[extend(policy.policy_class, key, a, y)];
          for (const auto& [s, p] : atoms) target.emplace_back(s + c, p * row[a] * q[y]);
        }
      }
    }
    merge_atoms(totals);
    out.push_back(certainty_equivalent(totals, psi, beta) / (k + 1));
    for (auto& [key, atoms] : next) merge_atoms(atoms);
    state = std::move(next);
  }
  return out;
}

}  // namespace

double FiniteDistribution::mean() const {
  double m = 0.0;
  for (const auto& [v, p] : atoms) m += v * p;
  return m;
}

FiniteDistribution make_distribution(std::vector<std::pair<double, double>> atoms, double merge_tol) {
  for (const auto& [v, p] : atoms) {
    if (!std::isfinite(v) || !(p >= 0)) throw ValidationError("distribution atoms must be finite and nonnegative");
  }
  std::sort(atoms.begin(), atoms.end());
  FiniteDistribution out;
  for (const auto& [v, p] : atoms) {
    if (p == 0) continue;
    if (!out.atoms.empty() && v - out.atoms.back().first <= merge_tol) {
      out.atoms.back().second += p;
    } else {
      out.atoms.emplace_back(v, p);
    }
  }
  return out;
}

double cvar(const FiniteDistribution& dist, double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw ValidationError("alpha must lie in (0,1]");
  if (dist.atoms.empty()) throw ValidationError("empty distribution");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [z, pz] : dist.atoms) {
    double excess = 0.0;
    for (const auto& [v, p] : dist.atoms) excess += p * std::max(v - z, 0.0);
    best = std::min(best, z + excess / alpha);
  }
  return best;
}

double var(const FiniteDistribution& dist, double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw ValidationError("alpha must lie in (0,1]");
  if (dist.atoms.empty()) throw ValidationError("empty distribution");
  double cdf = 0.0;
  for (const auto& [v, p] : dist.atoms) {
    cdf += p;
    if (cdf >= 1.0 - alpha - 1e-12) return v;
  }
  return dist.atoms.back().first;
}

std::string to_string(EvaluationMethod method) {
  switch (method) {
    case EvaluationMethod::Exact: return "exact";
    case EvaluationMethod::ExactChain: return "exact-chain";
    case EvaluationMethod::Truncated: return "truncated";
    case EvaluationMethod::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

std::vector<std::vector<std::vector<double>>> stage_marginals(const FiniteMdp& model, const Policy& policy,
                                                              const std::vector<double>& p0, int horizon) {
  std::vector<std::vector<std::vector<double>>> out(
      horizon, std::vector<std::vector<double>>(model.num_states, std::vector<double>(model.num_actions, 0.0)));
  if (horizon <= 0) return out;
  auto layers = state_layers(model, policy, p0, horizon);
  for (int n = 0; n < horizon; ++n) {
    for (const auto& [key, p] : layers[n]) {
      auto row = policy.row(n, key);
      for (int a = 0; a < model.num_actions; ++a) out[n][key.back()][a] += p * row[a];
    }
  }
  return out;
}

double n_stage_cost(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0, int n, int j) {
  if (n < 0 || j < 0) throw ValidationError("stage counts must be nonnegative");
  auto costs = expected_stage_costs(model, policy, p0, j + n);
  double sum = 0.0;
  for (int k = j; k < j + n; ++k) sum += costs[k];
  return sum;
}

double discounted_cost(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0, double beta,
                       int horizon) {
  auto costs = expected_stage_costs(model, policy, p0, horizon);
  double sum = 0.0;
  double w = 1.0;
  for (double c : costs) {
    sum += w * c;
    w *= beta;
  }
  return sum;
}

ChainStructure analyze_chain(const FiniteMdp& model, const Policy& stationary) {
  if (stationary.policy_class != PolicyClass::Stationary) {
    throw NonStationaryExact("chain analysis needs a stationary policy");
  }
  const int N = model.num_states;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(N);
  for (int x = 0; x < N; ++x) {
    std::vector<int> key{x};
    auto row = stationary.row_for_key(key);
    for (int a = 0; a < model.num_actions; ++a) {
      if (!(row[a] > 0)) continue;
      if (!model.is_admissible(x, a)) throw ValidationError("policy puts mass on an inadmissible action");
      r(x) += row[a] * model.cost[x][a];
      for (int y = 0; y < N; ++y) P(x, y) += row[a] * model.transition[x][a][y];
    }
  }

  std::vector<std::vector<char>> reach(N, std::vector<char>(N, 0));
  for (int s = 0; s < N; ++s) {
    std::vector<int> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < N; ++y) {
        if (P(x, y) > 0 && !reach[s][y]) {
          reach[s][y] = 1;
          stack.push_back(y);
        }
      }
    }
  }

  ChainStructure out;
  std::vector<int> class_of(N, -1);
  for (int x = 0; x < N; ++x) {
    if (class_of[x] >= 0) continue;
    std::vector<int> members;
    for (int y = 0; y < N; ++y) {
      if (reach[x][y] && reach[y][x]) members.push_back(y);
    }
    bool closed = true;
    for (int m : members) {
      for (int y = 0; y < N; ++y) closed = closed && (!reach[m][y] || reach[y][m]);
    }
    if (!closed) continue;
    for (int m : members) class_of[m] = static_cast<int>(out.classes.size());
    out.classes.push_back(members);
  }

  for (const auto& members : out.classes) {
    const int m = static_cast<int>(members.size());
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < m; ++k) A(i, k) = P(members[k], members[i]) - (i == k ? 1.0 : 0.0);
    }
    A.row(m - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b(m - 1) = 1.0;
    Eigen::VectorXd pi = A.fullPivLu().solve(b);
    double g = 0.0;
    for (int i = 0; i < m; ++i) g += pi(i) * r(members[i]);
    out.class_average.push_back(g);
  }

  const int C = static_cast<int>(out.classes.size());
  out.absorption.assign(N, std::vector<double>(C, 0.0));
  std::vector<int> transient;
  for (int x = 0; x < N; ++x) {
    if (class_of[x] >= 0) {
      out.absorption[x][class_of[x]] = 1.0;
    } else {
      transient.push_back(x);
    }
  }
  if (!transient.empty()) {
    const int T = static_cast<int>(transient.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(T, T);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(T, C);
    for (int i = 0; i < T; ++i) {
      for (int k = 0; k < T; ++k) M(i, k) -= P(transient[i], transient[k]);
      for (int y = 0; y < N; ++y) {
        if (class_of[y] >= 0) rhs(i, class_of[y]) += P(transient[i], y);
      }
    }
    Eigen::MatrixXd B = M.fullPivLu().solve(rhs);
    for (int i = 0; i < T; ++i) {
      for (int c = 0; c < C; ++c) out.absorption[transient[i]][c] = B(i, c);
    }
  }
  return out;
}

EvaluationResult average_cost(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                              CriterionKind kind, int horizon, const EvaluationOptions& options) {
  EvaluationResult result;
  if (stationary_class(policy) && !options.force_truncated) {
    pick(TailStats{}, kind);
    // On a finite chain every windowed average converges to the Cesaro limit
    // uniformly in the window start, so all four criteria coincide.
    for (const auto& [g, p] : absorbed_atoms(model, policy, p0)) result.value += g * p;
    result.method = EvaluationMethod::ExactChain;
    result.error_bound = 0.0;
    return result;
  }
  const int H = truncation_horizon(policy, horizon);
  auto costs = expected_stage_costs(model, policy, p0, H);
  result.value = pick(tail_stats(costs), kind);
  result.method = EvaluationMethod::Truncated;
  result.horizon = H;
  double running = 0.0;
  for (int n = 0; n < H; ++n) {
    running += costs[n];
    result.iterates.push_back(running / (n + 1));
  }
  return result;
}

FiniteDistribution pathwise_average_distribution(const FiniteMdp& model, const Policy& policy,
                                                 const std::vector<double>& p0) {
  return make_distribution(absorbed_atoms(model, policy, p0));
}

EvaluationResult pathwise_criteria(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                                   CriterionKind kind, int horizon, const EvaluationOptions& options) {
  EvaluationResult result;
  if (stationary_class(policy) && !options.force_truncated) {
    pick(TailStats{}, kind);
    result.value = pathwise_average_distribution(model, policy, p0).mean();
    result.method = EvaluationMethod::ExactChain;
    result.error_bound = 0.0;
    return result;
  }
  const int H = truncation_horizon(policy, horizon);
  auto paths = simulate_paths(model, policy, p0, H, options);
  double sum = 0.0;
  double sq = 0.0;
  for (const auto& s : paths) {
    double v = pick(s, kind);
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(paths.size());
  result.value = sum / n;
  result.method = EvaluationMethod::MonteCarlo;
  result.horizon = H;
  result.samples = options.samples;
  if (paths.size() > 1) {
    double variance = std::max(0.0, (sq - n * result.value * result.value) / (n - 1));
    result.standard_error = std::sqrt(variance / n);
  }
  return result;
}

EvaluationResult psi_criterion(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                               PsiKind psi, double beta, CriterionKind kind, int horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (psi == PsiKind::Exp && !(beta > 0)) throw ValidationError("exponential psi needs beta > 0");
  if (kind != CriterionKind::Psi && kind != CriterionKind::HatPsi) {
    throw ValidationError("not a psi criterion: " + to_string(kind));
  }
  int last_start = 0;
  if (kind == CriterionKind::HatPsi) {
    last_start = is_stagewise(policy.policy_class) ? policy.horizon - horizon : horizon;
    if (last_start < 0) throw HorizonMismatch("policy horizon shorter than the evaluation horizon");
  }
  auto layers = state_layers(model, policy, p0, last_start + 1);
  EvaluationResult result;
  result.method = EvaluationMethod::Truncated;
  result.horizon = horizon;
  result.iterates.assign(horizon, -std::numeric_limits<double>::infinity());
  for (int j = 0; j <= last_start; ++j) {
    auto values = window_values(model, policy, layers[j], j, horizon, psi, beta);
    for (int k = 0; k < horizon; ++k) result.iterates[k] = std::max(result.iterates[k], values[k]);
  }
  result.value = result.iterates.back();
  return result;
}

EvaluationResult risk_criterion(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                                CriterionKind kind, double alpha, int horizon, const EvaluationOptions& options) {
  if (kind != CriterionKind::CVaR && kind != CriterionKind::VaR) {
    throw ValidationError("not a risk criterion: " + to_string(kind));
  }
  auto apply = [&](const FiniteDistribution& d) { return kind == CriterionKind::CVaR ? cvar(d, alpha) : var(d, alpha); };
  EvaluationResult result;
  if (stationary_class(policy) && !options.force_truncated) {
    result.value = apply(pathwise_average_distribution(model, policy, p0));
    result.method = EvaluationMethod::ExactChain;
    result.error_bound = 0.0;
    return result;
  }
  const int H = truncation_horizon(policy, horizon);
  auto paths = simulate_paths(model, policy, p0, H, options);
  const double w = 1.0 / static_cast<double>(paths.size());
  std::vector<std::pair<double, double>> atoms;
  for (const auto& s : paths) atoms.emplace_back(s.upper, w);
  result.value = apply(make_distribution(std::move(atoms)));
  result.method = EvaluationMethod::MonteCarlo;
  result.horizon = H;
  result.samples = options.samples;
  return result;
}

EvaluationResult evaluate(const FiniteMdp& model, const Policy& policy, const std::vector<double>& p0,
                          const CriterionSpec& spec, const EvaluationOptions& options) {
  validate_criterion(spec);
  switch (spec.kind) {
    case CriterionKind::NStage: {
      EvaluationResult r;
      r.value = n_stage_cost(model, policy, p0, spec.horizon);
      r.horizon = spec.horizon;
      r.error_bound = 0.0;
      return r;
    }
    case CriterionKind::Discounted: {
      EvaluationResult r;
      r.value = discounted_cost(model, policy, p0, spec.beta, spec.horizon);
      r.horizon = spec.horizon;
      r.error_bound = 0.0;
      return r;
    }
    case CriterionKind::J1:
    case CriterionKind::J2:
    case CriterionKind::J3:
    case CriterionKind::J4: return average_cost(model, policy, p0, spec.kind, spec.horizon, options);
    case CriterionKind::TJ1:
    case CriterionKind::TJ2:
    case CriterionKind::TJ3:
    case CriterionKind::TJ4: return pathwise_criteria(model, policy, p0, spec.kind, spec.horizon, options);
    case CriterionKind::Psi:
    case CriterionKind::HatPsi: return psi_criterion(model, policy, p0, spec.psi, spec.beta, spec.kind, spec.horizon);
    case CriterionKind::CVaR:
    case CriterionKind::VaR: return risk_criterion(model, policy, p0, spec.kind, spec.alpha, spec.horizon, options);
  }
  throw ValidationError("unknown criterion");
}

}  // namespace stratmeas
