#include "stratmeas/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

std::string history_label(const std::vector<int>& h) {
  std::string out = "(";
  for (std::size_t i = 0; i < h.size(); ++i) out += (i ? "," : "") + std::to_string(h[i]);
  return out + ")";
}

template <class T>
std::vector<T> normalized(std::vector<T> row) {
  T sum = 0;
  for (const auto& v : row) sum += v;
  if (sum > 0) {
    for (auto& v : row) v /= sum;
  }
  return row;
}

template <class T>
bool rows_equal(const std::vector<T>& a, const std::vector<T>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!nearly_equal(a[i], b[i], tol)) return false;
  }
  return true;
}

template <class T>
bool is_dirac(const std::vector<T>& row, double tol) {
  int positive = 0;
  for (const auto& v : row) {
    if (nearly_equal(v, T(0), tol)) continue;
    if (!nearly_equal(v, T(1), tol)) return false;
    ++positive;
  }
  return positive == 1;
}

template <class T>
int argmax(const std::vector<T>& row) {
  return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
}

/// Breakpoints of the per-stage inverse-CDF partition of [0,1].
template <class T>
std::vector<T> cell_bounds(std::set<T> cuts) {
  std::vector<T> out{T(0)};
  for (const auto& c : cuts) {
    if (c <= 0 || c >= 1) continue;
    out.push_back(c);
  }
  out.push_back(T(1));
  return out;
}

template <>
std::vector<double> cell_bounds(std::set<double> cuts) {
  // Cumulative sums of the same kernel computed along different rows may
  // differ in the last bits; such near-duplicates would only add components
  // of negligible weight.
  std::vector<double> out{0.0};
  for (double c : cuts) {
    if (c - out.back() <= 1e-12 || 1.0 - c <= 1e-12) continue;
    out.push_back(c);
  }
  out.push_back(1.0);
  return out;
}

}  // namespace

template <class T>
BasicStrategicMeasure<T> strategic_measure(const BasicMdp<T>& model, const BasicPolicy<T>& policy,
                                           const std::vector<T>& p0, int horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (static_cast<int>(p0.size()) != model.num_states) {
    throw ValidationError("initial distribution has wrong length");
  }
  if (is_stagewise(policy.policy_class) && horizon > policy.horizon) {
    throw HorizonMismatch("measure horizon " + std::to_string(horizon) + " exceeds policy horizon " +
                          std::to_string(policy.horizon));
  }
  std::map<std::vector<int>, T> layer;
  for (int x = 0; x < model.num_states; ++x) {
    if (p0[x] > 0) layer[{x}] = p0[x];
  }
  BasicStrategicMeasure<T> out;
  out.horizon = horizon;
  out.stride = 2;
  for (int n = 0; n < horizon; ++n) {
    std::map<std::vector<int>, T> next;
    for (const auto& [h, p] : layer) {
      const int x = h.back();
      auto row = policy.row(n, h);
      for (int a = 0; a < model.num_actions; ++a) {
        if (!(row[a] > 0)) continue;
        if (!model.is_admissible(x, a)) {
          throw ValidationError("policy puts mass on inadmissible action " + std::to_string(a) +
                                " at state " + std::to_string(x));
        }
        auto ha = h;
        ha.push_back(a);
        T pa = p * row[a];
        if (n + 1 == horizon) {
          out.prob[std::move(ha)] += pa;
          continue;
        }
        const auto& q = model.transition[x][a];
        for (int y = 0; y < model.num_states; ++y) {
          if (!(q[y] > 0)) continue;
          auto hy = ha;
          hy.push_back(y);
          next[std::move(hy)] += pa * q[y];
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

template StrategicMeasure strategic_measure(const FiniteMdp&, const Policy&, const std::vector<double>&, int);
template ExactMeasure strategic_measure(const ExactMdp&, const ExactPolicy&, const std::vector<Rational>&, int);

StrategicMeasure to_double(const ExactMeasure& measure) {
  StrategicMeasure out;
  out.horizon = measure.horizon;
  out.stride = measure.stride;
  for (const auto& [h, p] : measure.prob) out.prob.emplace(h, to_double(p));
  return out;
}

template <class T>
double max_abs_difference(const BasicStrategicMeasure<T>& a, const BasicStrategicMeasure<T>& b) {
  double worst = 0.0;
  for (const auto& [h, p] : a.prob) {
    auto it = b.prob.find(h);
    T d = it == b.prob.end() ? p : T(p - it->second);
    worst = std::max(worst, std::fabs(to_double(d)));
  }
  for (const auto& [h, p] : b.prob) {
    if (!a.prob.count(h)) worst = std::max(worst, std::fabs(to_double(p)));
  }
  return worst;
}

template double max_abs_difference(const StrategicMeasure&, const StrategicMeasure&);
template double max_abs_difference(const ExactMeasure&, const ExactMeasure&);

template <class T>
bool measures_equal(const BasicStrategicMeasure<T>& a, const BasicStrategicMeasure<T>& b, double tol) {
  if (a.horizon != b.horizon || a.stride != b.stride) return false;
  if constexpr (std::is_same_v<T, Rational>) {
    return a.prob == b.prob;
  } else {
    return max_abs_difference(a, b) <= tol;
  }
}

template bool measures_equal(const StrategicMeasure&, const StrategicMeasure&, double);
template bool measures_equal(const ExactMeasure&, const ExactMeasure&, double);

template <class T>
std::vector<T> initial_distribution(const BasicStrategicMeasure<T>& measure, int num_states) {
  std::vector<T> out(num_states, T(0));
  for (const auto& [h, p] : measure.prob) out.at(h[0]) += p;
  return out;
}

template std::vector<double> initial_distribution(const StrategicMeasure&, int);
template std::vector<Rational> initial_distribution(const ExactMeasure&, int);

template <class T>
std::vector<std::vector<std::vector<T>>> state_action_marginals(const BasicStrategicMeasure<T>& measure,
                                                                int num_states, int num_actions) {
  const int s = measure.stride;
  std::vector<std::vector<std::vector<T>>> out(
      measure.horizon, std::vector<std::vector<T>>(num_states, std::vector<T>(num_actions, T(0))));
  for (const auto& [h, p] : measure.prob) {
    for (int n = 0; n < measure.horizon; ++n) out[n][h[s * n]][h[s * n + s - 1]] += p;
  }
  return out;
}

template std::vector<std::vector<std::vector<double>>> state_action_marginals(const StrategicMeasure&, int, int);
template std::vector<std::vector<std::vector<Rational>>> state_action_marginals(const ExactMeasure&, int, int);

template <class T>
std::map<std::vector<int>, T> prefix_marginal(const BasicStrategicMeasure<T>& measure, int length) {
  std::map<std::vector<int>, T> out;
  for (const auto& [h, p] : measure.prob) {
    if (length > static_cast<int>(h.size())) throw ValidationError("prefix longer than history");
    out[std::vector<int>(h.begin(), h.begin() + length)] += p;
  }
  return out;
}

template std::map<std::vector<int>, double> prefix_marginal(const StrategicMeasure&, int);
template std::map<std::vector<int>, Rational> prefix_marginal(const ExactMeasure&, int);

template <class T>
BasicConditionalKernels<T> conditional_kernels(const BasicStrategicMeasure<T>& measure, int num_states,
                                               int num_actions) {
  const int s = measure.stride;
  const int H = measure.horizon;
  BasicConditionalKernels<T> out;
  out.action.resize(H);
  out.successor.resize(H > 0 ? H - 1 : 0);
  for (int n = 0; n < H; ++n) {
    const int state_len = s * n + s - 1;
    auto with_action = prefix_marginal(measure, state_len + 1);
    auto& rows = out.action[n];
    for (const auto& [ha, p] : with_action) {
      std::vector<int> h(ha.begin(), ha.end() - 1);
      auto [it, fresh] = rows.try_emplace(h, std::vector<T>(num_actions, T(0)));
      it->second[ha.back()] += p;
    }
    for (auto& [h, row] : rows) row = normalized(std::move(row));
    if (n + 1 == H) continue;
    auto with_next = prefix_marginal(measure, state_len + 2);
    auto& succ = out.successor[n];
    for (const auto& [hy, p] : with_next) {
      std::vector<int> h(hy.begin(), hy.end() - 1);
      auto [it, fresh] = succ.try_emplace(h, std::vector<T>(num_states, T(0)));
      it->second[hy.back()] += p;
    }
    for (auto& [h, row] : succ) row = normalized(std::move(row));
  }
  return out;
}

template BasicConditionalKernels<double> conditional_kernels(const StrategicMeasure&, int, int);
template BasicConditionalKernels<Rational> conditional_kernels(const ExactMeasure&, int, int);

template <class T>
BasicStrategicMeasure<T> rebuild_measure(const BasicMdp<T>& model, const std::vector<T>& p0,
                                         const BasicConditionalKernels<T>& kernels, int horizon) {
  BasicPolicy<T> history = make_policy<T>(model, PolicyClass::History, horizon, true);
  for (int n = 0; n < horizon && n < static_cast<int>(kernels.action.size()); ++n) {
    for (const auto& [h, row] : kernels.action[n]) history.set(h, row);
  }
  return strategic_measure(model, history, p0, horizon);
}

template StrategicMeasure rebuild_measure(const FiniteMdp&, const std::vector<double>&,
                                          const BasicConditionalKernels<double>&, int);
template ExactMeasure rebuild_measure(const ExactMdp&, const std::vector<Rational>&,
                                      const BasicConditionalKernels<Rational>&, int);

namespace {
constexpr std::pair<MeasureClass, const char*> kMeasureClassNames[] = {
    {MeasureClass::S, "S"},
    {MeasureClass::SMarkov, "S_markov"},
    {MeasureClass::SSemiMarkov, "S_semimarkov"},
    {MeasureClass::SStationary, "S_stationary"},
    {MeasureClass::SSemiStationary, "S_semistationary"},
    {MeasureClass::SNonrand, "S_nonrand"},
    {MeasureClass::SMarkovNonrand, "S_markov_nonrand"},
    {MeasureClass::SSemiMarkovNonrand, "S_semimarkov_nonrand"},
    {MeasureClass::SStationaryNonrand, "S_stationary_nonrand"},
    {MeasureClass::SSemiStationaryNonrand, "S_semistationary_nonrand"},
};
}  // namespace

std::string to_string(MeasureClass cls) {
  for (const auto& [c, name] : kMeasureClassNames) {
    if (c == cls) return name;
  }
  return "?";
}

MeasureClass parse_measure_class(const std::string& name) {
  for (const auto& [c, n] : kMeasureClassNames) {
    if (name == n) return c;
  }
  throw ValidationError("unknown measure class '" + name + "'");
}

PolicyClass policy_class_of(MeasureClass cls) {
  switch (cls) {
    case MeasureClass::S:
    case MeasureClass::SNonrand: return PolicyClass::History;
    case MeasureClass::SMarkov:
    case MeasureClass::SMarkovNonrand: return PolicyClass::Markov;
    case MeasureClass::SSemiMarkov:
    case MeasureClass::SSemiMarkovNonrand: return PolicyClass::SemiMarkov;
    case MeasureClass::SStationary:
    case MeasureClass::SStationaryNonrand: return PolicyClass::Stationary;
    case MeasureClass::SSemiStationary:
    case MeasureClass::SSemiStationaryNonrand: return PolicyClass::SemiStationary;
  }
  return PolicyClass::History;
}

bool is_nonrandomized(MeasureClass cls) {
  switch (cls) {
    case MeasureClass::SNonrand:
    case MeasureClass::SMarkovNonrand:
    case MeasureClass::SSemiMarkovNonrand:
    case MeasureClass::SStationaryNonrand:
    case MeasureClass::SSemiStationaryNonrand: return true;
    default: return false;
  }
}

template <class T>
MembershipReport verify_membership(const BasicMdp<T>& model, const BasicStrategicMeasure<T>& measure,
                                   MeasureClass cls, double tol) {
  MembershipReport report;
  auto& out = report.violations;
  const int H = measure.horizon;
  if (measure.stride != 2) throw ValidationError("membership test expects (x, a) histories");
  if (!nearly_equal(measure.total(), T(1), tol)) out.push_back("probabilities do not sum to 1");
  for (const auto& [h, p] : measure.prob) {
    if (!(p > 0)) out.push_back("non-positive probability stored at " + history_label(h));
    if (static_cast<int>(h.size()) != 2 * H) {
      out.push_back("history of wrong length " + history_label(h));
      report.member = false;
      return report;
    }
    for (int n = 0; n < H; ++n) {
      const int x = h[2 * n];
      const int a = h[2 * n + 1];
      if (x < 0 || x >= model.num_states || a < 0 || a >= model.num_actions) {
        out.push_back("id out of range in " + history_label(h));
        report.member = false;
        return report;
      }
      if (!model.is_admissible(x, a)) {
        out.push_back("inadmissible pair at stage " + std::to_string(n) + " of " + history_label(h));
      }
    }
  }

  auto kernels = conditional_kernels(measure, model.num_states, model.num_actions);
  for (int n = 0; n + 1 < H; ++n) {
    for (const auto& [h, row] : kernels.successor[n]) {
      const int x = h[h.size() - 2];
      const int a = h.back();
      if (!model.is_admissible(x, a)) continue;
      if (!rows_equal(row, model.transition[x][a], tol)) {
        out.push_back("successor law differs from q after " + history_label(h));
      }
    }
  }

  const PolicyClass pc = policy_class_of(cls);
  const bool nonrand = is_nonrandomized(cls);
  std::map<std::vector<int>, std::pair<int, std::vector<int>>> reference;
  for (int n = 0; n < H; ++n) {
    for (const auto& [h, row] : kernels.action[n]) {
      if (nonrand && !is_dirac(row, tol)) {
        out.push_back("action law is not a point mass at " + history_label(h));
      }
      if (pc == PolicyClass::History) continue;
      auto key = conditioning_key(pc, n, h);
      auto [it, fresh] = reference.try_emplace(key, n, h);
      if (fresh) continue;
      const auto& [n_ref, h_ref] = it->second;
      const auto& ref_row = kernels.action[n_ref].at(h_ref);
      if (!rows_equal(row, ref_row, tol)) {
        out.push_back("action laws differ at " + history_label(h_ref) + " and " + history_label(h));
        if (!report.witness) report.witness = StructureWitness{n_ref, h_ref, n, h};
      }
    }
  }

  auto gamma = state_action_marginals(measure, model.num_states, model.num_actions);
  report.tilde_gamma.assign(model.num_states, std::vector<double>(model.num_actions, 0.0));
  double weight_total = 0.0;
  for (int n = 0; n < H; ++n) {
    double w = std::ldexp(1.0, -n - 1);
    weight_total += w;
    for (int x = 0; x < model.num_states; ++x) {
      for (int a = 0; a < model.num_actions; ++a) report.tilde_gamma[x][a] += w * to_double(gamma[n][x][a]);
    }
  }
  for (auto& row : report.tilde_gamma) {
    for (auto& v : row) v /= weight_total;
  }
  report.member = out.empty();
  return report;
}

template MembershipReport verify_membership(const FiniteMdp&, const StrategicMeasure&, MeasureClass, double);
template MembershipReport verify_membership(const ExactMdp&, const ExactMeasure&, MeasureClass, double);

template <class T>
BasicPolicy<T> recover_policy(const BasicMdp<T>& model, const BasicStrategicMeasure<T>& measure,
                              MeasureClass cls, double tol) {
  auto report = verify_membership(model, measure, cls, tol);
  if (!report.member) {
    throw NotInClass("measure is not in " + to_string(cls) + ": " + report.violations.front());
  }
  const PolicyClass pc = policy_class_of(cls);
  const bool nonrand = is_nonrandomized(cls);
  auto policy = make_policy<T>(model, pc, measure.horizon, !nonrand);
  auto kernels = conditional_kernels(measure, model.num_states, model.num_actions);
  for (int n = 0; n < measure.horizon; ++n) {
    for (const auto& [h, row] : kernels.action[n]) {
      auto key = conditioning_key(pc, n, h);
      if (policy.kernels.count(key)) continue;
      if (nonrand) {
        policy.set_action(std::move(key), argmax(row));
      } else {
        policy.set(std::move(key), row);
      }
    }
  }
  return policy;
}

template Policy recover_policy(const FiniteMdp&, const StrategicMeasure&, MeasureClass, double);
template ExactPolicy recover_policy(const ExactMdp&, const ExactMeasure&, MeasureClass, double);

template <class T>
BasicMixture<T> decompose_nonrandomized(const BasicMdp<T>& model, const BasicPolicy<T>& policy,
                                        const std::vector<T>& p0, int horizon, std::size_t cap) {
  PolicyClass work = policy.policy_class;
  if (work == PolicyClass::Stationary) work = PolicyClass::Markov;
  if (work == PolicyClass::SemiStationary) work = PolicyClass::SemiMarkov;

  auto measure = strategic_measure(model, policy, p0, horizon);
  std::vector<std::map<std::vector<int>, std::vector<T>>> sites(horizon);
  std::vector<std::vector<T>> bounds(horizon);
  for (int n = 0; n < horizon; ++n) {
    std::set<T> cuts;
    for (const auto& [h, p] : prefix_marginal(measure, 2 * n + 1)) {
      auto key = conditioning_key(work, n, h);
      if (sites[n].count(key)) continue;
      auto row = policy.row(n, h);
      T cumulative = 0;
      for (const auto& v : row) {
        if (!(v > 0)) continue;
        cumulative += v;
        cuts.insert(cumulative);
      }
      sites[n].emplace(std::move(key), std::move(row));
    }
    bounds[n] = cell_bounds<T>(std::move(cuts));
  }

  std::size_t count = 1;
  for (const auto& b : bounds) {
    std::size_t cells = b.size() - 1;
    if (count > cap / cells) throw CapExceeded("more than " + std::to_string(cap) + " mixture components");
    count *= cells;
  }

  BasicMixture<T> out;
  out.components.reserve(count);
  std::vector<std::size_t> cell(horizon, 0);
  for (std::size_t index = 0; index < count; ++index) {
    std::size_t rest = index;
    for (int n = horizon; n-- > 0;) {
      std::size_t cells = bounds[n].size() - 1;
      cell[n] = rest % cells;
      rest /= cells;
    }
    auto component = make_policy<T>(model, work, horizon, false);
    T weight = 1;
    for (int n = 0; n < horizon; ++n) {
      const T& lo = bounds[n][cell[n]];
      const T& hi = bounds[n][cell[n] + 1];
      weight *= hi - lo;
      T theta = (lo + hi) / 2;
      for (const auto& [key, row] : sites[n]) component.set_action(key, select_action(row, theta));
    }
    out.components.emplace_back(std::move(component), weight);
  }
  return out;
}

template MixtureDecomposition decompose_nonrandomized(const FiniteMdp&, const Policy&,
                                                      const std::vector<double>&, int, std::size_t);
template ExactMixture decompose_nonrandomized(const ExactMdp&, const ExactPolicy&,
                                              const std::vector<Rational>&, int, std::size_t);

template <class T>
BasicStrategicMeasure<T> mixture_measure(const BasicMdp<T>& model, const BasicMixture<T>& mixture,
                                         const std::vector<T>& p0, int horizon) {
  BasicStrategicMeasure<T> out;
  out.horizon = horizon;
  for (const auto& [component, weight] : mixture.components) {
    for (const auto& [h, p] : strategic_measure(model, component, p0, horizon).prob) {
      out.prob[h] += weight * p;
    }
  }
  for (auto it = out.prob.begin(); it != out.prob.end();) {
    it = it->second > 0 ? std::next(it) : out.prob.erase(it);
  }
  return out;
}

template StrategicMeasure mixture_measure(const FiniteMdp&, const MixtureDecomposition&,
                                          const std::vector<double>&, int);
template ExactMeasure mixture_measure(const ExactMdp&, const ExactMixture&, const std::vector<Rational>&, int);

template <class T>
BasicPolicy<T> markov_reduction(const BasicMdp<T>& model, const BasicPolicy<T>& policy,
                                const std::vector<T>& p0, int horizon) {
  auto measure = strategic_measure(model, policy, p0, horizon);
  auto gamma = state_action_marginals(measure, model.num_states, model.num_actions);
  auto out = make_policy<T>(model, PolicyClass::Markov, horizon, true);
  for (int n = 0; n < horizon; ++n) {
    for (int x = 0; x < model.num_states; ++x) {
      T mass = 0;
      for (const auto& v : gamma[n][x]) mass += v;
      if (!(mass > 0)) continue;
      out.set({n, x}, normalized(gamma[n][x]));
    }
  }
  return out;
}

template Policy markov_reduction(const FiniteMdp&, const Policy&, const std::vector<double>&, int);
template ExactPolicy markov_reduction(const ExactMdp&, const ExactPolicy&, const std::vector<Rational>&, int);

}  // namespace stratmeas
