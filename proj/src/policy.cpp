#include "stratmeas/policy.hpp"

#include <algorithm>
#include <set>

#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

constexpr std::pair<PolicyClass, const char*> kClassNames[] = {
    {PolicyClass::History, "History"},
    {PolicyClass::Markov, "Markov"},
    {PolicyClass::SemiMarkov, "SemiMarkov"},
    {PolicyClass::Stationary, "Stationary"},
    {PolicyClass::SemiStationary, "SemiStationary"},
};

std::size_t expected_key_length(PolicyClass cls) {
  switch (cls) {
    case PolicyClass::Markov: return 2;
    case PolicyClass::SemiMarkov: return 3;
    case PolicyClass::Stationary: return 1;
    case PolicyClass::SemiStationary: return 2;
    case PolicyClass::History: return 0;
  }
  return 0;
}

std::set<int> reachable_closure(const FiniteMdp& model, int start) {
  std::set<int> seen{start};
  std::vector<int> frontier{start};
  while (!frontier.empty()) {
    int x = frontier.back();
    frontier.pop_back();
    for (int a : model.admissible[x]) {
      for (int y = 0; y < model.num_states; ++y) {
        if (model.transition[x][a][y] > 0 && seen.insert(y).second) frontier.push_back(y);
      }
    }
  }
  return seen;
}

/// States reachable at exactly stage n, for n < horizon.
std::vector<std::set<int>> stage_reachable(const FiniteMdp& model, int start, int horizon) {
  std::vector<std::set<int>> out(horizon);
  if (horizon == 0) return out;
  out[0].insert(start);
  for (int n = 1; n < horizon; ++n) {
    for (int x : out[n - 1]) {
      for (int a : model.admissible[x]) {
        for (int y = 0; y < model.num_states; ++y) {
          if (model.transition[x][a][y] > 0) out[n].insert(y);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string to_string(PolicyClass cls) {
  for (const auto& [c, name] : kClassNames) {
    if (c == cls) return name;
  }
  return "?";
}

PolicyClass parse_policy_class(const std::string& name) {
  for (const auto& [c, n] : kClassNames) {
    if (name == n) return c;
  }
  throw ValidationError("unknown policy class '" + name + "'");
}

bool is_stagewise(PolicyClass cls) {
  return cls == PolicyClass::History || cls == PolicyClass::Markov || cls == PolicyClass::SemiMarkov;
}

std::vector<int> conditioning_key(PolicyClass cls, int n, std::span<const int> history) {
  const int x0 = history.front();
  const int xn = history.back();
  switch (cls) {
    case PolicyClass::History: return {history.begin(), history.end()};
    case PolicyClass::Markov: return {n, xn};
    case PolicyClass::SemiMarkov: return {n, x0, xn};
    case PolicyClass::Stationary: return {xn};
    case PolicyClass::SemiStationary: return {x0, xn};
  }
  return {};
}

int key_state(PolicyClass cls, std::span<const int> key) {
  switch (cls) {
    case PolicyClass::History: return key.back();
    case PolicyClass::Markov: return key[1];
    case PolicyClass::SemiMarkov: return key[2];
    case PolicyClass::Stationary: return key[0];
    case PolicyClass::SemiStationary: return key[1];
  }
  return -1;
}

std::optional<int> key_stage(PolicyClass cls, std::span<const int> key) {
  switch (cls) {
    case PolicyClass::History: return static_cast<int>(key.size() - 1) / 2;
    case PolicyClass::Markov:
    case PolicyClass::SemiMarkov: return key[0];
    default: return std::nullopt;
  }
}

template <class T>
std::vector<T> BasicPolicy<T>::row(int n, std::span<const int> history) const {
  if (is_stagewise(policy_class) && n >= horizon) {
    throw HorizonMismatch("stage " + std::to_string(n) + " beyond policy horizon " +
                          std::to_string(horizon));
  }
  return row_for_key(conditioning_key(policy_class, n, history));
}

template <class T>
std::vector<T> BasicPolicy<T>::row_for_key(std::span<const int> key) const {
  auto it = kernels.find(std::vector<int>(key.begin(), key.end()));
  if (it != kernels.end()) return it->second;
  std::vector<T> out(num_actions, T(0));
  out[fallback.at(key_state(policy_class, key))] = 1;
  return out;
}

template <class T>
void BasicPolicy<T>::set_action(std::vector<int> key, int action) {
  std::vector<T> row(num_actions, T(0));
  row.at(action) = 1;
  kernels[std::move(key)] = std::move(row);
}

template struct BasicPolicy<double>;
template struct BasicPolicy<Rational>;

template <class T>
BasicPolicy<T> make_policy(const std::vector<std::vector<int>>& admissible, int num_actions,
                           PolicyClass cls, int horizon, bool randomized) {
  BasicPolicy<T> p;
  p.policy_class = cls;
  p.randomized = randomized;
  p.horizon = horizon;
  p.num_actions = num_actions;
  p.fallback.reserve(admissible.size());
  for (const auto& set : admissible) p.fallback.push_back(set.empty() ? 0 : set.front());
  return p;
}

template BasicPolicy<double> make_policy(const std::vector<std::vector<int>>&, int, PolicyClass, int, bool);
template BasicPolicy<Rational> make_policy(const std::vector<std::vector<int>>&, int, PolicyClass, int, bool);

Policy stationary_policy(const FiniteMdp& model, const std::vector<int>& actions) {
  auto p = make_policy<double>(model, PolicyClass::Stationary, 1, false);
  for (int x = 0; x < model.num_states; ++x) p.set_action({x}, actions.at(x));
  return p;
}

Policy to_double(const ExactPolicy& policy) {
  Policy out;
  out.policy_class = policy.policy_class;
  out.randomized = policy.randomized;
  out.horizon = policy.horizon;
  out.num_actions = policy.num_actions;
  out.fallback = policy.fallback;
  for (const auto& [key, row] : policy.kernels) {
    std::vector<double> r;
    r.reserve(row.size());
    for (const auto& v : row) r.push_back(to_double(v));
    out.kernels.emplace(key, std::move(r));
  }
  return out;
}

template <class T>
ValidationReport validate_policy(const std::vector<std::vector<int>>& admissible,
                                 const BasicPolicy<T>& policy) {
  ValidationReport report;
  auto& out = report.violations;
  const int num_states = static_cast<int>(admissible.size());
  if (static_cast<int>(policy.fallback.size()) != num_states) out.push_back("fallback table has wrong length");
  if (is_stagewise(policy.policy_class) && policy.horizon < 1) out.push_back("horizon must be at least 1");
  for (const auto& [key, row] : policy.kernels) {
    std::string where = "kernel ";
    for (std::size_t i = 0; i < key.size(); ++i) where += (i ? "," : "") + std::to_string(key[i]);
    std::size_t want = expected_key_length(policy.policy_class);
    bool bad_key = want ? key.size() != want : (key.empty() || key.size() % 2 == 0);
    if (!bad_key) {
      int x = key_state(policy.policy_class, key);
      bad_key = x < 0 || x >= num_states;
      auto stage = key_stage(policy.policy_class, key);
      if (stage && *stage < 0) bad_key = true;
    }
    if (bad_key) {
      out.push_back("malformed key at " + where);
      continue;
    }
    if (static_cast<int>(row.size()) != policy.num_actions) {
      out.push_back("row of wrong length at " + where);
      continue;
    }
    const auto& allowed = admissible[key_state(policy.policy_class, key)];
    T sum = 0;
    int positive = 0;
    for (int a = 0; a < policy.num_actions; ++a) {
      if (row[a] < 0) out.push_back("negative probability at " + where);
      if (row[a] > 0) {
        ++positive;
        if (!std::binary_search(allowed.begin(), allowed.end(), a)) {
          out.push_back("mass on inadmissible action " + std::to_string(a) + " at " + where);
        }
      }
      sum += row[a];
    }
    if (!is_one(sum, kRowTolerance)) out.push_back("row sum != 1 at " + where);
    if (!policy.randomized) {
      bool dirac = positive == 1;
      for (const auto& v : row) dirac = dirac && (is_zero(v) || is_one(v, kRowTolerance));
      if (!dirac) out.push_back("nonrandomized policy has a non-Dirac row at " + where);
    }
  }
  return report;
}

template ValidationReport validate_policy(const std::vector<std::vector<int>>&, const BasicPolicy<double>&);
template ValidationReport validate_policy(const std::vector<std::vector<int>>&, const BasicPolicy<Rational>&);

template <class T>
int select_action(const std::vector<T>& row, const T& theta) {
  T cumulative = 0;
  int last = -1;
  for (int a = 0; a < static_cast<int>(row.size()); ++a) {
    if (!(row[a] > 0)) continue;
    cumulative += row[a];
    last = a;
    if (theta < cumulative) return a;
  }
  if (last < 0) throw ValidationError("kernel row has no positive mass");
  return last;
}

template int select_action(const std::vector<double>&, const double&);
template int select_action(const std::vector<Rational>&, const Rational&);

template <class T>
BasicPolicy<T> uniform_parameter_policy(const BasicPolicy<T>& policy, const std::vector<T>& thetas) {
  if (thetas.empty()) throw ValidationError("at least one parameter is required");
  for (const auto& t : thetas) {
    if (t < 0 || t > 1) throw ValidationError("parameters must lie in [0,1]");
  }
  BasicPolicy<T> out = policy;
  out.randomized = false;
  out.kernels.clear();
  const bool stationary_class = !is_stagewise(policy.policy_class);
  const bool constant = std::all_of(thetas.begin(), thetas.end(), [&](const T& t) { return t == thetas.front(); });
  if (stationary_class && constant) {
    for (const auto& [key, row] : policy.kernels) out.set_action(key, select_action(row, thetas.front()));
    return out;
  }
  if (stationary_class) {
    out.policy_class = policy.policy_class == PolicyClass::Stationary ? PolicyClass::Markov : PolicyClass::SemiMarkov;
    out.horizon = static_cast<int>(thetas.size());
    for (int n = 0; n < out.horizon; ++n) {
      for (const auto& [key, row] : policy.kernels) {
        std::vector<int> staged{n};
        staged.insert(staged.end(), key.begin(), key.end());
        out.set_action(std::move(staged), select_action(row, thetas[n]));
      }
    }
    return out;
  }
  if (static_cast<int>(thetas.size()) < policy.horizon) {
    throw HorizonMismatch("one parameter per stage is required");
  }
  for (const auto& [key, row] : policy.kernels) {
    int n = *key_stage(policy.policy_class, key);
    if (n >= static_cast<int>(thetas.size())) continue;
    out.set_action(key, select_action(row, thetas[n]));
  }
  return out;
}

template BasicPolicy<double> uniform_parameter_policy(const BasicPolicy<double>&, const std::vector<double>&);
template BasicPolicy<Rational> uniform_parameter_policy(const BasicPolicy<Rational>&, const std::vector<Rational>&);

DeterministicEnumerator::DeterministicEnumerator(
    PolicyClass cls, int horizon, int num_actions, std::vector<int> fallback,
    std::vector<std::pair<std::vector<int>, std::vector<int>>> sites, std::size_t cap)
    : cls_(cls), horizon_(horizon), num_actions_(num_actions), fallback_(std::move(fallback)),
      sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  for (const auto& [key, choices] : sites_) {
    if (choices.empty()) throw ValidationError("conditioning site without admissible actions");
    if (count_ > cap / choices.size()) {
      throw CapExceeded("more than " + std::to_string(cap) + " deterministic policies");
    }
    count_ *= choices.size();
  }
  if (count_ > cap) throw CapExceeded("more than " + std::to_string(cap) + " deterministic policies");
}

std::vector<int> DeterministicEnumerator::choices_at(std::size_t index) const {
  std::vector<int> out(sites_.size());
  for (std::size_t i = sites_.size(); i-- > 0;) {
    const auto& choices = sites_[i].second;
    out[i] = choices[index % choices.size()];
    index /= choices.size();
  }
  return out;
}

Policy DeterministicEnumerator::at(std::size_t index) const {
  Policy p = make_policy<double>(std::vector<std::vector<int>>{}, num_actions_, cls_, horizon_, false);
  p.fallback = fallback_;
  auto picks = choices_at(index);
  for (std::size_t i = 0; i < sites_.size(); ++i) p.set_action(sites_[i].first, picks[i]);
  return p;
}

std::vector<std::vector<int>> reachable_histories(const FiniteMdp& model,
                                                  const std::vector<int>& initial_states, int horizon) {
  std::vector<std::vector<int>> out;
  std::vector<std::vector<int>> layer;
  for (int x : initial_states) layer.push_back({x});
  for (int n = 0; n < horizon; ++n) {
    std::vector<std::vector<int>> next;
    for (const auto& h : layer) {
      out.push_back(h);
      if (n + 1 == horizon) continue;
      int x = h.back();
      for (int a : model.admissible[x]) {
        for (int y = 0; y < model.num_states; ++y) {
          if (!(model.transition[x][a][y] > 0)) continue;
          auto g = h;
          g.push_back(a);
          g.push_back(y);
          next.push_back(std::move(g));
        }
      }
    }
    layer = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DeterministicEnumerator make_enumerator(const FiniteMdp& model, PolicyClass cls, int horizon,
                                        const EnumerationOptions& options) {
  if (is_stagewise(cls) && horizon < 1) throw ValidationError("horizon must be at least 1");
  std::vector<std::pair<std::vector<int>, std::vector<int>>> sites;
  std::vector<int> starts;
  if (options.initial_state) {
    starts.push_back(*options.initial_state);
  } else {
    for (int x = 0; x < model.num_states; ++x) starts.push_back(x);
  }
  auto add = [&](std::vector<int> key, int x) { sites.emplace_back(std::move(key), model.admissible[x]); };
  switch (cls) {
    case PolicyClass::Stationary: {
      std::set<int> states;
      for (int s : starts) {
        if (options.initial_state) {
          auto c = reachable_closure(model, s);
          states.insert(c.begin(), c.end());
        } else {
          states.insert(s);
        }
      }
      for (int x : states) add({x}, x);
      break;
    }
    case PolicyClass::SemiStationary:
      for (int x0 : starts) {
        std::set<int> states;
        if (options.initial_state) {
          states = reachable_closure(model, x0);
        } else {
          for (int x = 0; x < model.num_states; ++x) states.insert(x);
        }
        for (int x : states) add({x0, x}, x);
      }
      break;
    case PolicyClass::Markov:
    case PolicyClass::SemiMarkov: {
      std::set<std::vector<int>> keys;
      for (int x0 : starts) {
        std::vector<std::set<int>> layers;
        if (options.initial_state) {
          layers = stage_reachable(model, x0, horizon);
        } else {
          std::set<int> all;
          for (int x = 0; x < model.num_states; ++x) all.insert(x);
          layers.assign(horizon, all);
        }
        for (int n = 0; n < horizon; ++n) {
          for (int x : layers[n]) {
            if (cls == PolicyClass::Markov) {
              keys.insert({n, x});
            } else {
              keys.insert({n, x0, x});
            }
          }
        }
      }
      for (const auto& key : keys) add(key, key_state(cls, key));
      break;
    }
    case PolicyClass::History:
      for (auto& h : reachable_histories(model, starts, horizon)) {
        int x = h.back();
        add(std::move(h), x);
      }
      break;
  }
  std::vector<int> fallback;
  for (int x = 0; x < model.num_states; ++x) fallback.push_back(model.default_action(x));
  return DeterministicEnumerator(cls, horizon, model.num_actions, std::move(fallback), std::move(sites),
                                 options.cap);
}

std::vector<Policy> enumerate_deterministic(const FiniteMdp& model, PolicyClass cls, int horizon,
                                            const EnumerationOptions& options) {
  auto en = make_enumerator(model, cls, horizon, options);
  std::vector<Policy> out;
  out.reserve(en.size());
  for (std::size_t i = 0; i < en.size(); ++i) out.push_back(en.at(i));
  return out;
}

Policy shift_policy(const Policy& policy, std::span<const int> prefix) {
  const int x0 = prefix[0];
  Policy out = policy;
  out.kernels.clear();
  switch (policy.policy_class) {
    case PolicyClass::Stationary:
      out.kernels = policy.kernels;
      break;
    case PolicyClass::SemiStationary:
      out.policy_class = PolicyClass::Stationary;
      for (const auto& [key, row] : policy.kernels) {
        if (key[0] == x0) out.kernels[{key[1]}] = row;
      }
      break;
    case PolicyClass::Markov:
      out.horizon = policy.horizon - 1;
      for (const auto& [key, row] : policy.kernels) {
        if (key[0] >= 1) out.kernels[{key[0] - 1, key[1]}] = row;
      }
      break;
    case PolicyClass::SemiMarkov:
      out.policy_class = PolicyClass::Markov;
      out.horizon = policy.horizon - 1;
      for (const auto& [key, row] : policy.kernels) {
        if (key[0] >= 1 && key[1] == x0) out.kernels[{key[0] - 1, key[2]}] = row;
      }
      break;
    case PolicyClass::History:
      out.horizon = policy.horizon - 1;
      for (const auto& [key, row] : policy.kernels) {
        if (key.size() >= prefix.size() + 1 && std::equal(prefix.begin(), prefix.end(), key.begin())) {
          out.kernels[std::vector<int>(key.begin() + static_cast<long>(prefix.size()), key.end())] = row;
        }
      }
      break;
  }
  if (is_stagewise(out.policy_class) && out.horizon < 1) {
    throw HorizonMismatch("shifting needs kernels for stages >= 1");
  }
  return out;
}

MinimaxPolicyPair shift_policy(const MinimaxPolicyPair& pair, std::span<const int> prefix1,
                               std::span<const int> prefix2) {
  return {shift_policy(pair.player1, prefix1), shift_policy(pair.player2, prefix2)};
}

}  // namespace stratmeas
