#include "stratmeas/pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "stratmeas/criteria.hpp"
#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

using RowFn = std::function<std::vector<double>(int n, const std::vector<int>& xza, const std::vector<int>& xa)>;

std::string label(const std::vector<int>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out + ")";
}

/// State history (x_0, a_0, ..., x_n) of an (x, z, a) prefix.
std::vector<int> states_of(const std::vector<int>& xza) {
  std::vector<int> out;
  for (std::size_t k = 0; k < xza.size(); ++k) {
    if (k % 3 != 1) out.push_back(xza[k]);
  }
  return out;
}

StrategicMeasure build_measure(const FinitePomdp& model, const RowFn& row_fn, const std::vector<double>& p0,
                               int horizon, bool check_info_constraint) {
  const auto& base = model.base;
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (static_cast<int>(p0.size()) != base.num_states) throw ValidationError("initial distribution has wrong length");
  std::map<std::vector<int>, double> layer;
  for (int x = 0; x < base.num_states; ++x) {
    if (p0[x] > 0) layer[{x, model.obs_fn[x]}] = p0[x];
  }
  StrategicMeasure out;
  out.horizon = horizon;
  out.stride = 3;
  for (int n = 0; n < horizon; ++n) {
    std::map<std::vector<int>, double> next;
    for (const auto& [h, p] : layer) {
      const int x = h[h.size() - 2];
      auto row = row_fn(n, h, states_of(h));
      std::vector<int> allowed = check_info_constraint ? model.admissible_actions(info_of(h)) : base.admissible[x];
      for (int a = 0; a < base.num_actions; ++a) {
        if (!(row[a] > 0)) continue;
        if (!std::binary_search(allowed.begin(), allowed.end(), a) || !base.is_admissible(x, a)) {
          throw ValidationError("policy puts mass on inadmissible action " + std::to_string(a) + " after " +
                                label(h));
        }
        auto ha = h;
        ha.push_back(a);
        if (n + 1 == horizon) {
          out.prob[std::move(ha)] += p * row[a];
          continue;
        }
        const auto& q = base.transition[x][a];
        for (int y = 0; y < base.num_states; ++y) {
          if (!(q[y] > 0)) continue;
          auto hy = ha;
          hy.push_back(y);
          hy.push_back(model.obs_fn[y]);
          next[std::move(hy)] += p * row[a] * q[y];
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

/// Pairs (i_n, x_n) reachable from supp p0 under admissible actions, per stage.
std::vector<std::set<std::pair<std::vector<int>, int>>> reachable_info(const FinitePomdp& model,
                                                                       const std::vector<double>& p0, int horizon) {
  const auto& base = model.base;
  std::vector<std::set<std::pair<std::vector<int>, int>>> out(horizon);
  if (horizon == 0) return out;
  for (int x = 0; x < base.num_states; ++x) {
    if (p0.at(x) > 0) out[0].insert({{model.obs_fn[x]}, x});
  }
  for (int n = 0; n + 1 < horizon; ++n) {
    for (const auto& [info, x] : out[n]) {
      for (int a : model.admissible_actions(info)) {
        if (!base.is_admissible(x, a)) continue;
        for (int y = 0; y < base.num_states; ++y) {
          if (!(base.transition[x][a][y] > 0)) continue;
          auto next = info;
          next.push_back(a);
          next.push_back(model.obs_fn[y]);
          out[n + 1].insert({std::move(next), y});
        }
      }
    }
  }
  return out;
}

}  // namespace

PomdpPolicy make_pomdp_policy(const FinitePomdp& model, PolicyClass cls, int horizon, bool randomized) {
  std::vector<std::vector<int>> by_observation(model.num_observations);
  for (int z = 0; z < model.num_observations; ++z) {
    bool observed = std::find(model.obs_fn.begin(), model.obs_fn.end(), z) != model.obs_fn.end();
    by_observation[z] = observed ? model.admissible_actions(std::vector<int>{z}) : std::vector<int>{0};
  }
  return make_policy<double>(by_observation, model.base.num_actions, cls, horizon, randomized);
}

std::vector<int> info_of(const std::vector<int>& xza) {
  std::vector<int> out;
  for (std::size_t k = 0; k < xza.size(); ++k) {
    if (k % 3 != 0) out.push_back(xza[k]);
  }
  return out;
}

StrategicMeasure pomdp_strategic_measure(const FinitePomdp& model, const PomdpPolicy& policy,
                                         const std::vector<double>& p0, int horizon) {
  if (is_stagewise(policy.policy_class) && horizon > policy.horizon) {
    throw HorizonMismatch("measure horizon exceeds policy horizon");
  }
  RowFn fn = [&](int n, const std::vector<int>& xza, const std::vector<int>&) { return policy.row(n, info_of(xza)); };
  return build_measure(model, fn, p0, horizon, true);
}

StrategicMeasure state_feedback_measure(const FinitePomdp& model, const Policy& policy,
                                        const std::vector<double>& p0, int horizon) {
  RowFn fn = [&](int n, const std::vector<int>&, const std::vector<int>& xa) { return policy.row(n, xa); };
  return build_measure(model, fn, p0, horizon, false);
}

MembershipReport verify_pomdp_membership(const FinitePomdp& model, const StrategicMeasure& measure,
                                         bool nonrandomized, double tol) {
  const auto& base = model.base;
  MembershipReport report;
  auto& out = report.violations;
  const int H = measure.horizon;
  if (measure.stride != 3) throw ValidationError("expected (x, z, a) histories");
  if (std::fabs(measure.total() - 1.0) > tol) out.push_back("probabilities do not sum to 1");
  for (const auto& [h, p] : measure.prob) {
    if (static_cast<int>(h.size()) != 3 * H) {
      out.push_back("history of wrong length " + label(h));
      report.member = false;
      return report;
    }
    for (int n = 0; n < H; ++n) {
      const int x = h[3 * n];
      const int z = h[3 * n + 1];
      const int a = h[3 * n + 2];
      if (x < 0 || x >= base.num_states || a < 0 || a >= base.num_actions) {
        out.push_back("id out of range in " + label(h));
        report.member = false;
        return report;
      }
      if (z != model.obs_fn[x]) out.push_back("observation differs from f(x) at stage " + std::to_string(n) + " of " + label(h));
      std::vector<int> prefix(h.begin(), h.begin() + 3 * n + 2);
      std::vector<int> allowed;
      try {
        allowed = model.admissible_actions(info_of(prefix));
      } catch (const ValidationError&) {
      }
      if (!std::binary_search(allowed.begin(), allowed.end(), a) || !base.is_admissible(x, a)) {
        out.push_back("inadmissible action at stage " + std::to_string(n) + " of " + label(h));
      }
    }
  }

  auto kernels = conditional_kernels(measure, base.num_states, base.num_actions);
  for (int n = 0; n + 1 < H; ++n) {
    for (const auto& [h, row] : kernels.successor[n]) {
      const int x = h[h.size() - 3];
      const int a = h.back();
      if (!base.is_admissible(x, a)) continue;
      for (int y = 0; y < base.num_states; ++y) {
        if (std::fabs(row[y] - base.transition[x][a][y]) > tol) {
          out.push_back("successor law differs from q after " + label(h));
          break;
        }
      }
    }
  }

  for (int n = 0; n < H; ++n) {
    std::map<std::vector<int>, const std::vector<int>*> reference;
    for (const auto& [h, row] : kernels.action[n]) {
      if (nonrandomized) {
        int positive = 0;
        bool dirac = true;
        for (double v : row) {
          if (v <= tol) continue;
          ++positive;
          dirac = dirac && std::fabs(v - 1.0) <= tol;
        }
        if (!dirac || positive != 1) out.push_back("action law is not a point mass at " + label(h));
      }
      auto [it, fresh] = reference.try_emplace(info_of(h), &h);
      if (fresh) continue;
      const auto& ref_row = kernels.action[n].at(*it->second);
      for (int a = 0; a < base.num_actions; ++a) {
        if (std::fabs(ref_row[a] - row[a]) > tol) {
          out.push_back("action law depends on more than the information vector at " + label(*it->second) +
                        " and " + label(h));
          if (!report.witness) report.witness = StructureWitness{n, *it->second, n, h};
          break;
        }
      }
    }
  }
  report.member = out.empty();
  return report;
}

PomdpPolicy recover_pomdp_policy(const FinitePomdp& model, const StrategicMeasure& measure, double tol) {
  auto report = verify_pomdp_membership(model, measure, false, tol);
  if (!report.member) throw NotInClass("measure is not induced by an information-vector policy: " + report.violations.front());
  auto policy = make_pomdp_policy(model, PolicyClass::History, measure.horizon, true);
  auto kernels = conditional_kernels(measure, model.base.num_states, model.base.num_actions);
  for (int n = 0; n < measure.horizon; ++n) {
    for (const auto& [h, row] : kernels.action[n]) {
      auto info = info_of(h);
      if (!policy.kernels.count(info)) policy.set(std::move(info), row);
    }
  }
  return policy;
}

Policy lift_pomdp_policy(const FinitePomdp& model, const PomdpPolicy& policy, const std::vector<double>& p0,
                         int horizon) {
  const auto& base = model.base;
  Policy out = make_policy<double>(base, PolicyClass::History, horizon, true);
  std::vector<std::vector<int>> layer;
  for (int x = 0; x < base.num_states; ++x) {
    if (p0.at(x) > 0) layer.push_back({x});
  }
  auto info_from_states = [&](const std::vector<int>& xa) {
    std::vector<int> info = xa;
    for (std::size_t k = 0; k < info.size(); k += 2) info[k] = model.obs_fn[info[k]];
    return info;
  };
  for (int n = 0; n < horizon; ++n) {
    std::vector<std::vector<int>> next;
    for (const auto& h : layer) {
      auto row = policy.row(n, info_from_states(h));
      if (n + 1 < horizon) {
        const int x = h.back();
        for (int a = 0; a < base.num_actions; ++a) {
          if (!(row[a] > 0) || !base.is_admissible(x, a)) continue;
          for (int y = 0; y < base.num_states; ++y) {
            if (!(base.transition[x][a][y] > 0)) continue;
            auto g = h;
            g.push_back(a);
            g.push_back(y);
            next.push_back(std::move(g));
          }
        }
      }
      out.set(h, std::move(row));
    }
    layer = std::move(next);
  }
  return out;
}

DeterministicEnumerator pomdp_enumerator(const FinitePomdp& model, const std::vector<double>& p0, int horizon,
                                         std::size_t cap) {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> sites;
  for (const auto& stage : reachable_info(model, p0, horizon)) {
    std::vector<int> last;
    for (const auto& [info, x] : stage) {
      if (info == last) continue;
      last = info;
      sites.emplace_back(info, model.admissible_actions(info));
    }
  }
  auto proto = make_pomdp_policy(model, PolicyClass::History, horizon, false);
  return DeterministicEnumerator(PolicyClass::History, horizon, model.base.num_actions, proto.fallback,
                                 std::move(sites), cap);
}

PomdpOptimum pomdp_optimal_value(const FinitePomdp& model, const CriterionSpec& criterion,
                                 const std::vector<std::vector<double>>& initial_distributions, std::size_t cap) {
  validate_criterion(criterion);
  switch (criterion.kind) {
    case CriterionKind::TJ1:
    case CriterionKind::TJ2:
    case CriterionKind::TJ3:
    case CriterionKind::TJ4:
    case CriterionKind::CVaR:
    case CriterionKind::VaR:
      throw ValidationError(to_string(criterion.kind) + " is not available for information-vector policies");
    default: break;
  }
  const int H = criterion.horizon;
  PomdpOptimum out;
  for (const auto& p0 : initial_distributions) {
    auto en = pomdp_enumerator(model, p0, H, cap);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < en.size(); ++i) {
      auto lifted = lift_pomdp_policy(model, en.at(i), p0, H);
      double v = evaluate(model.base, lifted, p0, criterion).value;
      if (v < best - 1e-12) {
        best = v;
        best_index = i;
      }
    }
    out.values.push_back(best);
    out.argmin.push_back(en.at(best_index));
  }
  return out;
}

}  // namespace stratmeas
