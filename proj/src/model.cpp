#include "stratmeas/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

std::string pair_label(int x, int a) {
  std::ostringstream os;
  os << "(x=" << x << ", a=" << a << ")";
  return os.str();
}

template <class T>
void check_row(const std::vector<T>& row, int num_states, const std::string& where,
               std::vector<std::string>& out) {
  if (static_cast<int>(row.size()) != num_states) {
    out.push_back("transition row of wrong length at " + where);
    return;
  }
  T sum = 0;
  for (const T& p : row) {
    if (p < 0) out.push_back("negative transition probability at " + where);
    sum += p;
  }
  if (!is_one(sum, kRowTolerance)) out.push_back("row sum != 1 at " + where);
}

void check_action_set(const std::vector<int>& set, int num_actions, const std::string& what,
                      std::vector<std::string>& out) {
  if (set.empty()) {
    out.push_back("empty admissible set at " + what);
    return;
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= num_actions) out.push_back("action id out of range at " + what);
    if (i > 0 && set[i] <= set[i - 1]) out.push_back("admissible set not strictly increasing at " + what);
  }
}

}  // namespace

template <class T>
bool BasicMdp<T>::is_admissible(int x, int a) const {
  const auto& set = admissible[x];
  return std::binary_search(set.begin(), set.end(), a);
}

template <class T>
ValidationReport validate_mdp(const BasicMdp<T>& model) {
  ValidationReport report;
  auto& out = report.violations;
  if (model.num_states <= 0) out.push_back("no states");
  if (model.num_actions <= 0) out.push_back("no actions");
  if (!out.empty()) return report;
  if (static_cast<int>(model.admissible.size()) != model.num_states ||
      static_cast<int>(model.transition.size()) != model.num_states ||
      static_cast<int>(model.cost.size()) != model.num_states) {
    out.push_back("per-state tables have wrong length");
    return report;
  }
  for (int x = 0; x < model.num_states; ++x) {
    check_action_set(model.admissible[x], model.num_actions, "state " + std::to_string(x), out);
    if (static_cast<int>(model.transition[x].size()) != model.num_actions ||
        static_cast<int>(model.cost[x].size()) != model.num_actions) {
      out.push_back("per-action tables have wrong length at state " + std::to_string(x));
      continue;
    }
    for (int a : model.admissible[x]) {
      if (a < 0 || a >= model.num_actions) continue;
      check_row(model.transition[x][a], model.num_states, pair_label(x, a), out);
      if (!std::isfinite(model.cost[x][a])) out.push_back("non-finite cost at " + pair_label(x, a));
    }
  }
  return report;
}

template <class T>
void require_valid(const BasicMdp<T>& model) {
  auto report = validate_mdp(model);
  if (report.ok()) return;
  std::string msg = "invalid model:";
  for (const auto& v : report.violations) msg += " " + v + ";";
  throw ValidationError(msg);
}

template struct BasicMdp<double>;
template struct BasicMdp<Rational>;
template ValidationReport validate_mdp(const BasicMdp<double>&);
template ValidationReport validate_mdp(const BasicMdp<Rational>&);
template void require_valid(const BasicMdp<double>&);
template void require_valid(const BasicMdp<Rational>&);

FiniteMdp to_double(const ExactMdp& model) {
  FiniteMdp out;
  out.num_states = model.num_states;
  out.num_actions = model.num_actions;
  out.admissible = model.admissible;
  out.cost = model.cost;
  out.transition.resize(model.transition.size());
  for (std::size_t x = 0; x < model.transition.size(); ++x) {
    out.transition[x].resize(model.transition[x].size());
    for (std::size_t a = 0; a < model.transition[x].size(); ++a) {
      for (const auto& p : model.transition[x][a]) out.transition[x][a].push_back(to_double(p));
    }
  }
  return out;
}

std::vector<int> FinitePomdp::admissible_actions(std::span<const int> info) const {
  auto it = admissible_info.find(std::vector<int>(info.begin(), info.end()));
  if (it != admissible_info.end()) return it->second;
  const int z = info.back();
  std::vector<int> result;
  bool first = true;
  for (int x = 0; x < base.num_states; ++x) {
    if (obs_fn[x] != z) continue;
    if (first) {
      result = base.admissible[x];
      first = false;
    } else {
      std::vector<int> both;
      std::set_intersection(result.begin(), result.end(), base.admissible[x].begin(),
                            base.admissible[x].end(), std::back_inserter(both));
      result = std::move(both);
    }
  }
  if (result.empty()) {
    throw ValidationError("no admissible action for observation " + std::to_string(z));
  }
  return result;
}

ValidationReport validate_pomdp(const FinitePomdp& model) {
  ValidationReport report = validate_mdp(model.base);
  auto& out = report.violations;
  if (model.num_observations <= 0) out.push_back("no observations");
  if (static_cast<int>(model.obs_fn.size()) != model.base.num_states) {
    out.push_back("observation function not total on states");
    return report;
  }
  for (int x = 0; x < model.base.num_states; ++x) {
    if (model.obs_fn[x] < 0 || model.obs_fn[x] >= model.num_observations) {
      out.push_back("observation id out of range at state " + std::to_string(x));
    }
  }
  for (const auto& [info, set] : model.admissible_info) {
    check_action_set(set, model.base.num_actions, "an explicit information-vector entry", out);
  }
  return report;
}

ValidationReport validate_minimax(const MinimaxModel& model) {
  ValidationReport report;
  auto& out = report.violations;
  if (model.num_states <= 0 || model.num_actions1 <= 0 || model.num_actions2 <= 0) {
    out.push_back("empty state or action set");
    return report;
  }
  if (static_cast<int>(model.admissible1.size()) != model.num_states ||
      static_cast<int>(model.admissible2.size()) != model.num_states ||
      static_cast<int>(model.transition.size()) != model.num_states ||
      static_cast<int>(model.cost.size()) != model.num_states) {
    out.push_back("per-state tables have wrong length");
    return report;
  }
  for (int x = 0; x < model.num_states; ++x) {
    check_action_set(model.admissible1[x], model.num_actions1, "player 1, state " + std::to_string(x), out);
    check_action_set(model.admissible2[x], model.num_actions2, "player 2, state " + std::to_string(x), out);
    if (static_cast<int>(model.transition[x].size()) != model.num_actions1 ||
        static_cast<int>(model.cost[x].size()) != model.num_actions1) {
      out.push_back("player-1 tables have wrong length at state " + std::to_string(x));
      continue;
    }
    for (int a1 : model.admissible1[x]) {
      if (a1 < 0 || a1 >= model.num_actions1) continue;
      if (static_cast<int>(model.transition[x][a1].size()) != model.num_actions2 ||
          static_cast<int>(model.cost[x][a1].size()) != model.num_actions2) {
        out.push_back("player-2 tables have wrong length at state " + std::to_string(x));
        continue;
      }
      for (int a2 : model.admissible2[x]) {
        if (a2 < 0 || a2 >= model.num_actions2) continue;
        std::string where = "(x=" + std::to_string(x) + ", a1=" + std::to_string(a1) +
                            ", a2=" + std::to_string(a2) + ")";
        check_row(model.transition[x][a1][a2], model.num_states, where, out);
        if (!std::isfinite(model.cost[x][a1][a2])) out.push_back("non-finite cost at " + where);
      }
    }
  }
  return report;
}

FiniteMdp mdp_of_minimax(const MinimaxModel& model) {
  FiniteMdp out;
  out.num_states = model.num_states;
  out.num_actions = model.num_actions1 * model.num_actions2;
  out.admissible.resize(model.num_states);
  out.transition.assign(model.num_states, std::vector<std::vector<double>>(out.num_actions));
  out.cost.assign(model.num_states, std::vector<double>(out.num_actions, 0.0));
  for (int x = 0; x < model.num_states; ++x) {
    for (int a1 : model.admissible1[x]) {
      for (int a2 : model.admissible2[x]) {
        int a = model.joint_action(a1, a2);
        out.admissible[x].push_back(a);
        out.transition[x][a] = model.transition[x][a1][a2];
        out.cost[x][a] = model.cost[x][a1][a2];
      }
    }
    std::sort(out.admissible[x].begin(), out.admissible[x].end());
  }
  return out;
}

void validate_criterion(const CriterionSpec& spec) {
  if (spec.horizon < 1) throw ValidationError("horizon must be at least 1");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw ValidationError("alpha must lie in (0,1]");
  if (spec.kind == CriterionKind::Discounted && !(spec.beta >= 0.0 && spec.beta < 1.0)) {
    throw ValidationError("discount factor must lie in [0,1)");
  }
  if ((spec.kind == CriterionKind::Psi || spec.kind == CriterionKind::HatPsi) &&
      spec.psi == PsiKind::Exp && !(spec.beta > 0.0)) {
    throw ValidationError("exponential psi needs beta > 0");
  }
}

namespace {
struct KindName {
  CriterionKind kind;
  const char* name;
};
constexpr KindName kKindNames[] = {
    {CriterionKind::J1, "J1"},       {CriterionKind::J2, "J2"},
    {CriterionKind::J3, "J3"},       {CriterionKind::J4, "J4"},
    {CriterionKind::TJ1, "TJ1"},     {CriterionKind::TJ2, "TJ2"},
    {CriterionKind::TJ3, "TJ3"},     {CriterionKind::TJ4, "TJ4"},
    {CriterionKind::Psi, "PSI"},     {CriterionKind::HatPsi, "HAT_PSI"},
    {CriterionKind::CVaR, "CVAR"},   {CriterionKind::VaR, "VAR"},
    {CriterionKind::Discounted, "DISCOUNTED"}, {CriterionKind::NStage, "NSTAGE"},
};
}  // namespace

std::string to_string(CriterionKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "?";
}

CriterionKind parse_criterion_kind(const std::string& name) {
  for (const auto& entry : kKindNames) {
    if (name == entry.name) return entry.kind;
  }
  throw ValidationError("unknown criterion '" + name + "'");
}

}  // namespace stratmeas
