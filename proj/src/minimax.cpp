#include "stratmeas/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

constexpr double kPivotTolerance = 1e-12;

void check_pair_row(const std::vector<int>& allowed, const std::vector<double>& row, const char* who, int x) {
  for (int a = 0; a < static_cast<int>(row.size()); ++a) {
    if (row[a] > 0 && !std::binary_search(allowed.begin(), allowed.end(), a)) {
      throw ValidationError(std::string(who) + " puts mass on inadmissible action " + std::to_string(a) +
                            " at state " + std::to_string(x));
    }
  }
}

/// Supports of the I_n marginals, n = 0..horizon, from a Dirac initial state.
std::vector<std::set<std::vector<int>>> info_supports(const MinimaxModel& model, const Policy& pi1,
                                                      const Policy& pi2, int x0, int horizon) {
  std::vector<std::set<std::vector<int>>> out(horizon + 1);
  std::vector<std::vector<int>> layer{{x0}};
  for (int n = 0; n <= horizon; ++n) {
    for (const auto& h : layer) out[n].insert(information_vector(model, h));
    if (n == horizon) break;
    std::vector<std::vector<int>> next;
    for (const auto& h : layer) {
      const int x = h.back();
      auto row1 = pi1.row(n, information_vector(model, h));
      auto row2 = pi2.row(n, h);
      for (int a1 : model.admissible1[x]) {
        if (!(row1[a1] > 0)) continue;
        for (int a2 : model.admissible2[x]) {
          if (!(row2[a2] > 0)) continue;
          const auto& q = model.transition[x][a1][a2];
          for (int y = 0; y < model.num_states; ++y) {
            if (!(q[y] > 0)) continue;
            auto g = h;
            g.push_back(model.joint_action(a1, a2));
            g.push_back(y);
            next.push_back(std::move(g));
          }
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

std::string label(const std::vector<int>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out + ")";
}

/// Law of (i_n) and of (i_n, a^1_n) for every n < H.
struct InfoLaw {
  std::vector<std::map<std::vector<int>, double>> info;
  std::vector<std::map<std::vector<int>, std::vector<double>>> action;
};

InfoLaw info_law(const MinimaxModel& model, const StrategicMeasure& p) {
  InfoLaw law;
  law.info.resize(p.horizon);
  law.action.resize(p.horizon);
  for (const auto& [h, prob] : p.prob) {
    for (int n = 0; n < p.horizon; ++n) {
      std::vector<int> prefix(h.begin(), h.begin() + 2 * n + 1);
      auto i = information_vector(model, prefix);
      law.info[n][i] += prob;
      auto [it, fresh] = law.action[n].try_emplace(i, std::vector<double>(model.num_actions1, 0.0));
      it->second[model.player1_action(h[2 * n + 1])] += prob;
    }
  }
  for (int n = 0; n < p.horizon; ++n) {
    for (auto& [i, row] : law.action[n]) {
      for (auto& v : row) v /= law.info[n].at(i);
    }
  }
  return law;
}

MatrixGame stage_game(const MinimaxModel& model, int x, const std::vector<double>& v, double beta,
                      bool with_cost) {
  MatrixGame g;
  for (int a1 : model.admissible1[x]) {
    std::vector<double> row;
    for (int a2 : model.admissible2[x]) {
      double entry = with_cost ? model.cost[x][a1][a2] : 0.0;
      const auto& q = model.transition[x][a1][a2];
      for (int y = 0; y < model.num_states; ++y) entry += beta * q[y] * v[y];
      row.push_back(entry);
    }
    g.payoff.push_back(std::move(row));
  }
  return g;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

std::vector<int> information_vector(const MinimaxModel& model, const std::vector<int>& joint_history) {
  std::vector<int> out = joint_history;
  for (std::size_t k = 1; k < out.size(); k += 2) out[k] = model.player1_action(out[k]);
  return out;
}

StrategicMeasure pair_strategic_measure(const MinimaxModel& model, const MinimaxPolicyPair& pair,
                                        const std::vector<double>& p0, int horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (static_cast<int>(p0.size()) != model.num_states) throw ValidationError("initial distribution has wrong length");
  std::map<std::vector<int>, double> layer;
  for (int x = 0; x < model.num_states; ++x) {
    if (p0[x] > 0) layer[{x}] = p0[x];
  }
  StrategicMeasure out;
  out.horizon = horizon;
  for (int n = 0; n < horizon; ++n) {
    std::map<std::vector<int>, double> next;
    for (const auto& [h, p] : layer) {
      const int x = h.back();
      auto row1 = pair.player1.row(n, information_vector(model, h));
      auto row2 = pair.player2.row(n, h);
      check_pair_row(model.admissible1[x], row1, "player 1", x);
      check_pair_row(model.admissible2[x], row2, "player 2", x);
      for (int a1 = 0; a1 < model.num_actions1; ++a1) {
        if (!(row1[a1] > 0)) continue;
        for (int a2 = 0; a2 < model.num_actions2; ++a2) {
          if (!(row2[a2] > 0)) continue;
          const int a = model.joint_action(a1, a2);
          const double pa = p * row1[a1] * row2[a2];
          auto ha = h;
          ha.push_back(a);
          if (n + 1 == horizon) {
            out.prob[std::move(ha)] += pa;
            continue;
          }
          const auto& q = model.transition[x][a1][a2];
          for (int y = 0; y < model.num_states; ++y) {
            if (!(q[y] > 0)) continue;
            auto hy = ha;
            hy.push_back(y);
            next[std::move(hy)] += pa * q[y];
          }
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

Policy joint_history_policy(const MinimaxModel& model, const MinimaxPolicyPair& pair, int horizon) {
  FiniteMdp joint = mdp_of_minimax(model);
  Policy out = make_policy<double>(joint, PolicyClass::History, horizon, true);
  std::vector<std::vector<int>> layer;
  for (int x = 0; x < model.num_states; ++x) layer.push_back({x});
  for (int n = 0; n < horizon; ++n) {
    std::vector<std::vector<int>> next;
    for (const auto& h : layer) {
      const int x = h.back();
      auto row1 = pair.player1.row(n, information_vector(model, h));
      auto row2 = pair.player2.row(n, h);
      std::vector<double> row(joint.num_actions, 0.0);
      for (int a1 = 0; a1 < model.num_actions1; ++a1) {
        for (int a2 = 0; a2 < model.num_actions2; ++a2) {
          const int a = model.joint_action(a1, a2);
          row[a] = row1[a1] * row2[a2];
          if (!(row[a] > 0) || n + 1 == horizon) continue;
          for (int y = 0; y < model.num_states; ++y) {
            if (!(model.transition[x][a1][a2][y] > 0)) continue;
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

DeterministicEnumerator player2_enumerator(const MinimaxModel& model, const Policy& pi1, int initial_state,
                                           int horizon, std::size_t cap) {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> sites;
  std::vector<std::vector<int>> layer{{initial_state}};
  for (int n = 0; n < horizon; ++n) {
    std::vector<std::vector<int>> next;
    for (const auto& h : layer) {
      const int x = h.back();
      sites.emplace_back(h, model.admissible2[x]);
      if (sites.size() > cap) throw CapExceeded("too many player-2 conditioning histories");
      if (n + 1 == horizon) continue;
      auto row1 = pi1.row(n, information_vector(model, h));
      for (int a1 : model.admissible1[x]) {
        if (!(row1[a1] > 0)) continue;
        for (int a2 : model.admissible2[x]) {
          const auto& q = model.transition[x][a1][a2];
          for (int y = 0; y < model.num_states; ++y) {
            if (!(q[y] > 0)) continue;
            auto g = h;
            g.push_back(model.joint_action(a1, a2));
            g.push_back(y);
            next.push_back(std::move(g));
          }
        }
      }
    }
    layer = std::move(next);
  }
  std::vector<int> fallback;
  for (int x = 0; x < model.num_states; ++x) fallback.push_back(model.admissible2[x].front());
  return DeterministicEnumerator(PolicyClass::History, horizon, model.num_actions2, std::move(fallback),
                                 std::move(sites), cap);
}

AbsContinuityReport check_abs_continuity(const MinimaxModel& model, const Policy& pi1, int horizon,
                                         const std::optional<std::vector<Policy>>& pi2_list, std::size_t cap) {
  if (horizon < 0) throw ValidationError("horizon must be nonnegative");
  AbsContinuityReport report;
  const int stages = std::max(horizon, 1);
  for (int x = 0; x < model.num_states; ++x) {
    std::vector<Policy> family;
    if (pi2_list) {
      family = *pi2_list;
    } else {
      auto en = player2_enumerator(model, pi1, x, stages, cap);
      for (std::size_t i = 0; i < en.size(); ++i) family.push_back(en.at(i));
    }
    if (family.empty()) continue;
    auto reference = info_supports(model, pi1, family[0], x, horizon);
    for (std::size_t k = 1; k < family.size(); ++k) {
      auto other = info_supports(model, pi1, family[k], x, horizon);
      for (int n = 0; n <= horizon; ++n) {
        if (reference[n] == other[n]) continue;
        std::vector<std::vector<int>> diff;
        std::set_symmetric_difference(reference[n].begin(), reference[n].end(), other[n].begin(), other[n].end(),
                                      std::back_inserter(diff));
        report.holds = false;
        report.witness = AbsContinuityWitness{n, x, diff.front(), family[0], family[k]};
        return report;
      }
    }
  }
  return report;
}

ValidationReport verify_factored_kernel(const MinimaxModel& model, const FactoredKernel& kernel) {
  ValidationReport report;
  auto& out = report.violations;
  if (static_cast<int>(kernel.f.size()) != model.num_states ||
      static_cast<int>(kernel.eta.size()) != model.num_states) {
    out.push_back("factor tables have wrong length");
    return report;
  }
  for (int x = 0; x < model.num_states; ++x) {
    for (int a1 : model.admissible1[x]) {
      if (a1 >= static_cast<int>(kernel.f[x].size()) || a1 >= static_cast<int>(kernel.eta[x].size()) ||
          static_cast<int>(kernel.eta[x][a1].size()) != model.num_states) {
        out.push_back("factor tables have wrong shape at state " + std::to_string(x));
        continue;
      }
      for (int y = 0; y < model.num_states; ++y) {
        if (kernel.eta[x][a1][y] < 0) out.push_back("negative eta entry at state " + std::to_string(x));
      }
      for (int a2 : model.admissible2[x]) {
        std::string where = "(x=" + std::to_string(x) + ", a1=" + std::to_string(a1) + ", a2=" + std::to_string(a2) + ")";
        if (a2 >= static_cast<int>(kernel.f[x][a1].size()) ||
            static_cast<int>(kernel.f[x][a1][a2].size()) != model.num_states) {
          out.push_back("factor tables have wrong shape at " + where);
          continue;
        }
        for (int y = 0; y < model.num_states; ++y) {
          const double f = kernel.f[x][a1][a2][y];
          if (!(f > 0)) out.push_back("f is not positive at y=" + std::to_string(y) + ", " + where);
          if (std::fabs(model.transition[x][a1][a2][y] - f * kernel.eta[x][a1][y]) > 1e-10) {
            out.push_back("q differs from f * eta at y=" + std::to_string(y) + ", " + where);
          }
        }
      }
    }
  }
  return report;
}

HatMembershipReport hat_sm_membership(const MinimaxModel& model, const StrategicMeasure& p,
                                      const StrategicMeasure& p_prime) {
  if (p.horizon != p_prime.horizon || p.stride != 2 || p_prime.stride != 2) {
    throw ModelMismatch("measures differ in horizon or history layout");
  }
  if (p.prob.empty() || p_prime.prob.empty()) throw ModelMismatch("empty measure");
  std::set<int> starts;
  for (const auto* m : {&p, &p_prime}) {
    for (const auto& [h, prob] : m->prob) {
      starts.insert(h.front());
      for (std::size_t k = 1; k < h.size(); k += 2) {
        if (h[k] < 0 || h[k] >= model.num_actions1 * model.num_actions2) {
          throw ModelMismatch("joint action id out of range for the model");
        }
      }
    }
  }
  if (starts.size() != 1) throw ModelMismatch("measures must share one Dirac initial state");

  HatMembershipReport report;
  auto law = info_law(model, p);
  auto law_prime = info_law(model, p_prime);
  for (int n = 0; n < p.horizon; ++n) {
    for (const auto& [i, mass] : law_prime.info[n]) {
      if (!law.info[n].count(i)) {
        report.violations.push_back("stage " + std::to_string(n) + ": information vector " + label(i) +
                                    " charged by p' but not by p");
        continue;
      }
      const auto& a = law.action[n].at(i);
      const auto& b = law_prime.action[n].at(i);
      for (int a1 = 0; a1 < model.num_actions1; ++a1) {
        if (std::fabs(a[a1] - b[a1]) > kCompareTolerance) {
          report.violations.push_back("stage " + std::to_string(n) + ": player-1 action law differs at " + label(i));
          break;
        }
      }
    }
  }
  report.member = report.violations.empty();
  return report;
}

GameSolution solve_matrix_game(const MatrixGame& game) {
  const int m = static_cast<int>(game.payoff.size());
  if (m == 0 || game.payoff[0].empty()) throw ValidationError("matrix game must be nonempty");
  const int k = static_cast<int>(game.payoff[0].size());
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : game.payoff) {
    if (static_cast<int>(row.size()) != k) throw ValidationError("matrix game rows differ in length");
    for (double v : row) {
      if (!std::isfinite(v)) throw ValidationError("matrix game entries must be finite");
      lo = std::min(lo, v);
    }
  }
  const double shift = 1.0 - lo;

  // max sum_i y_i  s.t.  sum_i (g_ij + shift) y_i <= 1 for every column j.
  // Variables: y_0..y_{m-1}, then one slack per column.
  const int vars = m + k;
  std::vector<std::vector<double>> tab(k, std::vector<double>(vars + 1, 0.0));
  std::vector<int> basis(k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < m; ++i) tab[j][i] = game.payoff[i][j] + shift;
    tab[j][m + j] = 1.0;
    tab[j][vars] = 1.0;
    basis[j] = m + j;
  }
  std::vector<double> reduced(vars, 0.0);
  for (int i = 0; i < m; ++i) reduced[i] = 1.0;
  double objective = 0.0;

  for (;;) {
    int enter = -1;
    for (int v = 0; v < vars; ++v) {
      if (reduced[v] > kPivotTolerance) {
        enter = v;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < k; ++r) {
      if (tab[r][enter] <= kPivotTolerance) continue;
      double ratio = tab[r][vars] / tab[r][enter];
      if (leave < 0 || ratio < best - kPivotTolerance) {
        leave = r;
        best = ratio;
      } else if (ratio <= best + kPivotTolerance && basis[r] < basis[leave]) {
        leave = r;
        best = std::min(best, ratio);
      }
    }
    if (leave < 0) throw Error("matrix game LP is unbounded");
    const double pivot = tab[leave][enter];
    for (auto& v : tab[leave]) v /= pivot;
    for (int r = 0; r < k; ++r) {
      if (r == leave) continue;
      const double factor = tab[r][enter];
      if (factor == 0.0) continue;
      for (int c = 0; c <= vars; ++c) tab[r][c] -= factor * tab[leave][c];
    }
    const double factor = reduced[enter];
    for (int c = 0; c < vars; ++c) reduced[c] -= factor * tab[leave][c];
    objective += factor * tab[leave][vars];
    basis[leave] = enter;
  }

  GameSolution sol;
  const double shifted_value = 1.0 / objective;
  sol.value = shifted_value - shift;
  sol.row_strategy.assign(m, 0.0);
  for (int r = 0; r < k; ++r) {
    if (basis[r] < m) sol.row_strategy[basis[r]] = std::max(0.0, tab[r][vars] * shifted_value);
  }
  sol.column_strategy.assign(k, 0.0);
  for (int j = 0; j < k; ++j) sol.column_strategy[j] = std::max(0.0, -reduced[m + j] * shifted_value);
  for (auto* strategy : {&sol.row_strategy, &sol.column_strategy}) {
    double total = 0.0;
    for (double v : *strategy) total += v;
    for (double& v : *strategy) v /= total;
  }
  sol.certificate = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    double payoff = 0.0;
    for (int i = 0; i < m; ++i) payoff += sol.row_strategy[i] * game.payoff[i][j];
    sol.certificate = std::max(sol.certificate, payoff);
  }
  return sol;
}

std::vector<double> minimax_operator(const MinimaxModel& model, const std::vector<double>& v, double beta) {
  if (static_cast<int>(v.size()) != model.num_states) throw ValidationError("value vector has wrong length");
  std::vector<double> out(model.num_states);
  for (int x = 0; x < model.num_states; ++x) out[x] = solve_matrix_game(stage_game(model, x, v, beta, true)).value;
  return out;
}

std::vector<double> cost_free_operator(const MinimaxModel& model, const std::vector<double>& g) {
  if (static_cast<int>(g.size()) != model.num_states) throw ValidationError("value vector has wrong length");
  std::vector<double> out(model.num_states);
  for (int x = 0; x < model.num_states; ++x) out[x] = solve_matrix_game(stage_game(model, x, g, 1.0, false)).value;
  return out;
}

ValueIterationResult value_iteration(const MinimaxModel& model, double beta, double tol, int max_iter) {
  if (!(beta >= 0 && beta < 1)) throw ValidationError("discount factor must lie in [0,1)");
  if (!(tol > 0)) throw ValidationError("tolerance must be positive");
  const double threshold = beta > 0 ? tol * (1 - beta) / (2 * beta) : std::numeric_limits<double>::infinity();
  ValueIterationResult result;
  std::vector<double> v(model.num_states, 0.0);
  for (int it = 1; it <= max_iter; ++it) {
    auto next = minimax_operator(model, v, beta);
    double step = sup_distance(next, v);
    v = std::move(next);
    if (step <= threshold) {
      result.values = v;
      result.iterations = it;
      result.residual = sup_distance(minimax_operator(model, v, beta), v);
      return result;
    }
  }
  throw NotConverged("value iteration did not reach the stopping threshold", v, max_iter);
}

std::vector<double> oe_residual(const MinimaxModel& model, const std::vector<double>& g, ResidualKind kind) {
  auto lg = cost_free_operator(model, g);
  std::vector<double> out(model.num_states);
  for (int x = 0; x < model.num_states; ++x) {
    out[x] = g[x] - lg[x];
    if (kind == ResidualKind::Inequality) out[x] = std::max(out[x], 0.0);
  }
  return out;
}

std::vector<double> discounted_oe_residual(const MinimaxModel& model, const std::vector<double>& v, double beta) {
  auto tv = minimax_operator(model, v, beta);
  std::vector<double> out(model.num_states);
  for (int x = 0; x < model.num_states; ++x) out[x] = v[x] - tv[x];
  return out;
}

BestResponse best_response_p2(const MinimaxModel& model, const Policy& pi1, const CriterionSpec& spec,
                              double epsilon, std::size_t cap) {
  if (spec.kind != CriterionKind::NStage && spec.kind != CriterionKind::Discounted) {
    throw ValidationError("best response needs the NSTAGE or DISCOUNTED criterion");
  }
  validate_criterion(spec);
  if (!(epsilon >= 0)) throw ValidationError("epsilon must be nonnegative");
  const int H = spec.horizon;
  const double discount = spec.kind == CriterionKind::Discounted ? spec.beta : 1.0;
  BestResponse out;
  out.player2 = make_policy<double>(model.admissible2, model.num_actions2, PolicyClass::History, H, false);
  std::size_t nodes = 0;

  auto solve = [&](auto& self, const std::vector<int>& h, int n) -> double {
    if (++nodes > cap) throw CapExceeded("more than " + std::to_string(cap) + " player-2 histories");
    const int x = h.back();
    auto row1 = pi1.row(n, information_vector(model, h));
    check_pair_row(model.admissible1[x], row1, "player 1", x);
    double best = -std::numeric_limits<double>::infinity();
    int best_a2 = model.admissible2[x].front();
    for (int a2 : model.admissible2[x]) {
      double value = 0.0;
      for (int a1 = 0; a1 < model.num_actions1; ++a1) {
        if (!(row1[a1] > 0)) continue;
        double term = model.cost[x][a1][a2];
        if (n + 1 < H) {
          const auto& q = model.transition[x][a1][a2];
          double future = 0.0;
          for (int y = 0; y < model.num_states; ++y) {
            if (!(q[y] > 0)) continue;
            auto g = h;
            g.push_back(model.joint_action(a1, a2));
            g.push_back(y);
            future += q[y] * self(self, g, n + 1);
          }
          term += discount * future;
        }
        value += row1[a1] * term;
      }
      if (value > best + 1e-12) {
        best = value;
        best_a2 = a2;
      }
    }
    out.player2.set_action(h, best_a2);
    out.history_values[h] = best;
    return best;
  };

  out.values.resize(model.num_states);
  for (int x = 0; x < model.num_states; ++x) out.values[x] = solve(solve, {x}, 0);
  return out;
}

}  // namespace stratmeas
