#pragma once

// Instance generators and brute-force oracles shared by the unit tests and
// the acceptance runner. Oracles here only use model and policy definitions
// (q, c, policy rows), never the library's measure or criteria code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "stratmeas/measure.hpp"
#include "stratmeas/minimax.hpp"
#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"

namespace testsupport {

using namespace stratmeas;
using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Random probability vector over `support` with integer weights in [0, 4],
/// at least one positive.
inline std::vector<Rational> rational_row(Rng& rng, int size, const std::vector<int>& support) {
  std::vector<Rational> row(size, Rational(0));
  std::vector<int> w(support.size());
  int total = 0;
  while (total == 0) {
    total = 0;
    for (auto& v : w) total += (v = uniform_int(rng, 0, 4));
  }
  for (std::size_t i = 0; i < support.size(); ++i) row[support[i]] = Rational(w[i], total);
  return row;
}

/// Row over `support` whose entries are multiples of 1/`grid`.
inline std::vector<Rational> grid_row(Rng& rng, int size, const std::vector<int>& support, int grid) {
  std::vector<Rational> row(size, Rational(0));
  std::vector<int> cuts{0, grid};
  for (std::size_t i = 1; i < support.size(); ++i) cuts.push_back(uniform_int(rng, 0, grid));
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i < support.size(); ++i) row[support[i]] = Rational(cuts[i + 1] - cuts[i], grid);
  return row;
}

inline std::vector<int> all_ids(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

inline ExactMdp random_exact_mdp(Rng& rng, int max_states = 4, int max_actions = 3) {
  ExactMdp m;
  m.num_states = uniform_int(rng, 1, max_states);
  m.num_actions = uniform_int(rng, 1, max_actions);
  m.admissible.resize(m.num_states);
  m.transition.assign(m.num_states, std::vector<std::vector<Rational>>(m.num_actions));
  m.cost.assign(m.num_states, std::vector<double>(m.num_actions, 0.0));
  for (int x = 0; x < m.num_states; ++x) {
    for (int a = 0; a < m.num_actions; ++a) {
      if (uniform01(rng) < 0.7) m.admissible[x].push_back(a);
    }
    if (m.admissible[x].empty()) m.admissible[x].push_back(uniform_int(rng, 0, m.num_actions - 1));
    for (int a : m.admissible[x]) {
      m.transition[x][a] = rational_row(rng, m.num_states, all_ids(m.num_states));
      m.cost[x][a] = uniform_int(rng, 0, 5);
    }
  }
  return m;
}

inline FiniteMdp random_mdp(Rng& rng, int max_states = 4, int max_actions = 3) {
  return to_double(random_exact_mdp(rng, max_states, max_actions));
}

/// Strictly positive transition rows (every stationary chain is irreducible).
inline FiniteMdp random_positive_mdp(Rng& rng, int max_states = 4, int max_actions = 3) {
  FiniteMdp m = random_mdp(rng, max_states, max_actions);
  for (int x = 0; x < m.num_states; ++x) {
    for (int a : m.admissible[x]) {
      double sum = 0;
      for (auto& v : m.transition[x][a]) sum += (v = 0.1 + uniform01(rng));
      for (auto& v : m.transition[x][a]) v /= sum;
      m.cost[x][a] = uniform01(rng) * 5;
    }
  }
  return m;
}

template <class T>
std::vector<T> random_p0(Rng& rng, int n);

template <>
inline std::vector<Rational> random_p0<Rational>(Rng& rng, int n) {
  return rational_row(rng, n, all_ids(n));
}

template <>
inline std::vector<double> random_p0<double>(Rng& rng, int n) {
  auto r = rational_row(rng, n, all_ids(n));
  std::vector<double> out;
  for (const auto& v : r) out.push_back(to_double(v));
  return out;
}

inline std::vector<double> dirac(int n, int x) {
  std::vector<double> p(n, 0.0);
  p[x] = 1.0;
  return p;
}

/// Two states; s0 --a--> s0 at cost 1, s0 --b--> s1 at cost 0, s1 --a--> s0 at cost 3.
inline FiniteMdp m1_model() {
  FiniteMdp m;
  m.num_states = 2;
  m.num_actions = 2;
  m.admissible = {{0, 1}, {0}};
  m.transition = {{{1, 0}, {0, 1}}, {{1, 0}, {}}};
  m.cost = {{1, 0}, {3, 0}};
  return m;
}

/// Every history h_n (n < horizon) with admissible actions, reachable or not.
template <class M>
std::vector<std::vector<int>> all_histories(const M& model, int horizon) {
  std::vector<std::vector<int>> out;
  std::vector<std::vector<int>> layer;
  for (int x = 0; x < model.num_states; ++x) layer.push_back({x});
  for (int n = 0; n < horizon; ++n) {
    std::vector<std::vector<int>> next;
    for (const auto& h : layer) {
      out.push_back(h);
      if (n + 1 == horizon) continue;
      for (int a : model.admissible[h.back()]) {
        for (int y = 0; y < model.num_states; ++y) {
          auto g = h;
          g.push_back(a);
          g.push_back(y);
          next.push_back(std::move(g));
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

/// Every conditioning key of the class, paired with the state it ends in.
template <class M>
std::vector<std::pair<std::vector<int>, int>> all_keys(const M& model, PolicyClass cls, int horizon) {
  std::vector<std::pair<std::vector<int>, int>> out;
  const int X = model.num_states;
  switch (cls) {
    case PolicyClass::Stationary:
      for (int x = 0; x < X; ++x) out.push_back({{x}, x});
      break;
    case PolicyClass::SemiStationary:
      for (int x0 = 0; x0 < X; ++x0)
        for (int x = 0; x < X; ++x) out.push_back({{x0, x}, x});
      break;
    case PolicyClass::Markov:
      for (int n = 0; n < horizon; ++n)
        for (int x = 0; x < X; ++x) out.push_back({{n, x}, x});
      break;
    case PolicyClass::SemiMarkov:
      for (int n = 0; n < horizon; ++n)
        for (int x0 = 0; x0 < X; ++x0)
          for (int x = 0; x < X; ++x) out.push_back({{n, x0, x}, x});
      break;
    case PolicyClass::History:
      for (auto& h : all_histories(model, horizon)) out.push_back({h, h.back()});
      break;
  }
  return out;
}

/// Random policy of the class with a kernel on every conditioning key.
/// `grid` > 0 restricts probabilities to multiples of 1/grid.
template <class M>
ExactPolicy random_exact_policy(Rng& rng, const M& model, PolicyClass cls, int horizon, bool randomized,
                                int grid = 0) {
  auto policy = make_policy<Rational>(model.admissible, model.num_actions, cls, horizon, randomized);
  for (auto& [key, x] : all_keys(model, cls, horizon)) {
    const auto& adm = model.admissible[x];
    if (!randomized) {
      policy.set_action(key, adm[uniform_int(rng, 0, static_cast<int>(adm.size()) - 1)]);
    } else if (grid > 0) {
      policy.set(key, grid_row(rng, model.num_actions, adm, grid));
    } else {
      policy.set(key, rational_row(rng, model.num_actions, adm));
    }
  }
  return policy;
}

template <class M>
Policy random_policy(Rng& rng, const M& model, PolicyClass cls, int horizon, bool randomized, int grid = 0) {
  return to_double(random_exact_policy(rng, model, cls, horizon, randomized, grid));
}

/// Strategic measure by exhaustive expansion of every trajectory.
template <class T>
std::map<std::vector<int>, T> oracle_measure(const BasicMdp<T>& model, const BasicPolicy<T>& policy,
                                             const std::vector<T>& p0, int horizon) {
  std::map<std::vector<int>, T> out;
  std::vector<int> h;
  std::function<void(int, T)> expand = [&](int n, T p) {
    const int x = h.back();
    auto row = policy.row(n, h);
    for (int a = 0; a < model.num_actions; ++a) {
      if (is_zero(row[a])) continue;
      h.push_back(a);
      if (n + 1 == horizon) {
        out[h] += p * row[a];
      } else {
        for (int y = 0; y < model.num_states; ++y) {
          if (is_zero(model.transition[x][a][y])) continue;
          h.push_back(y);
          expand(n + 1, p * row[a] * model.transition[x][a][y]);
          h.pop_back();
        }
      }
      h.pop_back();
    }
  };
  for (int x = 0; x < model.num_states; ++x) {
    if (is_zero(p0[x])) continue;
    h = {x};
    expand(0, p0[x]);
  }
  return out;
}

template <class T>
double oracle_distance(const std::map<std::vector<int>, T>& a, const BasicStrategicMeasure<T>& b) {
  double worst = 0;
  for (const auto& [h, p] : a) {
    auto it = b.prob.find(h);
    worst = std::max(worst, std::fabs(to_double(p) - (it == b.prob.end() ? 0.0 : to_double(it->second))));
  }
  for (const auto& [h, p] : b.prob) {
    if (!a.count(h)) worst = std::max(worst, std::fabs(to_double(p)));
  }
  return worst;
}

/// gamma_n(x, a) from an explicit trajectory law.
inline std::vector<std::vector<std::vector<double>>> oracle_marginals(const std::map<std::vector<int>, double>& law,
                                                                     int horizon, int num_states, int num_actions) {
  std::vector<std::vector<std::vector<double>>> g(
      horizon, std::vector<std::vector<double>>(num_states, std::vector<double>(num_actions, 0.0)));
  for (const auto& [h, p] : law) {
    for (int n = 0; n < horizon; ++n) g[n][h[2 * n]][h[2 * n + 1]] += p;
  }
  return g;
}

/// J_{n,j} from stage marginals.
inline double oracle_window_cost(const FiniteMdp& m, const std::vector<std::vector<std::vector<double>>>& g, int n,
                                 int j) {
  double s = 0;
  for (int k = j; k < j + n; ++k)
    for (int x = 0; x < m.num_states; ++x)
      for (int a = 0; a < m.num_actions; ++a) s += g[k][x][a] * m.cost[x][a];
  return s;
}

/// min over all policies of E sum_{k<n} c, by backward induction on states.
inline std::vector<double> oracle_nstage_optimum(const FiniteMdp& m, int n) {
  std::vector<double> v(m.num_states, 0.0);
  for (int k = 0; k < n; ++k) {
    std::vector<double> next(m.num_states, std::numeric_limits<double>::infinity());
    for (int x = 0; x < m.num_states; ++x) {
      for (int a : m.admissible[x]) {
        double q = m.cost[x][a];
        for (int y = 0; y < m.num_states; ++y) q += m.transition[x][a][y] * v[y];
        next[x] = std::min(next[x], q);
      }
    }
    v = std::move(next);
  }
  return v;
}

/// Matrix game value (row player minimizes) by enumeration of square
/// nonsingular subgames; some extreme equilibrium always has this form.
inline double oracle_game_value(const std::vector<std::vector<double>>& g) {
  const int R = static_cast<int>(g.size());
  const int C = static_cast<int>(g.front().size());
  const double tol = 1e-9;
  std::vector<int> rows, cols;
  double found = std::numeric_limits<double>::quiet_NaN();
  auto try_support = [&]() {
    const int k = static_cast<int>(rows.size());
    // Unknowns y_1..y_k, v: sum_i y_i g_ij - v = 0 for j in cols, sum y = 1.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
    for (int c = 0; c < k; ++c) {
      for (int r = 0; r < k; ++r) A(c, r) = g[rows[r]][cols[c]];
      A(c, k) = -1;
    }
    for (int r = 0; r < k; ++r) A(k, r) = 1;
    b(k) = 1;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(k + 1);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) B(r, c) = g[rows[r]][cols[c]];
      B(r, k) = -1;
    }
    for (int c = 0; c < k; ++c) B(k, c) = 1;
    d(k) = 1;
    Eigen::FullPivLU<Eigen::MatrixXd> lu_a(A), lu_b(B);
    if (!lu_a.isInvertible() || !lu_b.isInvertible()) return false;
    Eigen::VectorXd y = lu_a.solve(b), z = lu_b.solve(d);
    const double v = y(k);
    if (std::fabs(v - z(k)) > 1e-7) return false;
    for (int i = 0; i < k; ++i)
      if (y(i) < -tol || z(i) < -tol) return false;
    for (int j = 0; j < C; ++j) {
      double s = 0;
      for (int r = 0; r < k; ++r) s += y(r) * g[rows[r]][j];
      if (s > v + 1e-7) return false;
    }
    for (int i = 0; i < R; ++i) {
      double s = 0;
      for (int c = 0; c < k; ++c) s += z(c) * g[i][cols[c]];
      if (s < v - 1e-7) return false;
    }
    found = v;
    return true;
  };
  for (int k = 1; k <= std::min(R, C); ++k) {
    for (int rmask = 0; rmask < (1 << R); ++rmask) {
      if (__builtin_popcount(rmask) != k) continue;
      for (int cmask = 0; cmask < (1 << C); ++cmask) {
        if (__builtin_popcount(cmask) != k) continue;
        rows.clear();
        cols.clear();
        for (int i = 0; i < R; ++i)
          if (rmask >> i & 1) rows.push_back(i);
        for (int j = 0; j < C; ++j)
          if (cmask >> j & 1) cols.push_back(j);
        if (try_support()) return found;
      }
    }
  }
  return found;
}

inline MinimaxModel random_minimax(Rng& rng, int max_states = 3, int max_actions = 3, bool positive = false) {
  MinimaxModel m;
  m.num_states = uniform_int(rng, 1, max_states);
  m.num_actions1 = uniform_int(rng, 1, max_actions);
  m.num_actions2 = uniform_int(rng, 1, max_actions);
  m.admissible1.resize(m.num_states);
  m.admissible2.resize(m.num_states);
  m.transition.assign(m.num_states, std::vector<std::vector<std::vector<double>>>(
                                        m.num_actions1, std::vector<std::vector<double>>(m.num_actions2)));
  m.cost.assign(m.num_states,
                std::vector<std::vector<double>>(m.num_actions1, std::vector<double>(m.num_actions2, 0.0)));
  for (int x = 0; x < m.num_states; ++x) {
    m.admissible1[x] = all_ids(m.num_actions1);
    m.admissible2[x] = all_ids(m.num_actions2);
    for (int a1 = 0; a1 < m.num_actions1; ++a1) {
      for (int a2 = 0; a2 < m.num_actions2; ++a2) {
        std::vector<double> row(m.num_states);
        double sum = 0;
        for (auto& v : row) sum += (v = (positive ? 0.1 : 0.0) + (uniform01(rng) < 0.6 ? uniform01(rng) : 0.0));
        if (sum == 0) {
          row[uniform_int(rng, 0, m.num_states - 1)] = 1;
          sum = 1;
        }
        for (auto& v : row) v /= sum;
        m.transition[x][a1][a2] = row;
        m.cost[x][a1][a2] = uniform_int(rng, -3, 3) + 0.5 * uniform01(rng);
      }
    }
  }
  return m;
}

/// Finite-horizon values T^k(0) with T applied by the oracle game solver.
inline std::vector<double> oracle_backward_induction(const MinimaxModel& m, double beta, int steps) {
  std::vector<double> v(m.num_states, 0.0);
  for (int k = 0; k < steps; ++k) {
    std::vector<double> next(m.num_states);
    for (int x = 0; x < m.num_states; ++x) {
      std::vector<std::vector<double>> g;
      for (int a1 : m.admissible1[x]) {
        std::vector<double> row;
        for (int a2 : m.admissible2[x]) {
          double s = m.cost[x][a1][a2];
          for (int y = 0; y < m.num_states; ++y) s += beta * m.transition[x][a1][a2][y] * v[y];
          row.push_back(s);
        }
        g.push_back(row);
      }
      next[x] = oracle_game_value(g);
    }
    v = std::move(next);
  }
  return v;
}

}  // namespace testsupport
