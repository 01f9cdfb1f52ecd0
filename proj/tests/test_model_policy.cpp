#include <doctest.h>

#include "stratmeas/errors.hpp"
#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"
#include "support.hpp"

using namespace stratmeas;
using namespace testsupport;

TEST_CASE("rational parsing and formatting") {
  CHECK(parse_rational("3/10") == Rational(3, 10));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-3.5e-2") == Rational(-7, 200));
  CHECK(parse_rational("4") == 4);
  CHECK(format_rational(Rational(6, 4)) == "3/2");
  CHECK(format_rational(Rational(5)) == "5");
  CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
  CHECK_THROWS_AS(parse_rational("abc"), ValidationError);
}

TEST_CASE("model validation reports each violation") {
  auto m = m1_model();
  CHECK(validate_mdp(m).ok());

  SUBCASE("row does not sum to one") {
    m.transition[0][0] = {0.5, 0.4};
    CHECK_FALSE(validate_mdp(m).ok());
    CHECK_THROWS_AS(require_valid(m), ValidationError);
  }
  SUBCASE("negative probability") {
    m.transition[0][0] = {1.5, -0.5};
    CHECK_FALSE(validate_mdp(m).ok());
  }
  SUBCASE("empty admissible set") {
    m.admissible[1].clear();
    CHECK_FALSE(validate_mdp(m).ok());
  }
  SUBCASE("non-finite cost") {
    m.cost[0][0] = std::numeric_limits<double>::infinity();
    CHECK_FALSE(validate_mdp(m).ok());
  }
}

TEST_CASE("exact model converts to double") {
  Rng rng(1);
  auto em = random_exact_mdp(rng);
  CHECK(validate_mdp(em).ok());
  auto m = to_double(em);
  CHECK(validate_mdp(m).ok());
  CHECK(m.num_states == em.num_states);
}

TEST_CASE("minimax joint ids round trip") {
  Rng rng(2);
  auto g = random_minimax(rng);
  CHECK(validate_minimax(g).ok());
  for (int a1 = 0; a1 < g.num_actions1; ++a1)
    for (int a2 = 0; a2 < g.num_actions2; ++a2) {
      const int j = g.joint_action(a1, a2);
      CHECK(g.player1_action(j) == a1);
      CHECK(g.player2_action(j) == a2);
    }
  auto joint = mdp_of_minimax(g);
  CHECK(joint.num_actions == g.num_actions1 * g.num_actions2);
  for (int x = 0; x < g.num_states; ++x)
    CHECK(joint.admissible[x].size() == g.admissible1[x].size() * g.admissible2[x].size());
}

TEST_CASE("pomdp default admissible set is the intersection over consistent states") {
  FinitePomdp p;
  p.base = m1_model();
  p.num_observations = 1;
  p.obs_fn = {0, 0};
  CHECK(validate_pomdp(p).ok());
  std::vector<int> info{0};
  CHECK(p.admissible_actions(info) == std::vector<int>{0});
  p.admissible_info[{0}] = {0};
  CHECK(p.admissible_actions(info) == std::vector<int>{0});
}

TEST_CASE("criterion names round trip") {
  for (auto k : {CriterionKind::NStage, CriterionKind::Discounted, CriterionKind::J1, CriterionKind::TJ4,
                 CriterionKind::CVaR, CriterionKind::VaR, CriterionKind::Psi})
    CHECK(parse_criterion_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_criterion_kind("J9"), ValidationError);
  CriterionSpec bad;
  bad.kind = CriterionKind::CVaR;
  bad.alpha = 0;
  CHECK_THROWS_AS(validate_criterion(bad), ValidationError);
}

TEST_CASE("conditioning keys") {
  const std::vector<int> h{1, 0, 2, 1, 3};  // x0=1, a0=0, x1=2, a1=1, x2=3
  CHECK(conditioning_key(PolicyClass::History, 2, h) == h);
  CHECK(conditioning_key(PolicyClass::Markov, 2, h) == std::vector<int>{2, 3});
  CHECK(conditioning_key(PolicyClass::SemiMarkov, 2, h) == std::vector<int>{2, 1, 3});
  CHECK(conditioning_key(PolicyClass::Stationary, 2, h) == std::vector<int>{3});
  CHECK(conditioning_key(PolicyClass::SemiStationary, 2, h) == std::vector<int>{1, 3});
  const std::vector<int> h0{1};
  CHECK(conditioning_key(PolicyClass::SemiStationary, 0, h0) == std::vector<int>{1, 1});
  for (auto cls : {PolicyClass::History, PolicyClass::Markov, PolicyClass::SemiMarkov, PolicyClass::Stationary,
                   PolicyClass::SemiStationary}) {
    auto key = conditioning_key(cls, 2, h);
    CHECK(key_state(cls, key) == 3);
    CHECK(parse_policy_class(to_string(cls)) == cls);
  }
  CHECK(key_stage(PolicyClass::Markov, std::vector<int>{2, 3}) == 2);
  CHECK_FALSE(key_stage(PolicyClass::Stationary, std::vector<int>{3}).has_value());
}

TEST_CASE("policy rows fall back to the lowest admissible action") {
  auto m = m1_model();
  auto p = make_policy<double>(m, PolicyClass::Markov, 2, true);
  p.set({0, 0}, {0.25, 0.75});
  const std::vector<int> h0{0}, h1{1};
  CHECK(p.row(0, h0) == std::vector<double>{0.25, 0.75});
  CHECK(p.row(0, h1) == std::vector<double>{1, 0});
  const std::vector<int> h2{0, 0, 0, 0, 0};
  CHECK_THROWS_AS(p.row(2, h2), HorizonMismatch);
  auto s = stationary_policy(m, {1, 0});
  CHECK(s.row(7, std::vector<int>{0}) == std::vector<double>{0, 1});
}

TEST_CASE("policy validation") {
  auto m = m1_model();
  auto p = make_policy<double>(m, PolicyClass::Stationary, 1, true);
  p.set({1}, {0.5, 0.5});
  CHECK_FALSE(validate_policy(m, p).ok());
  p.set({1}, {1, 0});
  p.set({0}, {0.6, 0.6});
  CHECK_FALSE(validate_policy(m, p).ok());
  p.set({0}, {0.4, 0.6});
  CHECK(validate_policy(m, p).ok());
  auto d = make_policy<double>(m, PolicyClass::Stationary, 1, false);
  d.set({0}, {0.4, 0.6});
  CHECK_FALSE(validate_policy(m, d).ok());
}

TEST_CASE("inverse-CDF selection") {
  const std::vector<double> row{0.25, 0.0, 0.75};
  CHECK(select_action(row, 0.0) == 0);
  CHECK(select_action(row, 0.2499) == 0);
  CHECK(select_action(row, 0.25) == 2);
  CHECK(select_action(row, 1.0) == 2);
  const std::vector<Rational> exact{Rational(1, 3), Rational(2, 3)};
  CHECK(select_action(exact, Rational(1, 3)) == 1);
  CHECK(select_action(exact, Rational(1, 4)) == 0);
}

TEST_CASE("uniform-parameter policy") {
  auto m = m1_model();
  auto p = make_policy<double>(m, PolicyClass::Stationary, 2, true);
  p.set({0}, {0.3, 0.7});
  auto same = uniform_parameter_policy(p, std::vector<double>{0.5, 0.5});
  CHECK(same.policy_class == PolicyClass::Stationary);
  CHECK_FALSE(same.randomized);
  CHECK(same.row(0, std::vector<int>{0}) == std::vector<double>{0, 1});
  auto varied = uniform_parameter_policy(p, std::vector<double>{0.1, 0.9});
  CHECK(varied.policy_class == PolicyClass::Markov);
  CHECK(varied.row(0, std::vector<int>{0}) == std::vector<double>{1, 0});
  CHECK(varied.row(1, std::vector<int>{0, 0, 0}) == std::vector<double>{0, 1});
}

TEST_CASE("deterministic enumeration counts") {
  auto m = m1_model();
  CHECK(make_enumerator(m, PolicyClass::Stationary, 1).size() == 2);
  CHECK(make_enumerator(m, PolicyClass::Markov, 3).size() == 8);
  CHECK(make_enumerator(m, PolicyClass::SemiStationary, 1).size() == 4);
  auto all = enumerate_deterministic(m, PolicyClass::Markov, 2);
  CHECK(all.size() == 4);
  for (const auto& p : all) CHECK(validate_policy(m, p).ok());
  EnumerationOptions tight;
  tight.cap = 3;
  CHECK_THROWS_AS(make_enumerator(m, PolicyClass::Markov, 3, tight), CapExceeded);

  // Index 0 is the all-lowest policy.
  auto e = make_enumerator(m, PolicyClass::Markov, 2);
  for (const auto& [key, actions] : e.sites()) CHECK(e.at(0).row_for_key(key)[actions.front()] == 1.0);
}

TEST_CASE("reachable histories") {
  auto m = m1_model();
  auto r = reachable_histories(m, {0}, 2);
  // h0 = (s0); h1 = (s0,a,s0), (s0,b,s1)
  CHECK(r.size() == 3);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    auto rm = random_mdp(rng);
    std::vector<int> starts;
    for (int x = 0; x < rm.num_states; ++x) starts.push_back(x);
    for (const auto& h : reachable_histories(rm, starts, 3)) {
      for (std::size_t k = 2; k < h.size(); k += 2) CHECK(rm.transition[h[k - 2]][h[k - 1]][h[k]] > 0);
    }
  }
}

TEST_CASE("shifted policy prepends the prefix") {
  auto m = m1_model();
  auto p = make_policy<double>(m, PolicyClass::History, 3, true);
  p.set({0, 1, 1, 0, 0}, {0.2, 0.8});
  const std::vector<int> prefix{0, 1};
  auto s = shift_policy(p, prefix);
  CHECK(s.row(1, std::vector<int>{1, 0, 0}) == std::vector<double>{0.2, 0.8});
  auto semi = make_policy<double>(m, PolicyClass::SemiStationary, 1, true);
  semi.set({1, 0}, {0.5, 0.5});
  auto shifted = shift_policy(semi, std::vector<int>{1, 0});
  CHECK(shifted.policy_class == PolicyClass::Stationary);
  CHECK(shifted.row(0, std::vector<int>{0}) == std::vector<double>{0.5, 0.5});
}
