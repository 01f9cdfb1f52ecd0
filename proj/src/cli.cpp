#include "stratmeas/cli.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "stratmeas/criteria.hpp"
#include "stratmeas/errors.hpp"
#include "stratmeas/io.hpp"
#include "stratmeas/measure.hpp"
#include "stratmeas/minimax.hpp"
#include "stratmeas/optimize.hpp"
#include "stratmeas/pomdp.hpp"

namespace stratmeas {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string command;
  std::string model;
  std::string policy;
  std::string measure;
  std::string p0;
  std::optional<int> horizon;
  double beta = 0.0;
  double alpha = 1.0;
  std::optional<double> epsilon;
  std::string criterion;
  std::string cls;
  std::uint64_t seed = 0;
  long samples = 10000;
  std::string format = "json";
  bool exact = false;
  std::string values;
  std::string kind = "equation";
  std::string psi = "identity";
  std::size_t cap = 1'000'000;
};

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing ") + flag);
  return value;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json result_json(const EvaluationResult& r, const CriterionSpec& spec) {
  Json j{{"criterion", to_string(spec.kind)},
         {"value", r.value},
         {"method", to_string(r.method)},
         {"error_bound", optional_json(r.error_bound)},
         {"horizon", r.horizon}};
  if (r.method == EvaluationMethod::MonteCarlo) {
    j["samples"] = r.samples;
    j["standard_error"] = optional_json(r.standard_error);
  }
  return j;
}

void require_kind(const ModelFile& model, const char* kind, const std::string& command) {
  if (model.kind != kind) throw ValidationError(command + " needs a '" + kind + "' model");
}

void reject_exact(const Flags& f) {
  if (f.exact) throw ValidationError("--exact is not available for " + f.command);
}

CriterionSpec criterion_of(const Flags& f, int default_horizon) {
  CriterionSpec spec;
  spec.kind = parse_criterion_kind(need(f.criterion, "--criterion"));
  spec.horizon = f.horizon.value_or(default_horizon);
  spec.beta = f.beta;
  spec.alpha = f.alpha;
  if (f.psi == "identity") {
    spec.psi = PsiKind::Identity;
  } else if (f.psi == "exp") {
    spec.psi = PsiKind::Exp;
  } else {
    throw ValidationError("unknown --psi '" + f.psi + "'");
  }
  validate_criterion(spec);
  return spec;
}

EvaluationOptions evaluation_options(const Flags& f) {
  EvaluationOptions o;
  o.seed = f.seed;
  o.samples = f.samples;
  return o;
}

int horizon_of(const Flags& f, int fallback) {
  int h = f.horizon.value_or(fallback);
  if (h < 1) throw ValidationError("--horizon must be at least 1");
  return h;
}

std::vector<double> number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(to_double(parse_rational(part)));
  if (out.empty()) throw ValidationError("empty value list");
  return out;
}

Json witness_json(const MembershipReport& r, const ModelFile& model) {
  if (!r.witness) return nullptr;
  return Json{{"stage_a", r.witness->stage_a},
              {"history_a", format_history(r.witness->history_a, model)},
              {"stage_b", r.witness->stage_b},
              {"history_b", format_history(r.witness->history_b, model)}};
}

Json membership_json(const MembershipReport& r, const ModelFile& model, const std::string& cls) {
  return Json{{"member", r.member}, {"class", cls}, {"violations", r.violations}, {"witness", witness_json(r, model)}};
}

/// Model used by the MDP-level measure commands; minimax measures live on the
/// joint-action model.
ModelFile measure_model(ModelFile model) {
  if (model.kind == "minimax") {
    model.mdp = mdp_of_minimax(model.minimax);
  } else if (model.kind != "mdp" && model.kind != "pomdp") {
    throw ValidationError("measures are not defined for a '" + model.kind + "' model");
  }
  return model;
}

Policy player1_policy(const Json& doc, const ModelFile& model) {
  const Json& p = doc.contains("player1") ? doc.at("player1") : doc;
  return parse_policy<double>(p, policy_vocabulary(model, PolicyRole::Player1));
}

template <class T>
Json decompose_json(const ModelFile& model, const Flags& f) {
  auto vocab = policy_vocabulary(model, PolicyRole::Mdp);
  auto policy = parse_policy<T>(read_json_file(need(f.policy, "--policy")), vocab, f.exact);
  auto p0 = parse_distribution<T>(need(f.p0, "--p0"), model);
  const int H = horizon_of(f, policy.horizon);
  BasicMixture<T> mix;
  if constexpr (std::is_same_v<T, Rational>) {
    mix = decompose_nonrandomized(model.exact, policy, p0, H, f.cap);
  } else {
    mix = decompose_nonrandomized(model.mdp, policy, p0, H, f.cap);
  }
  Json comps = Json::array();
  for (const auto& [component, weight] : mix.components) {
    Json w;
    if constexpr (std::is_same_v<T, Rational>) {
      w = format_rational(weight);
    } else {
      w = weight;
    }
    comps.push_back(Json{{"weight", w}, {"policy", policy_to_json(component, vocab)}});
  }
  return Json{{"count", mix.components.size()}, {"components", std::move(comps)}};
}

Json run_command(const Flags& f) {
  const std::string& cmd = f.command;

  if (cmd == "evaluate") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "mdp", cmd);
    auto policy = parse_policy<double>(read_json_file(need(f.policy, "--policy")), policy_vocabulary(model, PolicyRole::Mdp));
    auto p0 = parse_distribution<double>(need(f.p0, "--p0"), model);
    auto spec = criterion_of(f, policy.horizon);
    return result_json(evaluate(model.mdp, policy, p0, spec, evaluation_options(f)), spec);
  }

  if (cmd == "measure") {
    auto model = load_model(need(f.model, "--model"), f.exact);
    const Json policy_doc = read_json_file(need(f.policy, "--policy"));
    if (model.kind == "mdp") {
      auto vocab = policy_vocabulary(model, PolicyRole::Mdp);
      if (f.exact) {
        auto policy = parse_policy<Rational>(policy_doc, vocab, true);
        auto p0 = parse_distribution<Rational>(need(f.p0, "--p0"), model);
        return measure_to_json(strategic_measure(model.exact, policy, p0, horizon_of(f, policy.horizon)), model);
      }
      auto policy = parse_policy<double>(policy_doc, vocab);
      auto p0 = parse_distribution<double>(need(f.p0, "--p0"), model);
      return measure_to_json(strategic_measure(model.mdp, policy, p0, horizon_of(f, policy.horizon)), model);
    }
    reject_exact(f);
    auto p0 = parse_distribution<double>(need(f.p0, "--p0"), model);
    if (model.kind == "pomdp") {
      auto policy = parse_policy<double>(policy_doc, policy_vocabulary(model, PolicyRole::Pomdp));
      return measure_to_json(pomdp_strategic_measure(model.pomdp, policy, p0, horizon_of(f, policy.horizon)), model);
    }
    require_kind(model, "minimax", cmd);
    auto pair = parse_policy_pair(policy_doc, model);
    return measure_to_json(pair_strategic_measure(model.minimax, pair, p0, horizon_of(f, pair.player1.horizon)),
                           model);
  }

  if (cmd == "verify-measure") {
    auto model = measure_model(load_model(need(f.model, "--model"), f.exact));
    const Json doc = read_json_file(need(f.measure, "--measure"));
    const std::string cls_name = f.cls.empty() ? "S" : f.cls;
    const MeasureClass cls = parse_measure_class(cls_name);
    if (model.kind == "pomdp") {
      reject_exact(f);
      auto m = parse_measure<double>(doc, model);
      return membership_json(verify_pomdp_membership(model.pomdp, m, is_nonrandomized(cls)), model, cls_name);
    }
    if (f.exact) {
      auto m = parse_measure<Rational>(doc, model, true);
      return membership_json(verify_membership(model.exact, m, cls), model, cls_name);
    }
    auto m = parse_measure<double>(doc, model);
    return membership_json(verify_membership(model.mdp, m, cls), model, cls_name);
  }

  if (cmd == "recover-policy") {
    auto model = load_model(need(f.model, "--model"), f.exact);
    const Json doc = read_json_file(need(f.measure, "--measure"));
    if (model.kind == "pomdp") {
      reject_exact(f);
      auto m = parse_measure<double>(doc, model);
      return policy_to_json(recover_pomdp_policy(model.pomdp, m), policy_vocabulary(model, PolicyRole::Pomdp));
    }
    require_kind(model, "mdp", cmd);
    const MeasureClass cls = parse_measure_class(f.cls.empty() ? "S" : f.cls);
    auto vocab = policy_vocabulary(model, PolicyRole::Mdp);
    if (f.exact) {
      auto m = parse_measure<Rational>(doc, model, true);
      return policy_to_json(recover_policy(model.exact, m, cls), vocab);
    }
    auto m = parse_measure<double>(doc, model);
    return policy_to_json(recover_policy(model.mdp, m, cls), vocab);
  }

  if (cmd == "decompose") {
    auto model = load_model(need(f.model, "--model"), f.exact);
    require_kind(model, "mdp", cmd);
    return f.exact ? decompose_json<Rational>(model, f) : decompose_json<double>(model, f);
  }

  if (cmd == "markov-reduce") {
    auto model = load_model(need(f.model, "--model"), f.exact);
    require_kind(model, "mdp", cmd);
    auto vocab = policy_vocabulary(model, PolicyRole::Mdp);
    const Json doc = read_json_file(need(f.policy, "--policy"));
    if (f.exact) {
      auto policy = parse_policy<Rational>(doc, vocab, true);
      auto p0 = parse_distribution<Rational>(need(f.p0, "--p0"), model);
      return policy_to_json(markov_reduction(model.exact, policy, p0, horizon_of(f, policy.horizon)), vocab);
    }
    auto policy = parse_policy<double>(doc, vocab);
    auto p0 = parse_distribution<double>(need(f.p0, "--p0"), model);
    return policy_to_json(markov_reduction(model.mdp, policy, p0, horizon_of(f, policy.horizon)), vocab);
  }

  if (cmd == "solve-enum") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "mdp", cmd);
    OptimizeOptions options;
    options.cap = f.cap;
    options.evaluation = evaluation_options(f);
    const PolicyClass cls = parse_policy_class(need(f.cls, "--class"));
    auto spec = criterion_of(f, 1);
    auto opt = optimal_value(model.mdp, cls, spec, options);
    auto vocab = policy_vocabulary(model, PolicyRole::Mdp);
    Json argmin = Json::array();
    for (const auto& p : opt.argmin) argmin.push_back(policy_to_json(p, vocab));
    Json report{{"criterion", to_string(spec.kind)},
                {"class", to_string(cls)},
                {"label", opt.label()},
                {"method", opt.method},
                {"states", model.states},
                {"values", opt.values},
                {"argmin", std::move(argmin)}};
    if (f.epsilon) {
      auto sel = eps_optimal_policy(opt, *f.epsilon);
      Json policies = Json::array();
      for (const auto& p : sel.per_state) policies.push_back(policy_to_json(p, vocab));
      report["eps_optimal"] = Json{{"epsilon", *f.epsilon}, {"values", sel.values}, {"policies", std::move(policies)}};
      if (sel.combined) report["eps_optimal"]["combined"] = policy_to_json(*sel.combined, vocab);
    }
    return report;
  }

  if (cmd == "solve-vi") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "minimax", cmd);
    auto r = value_iteration(model.minimax, f.beta, f.epsilon.value_or(1e-8));
    return Json{{"method", "value-iteration"},
                {"beta", f.beta},
                {"states", model.states},
                {"V", r.values},
                {"iterations", r.iterations},
                {"residual", r.residual}};
  }

  if (cmd == "game-value") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "matrix", cmd);
    auto s = solve_matrix_game(model.matrix);
    return Json{{"value", s.value},
                {"row_strategy", s.row_strategy},
                {"column_strategy", s.column_strategy},
                {"certificate", s.certificate}};
  }

  if (cmd == "oe-residual") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "minimax", cmd);
    auto g = number_list(need(f.values, "--values"));
    if (static_cast<int>(g.size()) != model.minimax.num_states) throw ValidationError("--values has wrong length");
    std::vector<double> r;
    if (f.kind == "equation") {
      r = oe_residual(model.minimax, g, ResidualKind::Equation);
    } else if (f.kind == "inequality") {
      r = oe_residual(model.minimax, g, ResidualKind::Inequality);
    } else if (f.kind == "discounted") {
      r = discounted_oe_residual(model.minimax, g, f.beta);
    } else {
      throw ValidationError("unknown --kind '" + f.kind + "'");
    }
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::fabs(v));
    return Json{{"kind", f.kind}, {"residual", r}, {"max_abs", worst}};
  }

  if (cmd == "best-response") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "minimax", cmd);
    auto pi1 = player1_policy(read_json_file(need(f.policy, "--policy")), model);
    auto spec = criterion_of(f, pi1.horizon);
    auto br = best_response_p2(model.minimax, pi1, spec, f.epsilon.value_or(0.0), f.cap);
    return Json{{"criterion", to_string(spec.kind)},
                {"method", "backward-induction"},
                {"states", model.states},
                {"values", br.values},
                {"player2", policy_to_json(br.player2, policy_vocabulary(model, PolicyRole::Player2))}};
  }

  if (cmd == "check-ac") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "minimax", cmd);
    auto pi1 = player1_policy(read_json_file(need(f.policy, "--policy")), model);
    auto r = check_abs_continuity(model.minimax, pi1, horizon_of(f, pi1.horizon), std::nullopt, f.cap);
    Json witness = nullptr;
    if (r.witness) {
      auto vocab2 = policy_vocabulary(model, PolicyRole::Player2);
      std::string info;
      for (std::size_t i = 0; i < r.witness->info.size(); ++i) {
        if (i) info += ",";
        info += i % 2 == 0 ? model.states.at(r.witness->info[i]) : model.actions1.at(r.witness->info[i]);
      }
      witness = Json{{"stage", r.witness->stage},
                     {"initial_state", model.states.at(r.witness->initial_state)},
                     {"info", info},
                     {"pi2_a", policy_to_json(r.witness->pi2_a, vocab2)},
                     {"pi2_b", policy_to_json(r.witness->pi2_b, vocab2)}};
    }
    return Json{{"holds", r.holds}, {"witness", std::move(witness)}};
  }

  if (cmd == "pomdp-eval") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "pomdp", cmd);
    auto policy = parse_policy<double>(read_json_file(need(f.policy, "--policy")), policy_vocabulary(model, PolicyRole::Pomdp));
    auto p0 = parse_distribution<double>(need(f.p0, "--p0"), model);
    auto spec = criterion_of(f, policy.horizon);
    auto lifted = lift_pomdp_policy(model.pomdp, policy, p0, spec.horizon);
    return result_json(evaluate(model.pomdp.base, lifted, p0, spec, evaluation_options(f)), spec);
  }

  if (cmd == "pomdp-solve") {
    reject_exact(f);
    auto model = load_model(need(f.model, "--model"));
    require_kind(model, "pomdp", cmd);
    auto p0 = parse_distribution<double>(need(f.p0, "--p0"), model);
    auto spec = criterion_of(f, 1);
    auto opt = pomdp_optimal_value(model.pomdp, spec, {p0}, f.cap);
    return Json{{"criterion", to_string(spec.kind)},
                {"method", "enumeration"},
                {"value", opt.values.front()},
                {"policy", policy_to_json(opt.argmin.front(), policy_vocabulary(model, PolicyRole::Pomdp))}};
  }

  throw UsageError("unknown command '" + cmd + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strategic measures, criteria and minimax tools for finite models", "stratmeas"};
  Flags f;
  app.add_option("command", f.command,
                 "evaluate | measure | verify-measure | recover-policy | decompose | markov-reduce | solve-enum | "
                 "solve-vi | game-value | oe-residual | best-response | check-ac | pomdp-eval | pomdp-solve")
      ->required();
  app.add_option("--model", f.model, "model file");
  app.add_option("--policy", f.policy, "policy file");
  app.add_option("--measure", f.measure, "measure file");
  app.add_option("--p0", f.p0, "initial distribution: \"x:prob,...\" or a state name");
  app.add_option("--horizon", f.horizon, "horizon H");
  app.add_option("--beta", f.beta, "discount factor or exponential-utility parameter");
  app.add_option("--alpha", f.alpha, "risk level in (0, 1]");
  app.add_option("--epsilon", f.epsilon, "tolerance or optimality gap");
  app.add_option("--criterion", f.criterion, "J1..J4, TJ1..TJ4, PSI, HAT_PSI, CVAR, VAR, DISCOUNTED, NSTAGE");
  app.add_option("--class", f.cls, "policy or measure class");
  app.add_option("--seed", f.seed, "Monte Carlo seed");
  app.add_option("--samples", f.samples, "Monte Carlo sample paths");
  app.add_option("--format", f.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  app.add_flag("--exact", f.exact, "rational arithmetic");
  app.add_option("--values", f.values, "comma-separated value vector for oe-residual");
  app.add_option("--kind", f.kind, "equation, inequality or discounted (oe-residual)");
  app.add_option("--psi", f.psi, "identity or exp (PSI, HAT_PSI)");
  app.add_option("--cap", f.cap, "enumeration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    Json report = run_command(f);
    if (f.format == "table") {
      out << render_table(report);
    } else {
      out << report.dump(2) << "\n";
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitLimit;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << "\n";
    return kExitLimit;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace stratmeas
