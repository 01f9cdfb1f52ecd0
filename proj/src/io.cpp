#include "stratmeas/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) out.push_back(part);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  if (text.empty()) out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

int index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ValidationError(std::string("unknown ") + what + " '" + name + "'");
  return static_cast<int>(it - names.begin());
}

void require_object(const Json& doc, const char* where) {
  if (!doc.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
}

void check_keys(const Json& doc, std::initializer_list<const char*> allowed, const char* where) {
  require_object(doc, where);
  for (const auto& item : doc.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ValidationError(std::string("unknown key '") + item.key() + "' in " + where);
  }
}

const Json& field(const Json& doc, const char* key, const char* where) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ValidationError(std::string("missing key '") + key + "' in " + where);
  return *it;
}

std::vector<std::string> name_list(const Json& doc, const char* key) {
  const Json& arr = field(doc, key, "model");
  if (!arr.is_array() || arr.empty()) throw ValidationError(std::string("'") + key + "' must be a non-empty array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw ValidationError(std::string("'") + key + "' must contain strings");
    if (std::find(out.begin(), out.end(), v.get<std::string>()) != out.end()) {
      throw ValidationError("duplicate name '" + v.get<std::string>() + "'");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

int positive_int(const Json& v, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ValidationError(std::string(what) + " must be a positive integer");
  }
  return static_cast<int>(v.get<long long>());
}

template <class T>
T probability(const Json& v, bool exact) {
  if constexpr (std::is_same_v<T, Rational>) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    throw ValidationError("exact mode needs integer or string probabilities, got " + v.dump());
  } else {
    if (exact && v.is_number_float()) throw ValidationError("exact mode needs rational probabilities, got " + v.dump());
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return to_double(parse_rational(v.get<std::string>()));
    throw ValidationError("probability must be a number or a string, got " + v.dump());
  }
}

double number(const Json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return to_double(parse_rational(v.get<std::string>()));
  throw ValidationError(std::string(what) + " must be a number");
}

Json scalar_json(double v) { return v; }
Json scalar_json(const Rational& v) { return format_rational(v); }

std::vector<std::vector<int>> parse_admissible(const Json& doc, const char* key, const std::vector<std::string>& states,
                                               const std::vector<std::string>& actions) {
  const Json& table = field(doc, key, "model");
  require_object(table, key);
  std::vector<std::vector<int>> out(states.size());
  std::vector<bool> seen(states.size(), false);
  for (const auto& item : table.items()) {
    const int x = index_of(states, item.key(), "state");
    seen[x] = true;
    if (!item.value().is_array()) throw ValidationError(std::string("'") + key + "' entries must be arrays");
    for (const auto& a : item.value()) {
      if (!a.is_string()) throw ValidationError("action names must be strings");
      out[x].push_back(index_of(actions, a.get<std::string>(), "action"));
    }
    std::sort(out[x].begin(), out[x].end());
  }
  for (std::size_t x = 0; x < states.size(); ++x) {
    if (!seen[x]) throw ValidationError("no admissible actions listed for state '" + states[x] + "'");
  }
  return out;
}

template <class T>
std::vector<T> successor_row(const Json& row, const std::vector<std::string>& states, bool exact) {
  require_object(row, "transition row");
  std::vector<T> out(states.size(), T(0));
  for (const auto& item : row.items()) out[index_of(states, item.key(), "state")] = probability<T>(item.value(), exact);
  return out;
}

template <class T>
void parse_mdp_tables(const Json& doc, const std::vector<std::string>& states, const std::vector<std::string>& actions,
                      BasicMdp<T>& m, bool exact) {
  m.num_states = static_cast<int>(states.size());
  m.num_actions = static_cast<int>(actions.size());
  m.admissible = parse_admissible(doc, "admissible", states, actions);
  m.transition.assign(m.num_states, std::vector<std::vector<T>>(m.num_actions));
  m.cost.assign(m.num_states, std::vector<double>(m.num_actions, 0.0));
  std::set<std::pair<int, int>> with_row;
  std::set<std::pair<int, int>> with_cost;
  auto pair_of = [&](const std::string& key) {
    auto parts = split(key, '|');
    if (parts.size() != 2) throw ValidationError("expected key 'x|a', got '" + key + "'");
    return std::pair{index_of(states, parts[0], "state"), index_of(actions, parts[1], "action")};
  };
  const Json& transition = field(doc, "transition", "model");
  require_object(transition, "transition");
  for (const auto& item : transition.items()) {
    auto [x, a] = pair_of(item.key());
    m.transition[x][a] = successor_row<T>(item.value(), states, exact);
    with_row.insert({x, a});
  }
  const Json& cost = field(doc, "cost", "model");
  require_object(cost, "cost");
  for (const auto& item : cost.items()) {
    auto [x, a] = pair_of(item.key());
    m.cost[x][a] = number(item.value(), "cost");
    with_cost.insert({x, a});
  }
  for (int x = 0; x < m.num_states; ++x) {
    for (int a : m.admissible[x]) {
      if (!with_row.count({x, a}) || !with_cost.count({x, a})) {
        throw ValidationError("missing transition or cost for '" + states[x] + "|" + actions[a] + "'");
      }
    }
  }
  for (const auto& [x, a] : with_row) {
    if (!std::binary_search(m.admissible[x].begin(), m.admissible[x].end(), a)) {
      throw ValidationError("transition given for inadmissible pair '" + states[x] + "|" + actions[a] + "'");
    }
  }
}

void raise_if(const ValidationReport& report) {
  if (!report.ok()) throw ValidationError("invalid model: " + report.violations.front());
}

void parse_minimax(const Json& doc, ModelFile& out) {
  auto& m = out.minimax;
  out.states = name_list(doc, "states");
  out.actions1 = name_list(doc, "actions1");
  out.actions2 = name_list(doc, "actions2");
  m.num_states = static_cast<int>(out.states.size());
  m.num_actions1 = static_cast<int>(out.actions1.size());
  m.num_actions2 = static_cast<int>(out.actions2.size());
  m.admissible1 = parse_admissible(doc, "admissible1", out.states, out.actions1);
  m.admissible2 = parse_admissible(doc, "admissible2", out.states, out.actions2);
  m.transition.assign(m.num_states, std::vector<std::vector<std::vector<double>>>(
                                        m.num_actions1, std::vector<std::vector<double>>(m.num_actions2)));
  m.cost.assign(m.num_states, std::vector<std::vector<double>>(m.num_actions1, std::vector<double>(m.num_actions2, 0.0)));
  std::set<std::vector<int>> with_row;
  std::set<std::vector<int>> with_cost;
  auto triple_of = [&](const std::string& key) {
    auto parts = split(key, '|');
    if (parts.size() != 3) throw ValidationError("expected key 'x|a1|a2', got '" + key + "'");
    return std::vector<int>{index_of(out.states, parts[0], "state"), index_of(out.actions1, parts[1], "action"),
                            index_of(out.actions2, parts[2], "action")};
  };
  const Json& transition = field(doc, "transition", "model");
  require_object(transition, "transition");
  for (const auto& item : transition.items()) {
    auto k = triple_of(item.key());
    m.transition[k[0]][k[1]][k[2]] = successor_row<double>(item.value(), out.states, false);
    with_row.insert(k);
  }
  const Json& cost = field(doc, "cost", "model");
  require_object(cost, "cost");
  for (const auto& item : cost.items()) {
    auto k = triple_of(item.key());
    m.cost[k[0]][k[1]][k[2]] = number(item.value(), "cost");
    with_cost.insert(k);
  }
  for (int x = 0; x < m.num_states; ++x) {
    for (int a1 : m.admissible1[x]) {
      for (int a2 : m.admissible2[x]) {
        if (!with_row.count({x, a1, a2}) || !with_cost.count({x, a1, a2})) {
          throw ValidationError("missing transition or cost for '" + out.states[x] + "|" + out.actions1[a1] + "|" +
                                out.actions2[a2] + "'");
        }
      }
    }
  }
  raise_if(validate_minimax(m));
}

std::vector<std::string> joint_names(const ModelFile& model) {
  std::vector<std::string> out;
  for (const auto& a1 : model.actions1) {
    for (const auto& a2 : model.actions2) out.push_back(a1 + "|" + a2);
  }
  return out;
}

/// Names of the positions of a history key, given the element stride.
std::vector<const std::vector<std::string>*> measure_alphabet(const ModelFile& model,
                                                              std::vector<std::string>& joint) {
  if (model.kind == "mdp") return {&model.states, &model.actions};
  if (model.kind == "pomdp") return {&model.states, &model.observations, &model.actions};
  if (model.kind == "minimax") {
    joint = joint_names(model);
    return {&model.states, &joint};
  }
  throw ValidationError("measures are not defined for a '" + model.kind + "' model");
}

std::vector<int> parse_key(const std::string& text, PolicyClass cls, const PolicyVocabulary& vocab) {
  auto cond = [&](const std::string& s) { return index_of(vocab.conditioning, s, "state"); };
  auto stage = [](const std::string& s) {
    try {
      std::size_t used = 0;
      int n = std::stoi(s, &used);
      if (used != s.size() || n < 0) throw ValidationError("");
      return n;
    } catch (const std::exception&) {
      throw ValidationError("bad stage index '" + s + "'");
    }
  };
  if (cls == PolicyClass::History) {
    auto parts = split(text, ',');
    if (parts.size() % 2 == 0) throw ValidationError("history key must end in a state: '" + text + "'");
    std::vector<int> key;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      key.push_back(i % 2 == 0 ? cond(parts[i]) : index_of(vocab.history_actions, parts[i], "action"));
    }
    return key;
  }
  auto parts = split(text, '|');
  switch (cls) {
    case PolicyClass::Stationary:
      if (parts.size() == 1) return {cond(parts[0])};
      break;
    case PolicyClass::Markov:
      if (parts.size() == 2) return {stage(parts[0]), cond(parts[1])};
      break;
    case PolicyClass::SemiStationary:
      if (parts.size() == 2) return {cond(parts[0]), cond(parts[1])};
      break;
    case PolicyClass::SemiMarkov:
      if (parts.size() == 3) return {stage(parts[0]), cond(parts[1]), cond(parts[2])};
      break;
    default: break;
  }
  throw ValidationError("bad " + to_string(cls) + " kernel key '" + text + "'");
}

std::string format_key(const std::vector<int>& key, PolicyClass cls, const PolicyVocabulary& vocab) {
  std::vector<std::string> parts;
  switch (cls) {
    case PolicyClass::History:
      for (std::size_t i = 0; i < key.size(); ++i) {
        parts.push_back(i % 2 == 0 ? vocab.conditioning.at(key[i]) : vocab.history_actions.at(key[i]));
      }
      return join(parts, ',');
    case PolicyClass::Stationary: return vocab.conditioning.at(key[0]);
    case PolicyClass::Markov: return std::to_string(key[0]) + "|" + vocab.conditioning.at(key[1]);
    case PolicyClass::SemiStationary: return vocab.conditioning.at(key[0]) + "|" + vocab.conditioning.at(key[1]);
    case PolicyClass::SemiMarkov:
      return std::to_string(key[0]) + "|" + vocab.conditioning.at(key[1]) + "|" + vocab.conditioning.at(key[2]);
  }
  return {};
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

ModelFile parse_model(const Json& doc, bool exact) {
  require_object(doc, "model");
  ModelFile out;
  const Json& kind = field(doc, "kind", "model");
  if (!kind.is_string()) throw ValidationError("'kind' must be a string");
  out.kind = kind.get<std::string>();
  if (out.kind == "mdp") {
    check_keys(doc, {"kind", "description", "states", "actions", "admissible", "transition", "cost"}, "model");
  } else if (out.kind == "pomdp") {
    check_keys(doc, {"kind", "description", "states", "actions", "admissible", "transition", "cost", "observations",
                     "obs_fn", "admissible_info"},
               "model");
  } else if (out.kind == "minimax") {
    check_keys(doc, {"kind", "description", "states", "actions1", "actions2", "admissible1", "admissible2",
                     "transition", "cost"},
               "model");
    if (exact) throw ValidationError("exact mode is not available for minimax models");
    parse_minimax(doc, out);
    return out;
  } else if (out.kind == "matrix") {
    check_keys(doc, {"kind", "description", "payoff"}, "model");
    const Json& payoff = field(doc, "payoff", "model");
    if (!payoff.is_array() || payoff.empty()) throw ValidationError("'payoff' must be a non-empty array");
    for (const auto& row : payoff) {
      if (!row.is_array() || row.empty()) throw ValidationError("payoff rows must be non-empty arrays");
      std::vector<double> r;
      for (const auto& v : row) r.push_back(number(v, "payoff entry"));
      if (!out.matrix.payoff.empty() && r.size() != out.matrix.payoff.front().size()) {
        throw ValidationError("payoff rows differ in length");
      }
      out.matrix.payoff.push_back(std::move(r));
    }
    return out;
  } else {
    throw ValidationError("unknown model kind '" + out.kind + "'");
  }

  out.states = name_list(doc, "states");
  out.actions = name_list(doc, "actions");
  if (exact) {
    parse_mdp_tables(doc, out.states, out.actions, out.exact, true);
    out.has_exact = true;
    raise_if(validate_mdp(out.exact));
    out.mdp = to_double(out.exact);
  } else {
    parse_mdp_tables(doc, out.states, out.actions, out.mdp, false);
  }
  raise_if(validate_mdp(out.mdp));
  if (out.kind == "pomdp") {
    auto& p = out.pomdp;
    p.base = out.mdp;
    out.observations = name_list(doc, "observations");
    p.num_observations = static_cast<int>(out.observations.size());
    const Json& f = field(doc, "obs_fn", "model");
    require_object(f, "obs_fn");
    p.obs_fn.assign(out.states.size(), -1);
    for (const auto& item : f.items()) {
      if (!item.value().is_string()) throw ValidationError("'obs_fn' values must be observation names");
      p.obs_fn[index_of(out.states, item.key(), "state")] =
          index_of(out.observations, item.value().get<std::string>(), "observation");
    }
    if (std::find(p.obs_fn.begin(), p.obs_fn.end(), -1) != p.obs_fn.end()) {
      throw ValidationError("'obs_fn' must map every state");
    }
    if (auto it = doc.find("admissible_info"); it != doc.end()) {
      require_object(*it, "admissible_info");
      for (const auto& item : it->items()) {
        auto parts = split(item.key(), ',');
        if (parts.size() % 2 == 0) throw ValidationError("information vector must end in an observation");
        std::vector<int> info;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          info.push_back(i % 2 == 0 ? index_of(out.observations, parts[i], "observation")
                                    : index_of(out.actions, parts[i], "action"));
        }
        std::vector<int> set;
        if (!item.value().is_array()) throw ValidationError("'admissible_info' entries must be arrays");
        for (const auto& a : item.value()) set.push_back(index_of(out.actions, a.get<std::string>(), "action"));
        std::sort(set.begin(), set.end());
        p.admissible_info[std::move(info)] = std::move(set);
      }
    }
    raise_if(validate_pomdp(p));
  }
  return out;
}

ModelFile load_model(const std::string& path, bool exact) { return parse_model(read_json_file(path), exact); }

PolicyVocabulary policy_vocabulary(const ModelFile& model, PolicyRole role) {
  PolicyVocabulary v;
  switch (role) {
    case PolicyRole::Mdp:
      if (model.kind != "mdp" && model.kind != "pomdp") throw ValidationError("policy needs an mdp model");
      v.conditioning = model.states;
      v.history_actions = model.actions;
      v.row_actions = model.actions;
      v.admissible = model.mdp.admissible;
      break;
    case PolicyRole::Pomdp: {
      if (model.kind != "pomdp") throw ValidationError("policy needs a pomdp model");
      v.conditioning = model.observations;
      v.history_actions = model.actions;
      v.row_actions = model.actions;
      auto proto = make_pomdp_policy(model.pomdp, PolicyClass::Stationary, 1, true);
      std::vector<int> all(model.actions.size());
      for (std::size_t a = 0; a < all.size(); ++a) all[a] = static_cast<int>(a);
      for (int a : proto.fallback) {
        v.admissible.push_back({a});
        v.allowed.push_back(all);
      }
      return v;
    }
    case PolicyRole::Player1:
    case PolicyRole::Player2:
      if (model.kind != "minimax") throw ValidationError("policy pair needs a minimax model");
      v.conditioning = model.states;
      v.history_actions = role == PolicyRole::Player1 ? model.actions1 : joint_names(model);
      v.row_actions = role == PolicyRole::Player1 ? model.actions1 : model.actions2;
      v.admissible = role == PolicyRole::Player1 ? model.minimax.admissible1 : model.minimax.admissible2;
      break;
  }
  v.allowed = v.admissible;
  return v;
}

template <class T>
BasicPolicy<T> parse_policy(const Json& doc, const PolicyVocabulary& vocab, bool exact) {
  check_keys(doc, {"class", "randomized", "horizon", "kernels"}, "policy");
  const Json& cls_field = field(doc, "class", "policy");
  if (!cls_field.is_string()) throw ValidationError("'class' must be a string");
  const PolicyClass cls = parse_policy_class(cls_field.get<std::string>());
  bool randomized = true;
  if (auto it = doc.find("randomized"); it != doc.end()) {
    if (!it->is_boolean()) throw ValidationError("'randomized' must be a boolean");
    randomized = it->get<bool>();
  }
  int horizon = 1;
  if (auto it = doc.find("horizon"); it != doc.end()) horizon = positive_int(*it, "'horizon'");
  auto policy = make_policy<T>(vocab.admissible, static_cast<int>(vocab.row_actions.size()), cls, horizon, randomized);
  const Json& kernels = field(doc, "kernels", "policy");
  require_object(kernels, "kernels");
  for (const auto& item : kernels.items()) {
    auto key = parse_key(item.key(), cls, vocab);
    require_object(item.value(), "kernel row");
    std::vector<T> row(vocab.row_actions.size(), T(0));
    T sum = 0;
    for (const auto& entry : item.value().items()) {
      T p = probability<T>(entry.value(), exact);
      row[index_of(vocab.row_actions, entry.key(), "action")] = p;
      sum += p;
    }
    if (!is_one(sum, kCompareTolerance)) throw ValidationError("kernel row '" + item.key() + "' does not sum to 1");
    policy.set(std::move(key), std::move(row));
  }
  auto report = validate_policy(vocab.allowed, policy);
  if (!report.ok()) throw ValidationError("invalid policy: " + report.violations.front());
  return policy;
}

template <class T>
Json policy_to_json(const BasicPolicy<T>& policy, const PolicyVocabulary& vocab) {
  Json kernels = Json::object();
  for (const auto& [key, row] : policy.kernels) {
    Json r = Json::object();
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (!is_zero(row[a])) r[vocab.row_actions.at(a)] = scalar_json(row[a]);
    }
    kernels[format_key(key, policy.policy_class, vocab)] = std::move(r);
  }
  return Json{{"class", to_string(policy.policy_class)},
              {"randomized", policy.randomized},
              {"horizon", policy.horizon},
              {"kernels", std::move(kernels)}};
}

MinimaxPolicyPair parse_policy_pair(const Json& doc, const ModelFile& model) {
  check_keys(doc, {"player1", "player2"}, "policy pair");
  return {parse_policy<double>(field(doc, "player1", "policy pair"), policy_vocabulary(model, PolicyRole::Player1)),
          parse_policy<double>(field(doc, "player2", "policy pair"), policy_vocabulary(model, PolicyRole::Player2))};
}

Json policy_pair_to_json(const MinimaxPolicyPair& pair, const ModelFile& model) {
  return Json{{"player1", policy_to_json(pair.player1, policy_vocabulary(model, PolicyRole::Player1))},
              {"player2", policy_to_json(pair.player2, policy_vocabulary(model, PolicyRole::Player2))}};
}

template <class T>
BasicStrategicMeasure<T> parse_measure(const Json& doc, const ModelFile& model, bool exact) {
  check_keys(doc, {"kind", "horizon", "support"}, "measure");
  if (field(doc, "kind", "measure") != "measure") throw ValidationError("measure file must have kind 'measure'");
  std::vector<std::string> joint;
  auto alphabet = measure_alphabet(model, joint);
  BasicStrategicMeasure<T> out;
  out.horizon = positive_int(field(doc, "horizon", "measure"), "'horizon'");
  out.stride = static_cast<int>(alphabet.size());
  const Json& support = field(doc, "support", "measure");
  require_object(support, "support");
  for (const auto& item : support.items()) {
    auto parts = split(item.key(), ',');
    if (static_cast<int>(parts.size()) != out.stride * out.horizon) {
      throw ValidationError("history '" + item.key() + "' has the wrong length");
    }
    std::vector<int> h;
    for (std::size_t i = 0; i < parts.size(); ++i) h.push_back(index_of(*alphabet[i % alphabet.size()], parts[i], "name"));
    T p = probability<T>(item.value(), exact);
    if (p < 0) throw ValidationError("negative probability for '" + item.key() + "'");
    if (!is_zero(p)) out.prob[std::move(h)] = p;
  }
  return out;
}

template <class T>
Json measure_to_json(const BasicStrategicMeasure<T>& measure, const ModelFile& model) {
  std::vector<std::string> joint;
  auto alphabet = measure_alphabet(model, joint);
  if (static_cast<int>(alphabet.size()) != measure.stride) throw ValidationError("measure does not fit the model");
  Json support = Json::object();
  for (const auto& [h, p] : measure.prob) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < h.size(); ++i) parts.push_back(alphabet[i % alphabet.size()]->at(h[i]));
    support[join(parts, ',')] = scalar_json(p);
  }
  return Json{{"kind", "measure"}, {"horizon", measure.horizon}, {"support", std::move(support)}};
}

std::string format_history(const std::vector<int>& history, const ModelFile& model) {
  std::vector<std::string> joint;
  auto alphabet = measure_alphabet(model, joint);
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < history.size(); ++i) parts.push_back(alphabet[i % alphabet.size()]->at(history[i]));
  return join(parts, ',');
}

template <class T>
std::vector<T> parse_distribution(const std::string& text, const ModelFile& model) {
  const auto& states = model.states;
  std::vector<T> p(states.size(), T(0));
  if (text.find(':') == std::string::npos) {
    p[index_of(states, text, "state")] = 1;
    return p;
  }
  T sum = 0;
  for (const auto& entry : split(text, ',')) {
    auto pos = entry.find(':');
    if (pos == std::string::npos) throw ValidationError("bad initial-distribution entry '" + entry + "'");
    Rational v = parse_rational(entry.substr(pos + 1));
    if (v < 0) throw ValidationError("negative initial probability");
    T value;
    if constexpr (std::is_same_v<T, Rational>) {
      value = v;
    } else {
      value = to_double(v);
    }
    p[index_of(states, entry.substr(0, pos), "state")] += value;
    sum += value;
  }
  if (!is_one(sum, kCompareTolerance)) throw ValidationError("initial distribution does not sum to 1");
  return p;
}

std::string render_table(const Json& report) {
  std::size_t width = 0;
  for (const auto& item : report.items()) width = std::max(width, item.key().size());
  std::string out;
  for (const auto& item : report.items()) {
    std::string value = item.value().is_string() ? item.value().get<std::string>() : item.value().dump();
    out += item.key() + std::string(width - item.key().size() + 2, ' ') + value + "\n";
  }
  return out;
}

template BasicPolicy<double> parse_policy(const Json&, const PolicyVocabulary&, bool);
template BasicPolicy<Rational> parse_policy(const Json&, const PolicyVocabulary&, bool);
template Json policy_to_json(const BasicPolicy<double>&, const PolicyVocabulary&);
template Json policy_to_json(const BasicPolicy<Rational>&, const PolicyVocabulary&);
template BasicStrategicMeasure<double> parse_measure(const Json&, const ModelFile&, bool);
template BasicStrategicMeasure<Rational> parse_measure(const Json&, const ModelFile&, bool);
template Json measure_to_json(const BasicStrategicMeasure<double>&, const ModelFile&);
template Json measure_to_json(const BasicStrategicMeasure<Rational>&, const ModelFile&);
template std::vector<double> parse_distribution(const std::string&, const ModelFile&);
template std::vector<Rational> parse_distribution(const std::string&, const ModelFile&);

}  // namespace stratmeas
