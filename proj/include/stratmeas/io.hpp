#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stratmeas/measure.hpp"
#include "stratmeas/minimax.hpp"
#include "stratmeas/model.hpp"
#include "stratmeas/policy.hpp"
#include "stratmeas/pomdp.hpp"

namespace stratmeas {

using Json = nlohmann::json;

/// A parsed model file together with the names used in it.
///
/// `kind` is one of "mdp", "pomdp", "minimax", "matrix". For "mdp" and
/// "pomdp", `mdp` holds the (base) model; `exact` is filled as well when the
/// file was read in exact mode.
struct ModelFile {
  std::string kind;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  std::vector<std::string> observations;
  FiniteMdp mdp;
  ExactMdp exact;
  bool has_exact = false;
  FinitePomdp pomdp;
  MinimaxModel minimax;
  MatrixGame matrix;
};

Json read_json_file(const std::string& path);

/// Strict parse: unknown keys, unknown names and invalid models are
/// ValidationErrors. In exact mode probabilities must be integers or strings.
ModelFile parse_model(const Json& doc, bool exact = false);
ModelFile load_model(const std::string& path, bool exact = false);

/// Names appearing in the keys and rows of one policy.
struct PolicyVocabulary {
  /// Names of x_n (or z_n) positions in keys.
  std::vector<std::string> conditioning;
  /// Names of action positions inside History keys.
  std::vector<std::string> history_actions;
  /// Names of the actions a row is over.
  std::vector<std::string> row_actions;
  /// Fallback source, indexed like `conditioning`.
  std::vector<std::vector<int>> admissible;
  /// Actions a row may charge; the full constraint of a POMDP is checked
  /// when its measure is built.
  std::vector<std::vector<int>> allowed;
};

enum class PolicyRole { Mdp, Pomdp, Player1, Player2 };

PolicyVocabulary policy_vocabulary(const ModelFile& model, PolicyRole role);

template <class T>
BasicPolicy<T> parse_policy(const Json& doc, const PolicyVocabulary& vocab, bool exact = false);

template <class T>
Json policy_to_json(const BasicPolicy<T>& policy, const PolicyVocabulary& vocab);

MinimaxPolicyPair parse_policy_pair(const Json& doc, const ModelFile& model);
Json policy_pair_to_json(const MinimaxPolicyPair& pair, const ModelFile& model);

/// {"kind": "measure", "horizon": H, "support": {"x0,a0,...": p}}. History
/// elements are (state, action) for MDPs, (state, observation, action) for
/// POMDPs and (state, "a1|a2") for minimax models.
template <class T>
BasicStrategicMeasure<T> parse_measure(const Json& doc, const ModelFile& model, bool exact = false);

template <class T>
Json measure_to_json(const BasicStrategicMeasure<T>& measure, const ModelFile& model);

/// Comma-joined names of a history or history prefix in the measure layout.
std::string format_history(const std::vector<int>& history, const ModelFile& model);

/// "x:p,y:q" or a single state name (point mass).
template <class T>
std::vector<T> parse_distribution(const std::string& text, const ModelFile& model);

/// Aligned two-column rendering of a flat report.
std::string render_table(const Json& report);

}  // namespace stratmeas
