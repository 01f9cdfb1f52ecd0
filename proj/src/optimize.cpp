#include "stratmeas/optimize.hpp"

#include <cmath>
#include <limits>

#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

bool needs_stationary_class(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::TJ1:
    case CriterionKind::TJ2:
    case CriterionKind::TJ3:
    case CriterionKind::TJ4:
    case CriterionKind::CVaR:
    case CriterionKind::VaR: return true;
    default: return false;
  }
}

bool expected_cost(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::NStage:
    case CriterionKind::Discounted:
    case CriterionKind::J1:
    case CriterionKind::J2:
    case CriterionKind::J3:
    case CriterionKind::J4: return true;
    default: return false;
  }
}

std::vector<double> dirac(int n, int x) {
  std::vector<double> p(n, 0.0);
  p[x] = 1.0;
  return p;
}

}  // namespace

ClassOptimum optimal_value(const FiniteMdp& model, PolicyClass cls, const CriterionSpec& criterion,
                           const OptimizeOptions& options) {
  validate_criterion(criterion);
  require_valid(model);
  const bool stationary = cls == PolicyClass::Stationary || cls == PolicyClass::SemiStationary;
  if (needs_stationary_class(criterion.kind) && !stationary) {
    throw ValidationError(to_string(criterion.kind) + " is optimized over stationary classes only");
  }
  ClassOptimum opt;
  opt.policy_class = cls;
  opt.criterion = criterion;
  opt.randomization_certified = expected_cost(criterion.kind);
  for (int x = 0; x < model.num_states; ++x) {
    EnumerationOptions eo;
    eo.cap = options.cap;
    eo.initial_state = x;
    auto en = make_enumerator(model, cls, criterion.horizon, eo);
    const auto p0 = dirac(model.num_states, x);
    std::vector<double> values;
    values.reserve(en.size());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < en.size(); ++i) {
      double v = evaluate(model, en.at(i), p0, criterion, options.evaluation).value;
      if (!std::isfinite(v)) throw Error("criterion value is not finite");
      values.push_back(v);
      if (v < best - 1e-12) {
        best = v;
        best_index = i;
      }
    }
    opt.values.push_back(best);
    opt.argmin.push_back(en.at(best_index));
    opt.candidates.push_back(std::move(en));
    opt.candidate_values.push_back(std::move(values));
  }
  return opt;
}

EpsOptimalSelection eps_optimal_policy(const ClassOptimum& opt, double epsilon) {
  if (!(epsilon > 0)) throw ValidationError("epsilon must be positive");
  EpsOptimalSelection out;
  const int states = static_cast<int>(opt.values.size());
  for (int x = 0; x < states; ++x) {
    const auto& values = opt.candidate_values[x];
    std::size_t pick = 0;
    while (pick < values.size() && values[pick] > opt.values[x] + epsilon) ++pick;
    out.per_state.push_back(opt.candidates[x].at(pick));
    out.values.push_back(values[pick]);
  }
  const PolicyClass cls = opt.policy_class;
  if (states > 0 && (cls == PolicyClass::SemiStationary || cls == PolicyClass::SemiMarkov ||
                     cls == PolicyClass::History)) {
    Policy combined = out.per_state.front();
    combined.kernels.clear();
    for (int x = 0; x < states; ++x) {
      for (const auto& [key, row] : out.per_state[x].kernels) {
        // Every key of the state-x candidate carries x as its initial state.
        combined.kernels.emplace(key, row);
      }
    }
    out.combined = std::move(combined);
  }
  return out;
}

ClassComparison class_comparison(const FiniteMdp& model, const CriterionSpec& criterion,
                                 const std::vector<PolicyClass>& classes, const OptimizeOptions& options) {
  ClassComparison out;
  out.classes = classes;
  for (PolicyClass cls : classes) out.values.push_back(optimal_value(model, cls, criterion, options).values);
  out.all_equal.assign(model.num_states, true);
  for (std::size_t c = 1; c < out.values.size(); ++c) {
    for (int x = 0; x < model.num_states; ++x) {
      if (std::fabs(out.values[c][x] - out.values[0][x]) > 1e-9) out.all_equal[x] = false;
    }
  }
  return out;
}

}  // namespace stratmeas
