#ifndef ARGTREE_PHRASE_TAGGER_HPP
#define ARGTREE_PHRASE_TAGGER_HPP

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argtree/function_tagger.hpp"
#include "argtree/markov.hpp"

namespace argtree {

struct PhrasePrediction {
  std::string category;
  std::vector<std::string> functions;
  double log_probability = kLogZero;  // joint P_Q(G) P_Q(T|G) of the winner
  Grade category_grade;
  std::optional<std::string> runner_up;  // best losing category, if any model competed
  FunctionPrediction function_prediction;
};

// Runs every category model on the daughters and keeps the one with the
// highest joint probability (uniform prior over categories). Exact ties go to
// the lexicographically smallest category.
inline PhrasePrediction decode_phrase(const ModelSet& models, std::span<const std::string> daughters,
                                      const Thresholds& thresholds = {}) {
  thresholds.check();
  if (models.empty()) throw ModelError("no category models available");
  if (daughters.empty()) throw DomainError("cannot decode an empty daughter sequence");

  std::vector<FunctionPrediction> per_category;
  per_category.reserve(models.size());
  for (const auto& [category, model] : models) per_category.push_back(decode(model, daughters, thresholds));

  std::size_t best = 0;
  for (std::size_t i = 1; i < per_category.size(); ++i)
    if (per_category[i].log_probability > per_category[best].log_probability) best = i;
  std::optional<std::size_t> second;
  for (std::size_t i = 0; i < per_category.size(); ++i) {
    if (i == best) continue;
    if (!second || per_category[i].log_probability > per_category[*second].log_probability) second = i;
  }

  PhrasePrediction out;
  out.category = per_category[best].category;
  out.functions = per_category[best].functions;
  out.log_probability = per_category[best].log_probability;
  out.category_grade =
      grade(per_category[best].log_probability, second ? per_category[*second].log_probability : kLogZero, thresholds);
  if (second) out.runner_up = per_category[*second].category;
  out.function_prediction = std::move(per_category[best]);
  return out;
}

// A grammatical function indexed by the category it belongs to (HD_S vs HD_VP).
struct IndexedFunction {
  std::string category;
  std::string function;

  std::string to_string() const { return function + "_" + category; }
  friend bool operator==(const IndexedFunction&, const IndexedFunction&) = default;
};

// One Markov model over the disjoint union of all category inventories.
// Transitions between states of different categories have probability zero;
// within a category they are that category's own transitions, including the
// initial and final ones.
class CombinedModel {
 public:
  explicit CombinedModel(const ModelSet& models) {
    for (const auto& [category, model] : models) {
      offsets_.push_back(states_.size());
      models_.push_back(model);
      for (const auto& f : model.functions()) {
        states_.push_back({category, f});
        owner_.push_back(models_.size() - 1);
      }
    }
  }

  std::size_t state_count() const { return states_.size(); }
  const std::vector<IndexedFunction>& states() const { return states_; }
  std::size_t category_count() const { return models_.size(); }
  const CategoryModel& component(std::size_t c) const { return models_[c]; }
  // Category index owning a state.
  std::size_t owner(std::size_t state) const { return owner_[state]; }

  double log_transition(std::size_t a, std::size_t b, std::size_t c) const {
    const std::size_t boundary = states_.size();
    std::optional<std::size_t> category;
    for (std::size_t s : {a, b, c}) {
      if (s == boundary) continue;
      if (category && *category != owner_[s]) return kLogZero;
      category = owner_[s];
    }
    if (!category) return kLogZero;  // boundary to boundary: the empty sequence
    const CategoryModel& m = models_[*category];
    return m.log_transition(local(a, *category), local(b, *category), local(c, *category));
  }

  double log_emission(std::size_t state, std::string_view daughter) const {
    const std::size_t c = owner_[state];
    return models_[c].log_emission(state - offsets_[c], daughter);
  }

 private:
  std::size_t local(std::size_t s, std::size_t category) const {
    return s == states_.size() ? models_[category].boundary() : s - offsets_[category];
  }

  std::vector<CategoryModel> models_;
  std::vector<std::size_t> offsets_;
  std::vector<IndexedFunction> states_;
  std::vector<std::size_t> owner_;
};

static_assert(SecondOrderModel<CombinedModel>);

inline CombinedModel build_combined_model(const ModelSet& models) { return CombinedModel(models); }

struct CombinedPrediction {
  std::string category;
  std::vector<IndexedFunction> path;
  std::vector<std::string> functions;  // path with indices stripped
  double log_probability = kLogZero;
  Grade category_grade;
};

// Single Viterbi pass over the combined model. The category is read off the
// indices on the winning path; its grade compares the best path against the
// best path under any other index.
inline CombinedPrediction decode_combined(const CombinedModel& model, std::span<const std::string> daughters,
                                          const Thresholds& thresholds = {}) {
  thresholds.check();
  if (model.state_count() == 0) throw ModelError("no category models available");
  if (daughters.empty()) throw DomainError("cannot decode an empty daughter sequence");
  const MaxMarginals mm = viterbi_max_marginals(model, daughters);

  CombinedPrediction out;
  out.log_probability = mm.best_log_prob;
  for (std::size_t s : mm.best_path) {
    out.path.push_back(model.states()[s]);
    out.functions.push_back(model.states()[s].function);
  }
  const std::size_t winner = model.owner(mm.best_path.front());
  out.category = model.states()[mm.best_path.front()].category;
  double other = kLogZero;
  for (std::size_t s = 0; s < model.state_count(); ++s)
    if (model.owner(s) != winner) other = std::max(other, mm.max_marginal[0][s]);
  out.category_grade = grade(mm.best_log_prob, other, thresholds);
  return out;
}

}  // namespace argtree

#endif  // ARGTREE_PHRASE_TAGGER_HPP
