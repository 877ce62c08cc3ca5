#ifndef ARGTREE_FUNCTION_TAGGER_HPP
#define ARGTREE_FUNCTION_TAGGER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "argtree/anchor.hpp"
#include "argtree/category_model.hpp"
#include "argtree/corpus.hpp"
#include "argtree/error.hpp"
#include "argtree/markov.hpp"

namespace argtree {

using ModelSet = std::map<std::string, CategoryModel, std::less<>>;

// Ratio thresholds between the best and second-best alternative.
struct Thresholds {
  double unreliable_below = 5.0;  // θ1
  double reliable_from = 100.0;   // θ2, also the beam width

  void check() const {
    if (!std::isfinite(unreliable_below) || !std::isfinite(reliable_from) || unreliable_below < 1.0 ||
        reliable_from < unreliable_below)
      throw DomainError("thresholds must satisfy theta2 >= theta1 >= 1");
  }
};

enum class Reliability { Reliable, Marked, Unreliable };

inline const char* to_string(Reliability r) {
  switch (r) {
    case Reliability::Reliable: return "reliable";
    case Reliability::Marked: return "marked";
    case Reliability::Unreliable: return "unreliable";
  }
  return "?";
}

struct Grade {
  Reliability level = Reliability::Reliable;
  double ratio = std::numeric_limits<double>::infinity();  // p_best / p_second
};

inline Reliability classify(double ratio, const Thresholds& t) {
  if (ratio < t.unreliable_below) return Reliability::Unreliable;
  if (ratio < t.reliable_from) return Reliability::Marked;
  return Reliability::Reliable;
}

// Grades a decision from log probabilities of the winner and the best
// competitor. A competitor outside the beam (p < p_best / θ2) is treated as
// absent: the decision is reliable with an infinite ratio.
inline Grade grade(double log_best, double log_second, const Thresholds& t) {
  if (log_best == kLogZero) return {Reliability::Unreliable, 1.0};
  if (log_second == kLogZero || log_best - log_second > std::log(t.reliable_from)) return {};
  const double d = log_best - log_second;
  Reliability level = Reliability::Reliable;
  if (d < std::log(t.unreliable_below))
    level = Reliability::Unreliable;
  else if (d < std::log(t.reliable_from))
    level = Reliability::Marked;
  return {level, std::exp(d)};
}

struct Alternative {
  std::string function;
  double log_probability = kLogZero;
};

struct PositionPrediction {
  std::string function;
  Grade grade;
  std::optional<Alternative> second;  // set when the runner-up lies within the beam
};

struct FunctionPrediction {
  std::string category;
  std::vector<std::string> functions;
  double log_probability = kLogZero;  // log P_Q(G) P_Q(T|G)
  std::vector<PositionPrediction> positions;

  double joint_probability() const { return std::exp(log_probability); }
};

// Accumulates training events from annotated trees, one sequence per phrase node.
class ModelTrainer {
 public:
  explicit ModelTrainer(double emission_smoothing = kDefaultEmissionSmoothing, AnchorConvention anchors = {})
      : epsilon_(emission_smoothing), anchors_(std::move(anchors)) {}

  void add(const SyntaxTree& tree) {
    for (const auto& node : tree.nodes) {
      const auto d = ordered_daughters(tree, node.id, anchors_);
      add_sequence(node.category, d.functions, d.labels);
    }
  }

  void add_sequence(const std::string& category, const std::vector<std::string>& functions, const DaughterSeq& daughters) {
    if (functions.size() != daughters.size() || functions.empty())
      throw ModelError("training sequence must be non-empty with one daughter per function");
    auto& acc = per_category_[category];
    const std::string boundary(kBoundary);
    std::string g1 = boundary, g2 = boundary;
    for (std::size_t i = 0; i < functions.size(); ++i) {
      acc.functions.insert(functions[i]);
      acc.daughters.insert(daughters[i]);
      ++acc.trigrams[{g1, g2, functions[i]}];
      ++acc.emissions[{functions[i], daughters[i]}];
      g1 = std::move(g2);
      g2 = functions[i];
    }
    ++acc.trigrams[{g1, g2, boundary}];
    ++sequences_;
  }

  std::size_t sequences() const { return sequences_; }

  ModelSet build() const {
    if (sequences_ == 0) throw ModelError("nothing to train on");
    ModelSet out;
    for (const auto& [category, acc] : per_category_) {
      out.emplace(category, CategoryModel(category, {acc.functions.begin(), acc.functions.end()},
                                          {acc.daughters.begin(), acc.daughters.end()}, acc.trigrams, acc.emissions,
                                          epsilon_));
    }
    return out;
  }

 private:
  struct Accumulator {
    std::set<std::string> functions;
    std::set<std::string> daughters;
    std::map<std::array<std::string, 3>, std::int64_t> trigrams;
    std::map<std::pair<std::string, std::string>, std::int64_t> emissions;
  };

  double epsilon_;
  AnchorConvention anchors_;
  std::map<std::string, Accumulator> per_category_;
  std::size_t sequences_ = 0;
};

// One model per phrase category occurring in the corpus.
inline ModelSet train(const Corpus& corpus, double emission_smoothing = kDefaultEmissionSmoothing,
                      const AnchorConvention& anchors = {}) {
  ModelTrainer trainer(emission_smoothing, anchors);
  for (const auto& s : corpus.sentences) trainer.add(s.tree);
  return trainer.build();
}

// log P_Q(G) + log P_Q(T|G), including the final transition into the boundary.
// Functions outside the model's inventory have probability zero.
inline double log_score(const CategoryModel& model, std::span<const std::string> functions, std::span<const std::string> daughters) {
  if (functions.size() != daughters.size()) throw DomainError("function and daughter sequences differ in length");
  if (functions.empty()) throw DomainError("cannot score an empty sequence");
  const std::size_t b = model.boundary();
  std::size_t g1 = b, g2 = b;
  double total = 0.0;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const std::size_t g = model.function_index(functions[i]);
    if (g >= model.state_count()) return kLogZero;
    total += model.log_transition(g1, g2, g) + model.log_emission(g, daughters[i]);
    g1 = g2;
    g2 = g;
  }
  return total + model.log_transition(g1, g2, b);
}

inline double score(const CategoryModel& model, std::span<const std::string> functions, std::span<const std::string> daughters) {
  return std::exp(log_score(model, functions, daughters));
}

// Most probable function sequence for the daughters, with a reliability grade
// per position derived from the best path that assigns a different function
// at that position.
inline FunctionPrediction decode(const CategoryModel& model, std::span<const std::string> daughters,
                                 const Thresholds& thresholds = {}) {
  thresholds.check();
  if (daughters.empty()) throw DomainError("cannot decode an empty daughter sequence");
  const MaxMarginals mm = viterbi_max_marginals(model, daughters);

  FunctionPrediction out;
  out.category = model.category();
  out.log_probability = mm.best_log_prob;
  for (std::size_t i = 0; i < daughters.size(); ++i) {
    const std::size_t best = mm.best_path[i];
    PositionPrediction pos;
    pos.function = model.functions()[best];
    std::optional<std::size_t> runner_up;
    for (std::size_t s = 0; s < model.state_count(); ++s) {
      if (s == best) continue;
      if (!runner_up || mm.max_marginal[i][s] > mm.max_marginal[i][*runner_up]) runner_up = s;
    }
    const double log_second = runner_up ? mm.max_marginal[i][*runner_up] : kLogZero;
    pos.grade = grade(mm.best_log_prob, log_second, thresholds);
    if (runner_up && std::isfinite(pos.grade.ratio) && log_second != kLogZero)
      pos.second = Alternative{model.functions()[*runner_up], log_second};
    out.functions.push_back(pos.function);
    out.positions.push_back(std::move(pos));
  }
  return out;
}

}  // namespace argtree

#endif  // ARGTREE_FUNCTION_TAGGER_HPP
