#ifndef ARGTREE_EVAL_HPP
#define ARGTREE_EVAL_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <future>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "argtree/corpus.hpp"
#include "argtree/error.hpp"
#include "argtree/function_tagger.hpp"
#include "argtree/phrase_tagger.hpp"

namespace argtree {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sentence-level partition. Sentences are ranked by a hash of (seed, id) and
// dealt round-robin, so each test share is 1/folds up to one sentence.
struct FoldPlan {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::map<int, std::size_t> fold_of;  // sentence id -> fold

  std::vector<int> test_ids(std::size_t fold) const {
    std::vector<int> out;
    for (const auto& [id, f] : fold_of)
      if (f == fold) out.push_back(id);
    return out;
  }
  std::vector<int> train_ids(std::size_t fold) const {
    std::vector<int> out;
    for (const auto& [id, f] : fold_of)
      if (f != fold) out.push_back(id);
    return out;
  }
};

inline FoldPlan make_fold_plan(std::vector<int> ids, std::size_t folds = 10, std::uint64_t seed = 0) {
  if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw DomainError("duplicate sentence id in fold plan");
  if (ids.size() < folds)
    throw DomainError("corpus has " + std::to_string(ids.size()) + " sentences, fewer than " + std::to_string(folds) + " folds");
  std::vector<std::pair<std::uint64_t, int>> keyed;
  for (int id : ids) keyed.push_back({splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(id))), id});
  std::sort(keyed.begin(), keyed.end());
  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  for (std::size_t r = 0; r < keyed.size(); ++r) plan.fold_of[keyed[r].second] = r % folds;
  return plan;
}

inline FoldPlan make_fold_plan(const Corpus& corpus, std::size_t folds = 10, std::uint64_t seed = 0) {
  std::vector<int> ids;
  for (const auto& s : corpus.sentences) ids.push_back(s.id);
  return make_fold_plan(std::move(ids), folds, seed);
}

struct Cell {
  std::int64_t cases = 0;
  std::int64_t correct = 0;

  void add(bool ok) {
    ++cases;
    correct += ok;
  }
  double accuracy() const { return cases ? static_cast<double>(correct) / static_cast<double>(cases) : 0.0; }
  Cell& operator+=(const Cell& o) {
    cases += o.cases;
    correct += o.correct;
    return *this;
  }
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline std::size_t grade_slot(Reliability r) { return static_cast<std::size_t>(r); }

struct Strata {
  Cell total;
  std::array<Cell, 3> by_grade;  // indexed by Reliability

  void add(Reliability r, bool ok) {
    total.add(ok);
    by_grade[grade_slot(r)].add(ok);
  }
  Strata& operator+=(const Strata& o) {
    total += o.total;
    for (std::size_t i = 0; i < 3; ++i) by_grade[i] += o.by_grade[i];
    return *this;
  }
  friend bool operator==(const Strata&, const Strata&) = default;
};

// A confusion of gold label `gold` with `assigned`. For function reports
// mother/daughter are the categories involved; phrase reports leave them empty.
struct ErrorKey {
  std::string mother;
  std::string daughter;
  std::string gold;
  std::string assigned;

  friend auto operator<=>(const ErrorKey&, const ErrorKey&) = default;
};

struct ErrorEntry {
  ErrorKey key;
  std::int64_t combination = 0;  // cases with this mother/daughter (phrases: this gold category)
  std::int64_t gold = 0;         // of those, cases with this gold label
  std::int64_t count = 0;        // of those, cases tagged `assigned`

  friend bool operator==(const ErrorEntry&, const ErrorEntry&) = default;
};

enum class ReportKind { Functions, Phrases };

struct AccuracyReport {
  ReportKind kind = ReportKind::Functions;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  Thresholds thresholds;
  Strata overall;
  std::map<std::string, Strata> by_category;  // by mother (functions) or gold category (phrases)
  std::map<ErrorKey, std::int64_t> errors;
  std::map<std::pair<std::string, std::string>, std::int64_t> combinations;
  std::map<std::tuple<std::string, std::string, std::string>, std::int64_t> gold_counts;

  void record(const std::string& mother, const std::string& daughter, const std::string& gold,
              const std::string& assigned, Reliability r) {
    const bool ok = gold == assigned;
    overall.add(r, ok);
    by_category[kind == ReportKind::Functions ? mother : gold].add(r, ok);
    ++combinations[{mother, daughter}];
    ++gold_counts[{mother, daughter, gold}];
    if (!ok) ++errors[{mother, daughter, gold, assigned}];
  }

  void merge(const AccuracyReport& o) {
    overall += o.overall;
    for (const auto& [k, v] : o.by_category) by_category[k] += v;
    for (const auto& [k, v] : o.errors) errors[k] += v;
    for (const auto& [k, v] : o.combinations) combinations[k] += v;
    for (const auto& [k, v] : o.gold_counts) gold_counts[k] += v;
  }

  bool operator==(const AccuracyReport& o) const {
    return kind == o.kind && folds == o.folds && seed == o.seed && overall == o.overall &&
           by_category == o.by_category && errors == o.errors && combinations == o.combinations &&
           gold_counts == o.gold_counts;
  }
};

// Most frequent confusions, ties broken by key.
inline std::vector<ErrorEntry> top_errors(const AccuracyReport& report, std::size_t n) {
  std::vector<ErrorEntry> all;
  for (const auto& [key, count] : report.errors) {
    ErrorEntry e;
    e.key = key;
    e.count = count;
    e.combination = report.combinations.at({key.mother, key.daughter});
    e.gold = report.gold_counts.at({key.mother, key.daughter, key.gold});
    all.push_back(std::move(e));
  }
  std::stable_sort(all.begin(), all.end(), [](const ErrorEntry& a, const ErrorEntry& b) { return a.count > b.count; });
  if (all.size() > n) all.resize(n);
  return all;
}

namespace detail {

inline Corpus subset(const Corpus& corpus, const std::vector<int>& ids) {
  Corpus out;
  out.tagsets = corpus.tagsets;
  for (int id : ids) out.sentences.push_back(*corpus.find(id));
  return out;
}

inline ModelSet train_or_empty(const Corpus& corpus, double eps, const AnchorConvention& anchors) {
  ModelTrainer tr(eps, anchors);
  for (const auto& s : corpus.sentences) tr.add(s.tree);
  return tr.sequences() ? tr.build() : ModelSet{};
}

template <typename PerFold>
AccuracyReport run_folds(const Corpus& corpus, const FoldPlan& plan, const Thresholds& t, ReportKind kind, PerFold per_fold) {
  t.check();
  for (const auto& s : corpus.sentences)
    if (!plan.fold_of.contains(s.id)) throw DomainError("fold plan does not cover sentence " + std::to_string(s.id));
  std::vector<std::future<AccuracyReport>> jobs;
  for (std::size_t f = 0; f < plan.folds; ++f) {
    jobs.push_back(std::async(std::launch::async, [&, f] {
      AccuracyReport r;
      r.kind = kind;
      per_fold(subset(corpus, plan.train_ids(f)), subset(corpus, plan.test_ids(f)), r);
      return r;
    }));
  }
  AccuracyReport out;
  out.kind = kind;
  out.folds = plan.folds;
  out.seed = plan.seed;
  out.thresholds = t;
  for (auto& j : jobs) out.merge(j.get());
  return out;
}

}  // namespace detail

// Decodes every phrase's functions given its gold category and daughters.
// A category unseen in the training part yields no decision for its daughters.
inline AccuracyReport cross_validate_functions(const Corpus& corpus, const FoldPlan& plan, const Thresholds& t = {},
                                               double emission_smoothing = kDefaultEmissionSmoothing,
                                               const AnchorConvention& anchors = {}) {
  return detail::run_folds(corpus, plan, t, ReportKind::Functions, [&](const Corpus& tr, const Corpus& te, AccuracyReport& r) {
    const ModelSet models = detail::train_or_empty(tr, emission_smoothing, anchors);
    for (const auto& s : te.sentences)
      for (const auto& node : s.tree.nodes) {
        const auto d = ordered_daughters(s.tree, node.id, anchors);
        const auto it = models.find(node.category);
        if (it == models.end()) {
          for (std::size_t i = 0; i < d.labels.size(); ++i)
            r.record(node.category, d.labels[i], d.functions[i], "", Reliability::Unreliable);
          continue;
        }
        const auto p = decode(it->second, d.labels, t);
        for (std::size_t i = 0; i < d.labels.size(); ++i)
          r.record(node.category, d.labels[i], d.functions[i], p.functions[i], p.positions[i].grade.level);
      }
  });
}

// Assigns a category to every phrase from its gold daughters.
inline AccuracyReport cross_validate_phrases(const Corpus& corpus, const FoldPlan& plan, const Thresholds& t = {},
                                             double emission_smoothing = kDefaultEmissionSmoothing,
                                             const AnchorConvention& anchors = {}) {
  return detail::run_folds(corpus, plan, t, ReportKind::Phrases, [&](const Corpus& tr, const Corpus& te, AccuracyReport& r) {
    const ModelSet models = detail::train_or_empty(tr, emission_smoothing, anchors);
    for (const auto& s : te.sentences)
      for (const auto& node : s.tree.nodes) {
        if (models.empty()) {
          r.record("", "", node.category, "", Reliability::Unreliable);
          continue;
        }
        const auto d = ordered_daughters(s.tree, node.id, anchors);
        const auto p = decode_phrase(models, d.labels, t);
        r.record("", "", node.category, p.category, p.category_grade.level);
      }
  });
}

}  // namespace argtree

#endif  // ARGTREE_EVAL_HPP
