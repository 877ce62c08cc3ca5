#ifndef ARGTREE_CATEGORY_MODEL_HPP
#define ARGTREE_CATEGORY_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "argtree/error.hpp"
#include "argtree/markov.hpp"

namespace argtree {

// Boundary symbol: start context and end-of-sequence outcome.
inline constexpr std::string_view kBoundary = "$";
// Label under which unseen daughter categories share emission mass.
inline constexpr std::string_view kUnknownDaughter = "<unk>";
inline constexpr double kDefaultEmissionSmoothing = 0.1;

struct Lambdas {
  double unigram = 0.0;
  double bigram = 0.0;
  double trigram = 0.0;

  double sum() const { return unigram + bigram + trigram; }
  friend bool operator==(const Lambdas&, const Lambdas&) = default;
};

// Transition counts over an alphabet of `symbols` entries, the last being the
// boundary. Every event is a trigram (g1, g2, g3); lower orders and history
// counts are its marginals.
class NgramCounts {
 public:
  explicit NgramCounts(std::size_t symbols = 1)
      : symbols_(symbols),
        trigram_(symbols * symbols * symbols, 0),
        bigram_(symbols * symbols, 0),
        unigram_(symbols, 0),
        history2_(symbols * symbols, 0),
        history1_(symbols, 0) {}

  void add(std::size_t g1, std::size_t g2, std::size_t g3, std::int64_t count = 1) {
    trigram_[(g1 * symbols_ + g2) * symbols_ + g3] += count;
    bigram_[g2 * symbols_ + g3] += count;
    unigram_[g3] += count;
    history2_[g1 * symbols_ + g2] += count;
    history1_[g2] += count;
    total_ += count;
  }

  std::size_t symbols() const { return symbols_; }
  std::int64_t trigram(std::size_t a, std::size_t b, std::size_t c) const { return trigram_[(a * symbols_ + b) * symbols_ + c]; }
  std::int64_t bigram(std::size_t b, std::size_t c) const { return bigram_[b * symbols_ + c]; }
  std::int64_t unigram(std::size_t c) const { return unigram_[c]; }
  // Number of events whose history is (a, b) / ends in b.
  std::int64_t history(std::size_t a, std::size_t b) const { return history2_[a * symbols_ + b]; }
  std::int64_t history(std::size_t b) const { return history1_[b]; }
  std::int64_t total() const { return total_; }

  friend bool operator==(const NgramCounts&, const NgramCounts&) = default;

 private:
  std::size_t symbols_;
  std::vector<std::int64_t> trigram_, bigram_, unigram_, history2_, history1_;
  std::int64_t total_ = 0;
};

// Interpolation weights by count deletion. Each trigram type votes with its
// count for the estimator that best predicts it once that occurrence is
// removed from the counts; ties go to the lower order; 0/0 counts as 0.
inline Lambdas deleted_interpolation(const NgramCounts& counts) {
  if (counts.total() <= 0) throw ModelError("deleted interpolation needs at least one event");
  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den - 1 <= 0 ? 0.0 : static_cast<double>(num - 1) / static_cast<double>(den - 1);
  };
  double l1 = 0, l2 = 0, l3 = 0;
  const std::size_t n = counts.symbols();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        const std::int64_t tri = counts.trigram(a, b, c);
        if (tri == 0) continue;
        const double f3 = ratio(tri, counts.history(a, b));
        const double f2 = ratio(counts.bigram(b, c), counts.history(b));
        const double f1 = ratio(counts.unigram(c), counts.total());
        const auto weight = static_cast<double>(tri);
        if (f1 >= f2 && f1 >= f3)
          l1 += weight;
        else if (f2 >= f3)
          l2 += weight;
        else
          l3 += weight;
      }
  const double sum = l1 + l2 + l3;
  return {l1 / sum, l2 / sum, l3 / sum};
}

// Interpolated P(c | a, b). Estimators whose history was never observed drop
// out and the remaining weights are renormalized; if all remaining weights are
// zero the remaining estimators are averaged.
inline double interpolated_probability(const NgramCounts& counts, const Lambdas& lambdas, std::size_t a, std::size_t b,
                                       std::size_t c) {
  const double f1 = static_cast<double>(counts.unigram(c)) / static_cast<double>(counts.total());
  double weighted = lambdas.unigram * f1;
  double weight = lambdas.unigram;
  double plain = f1;
  int available = 1;
  if (const auto h = counts.history(b); h > 0) {
    const double f2 = static_cast<double>(counts.bigram(b, c)) / static_cast<double>(h);
    weighted += lambdas.bigram * f2;
    weight += lambdas.bigram;
    plain += f2;
    ++available;
  }
  if (const auto h = counts.history(a, b); h > 0) {
    const double f3 = static_cast<double>(counts.trigram(a, b, c)) / static_cast<double>(h);
    weighted += lambdas.trigram * f3;
    weight += lambdas.trigram;
    plain += f3;
    ++available;
  }
  return weight > 0 ? weighted / weight : plain / available;
}

// The Markov model for one phrase category: grammatical functions are the
// hidden states, daughter categories the outputs.
class CategoryModel {
 public:
  CategoryModel() = default;

  // `functions` and `daughters` must be sorted and unique. Trigram counts are
  // keyed by function labels with kBoundary for the boundary; emission counts
  // by (function, daughter).
  CategoryModel(std::string category, std::vector<std::string> functions, std::vector<std::string> daughters,
                const std::map<std::array<std::string, 3>, std::int64_t>& trigram_counts,
                const std::map<std::pair<std::string, std::string>, std::int64_t>& emission_counts,
                double emission_smoothing = kDefaultEmissionSmoothing)
      : category_(std::move(category)),
        functions_(std::move(functions)),
        daughters_(std::move(daughters)),
        counts_(functions_.size() + 1),
        emission_counts_(functions_.size() * daughters_.size(), 0),
        epsilon_(emission_smoothing) {
    if (functions_.empty()) throw ModelError("category '" + category_ + "' has no functions");
    if (!std::is_sorted(functions_.begin(), functions_.end()) ||
        std::adjacent_find(functions_.begin(), functions_.end()) != functions_.end())
      throw ModelError("function inventory must be sorted and unique");
    if (!std::is_sorted(daughters_.begin(), daughters_.end()) ||
        std::adjacent_find(daughters_.begin(), daughters_.end()) != daughters_.end())
      throw ModelError("daughter vocabulary must be sorted and unique");
    if (!(epsilon_ > 0)) throw ModelError("emission smoothing must be positive");
    for (const auto& f : functions_)
      if (f == kBoundary) throw ModelError("'$' cannot be a function label");

    for (const auto& [key, count] : trigram_counts) {
      if (count < 0) throw ModelError("negative trigram count");
      if (count == 0) continue;
      counts_.add(symbol_index(key[0]), symbol_index(key[1]), symbol_index(key[2]), count);
    }
    if (counts_.total() == 0) throw ModelError("category '" + category_ + "' has no transition counts");
    for (const auto& [key, count] : emission_counts) {
      if (count < 0) throw ModelError("negative emission count");
      const auto f = function_index(key.first);
      const auto d = daughter_index(key.second);
      if (f >= functions_.size() || d >= daughters_.size())
        throw ModelError("emission count for unknown label (" + key.first + ", " + key.second + ")");
      emission_counts_[f * daughters_.size() + d] += count;
    }
    derive();
  }

  const std::string& category() const { return category_; }
  const std::vector<std::string>& functions() const { return functions_; }
  const std::vector<std::string>& daughters() const { return daughters_; }
  const NgramCounts& counts() const { return counts_; }
  const Lambdas& lambdas() const { return lambdas_; }
  double emission_smoothing() const { return epsilon_; }

  std::size_t state_count() const { return functions_.size(); }
  std::size_t boundary() const { return functions_.size(); }

  // Index of a function label, or boundary() for "$".
  std::size_t symbol_index(std::string_view label) const {
    if (label == kBoundary) return boundary();
    const std::size_t f = function_index(label);
    if (f >= functions_.size()) throw ModelError("unknown function '" + std::string(label) + "' in category '" + category_ + "'");
    return f;
  }
  // state_count() if the label is not in the inventory.
  std::size_t function_index(std::string_view label) const {
    auto it = std::lower_bound(functions_.begin(), functions_.end(), label);
    return it != functions_.end() && *it == label ? static_cast<std::size_t>(it - functions_.begin()) : functions_.size();
  }
  // daughters().size() means "unseen": the shared unknown slot.
  std::size_t daughter_index(std::string_view label) const {
    auto it = std::lower_bound(daughters_.begin(), daughters_.end(), label);
    return it != daughters_.end() && *it == label ? static_cast<std::size_t>(it - daughters_.begin()) : daughters_.size();
  }

  std::int64_t emission_count(std::size_t function, std::size_t daughter) const {
    return daughter < daughters_.size() ? emission_counts_[function * daughters_.size() + daughter] : 0;
  }
  std::int64_t function_count(std::size_t function) const { return function_totals_[function]; }

  // P(c | a, b) over states and boundary.
  double transition_probability(std::size_t a, std::size_t b, std::size_t c) const { return transition_[flat(a, b, c)]; }
  // P(daughter | function); daughter index daughters().size() is the unknown slot.
  double emission_probability(std::size_t function, std::size_t daughter) const {
    return emission_[function * (daughters_.size() + 1) + daughter];
  }

  double log_transition(std::size_t a, std::size_t b, std::size_t c) const { return log_transition_[flat(a, b, c)]; }
  double log_emission(std::size_t function, std::string_view daughter) const {
    return log_emission_[function * (daughters_.size() + 1) + daughter_index(daughter)];
  }

  friend bool operator==(const CategoryModel& a, const CategoryModel& b) {
    return a.category_ == b.category_ && a.functions_ == b.functions_ && a.daughters_ == b.daughters_ &&
           a.counts_ == b.counts_ && a.emission_counts_ == b.emission_counts_ && a.epsilon_ == b.epsilon_ &&
           a.lambdas_ == b.lambdas_ && a.transition_ == b.transition_ && a.emission_ == b.emission_;
  }

 private:
  std::size_t flat(std::size_t a, std::size_t b, std::size_t c) const {
    const std::size_t s = functions_.size() + 1;
    return (a * s + b) * s + c;
  }

  void derive() {
    lambdas_ = deleted_interpolation(counts_);
    const std::size_t s = functions_.size() + 1;
    transition_.assign(s * s * s, 0.0);
    log_transition_.assign(s * s * s, kLogZero);
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b)
        for (std::size_t c = 0; c < s; ++c) {
          const double p = interpolated_probability(counts_, lambdas_, a, b, c);
          transition_[flat(a, b, c)] = p;
          log_transition_[flat(a, b, c)] = p > 0 ? std::log(p) : kLogZero;
        }

    const std::size_t v = daughters_.size();
    function_totals_.assign(functions_.size(), 0);
    emission_.assign(functions_.size() * (v + 1), 0.0);
    log_emission_.assign(functions_.size() * (v + 1), kLogZero);
    for (std::size_t f = 0; f < functions_.size(); ++f) {
      std::int64_t total = 0;
      for (std::size_t d = 0; d < v; ++d) total += emission_counts_[f * v + d];
      function_totals_[f] = total;
      const double denom = static_cast<double>(total) + epsilon_ * static_cast<double>(v + 1);
      for (std::size_t d = 0; d <= v; ++d) {
        const double p = (static_cast<double>(emission_count(f, d)) + epsilon_) / denom;
        emission_[f * (v + 1) + d] = p;
        log_emission_[f * (v + 1) + d] = std::log(p);
      }
    }
  }

  std::string category_;
  std::vector<std::string> functions_;
  std::vector<std::string> daughters_;
  NgramCounts counts_;
  std::vector<std::int64_t> emission_counts_;
  double epsilon_ = kDefaultEmissionSmoothing;

  Lambdas lambdas_;
  std::vector<std::int64_t> function_totals_;
  std::vector<double> transition_, log_transition_;
  std::vector<double> emission_, log_emission_;
};

static_assert(SecondOrderModel<CategoryModel>);

}  // namespace argtree

#endif  // ARGTREE_CATEGORY_MODEL_HPP
