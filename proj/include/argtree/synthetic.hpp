#ifndef ARGTREE_SYNTHETIC_HPP
#define ARGTREE_SYNTHETIC_HPP

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "argtree/corpus.hpp"
#include "argtree/function_tagger.hpp"

namespace argtree {

// Samples trees top-down from trained category models: a function sequence
// from the transition model, then one daughter per function from the raw
// emission counts, recursing into daughters that are phrase categories.
// Only the generator's raw 64-bit output is used, so corpora are identical
// across standard libraries.
class TreeSampler {
 public:
  struct Options {
    std::size_t max_depth = 4;
    std::size_t max_daughters = 8;
    std::size_t max_tokens = 60;
  };

  // Root categories and word forms are taken from `seed`, models are trained on it.
  explicit TreeSampler(const Corpus& seed) : TreeSampler(seed, Options{}) {}
  TreeSampler(const Corpus& seed, Options options) : options_(options), tagsets_(seed.tagsets), models_(train(seed)) {
    for (const auto& s : seed.sentences) {
      for (const auto& e : s.tree.edges)
        if (e.parent == kVirtualRoot && is_node_id(e.child)) ++roots_[find_node(s.tree, e.child)->category];
      for (const auto& t : s.tree.tokens) forms_[t.pos].push_back(t.form);
    }
    if (roots_.empty()) throw ModelError("seed corpus has no phrase at the root");
  }

  const ModelSet& models() const { return models_; }

  SyntaxTree sample(std::mt19937_64& rng) const {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      SyntaxTree t;
      const std::string root = draw(rng, roots_);
      if (expand(rng, t, root, kVirtualRoot, std::string(kRootEdgeLabel), 0)) {
        normalize(t);
        return t;
      }
    }
    throw ModelError("could not sample a tree within the size limits");
  }

  Corpus sample_corpus(std::size_t sentences, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    Corpus c;
    c.tagsets = tagsets_;
    for (std::size_t i = 0; i < sentences; ++i) c.sentences.push_back({static_cast<int>(i + 1), sample(rng)});
    return c;
  }

 private:
  static double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

  static std::size_t draw_index(std::mt19937_64& rng, const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = uniform(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0) return i;
    }
    return weights.size() - 1;
  }

  template <typename Map>
  static std::string draw(std::mt19937_64& rng, const Map& weights) {
    double total = 0;
    for (const auto& [k, w] : weights) total += static_cast<double>(w);
    double u = uniform(rng) * total;
    for (const auto& [k, w] : weights) {
      u -= static_cast<double>(w);
      if (u < 0) return k;
    }
    return weights.rbegin()->first;
  }

  bool is_phrase(const std::string& label) const { return models_.contains(label); }

  // Returns false when a size limit is hit; the caller restarts the tree.
  bool expand(std::mt19937_64& rng, SyntaxTree& t, const std::string& category, int parent, const std::string& label,
              std::size_t depth) const {
    const CategoryModel& m = models_.at(category);
    const int id = next_node_id(t);
    t.nodes.push_back({id, category});
    t.edges.push_back({id, parent, label});

    const std::size_t b = m.boundary();
    std::size_t g1 = b, g2 = b;
    std::vector<std::size_t> functions;
    while (true) {
      std::vector<double> next(b + 1);
      for (std::size_t c = 0; c <= b; ++c) next[c] = m.transition_probability(g1, g2, c);
      const std::size_t g = draw_index(rng, next);
      if (g == b) break;
      functions.push_back(g);
      if (functions.size() > options_.max_daughters) return false;
      g1 = g2;
      g2 = g;
    }
    if (functions.empty()) return false;

    for (std::size_t f : functions) {
      std::map<std::string, std::int64_t> daughters;
      for (std::size_t d = 0; d < m.daughters().size(); ++d) {
        const auto& label_d = m.daughters()[d];
        if (depth + 1 >= options_.max_depth && is_phrase(label_d)) continue;
        if (!is_phrase(label_d) && !tagsets_.word_tags.contains(label_d)) continue;
        if (const auto n = m.emission_count(f, d)) daughters[label_d] = n;
      }
      if (daughters.empty()) return false;
      const std::string d = draw(rng, daughters);
      const std::string& function = m.functions()[f];
      if (is_phrase(d)) {
        if (!expand(rng, t, d, id, function, depth + 1)) return false;
      } else {
        if (t.tokens.size() >= options_.max_tokens) return false;
        const int pos = static_cast<int>(t.tokens.size()) + 1;
        const auto it = forms_.find(d);
        std::string form = it == forms_.end() ? d : it->second[static_cast<std::size_t>(uniform(rng) * static_cast<double>(it->second.size()))];
        t.tokens.push_back({pos, std::move(form), d});
        t.edges.push_back({pos, id, function});
      }
    }
    return true;
  }

  Options options_;
  TagsetTriple tagsets_;
  ModelSet models_;
  std::map<std::string, std::int64_t> roots_;
  std::map<std::string, std::vector<std::string>> forms_;
};

}  // namespace argtree

#endif  // ARGTREE_SYNTHETIC_HPP
