// Shared test fixtures: small example trees, the seed treebank and
// random tree generators.
#ifndef ARGTREE_TESTS_FIXTURES_HPP
#define ARGTREE_TESTS_FIXTURES_HPP

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "argtree/corpus.hpp"
#include "argtree/tagset_format.hpp"
#include "argtree/text.hpp"
#include "argtree/tree.hpp"

namespace fixtures {

using namespace argtree;

inline std::string data_path(const std::string& name) { return std::string(ARGTREE_DATA_DIR) + "/" + name; }

inline TagsetTriple toy_tagsets() { return parse_tagsets(read_file(data_path("toy.tagsets"))); }
inline Corpus toy_corpus() { return read_corpus(data_path("toy.export")); }

// "Selbst besucht hat Peter Sabine nie": the VP (500) spans tokens 1, 2, 5
// and crosses the S-level daughters hat/Peter.
inline SyntaxTree crossing_vp_tree() {
  SyntaxTree t;
  t.tokens = {{1, "Selbst", "ADV"}, {2, "besucht", "VVPP"}, {3, "hat", "VAFIN"},
              {4, "Peter", "NE"},   {5, "Sabine", "NE"},    {6, "nie", "ADV"}};
  t.nodes = {{500, "VP"}, {501, "S"}};
  t.edges = {{1, 500, "MO"}, {2, 500, "HD"}, {3, 501, "HD"}, {4, 501, "SB"},
             {5, 500, "OA"}, {6, 501, "NG"}, {500, 501, "OC"}, {501, 0, "--"}};
  return t;
}

// "das seit 1993 angebotene Bonusprogramm für Vielflieger" before the NP is
// built: AP (501) and PP (502) exist, everything else hangs off the root.
inline SyntaxTree np_ungrouped_tree() {
  SyntaxTree t;
  t.tokens = {{1, "das", "ART"},  {2, "seit", "APPR"},         {3, "1993", "CARD"}, {4, "angebotene", "ADJA"},
              {5, "Bonusprogramm", "NN"}, {6, "für", "APPR"}, {7, "Vielflieger", "NN"}};
  t.nodes = {{500, "PP"}, {501, "AP"}, {502, "PP"}};
  t.edges = {{1, 0, "--"},   {2, 500, "AC"}, {3, 500, "NK"},   {4, 501, "HD"},   {5, 0, "--"},
             {6, 502, "AC"}, {7, 502, "NK"}, {500, 501, "MO"}, {501, 0, "--"}, {502, 0, "--"}};
  return t;
}

inline SyntaxTree np_grouped_tree() {
  SyntaxTree t = np_ungrouped_tree();
  t.nodes.push_back({503, "NP"});
  for (auto& e : t.edges) {
    if (e.child == 1 || e.child == 5 || e.child == 501) e = {e.child, 503, "NK"};
    if (e.child == 502) e = {502, 503, "MNR"};
  }
  t.edges.push_back({503, 0, "--"});
  normalize(t);
  return t;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

template <typename T>
const T& pick_from(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

inline std::vector<std::string> labels(const Tagset& t) {
  std::vector<std::string> out;
  for (const auto& e : t.entries()) out.push_back(e.label);
  return out;
}

// Random valid tree. With `crossing`, any subset of the current roots may be
// grouped; otherwise only runs that are adjacent in surface order.
inline SyntaxTree random_tree(std::mt19937_64& rng, const TagsetTriple& ts, std::size_t max_tokens, bool crossing) {
  const auto words = labels(ts.word_tags);
  const auto cats = labels(ts.phrase_categories);
  const auto funcs = labels(ts.edge_labels);
  const std::size_t n = 1 + pick(rng, max_tokens);

  SyntaxTree t;
  for (std::size_t i = 1; i <= n; ++i) {
    t.tokens.push_back({static_cast<int>(i), "w" + std::to_string(i), pick_from(rng, words)});
    t.edges.push_back({static_cast<int>(i), 0, "--"});
  }
  std::map<int, int> min_yield;
  for (std::size_t i = 1; i <= n; ++i) min_yield[static_cast<int>(i)] = static_cast<int>(i);

  const std::size_t groups = pick(rng, n + 2);
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<int> roots;
    for (const auto& e : t.edges)
      if (e.parent == 0) roots.push_back(e.child);
    std::sort(roots.begin(), roots.end(), [&](int a, int b) { return min_yield[a] < min_yield[b]; });
    std::vector<int> chosen;
    if (crossing) {
      for (int r : roots)
        if (pick(rng, 2) == 0) chosen.push_back(r);
      if (chosen.empty()) chosen.push_back(pick_from(rng, roots));
    } else {
      const std::size_t start = pick(rng, roots.size());
      const std::size_t len = 1 + pick(rng, roots.size() - start);
      chosen.assign(roots.begin() + static_cast<long>(start), roots.begin() + static_cast<long>(start + len));
    }
    const int id = next_node_id(t);
    t.nodes.push_back({id, pick_from(rng, cats)});
    int my = 1 << 30;
    for (auto& e : t.edges) {
      if (std::find(chosen.begin(), chosen.end(), e.child) != chosen.end()) {
        e.parent = id;
        e.label = pick_from(rng, funcs);
        my = std::min(my, min_yield[e.child]);
      }
    }
    min_yield[id] = my;
    t.edges.push_back({id, 0, "--"});
  }
  if (pick(rng, 3) == 0) t.comment = "comment " + std::to_string(pick(rng, 1000));
  normalize(t);
  return t;
}

}  // namespace fixtures

#endif  // ARGTREE_TESTS_FIXTURES_HPP
