#ifndef ARGTREE_ANCHOR_HPP
#define ARGTREE_ANCHOR_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "argtree/error.hpp"
#include "argtree/tree.hpp"

namespace argtree {

// Labels that drive the serial-order convention for overlapping siblings.
struct AnchorConvention {
  std::string noun_phrase = "NP";
  std::string noun_kernel = "NK";
  std::string head = "HD";
};

namespace detail {

inline int anchor_of(const SyntaxTree& tree, int id, const AnchorConvention& conv, std::size_t depth) {
  if (is_token_id(id)) {
    if (!find_token(tree, id)) throw DomainError("no token at position " + std::to_string(id));
    return id;
  }
  const PhraseNode* node = find_node(tree, id);
  if (!node) throw DomainError("node " + std::to_string(id) + " is not in the tree");
  if (depth > tree.nodes.size()) throw DomainError("cycle below node " + std::to_string(id));

  const auto kids = child_edges(tree, id);
  if (kids.empty()) throw DomainError("node " + std::to_string(id) + " has no children");

  auto anchor = [&](const Edge* e) { return anchor_of(tree, e->child, conv, depth + 1); };

  if (node->category == conv.noun_phrase) {
    int last = 0;
    for (const Edge* e : kids)
      if (e->label == conv.noun_kernel) last = std::max(last, anchor(e));
    if (last != 0) return last;
  } else {
    const Edge* head = nullptr;
    int heads = 0;
    for (const Edge* e : kids) {
      if (e->label == conv.head) {
        head = e;
        ++heads;
      }
    }
    if (heads == 1) return anchor(head);
  }

  int leftmost = 0;
  for (const Edge* e : kids) {
    const int a = anchor(e);
    if (leftmost == 0 || a < leftmost) leftmost = a;
  }
  return leftmost;
}

}  // namespace detail

// Token position that stands for `id` when ordering siblings: the head
// daughter's anchor, the last noun-kernel daughter for NPs, else the leftmost.
inline int anchor(const SyntaxTree& tree, int id, const AnchorConvention& conv = {}) {
  return detail::anchor_of(tree, id, conv, 0);
}

struct OrderedDaughters {
  std::vector<int> children;            // token positions / node ids
  DaughterSeq labels;                   // word tags / phrase categories
  std::vector<std::string> functions;   // edge labels
};

// Children of `id`, sorted by anchor position.
inline OrderedDaughters ordered_daughters(const SyntaxTree& tree, int id, const AnchorConvention& conv = {}) {
  if (!find_node(tree, id)) throw DomainError("node " + std::to_string(id) + " is not in the tree");
  const auto kids = child_edges(tree, id);
  std::vector<std::pair<int, const Edge*>> keyed;
  keyed.reserve(kids.size());
  for (const Edge* e : kids) keyed.emplace_back(anchor(tree, e->child, conv), e);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  OrderedDaughters out;
  for (const auto& [pos, e] : keyed) {
    out.children.push_back(e->child);
    out.labels.push_back(label_of(tree, e->child));
    out.functions.push_back(e->label);
  }
  return out;
}

// Sorts arbitrary token/node ids by anchor; used when grouping a selection.
inline std::vector<int> order_by_anchor(const SyntaxTree& tree, std::vector<int> ids, const AnchorConvention& conv = {}) {
  std::vector<std::pair<int, int>> keyed;
  for (int id : ids) keyed.emplace_back(anchor(tree, id, conv), id);
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = keyed[i].second;
  return ids;
}

}  // namespace argtree

#endif  // ARGTREE_ANCHOR_HPP
