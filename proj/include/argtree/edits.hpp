#ifndef ARGTREE_EDITS_HPP
#define ARGTREE_EDITS_HPP

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "argtree/error.hpp"
#include "argtree/tree.hpp"

namespace argtree {

// Children of a new phrase must currently hang off the virtual root.
inline void check_groupable(const SyntaxTree& t, const std::vector<int>& children) {
  if (children.empty()) throw DomainError("selection is empty");
  std::set<int> seen;
  for (int c : children) {
    if (!seen.insert(c).second) throw DomainError("id " + std::to_string(c) + " selected twice");
    const Edge* e = parent_edge(t, c);
    if (!contains_id(t, c) || !e) throw DomainError("id " + std::to_string(c) + " does not exist");
    if (e->parent != kVirtualRoot) throw DomainError("id " + std::to_string(c) + " already has a parent");
  }
}

// True if `ancestor` dominates `id` (or equals it).
inline bool dominates(const SyntaxTree& t, int ancestor, int id) {
  for (std::size_t guard = 0; guard <= t.edges.size() && id != kVirtualRoot; ++guard) {
    if (id == ancestor) return true;
    const Edge* e = parent_edge(t, id);
    if (!e) return false;
    id = e->parent;
  }
  return ancestor == kVirtualRoot;
}

inline SyntaxTree add_phrase(SyntaxTree t, int id, const std::string& category, const std::vector<int>& children,
                             const std::vector<std::string>& labels) {
  check_groupable(t, children);
  if (labels.size() != children.size()) throw DomainError("one label per child required");
  if (!is_node_id(id) || contains_id(t, id)) throw DomainError("node id " + std::to_string(id) + " is not free");
  t.nodes.push_back({id, category});
  for (auto& e : t.edges) {
    const auto it = std::find(children.begin(), children.end(), e.child);
    if (it == children.end()) continue;
    e.parent = id;
    e.label = labels[static_cast<std::size_t>(it - children.begin())];
  }
  t.edges.push_back({id, kVirtualRoot, std::string(kRootEdgeLabel)});
  normalize(t);
  return t;
}

// Removes a phrase node; its children move up to its parent, keeping the
// removed node's edge label there (or "--" at the root).
inline SyntaxTree remove_phrase(SyntaxTree t, int id) {
  if (!find_node(t, id)) throw DomainError("node " + std::to_string(id) + " does not exist");
  const Edge up = *parent_edge(t, id);
  for (auto& e : t.edges)
    if (e.parent == id) {
      e.parent = up.parent;
      e.label = up.label;
    }
  std::erase_if(t.nodes, [&](const PhraseNode& n) { return n.id == id; });
  std::erase_if(t.edges, [&](const Edge& e) { return e.child == id; });
  normalize(t);
  return t;
}

inline SyntaxTree set_edge_label(SyntaxTree t, int child, const std::string& label) {
  for (auto& e : t.edges)
    if (e.child == child) {
      if (e.parent == kVirtualRoot) throw DomainError("edges to the root cannot be relabelled");
      e.label = label;
      return t;
    }
  throw DomainError("id " + std::to_string(child) + " does not exist");
}

inline SyntaxTree set_category(SyntaxTree t, int id, const std::string& category) {
  for (auto& n : t.nodes)
    if (n.id == id) {
      n.category = category;
      return t;
    }
  throw DomainError("node " + std::to_string(id) + " does not exist");
}

// Moves `child` under `parent`. Crossing branches are allowed, cycles are not.
inline SyntaxTree reattach(SyntaxTree t, int child, int parent, const std::string& label) {
  if (!contains_id(t, child)) throw DomainError("id " + std::to_string(child) + " does not exist");
  if (parent != kVirtualRoot && !find_node(t, parent)) throw DomainError("node " + std::to_string(parent) + " does not exist");
  if (parent != kVirtualRoot && dominates(t, child, parent))
    throw DomainError("attaching " + std::to_string(child) + " under " + std::to_string(parent) + " would create a cycle");
  for (auto& e : t.edges)
    if (e.child == child) {
      e.parent = parent;
      e.label = parent == kVirtualRoot ? std::string(kRootEdgeLabel) : label;
    }
  return t;
}

}  // namespace argtree

#endif  // ARGTREE_EDITS_HPP
