#ifndef ARGTREE_TREE_HPP
#define ARGTREE_TREE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "argtree/error.hpp"
#include "argtree/tagset.hpp"

namespace argtree {

// Parent id of sentence roots.
inline constexpr int kVirtualRoot = 0;
// Phrase node ids start here; token positions stay below it.
inline constexpr int kFirstNodeId = 500;
inline constexpr int kMaxTokens = kFirstNodeId - 1;

inline bool is_token_id(int id) { return id >= 1 && id < kFirstNodeId; }
inline bool is_node_id(int id) { return id >= kFirstNodeId; }

struct Token {
  int position = 0;  // 1-based
  std::string form;
  std::string pos;

  friend bool operator==(const Token&, const Token&) = default;
};

struct PhraseNode {
  int id = 0;
  std::string category;

  friend bool operator==(const PhraseNode&, const PhraseNode&) = default;
};

// `child` is a token position or a node id; `parent` is a node id or kVirtualRoot.
struct Edge {
  int child = 0;
  int parent = kVirtualRoot;
  std::string label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// One sentence. Children are attached by parent pointers, so discontinuous
// constituents (crossing branches) need no special representation.
struct SyntaxTree {
  std::vector<Token> tokens;
  std::vector<PhraseNode> nodes;
  std::vector<Edge> edges;
  std::optional<std::string> comment;

  friend bool operator==(const SyntaxTree&, const SyntaxTree&) = default;
};

// Ordered list of daughter labels (word tags or phrase categories).
using DaughterSeq = std::vector<std::string>;

inline const PhraseNode* find_node(const SyntaxTree& tree, int id) {
  for (const auto& n : tree.nodes)
    if (n.id == id) return &n;
  return nullptr;
}

inline const Token* find_token(const SyntaxTree& tree, int position) {
  if (position < 1 || static_cast<std::size_t>(position) > tree.tokens.size()) return nullptr;
  const Token& t = tree.tokens[static_cast<std::size_t>(position) - 1];
  return t.position == position ? &t : nullptr;
}

inline bool contains_id(const SyntaxTree& tree, int id) {
  return is_token_id(id) ? find_token(tree, id) != nullptr : find_node(tree, id) != nullptr;
}

inline const Edge* parent_edge(const SyntaxTree& tree, int child) {
  for (const auto& e : tree.edges)
    if (e.child == child) return &e;
  return nullptr;
}

inline std::vector<const Edge*> child_edges(const SyntaxTree& tree, int parent) {
  std::vector<const Edge*> out;
  for (const auto& e : tree.edges)
    if (e.parent == parent) out.push_back(&e);
  return out;
}

// Word tag of a token or category of a node.
inline const std::string& label_of(const SyntaxTree& tree, int id) {
  if (is_token_id(id)) {
    if (const Token* t = find_token(tree, id)) return t->pos;
  } else if (const PhraseNode* n = find_node(tree, id)) {
    return n->category;
  }
  throw DomainError("no token or node with id " + std::to_string(id));
}

inline int next_node_id(const SyntaxTree& tree) {
  int next = kFirstNodeId;
  for (const auto& n : tree.nodes) next = std::max(next, n.id + 1);
  return next;
}

// Canonical member order: nodes by id, edges by child (tokens first, then nodes).
inline void normalize(SyntaxTree& tree) {
  std::sort(tree.nodes.begin(), tree.nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::stable_sort(tree.edges.begin(), tree.edges.end(), [](const auto& a, const auto& b) { return a.child < b.child; });
}

// A flat tree: every token attached to the virtual root.
inline SyntaxTree flat_tree(const std::vector<std::pair<std::string, std::string>>& words) {
  SyntaxTree tree;
  int pos = 1;
  for (const auto& [form, tag] : words) {
    tree.tokens.push_back({pos, form, tag});
    tree.edges.push_back({pos, kVirtualRoot, std::string(kRootEdgeLabel)});
    ++pos;
  }
  return tree;
}

struct Violation {
  enum class Severity { Error, Warning };

  Severity severity = Severity::Error;
  std::string subject;  // "token 3", "node 501", "edge 3->501", "sentence"
  std::string rule;

  bool is_error() const { return severity == Severity::Error; }
  std::string to_string() const {
    return std::string(severity == Severity::Error ? "error" : "warning") + ": " + subject + ": " + rule;
  }
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Appropriateness checks for one tree. Errors mark broken invariants; a
// warning flags annotation noise (several HD daughters) that the anchor
// convention tolerates.
inline std::vector<Violation> validate(const SyntaxTree& tree, const TagsetTriple& tagsets,
                                       std::string_view head_label = "HD") {
  std::vector<Violation> out;
  auto error = [&](std::string subject, std::string rule) {
    out.push_back({Violation::Severity::Error, std::move(subject), std::move(rule)});
  };

  if (tree.tokens.empty()) error("sentence", "sentence has no tokens");
  if (tree.tokens.size() > static_cast<std::size_t>(kMaxTokens))
    error("sentence", "more than " + std::to_string(kMaxTokens) + " tokens");
  if (tree.comment) {
    if (tree.comment->empty()) error("sentence", "comment is present but empty");
    if (tree.comment->find_first_of("\n\r") != std::string::npos) error("sentence", "comment contains a line break");
  }

  for (std::size_t i = 0; i < tree.tokens.size(); ++i) {
    const Token& t = tree.tokens[i];
    const std::string subject = "token " + std::to_string(t.position);
    if (t.position != static_cast<int>(i) + 1)
      error(subject, "token positions must run 1..n in order (expected " + std::to_string(i + 1) + ")");
    if (t.form.empty() || t.form.find_first_of("\t\n\r") != std::string::npos)
      error(subject, "form must be non-empty and free of tabs and line breaks");
    if (!t.form.empty() && t.form[0] == '#') {
      const bool digits = t.form.size() > 1 &&
                          std::all_of(t.form.begin() + 1, t.form.end(), [](char c) { return c >= '0' && c <= '9'; });
      if (digits || t.form == "#BOS" || t.form == "#EOS") error(subject, "form collides with a structural marker");
    }
    if (!tagsets.word_tags.contains(t.pos)) error(subject, "word tag '" + t.pos + "' not in tagset");
  }

  std::set<int> node_ids;
  for (const auto& n : tree.nodes) {
    const std::string subject = "node " + std::to_string(n.id);
    if (!is_node_id(n.id)) error(subject, "node ids must be >= " + std::to_string(kFirstNodeId));
    if (!node_ids.insert(n.id).second) error(subject, "duplicate node id");
    if (!tagsets.phrase_categories.contains(n.category))
      error(subject, "phrase category '" + n.category + "' not in tagset");
  }

  std::map<int, int> parent_count;
  std::map<int, int> parent_of;
  std::map<int, std::vector<const Edge*>> children;
  for (const auto& e : tree.edges) {
    const std::string subject = "edge " + std::to_string(e.child) + "->" + std::to_string(e.parent);
    const bool child_ok = is_token_id(e.child) ? find_token(tree, e.child) != nullptr : node_ids.count(e.child) > 0;
    if (!child_ok) {
      error(subject, "child does not exist");
      continue;
    }
    if (e.parent != kVirtualRoot && node_ids.count(e.parent) == 0) {
      error(subject, "parent does not exist");
      continue;
    }
    ++parent_count[e.child];
    parent_of[e.child] = e.parent;
    if (e.parent == kVirtualRoot) {
      if (e.label != kRootEdgeLabel) error(subject, "root edges must carry the label '--'");
    } else {
      children[e.parent].push_back(&e);
      if (!tagsets.edge_labels.contains(e.label)) error(subject, "edge label '" + e.label + "' not in tagset");
    }
  }

  for (const auto& t : tree.tokens) {
    const int c = parent_count.count(t.position) ? parent_count[t.position] : 0;
    if (c != 1)
      error("token " + std::to_string(t.position), "must have exactly one parent edge (has " + std::to_string(c) + ")");
  }
  for (int id : node_ids) {
    const int c = parent_count.count(id) ? parent_count[id] : 0;
    if (c != 1) error("node " + std::to_string(id), "must have exactly one parent edge (has " + std::to_string(c) + ")");
    if (children[id].empty()) error("node " + std::to_string(id), "node has no children");
    const auto heads = std::count_if(children[id].begin(), children[id].end(),
                                     [&](const Edge* e) { return e->label == head_label; });
    if (heads > 1)
      out.push_back({Violation::Severity::Warning, "node " + std::to_string(id),
                     "several " + std::string(head_label) + " daughters; anchor falls back to leftmost"});
  }

  // Acyclicity: walking up from any node must reach the virtual root.
  for (int id : node_ids) {
    int cur = id;
    std::size_t steps = 0;
    while (cur != kVirtualRoot && steps <= node_ids.size()) {
      auto it = parent_of.find(cur);
      if (it == parent_of.end()) break;
      cur = it->second;
      ++steps;
    }
    if (cur != kVirtualRoot && steps > node_ids.size()) error("node " + std::to_string(id), "node lies on a cycle");
  }
  return out;
}

inline bool has_errors(const std::vector<Violation>& v) {
  return std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.is_error(); });
}

inline bool is_valid(const SyntaxTree& tree, const TagsetTriple& tagsets) {
  return !has_errors(validate(tree, tagsets));
}

// Thrown when an operation requires a valid tree or corpus.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& context, std::vector<Violation> violations)
      : Error(describe(context, violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string describe(const std::string& context, const std::vector<Violation>& v) {
    std::string msg = context;
    for (const auto& x : v)
      if (x.is_error()) msg += "; " + x.subject + ": " + x.rule;
    return msg;
  }

  std::vector<Violation> violations_;
};

}  // namespace argtree

#endif  // ARGTREE_TREE_HPP
