#ifndef ARGTREE_SERVICE_HPP
#define ARGTREE_SERVICE_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "argtree/corpus.hpp"
#include "argtree/edits.hpp"
#include "argtree/model_archive.hpp"
#include "argtree/phrase_tagger.hpp"

namespace argtree {

class NotFound : public Error {
 public:
  using Error::Error;
};

// The request is well-formed but clashes with the current state: a lock held
// by someone else, a missing pending item, an unresolved proposal.
class Conflict : public Error {
 public:
  using Error::Error;
};

class NoModel : public Error {
 public:
  using Error::Error;
};

enum class SlotStatus { Given, Accepted, Pending, Confirmed, Overridden };

inline const char* to_string(SlotStatus s) {
  switch (s) {
    case SlotStatus::Given: return "given";
    case SlotStatus::Accepted: return "accepted";
    case SlotStatus::Pending: return "pending";
    case SlotStatus::Confirmed: return "confirmed";
    case SlotStatus::Overridden: return "overridden";
  }
  return "?";
}

// One label decision of a proposal: the category (child 0) or the edge label
// of one child. `value` is empty while the slot is pending.
struct Slot {
  int child = 0;
  std::string value;
  std::optional<std::string> predicted;
  std::optional<Grade> grade;
  std::optional<std::string> alternative;
  SlotStatus status = SlotStatus::Given;

  bool operator==(const Slot& o) const {
    auto same_grade = [](const std::optional<Grade>& a, const std::optional<Grade>& b) {
      return a.has_value() == b.has_value() && (!a || (a->level == b->level && a->ratio == b->ratio));
    };
    return child == o.child && value == o.value && predicted == o.predicted && same_grade(grade, o.grade) &&
           alternative == o.alternative && status == o.status;
  }
};

// Index of the category slot in confirm/override requests.
inline constexpr int kCategorySlot = -1;

// A phrase awaiting confirmation. It is written into the tree only once
// every slot is resolved; until then its children stay reserved.
struct Proposal {
  int node = 0;
  std::vector<int> children;  // anchor order
  Slot category;
  std::vector<Slot> edges;

  bool resolved() const {
    if (category.status == SlotStatus::Pending) return false;
    for (const auto& s : edges)
      if (s.status == SlotStatus::Pending) return false;
    return true;
  }
  Slot& slot(int index) {
    if (index == kCategorySlot) return category;
    if (index < 0 || static_cast<std::size_t>(index) >= edges.size())
      throw NotFound("proposal " + std::to_string(node) + " has no slot " + std::to_string(index));
    return edges[static_cast<std::size_t>(index)];
  }
  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct SentenceState {
  SyntaxTree tree;
  std::map<int, Proposal> pending;

  friend bool operator==(const SentenceState&, const SentenceState&) = default;
};

// Recorded revisions. Predictions are stored resolved inside the ops, so
// replaying never consults a model.
namespace op {
struct Propose { Proposal proposal; };
struct Update { Proposal proposal; };
struct Discard { int node; };
struct Ungroup { int node; };
struct RelabelEdge { int child; std::string label; };
struct RelabelNode { int node; std::string category; };
struct Reattach { int child; int parent; std::string label; };
struct Comment { std::optional<std::string> text; };
struct Replace { SyntaxTree tree; };
}  // namespace op

using EditOp = std::variant<op::Propose, op::Update, op::Discard, op::Ungroup, op::RelabelEdge, op::RelabelNode, op::Reattach,
                            op::Comment, op::Replace>;

namespace detail {

inline bool reserved(const SentenceState& s, int id) {
  for (const auto& [n, p] : s.pending)
    if (std::find(p.children.begin(), p.children.end(), id) != p.children.end()) return true;
  return false;
}

inline void require_unreserved(const SentenceState& s, int id) {
  if (reserved(s, id)) throw Conflict("id " + std::to_string(id) + " belongs to a pending proposal");
}

inline void commit_if_resolved(SentenceState& s, int node) {
  const Proposal& p = s.pending.at(node);
  if (!p.resolved()) return;
  std::vector<std::string> labels;
  for (const auto& e : p.edges) labels.push_back(e.value);
  s.tree = add_phrase(std::move(s.tree), p.node, p.category.value, p.children, labels);
  s.pending.erase(node);
}

}  // namespace detail

// Applies one revision. The result is not validated here.
inline SentenceState apply_edit(SentenceState s, const EditOp& edit) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::Propose>) {
          if (s.pending.contains(o.proposal.node)) throw Conflict("proposal " + std::to_string(o.proposal.node) + " exists");
          check_groupable(s.tree, o.proposal.children);
          for (int c : o.proposal.children) detail::require_unreserved(s, c);
          s.pending.emplace(o.proposal.node, o.proposal);
          detail::commit_if_resolved(s, o.proposal.node);
        } else if constexpr (std::is_same_v<T, op::Update>) {
          if (!s.pending.contains(o.proposal.node)) throw NotFound("no pending proposal " + std::to_string(o.proposal.node));
          s.pending[o.proposal.node] = o.proposal;
          detail::commit_if_resolved(s, o.proposal.node);
        } else if constexpr (std::is_same_v<T, op::Discard>) {
          if (!s.pending.erase(o.node)) throw NotFound("no pending proposal " + std::to_string(o.node));
        } else if constexpr (std::is_same_v<T, op::Ungroup>) {
          detail::require_unreserved(s, o.node);
          s.tree = remove_phrase(std::move(s.tree), o.node);
        } else if constexpr (std::is_same_v<T, op::RelabelEdge>) {
          s.tree = set_edge_label(std::move(s.tree), o.child, o.label);
        } else if constexpr (std::is_same_v<T, op::RelabelNode>) {
          s.tree = set_category(std::move(s.tree), o.node, o.category);
        } else if constexpr (std::is_same_v<T, op::Reattach>) {
          detail::require_unreserved(s, o.child);
          s.tree = reattach(std::move(s.tree), o.child, o.parent, o.label);
        } else if constexpr (std::is_same_v<T, op::Comment>) {
          s.tree.comment = o.text;
        } else if constexpr (std::is_same_v<T, op::Replace>) {
          s.tree = o.tree;
          normalize(s.tree);
          s.pending.clear();
        }
      },
      edit);
  return s;
}

// Linear revision history with a cursor. states_[i] is the state after the
// first i ops.
class History {
 public:
  explicit History(SentenceState base = {}) : base_(base), states_{std::move(base)} {}

  const SentenceState& current() const { return states_[cursor_]; }
  const SentenceState& base() const { return base_; }
  std::size_t cursor() const { return cursor_; }
  std::size_t size() const { return ops_.size(); }
  bool can_undo() const { return cursor_ > 0; }
  bool can_redo() const { return cursor_ < ops_.size(); }

  void push(EditOp edit, SentenceState result) {
    ops_.resize(cursor_);
    states_.resize(cursor_ + 1);
    ops_.push_back(std::move(edit));
    states_.push_back(std::move(result));
    ++cursor_;
  }
  void undo() {
    if (!can_undo()) throw Conflict("nothing to undo");
    --cursor_;
  }
  void redo() {
    if (!can_redo()) throw Conflict("nothing to redo");
    ++cursor_;
  }

  // Re-applies the active ops to the base state.
  SentenceState replay() const {
    SentenceState s = base_;
    for (std::size_t i = 0; i < cursor_; ++i) s = apply_edit(std::move(s), ops_[i]);
    return s;
  }

 private:
  SentenceState base_;
  std::vector<EditOp> ops_;
  std::vector<SentenceState> states_;
  std::size_t cursor_ = 0;
};

struct ModelGeneration {
  std::uint64_t number = 0;
  ModelArchive archive;
};

struct OverrideRecord {
  int sentence = 0;
  int node = 0;
  int slot = 0;
  std::string category;
  std::optional<std::string> predicted;
  std::optional<Reliability> grade;
  std::string chosen;
};

struct SentenceView {
  int id = 0;
  SentenceState state;
  std::optional<std::string> locked_by;
  std::size_t revision = 0;
  std::size_t revisions = 0;
};

struct GroupRequest {
  std::vector<int> children;
  std::optional<std::string> category;
  std::map<int, std::string> labels;  // child id -> edge label supplied by the annotator
  std::optional<Thresholds> thresholds;
};

struct FunctionProposal {
  std::vector<int> children;  // anchor order
  FunctionPrediction prediction;
};

struct PhraseProposal {
  std::vector<int> children;
  PhrasePrediction prediction;
};

// Holds the corpus being annotated, the pending proposals and histories per
// sentence, and the published model generation.
class AnnotationService {
 public:
  struct Options {
    Thresholds thresholds;
    std::optional<std::filesystem::path> autosave;  // corpus path written after every committed change
    AnchorConvention anchors;
    double emission_smoothing = kDefaultEmissionSmoothing;
  };

  AnnotationService(Corpus corpus, std::optional<ModelArchive> model, Options options)
      : tagsets_(corpus.tagsets), options_(std::move(options)) {
    options_.thresholds.check();
    if (auto v = validate(corpus); has_errors(v)) throw ValidationError("corpus is invalid", v);
    for (auto& s : corpus.sentences) {
      committed_[s.id] = s.tree;
      auto e = std::make_unique<Entry>();
      e->history = History(SentenceState{std::move(s.tree), {}});
      sentences_.emplace(s.id, std::move(e));
    }
    if (model) model_ = std::make_shared<const ModelGeneration>(ModelGeneration{1, std::move(*model)});
  }

  const TagsetTriple& tagsets() const { return tagsets_; }
  const Thresholds& thresholds() const { return options_.thresholds; }

  std::shared_ptr<const ModelGeneration> model() const {
    std::lock_guard lk(model_mutex_);
    return model_;
  }

  std::vector<int> sentence_ids() const {
    std::shared_lock lk(table_mutex_);
    std::vector<int> out;
    for (const auto& [id, e] : sentences_) out.push_back(id);
    return out;
  }

  SentenceView view(int id) const {
    const Entry& e = entry(id);
    std::lock_guard lk(e.mutex);
    return view_locked(id, e);
  }

  // The state rebuilt from the sentence's base by replaying its history.
  SentenceState replay(int id) const {
    const Entry& e = entry(id);
    std::lock_guard lk(e.mutex);
    return e.history.replay();
  }

  int add_sentence(const std::vector<std::pair<std::string, std::string>>& words, std::optional<std::string> comment) {
    SyntaxTree t = flat_tree(words);
    t.comment = std::move(comment);
    check_tree(t);
    std::unique_lock lk(table_mutex_);
    const int id = sentences_.empty() ? 1 : sentences_.rbegin()->first + 1;
    auto e = std::make_unique<Entry>();
    e->history = History(SentenceState{t, {}});
    sentences_.emplace(id, std::move(e));
    lk.unlock();
    publish(id, t);
    return id;
  }

  void lock(int id, const std::string& annotator) {
    Entry& e = entry(id);
    std::lock_guard lk(e.mutex);
    acquire(e, id, annotator);
  }

  void unlock(int id, const std::string& annotator) {
    Entry& e = entry(id);
    std::lock_guard lk(e.mutex);
    if (e.holder && *e.holder != annotator) throw Conflict("sentence " + std::to_string(id) + " is locked by " + *e.holder);
    e.holder.reset();
  }

  // Level 1: functions for a selection under a given category.
  FunctionProposal predict_functions(int id, const std::vector<int>& children, const std::string& category,
                                     std::optional<Thresholds> t = {}) const {
    const auto ordered = selection_order(id, children);
    const auto gen = require_model();
    const auto it = gen->archive.models.find(category);
    if (it == gen->archive.models.end()) throw NoModel("no model for category '" + category + "'");
    return {ordered.first, decode(it->second, ordered.second, t.value_or(options_.thresholds))};
  }

  // Level 2: category and functions for a selection.
  PhraseProposal predict_phrase(int id, const std::vector<int>& children, std::optional<Thresholds> t = {}) const {
    const auto ordered = selection_order(id, children);
    const auto gen = require_model();
    return {ordered.first, decode_phrase(gen->archive.models, ordered.second, t.value_or(options_.thresholds))};
  }

  SentenceView group(int id, const GroupRequest& req, const std::string& annotator) {
    return mutate(id, annotator, [&](const SentenceState& s) -> EditOp {
      check_groupable(s.tree, req.children);
      for (int c : req.children) detail::require_unreserved(s, c);
      if (req.category) check_category(*req.category);
      for (const auto& [child, label] : req.labels) {
        if (std::find(req.children.begin(), req.children.end(), child) == req.children.end())
          throw DomainError("label given for " + std::to_string(child) + " which is not selected");
        check_edge_label(label);
      }
      Proposal p;
      p.node = std::max(next_node_id(s.tree), s.pending.empty() ? 0 : s.pending.rbegin()->first + 1);
      p.children = order_by_anchor(s.tree, req.children, options_.anchors);
      DaughterSeq daughters;
      for (int c : p.children) daughters.push_back(label_of(s.tree, c));
      for (int c : p.children) p.edges.push_back(Slot{c, {}, {}, {}, {}, SlotStatus::Given});
      for (auto& slot : p.edges)
        if (auto it = req.labels.find(slot.child); it != req.labels.end()) slot.value = it->second;

      const Thresholds t = req.thresholds.value_or(options_.thresholds);
      if (req.category) {
        p.category = Slot{0, *req.category, {}, {}, {}, SlotStatus::Given};
        fill_functions(p, daughters, t);
      } else {
        const auto gen = require_model();
        const auto pred = decode_phrase(gen->archive.models, daughters, t);
        p.category = Slot{0, {}, pred.category, pred.category_grade, pred.runner_up, SlotStatus::Pending};
        settle(p.category);
        fill_functions(p, daughters, t, &pred.function_prediction);
      }
      return op::Propose{std::move(p)};
    });
  }

  // Accepts a Marked prediction as it stands.
  SentenceView confirm(int id, int node, int slot, const std::string& annotator) {
    return mutate(id, annotator, [&](const SentenceState& s) -> EditOp {
      Proposal p = pending(s, node);
      Slot& sl = p.slot(slot);
      if (sl.status != SlotStatus::Pending) throw Conflict("slot " + std::to_string(slot) + " is not pending");
      if (sl.grade && sl.grade->level == Reliability::Unreliable)
        throw Conflict("slot " + std::to_string(slot) + " is unreliable and needs an explicit label");
      sl.value = *sl.predicted;
      sl.status = SlotStatus::Confirmed;
      return op::Update{std::move(p)};
    });
  }

  // Sets a slot of a pending proposal explicitly. A new category re-predicts
  // the edge labels that were not chosen by hand.
  SentenceView override_label(int id, int node, int slot, const std::string& label, const std::string& annotator) {
    return mutate(id, annotator, [&](const SentenceState& s) -> EditOp {
      Proposal p = pending(s, node);
      Slot& sl = p.slot(slot);
      if (sl.status == SlotStatus::Given) throw Conflict("slot " + std::to_string(slot) + " was given by the annotator");
      slot == kCategorySlot ? check_category(label) : check_edge_label(label);
      record_override(id, p, slot, sl, label);
      sl.value = label;
      sl.status = SlotStatus::Overridden;
      if (slot == kCategorySlot) {
        for (auto& e : p.edges)
          if (e.status == SlotStatus::Accepted || e.status == SlotStatus::Pending) e = Slot{e.child, {}, {}, {}, {}, SlotStatus::Given};
        DaughterSeq daughters;
        for (int c : p.children) daughters.push_back(label_of(s.tree, c));
        fill_functions(p, daughters, options_.thresholds);
      }
      return op::Update{std::move(p)};
    });
  }

  // Drops a pending proposal, or removes a committed phrase node.
  SentenceView ungroup(int id, int node, const std::string& annotator) {
    return mutate(id, annotator, [&](const SentenceState& s) -> EditOp {
      if (s.pending.contains(node)) return op::Discard{node};
      return op::Ungroup{node};
    });
  }

  SentenceView relabel_edge(int id, int child, const std::string& label, const std::string& annotator) {
    check_edge_label(label);
    return mutate(id, annotator, [&](const SentenceState&) -> EditOp { return op::RelabelEdge{child, label}; });
  }

  SentenceView relabel_node(int id, int node, const std::string& category, const std::string& annotator) {
    check_category(category);
    return mutate(id, annotator, [&](const SentenceState&) -> EditOp { return op::RelabelNode{node, category}; });
  }

  SentenceView reattach_child(int id, int child, int parent, const std::string& label, const std::string& annotator) {
    if (parent != kVirtualRoot) check_edge_label(label);
    return mutate(id, annotator, [&](const SentenceState& s) -> EditOp {
      if (s.pending.contains(parent)) throw Conflict("node " + std::to_string(parent) + " is still pending");
      return op::Reattach{child, parent, label};
    });
  }

  SentenceView set_comment(int id, std::optional<std::string> text, const std::string& annotator) {
    return mutate(id, annotator, [&](const SentenceState&) -> EditOp { return op::Comment{text}; });
  }

  SentenceView put_tree(int id, SyntaxTree tree, const std::string& annotator) {
    return mutate(id, annotator, [&](const SentenceState& s) -> EditOp {
      if (tree.tokens != s.tree.tokens) throw DomainError("a replacement tree must keep the sentence's tokens");
      return op::Replace{tree};
    });
  }

  SentenceView undo(int id, const std::string& annotator) {
    return step(id, annotator, [](History& h) { h.undo(); });
  }
  SentenceView redo(int id, const std::string& annotator) {
    return step(id, annotator, [](History& h) { h.redo(); });
  }

  // Trains on all committed trees and publishes the result as a new
  // generation. On failure the old generation keeps serving.
  std::shared_ptr<const ModelGeneration> retrain(std::string trained_at = {}) {
    Corpus c = export_corpus_value();
    std::erase_if(c.sentences, [](const Sentence& s) { return s.tree.nodes.empty(); });
    if (c.sentences.empty()) throw ModelError("nothing to train on");
    ModelArchive archive = train_archive(c, std::move(trained_at), options_.emission_smoothing);
    std::lock_guard lk(model_mutex_);
    model_ = std::make_shared<const ModelGeneration>(ModelGeneration{model_ ? model_->number + 1 : 1, std::move(archive)});
    return model_;
  }

  Corpus export_corpus_value() const {
    std::lock_guard lk(save_mutex_);
    return committed_corpus();
  }
  std::string export_corpus() const { return serialize_corpus(export_corpus_value()); }

  std::vector<OverrideRecord> overrides() const {
    std::lock_guard lk(override_mutex_);
    return overrides_;
  }

 private:
  struct Entry {
    mutable std::mutex mutex;
    History history;
    std::optional<std::string> holder;
  };

  Entry& entry(int id) const {
    std::shared_lock lk(table_mutex_);
    const auto it = sentences_.find(id);
    if (it == sentences_.end()) throw NotFound("no sentence " + std::to_string(id));
    return *it->second;
  }

  SentenceView view_locked(int id, const Entry& e) const {
    return {id, e.history.current(), e.holder, e.history.cursor(), e.history.size()};
  }

  static void acquire(Entry& e, int id, const std::string& annotator) {
    if (annotator.empty()) throw DomainError("annotator id is required");
    if (e.holder && *e.holder != annotator) throw Conflict("sentence " + std::to_string(id) + " is locked by " + *e.holder);
    e.holder = annotator;
  }

  std::shared_ptr<const ModelGeneration> require_model() const {
    auto m = model();
    if (!m) throw NoModel("no model loaded; retrain first");
    return m;
  }

  void check_category(const std::string& c) const {
    if (!tagsets_.phrase_categories.contains(c)) throw DomainError("unknown phrase category '" + c + "'");
  }
  void check_edge_label(const std::string& l) const {
    if (!tagsets_.edge_labels.contains(l)) throw DomainError("unknown edge label '" + l + "'");
  }
  void check_tree(const SyntaxTree& t) const {
    if (auto v = validate(t, tagsets_); has_errors(v)) throw ValidationError("edit rejected", v);
  }

  std::pair<std::vector<int>, DaughterSeq> selection_order(int id, const std::vector<int>& children) const {
    const auto v = view(id);
    check_groupable(v.state.tree, children);
    auto ordered = order_by_anchor(v.state.tree, children, options_.anchors);
    DaughterSeq labels;
    for (int c : ordered) labels.push_back(label_of(v.state.tree, c));
    return {std::move(ordered), std::move(labels)};
  }

  static const Proposal& pending(const SentenceState& s, int node) {
    const auto it = s.pending.find(node);
    if (it == s.pending.end()) throw NotFound("no pending proposal " + std::to_string(node));
    return it->second;
  }

  // Reliable predictions are taken as they are; anything else waits.
  static void settle(Slot& s) {
    if (s.grade && s.grade->level == Reliability::Reliable && s.predicted) {
      s.value = *s.predicted;
      s.status = SlotStatus::Accepted;
    } else {
      s.value.clear();
      s.status = SlotStatus::Pending;
    }
  }

  // Predicts edge labels for slots without a value.
  void fill_functions(Proposal& p, const DaughterSeq& daughters, const Thresholds& t,
                      const FunctionPrediction* given = nullptr) const {
    bool missing = false;
    for (const auto& e : p.edges) missing |= e.value.empty();
    if (!missing) return;
    const std::string category = p.category.value.empty() ? p.category.predicted.value_or("") : p.category.value;
    std::optional<FunctionPrediction> pred;
    if (given) {
      pred = *given;
    } else if (const auto gen = model()) {
      if (const auto it = gen->archive.models.find(category); it != gen->archive.models.end()) pred = decode(it->second, daughters, t);
    }
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      Slot& e = p.edges[i];
      if (!e.value.empty()) continue;
      if (pred) {
        e.predicted = pred->functions[i];
        e.grade = pred->positions[i].grade;
        if (pred->positions[i].second) e.alternative = pred->positions[i].second->function;
      } else {
        // No model for this category: the annotator has to decide.
        e.predicted.reset();
        e.grade = Grade{Reliability::Unreliable, 1.0};
      }
      settle(e);
    }
  }

  void record_override(int id, const Proposal& p, int slot, const Slot& s, const std::string& chosen) {
    std::lock_guard lk(override_mutex_);
    overrides_.push_back({id, p.node, slot, p.category.value.empty() ? p.category.predicted.value_or("") : p.category.value,
                          s.predicted, s.grade ? std::optional(s.grade->level) : std::nullopt, chosen});
  }

  template <typename MakeOp>
  SentenceView mutate(int id, const std::string& annotator, MakeOp make) {
    Entry& e = entry(id);
    std::lock_guard lk(e.mutex);
    acquire(e, id, annotator);
    const SentenceState& cur = e.history.current();
    EditOp edit = make(cur);
    SentenceState next = apply_edit(cur, edit);
    check_tree(next.tree);
    if (next == cur) return view_locked(id, e);
    const bool tree_changed = next.tree != cur.tree;
    e.history.push(std::move(edit), std::move(next));
    if (tree_changed) publish(id, e.history.current().tree);
    return view_locked(id, e);
  }

  template <typename Step>
  SentenceView step(int id, const std::string& annotator, Step f) {
    Entry& e = entry(id);
    std::lock_guard lk(e.mutex);
    acquire(e, id, annotator);
    const SyntaxTree before = e.history.current().tree;
    f(e.history);
    if (e.history.current().tree != before) publish(id, e.history.current().tree);
    return view_locked(id, e);
  }

  Corpus committed_corpus() const {
    Corpus c;
    c.tagsets = tagsets_;
    for (const auto& [id, t] : committed_) c.sentences.push_back({id, t});
    return c;
  }

  void publish(int id, const SyntaxTree& tree) {
    std::lock_guard lk(save_mutex_);
    committed_[id] = tree;
    if (options_.autosave) write_corpus(*options_.autosave, committed_corpus());
  }

  TagsetTriple tagsets_;
  Options options_;

  mutable std::shared_mutex table_mutex_;
  std::map<int, std::unique_ptr<Entry>> sentences_;

  mutable std::mutex save_mutex_;
  std::map<int, SyntaxTree> committed_;

  mutable std::mutex model_mutex_;
  std::shared_ptr<const ModelGeneration> model_;

  mutable std::mutex override_mutex_;
  std::vector<OverrideRecord> overrides_;
};

}  // namespace argtree

#endif  // ARGTREE_SERVICE_HPP
