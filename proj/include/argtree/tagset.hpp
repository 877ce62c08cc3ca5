#ifndef ARGTREE_TAGSET_HPP
#define ARGTREE_TAGSET_HPP

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "argtree/error.hpp"

namespace argtree {

// Edge label carried by every child of the virtual root.
inline constexpr std::string_view kRootEdgeLabel = "--";

struct TagEntry {
  std::string label;
  std::string description;

  friend bool operator==(const TagEntry&, const TagEntry&) = default;
};

inline bool is_valid_label(std::string_view label) {
  if (label.empty()) return false;
  return std::none_of(label.begin(), label.end(), [](unsigned char c) { return c <= 0x20 || c == 0x7f; });
}

// An ordered inventory of labels. Order is the order of insertion and is
// preserved by serialization.
class Tagset {
 public:
  Tagset() = default;

  explicit Tagset(std::vector<TagEntry> entries) {
    for (auto& e : entries) add(std::move(e.label), std::move(e.description));
  }

  void add(std::string label, std::string description = {}) {
    if (!is_valid_label(label)) throw DomainError("invalid label '" + label + "'");
    if (label == kRootEdgeLabel) throw DomainError("label '--' is reserved for root edges");
    if (contains(label)) throw DomainError("duplicate label '" + label + "'");
    if (description.find_first_of("\t\n\r") != std::string::npos)
      throw DomainError("description of '" + label + "' contains a tab or line break");
    entries_.push_back({std::move(label), std::move(description)});
  }

  bool contains(std::string_view label) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const TagEntry& e) { return e.label == label; });
  }

  const std::vector<TagEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const Tagset&, const Tagset&) = default;

 private:
  std::vector<TagEntry> entries_;
};

// The three label inventories attached to a corpus.
struct TagsetTriple {
  Tagset word_tags;
  Tagset phrase_categories;
  Tagset edge_labels;

  friend bool operator==(const TagsetTriple&, const TagsetTriple&) = default;
};

}  // namespace argtree

#endif  // ARGTREE_TAGSET_HPP
