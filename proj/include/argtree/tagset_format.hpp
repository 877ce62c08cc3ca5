#ifndef ARGTREE_TAGSET_FORMAT_HPP
#define ARGTREE_TAGSET_FORMAT_HPP

#include <array>
#include <string>
#include <string_view>

#include "argtree/error.hpp"
#include "argtree/tagset.hpp"
#include "argtree/text.hpp"

namespace argtree {

// Tagset file layout:
//
//   %% words
//   ADV<TAB>adverb
//   %% phrases
//   NP<TAB>noun phrase
//   %% edges
//   SB<TAB>subject
//
// An entry without description is written as the bare label.

inline std::string serialize_tagsets(const TagsetTriple& tagsets) {
  std::string out;
  auto section = [&](std::string_view name, const Tagset& set) {
    out += "%% ";
    out += name;
    out += '\n';
    for (const auto& e : set.entries()) {
      out += e.label;
      if (!e.description.empty()) {
        out += '\t';
        out += e.description;
      }
      out += '\n';
    }
  };
  section("words", tagsets.word_tags);
  section("phrases", tagsets.phrase_categories);
  section("edges", tagsets.edge_labels);
  return out;
}

inline TagsetTriple parse_tagsets(std::string_view text) {
  static constexpr std::array<std::string_view, 3> kSections = {"words", "phrases", "edges"};
  TagsetTriple out;
  std::array<Tagset*, 3> targets = {&out.word_tags, &out.phrase_categories, &out.edge_labels};
  std::array<bool, 3> seen{};
  std::array<std::size_t, 3> header_line{};
  int current = -1;

  std::size_t lineno = 0;
  for_each_line(text, [&](std::string_view line) {
    ++lineno;
    if (line.empty()) return;
    if (line.substr(0, 3) == "%% ") {
      const std::string_view name = line.substr(3);
      current = -1;
      for (int i = 0; i < 3; ++i)
        if (kSections[static_cast<std::size_t>(i)] == name) current = i;
      if (current < 0) throw ParseError(lineno, "unknown tagset section '" + std::string(name) + "'");
      if (seen[static_cast<std::size_t>(current)])
        throw ParseError(lineno, "section '" + std::string(name) + "' appears twice");
      seen[static_cast<std::size_t>(current)] = true;
      header_line[static_cast<std::size_t>(current)] = lineno;
      return;
    }
    if (current < 0) throw ParseError(lineno, "entry before the first section header (expected '%% words')");
    const auto tab = line.find('\t');
    std::string label(line.substr(0, tab));
    std::string description = tab == std::string_view::npos ? std::string() : std::string(line.substr(tab + 1));
    try {
      targets[static_cast<std::size_t>(current)]->add(std::move(label), std::move(description));
    } catch (const DomainError& e) {
      throw ParseError(lineno, e.what());
    }
  });

  for (std::size_t i = 0; i < 3; ++i) {
    if (!seen[i]) throw ParseError(0, "missing tagset section '" + std::string(kSections[i]) + "'");
    if (targets[i]->empty()) throw ParseError(header_line[i], "tagset section '" + std::string(kSections[i]) + "' is empty");
  }
  return out;
}

}  // namespace argtree

#endif  // ARGTREE_TAGSET_FORMAT_HPP
