#ifndef ARGTREE_CORPUS_HPP
#define ARGTREE_CORPUS_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "argtree/error.hpp"
#include "argtree/tagset_format.hpp"
#include "argtree/text.hpp"
#include "argtree/tree.hpp"

namespace argtree {

struct Sentence {
  int id = 0;
  SyntaxTree tree;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  TagsetTriple tagsets;

  const Sentence* find(int id) const {
    for (const auto& s : sentences)
      if (s.id == id) return &s;
    return nullptr;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

inline std::vector<Violation> validate(const Corpus& corpus) {
  std::vector<Violation> out;
  std::set<int> ids;
  for (const auto& s : corpus.sentences) {
    const std::string where = "sentence " + std::to_string(s.id);
    if (s.id < 1) out.push_back({Violation::Severity::Error, where, "sentence ids must be positive"});
    if (!ids.insert(s.id).second) out.push_back({Violation::Severity::Error, where, "duplicate sentence id"});
    for (auto v : validate(s.tree, corpus.tagsets)) {
      v.subject = where + " " + v.subject;
      out.push_back(std::move(v));
    }
  }
  return out;
}

// First line of every corpus file.
inline constexpr std::string_view kCorpusHeader = "#FORMAT argtree-export 1";

// Corpus layout (tab-separated, LF line ends):
//
//   #FORMAT argtree-export 1
//   #BOS 1<TAB>%% optional comment
//   Selbst<TAB>ADV<TAB>MO<TAB>500         token: FORM POS EDGE PARENT
//   ...
//   #500<TAB>VP<TAB>OC<TAB>501            node: #ID CATEGORY EDGE PARENT
//   #501<TAB>S<TAB>--<TAB>0
//   #EOS 1
//
// Tokens appear in surface order, nodes ascending by id. Tagsets live in a
// sidecar file (see tagsets_path_for).
inline std::string serialize_corpus(const Corpus& corpus) {
  const auto violations = validate(corpus);
  if (has_errors(violations)) throw ValidationError("corpus does not validate", violations);

  std::string out(kCorpusHeader);
  out += '\n';
  for (const auto& s : corpus.sentences) {
    const SyntaxTree& t = s.tree;
    out += "#BOS " + std::to_string(s.id);
    if (t.comment) out += "\t%% " + *t.comment;
    out += '\n';
    auto edge_cols = [&](int child) {
      const Edge* e = parent_edge(t, child);
      return "\t" + e->label + "\t" + std::to_string(e->parent) + "\n";
    };
    for (const auto& tok : t.tokens) out += tok.form + "\t" + tok.pos + edge_cols(tok.position);
    std::vector<const PhraseNode*> nodes;
    for (const auto& n : t.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const auto* n : nodes) out += "#" + std::to_string(n->id) + "\t" + n->category + edge_cols(n->id);
    out += "#EOS " + std::to_string(s.id) + "\n";
  }
  return out;
}

inline Corpus parse_corpus(std::string_view text, const TagsetTriple& tagsets) {
  Corpus corpus;
  corpus.tagsets = tagsets;

  enum class State { Header, Between, Tokens, Nodes };
  State state = State::Header;
  Sentence current;
  std::size_t bos_line = 0;
  std::set<int> sentence_ids;
  std::set<int> node_ids;
  std::vector<std::pair<std::size_t, int>> parents;  // (line, parent id) for dangling checks

  auto parse_id = [](std::string_view s, std::size_t lineno, const char* what) {
    auto v = parse_nonnegative(s);
    if (!v) throw ParseError(lineno, std::string("invalid ") + what + " '" + std::string(s) + "'");
    return *v;
  };

  auto finish = [&](std::size_t lineno, int eos_id) {
    if (eos_id != current.id)
      throw ParseError(lineno, "#EOS " + std::to_string(eos_id) + " does not close #BOS " + std::to_string(current.id));
    if (current.tree.tokens.empty()) throw ParseError(bos_line, "empty sentence " + std::to_string(current.id));
    for (const auto& [line, parent] : parents)
      if (parent != kVirtualRoot && node_ids.count(parent) == 0)
        throw ParseError(line, "sentence " + std::to_string(current.id) + ": parent id " + std::to_string(parent) +
                                   " does not exist");
    auto violations = validate(current.tree, tagsets);
    if (has_errors(violations)) {
      std::string msg = "sentence " + std::to_string(current.id) + " does not validate";
      for (const auto& v : violations)
        if (v.is_error()) msg += "; " + v.subject + ": " + v.rule;
      throw ParseError(bos_line, msg);
    }
    corpus.sentences.push_back(std::move(current));
    current = Sentence{};
  };

  std::size_t lineno = 0;
  for_each_line(text, [&](std::string_view line) {
    ++lineno;
    if (state == State::Header) {
      if (line != kCorpusHeader) throw ParseError(lineno, "expected header '" + std::string(kCorpusHeader) + "'");
      state = State::Between;
      return;
    }
    if (state == State::Between) {
      if (line.empty()) return;
      if (line.substr(0, 5) != "#BOS ") throw ParseError(lineno, "expected '#BOS <id>'");
      const auto rest = line.substr(5);
      const auto tab = rest.find('\t');
      current.id = parse_id(rest.substr(0, tab), lineno, "sentence id");
      if (current.id < 1) throw ParseError(lineno, "sentence ids must be positive");
      if (!sentence_ids.insert(current.id).second)
        throw ParseError(lineno, "duplicate sentence id " + std::to_string(current.id));
      if (tab != std::string_view::npos) {
        const auto c = rest.substr(tab + 1);
        if (c.substr(0, 3) != "%% " || c.size() == 3) throw ParseError(lineno, "expected '#BOS <id><TAB>%% <comment>'");
        current.tree.comment = std::string(c.substr(3));
      }
      bos_line = lineno;
      node_ids.clear();
      parents.clear();
      state = State::Tokens;
      return;
    }

    if (line.substr(0, 5) == "#EOS ") {
      finish(lineno, parse_id(line.substr(5), lineno, "sentence id"));
      state = State::Between;
      return;
    }
    if (line.substr(0, 5) == "#BOS ") throw ParseError(lineno, "#BOS inside sentence " + std::to_string(current.id));

    const auto cols = split_tabs(line);
    const bool node_line = line.size() > 1 && line[0] == '#' && line[1] >= '0' && line[1] <= '9';
    if (node_line) {
      if (cols.size() != 4) throw ParseError(lineno, "expected #ID<TAB>CATEGORY<TAB>EDGE<TAB>PARENT");
      const int id = parse_id(cols[0].substr(1), lineno, "node id");
      if (!is_node_id(id)) throw ParseError(lineno, "node ids start at " + std::to_string(kFirstNodeId));
      if (!node_ids.insert(id).second)
        throw ParseError(lineno, "sentence " + std::to_string(current.id) + ": duplicate node id " + std::to_string(id));
      const int parent = parse_id(cols[3], lineno, "parent id");
      current.tree.nodes.push_back({id, std::string(cols[1])});
      current.tree.edges.push_back({id, parent, std::string(cols[2])});
      parents.emplace_back(lineno, parent);
      state = State::Nodes;
      return;
    }
    if (state == State::Nodes) throw ParseError(lineno, "token line after node lines");
    if (cols.size() != 4) throw ParseError(lineno, "expected FORM<TAB>POS<TAB>EDGE<TAB>PARENT");
    if (current.tree.tokens.size() >= static_cast<std::size_t>(kMaxTokens))
      throw ParseError(lineno, "more than " + std::to_string(kMaxTokens) + " tokens");
    const int position = static_cast<int>(current.tree.tokens.size()) + 1;
    const int parent = parse_id(cols[3], lineno, "parent id");
    current.tree.tokens.push_back({position, std::string(cols[0]), std::string(cols[1])});
    current.tree.edges.push_back({position, parent, std::string(cols[2])});
    parents.emplace_back(lineno, parent);
  });

  if (state == State::Header) throw ParseError(0, "missing header '" + std::string(kCorpusHeader) + "'");
  if (state != State::Between) throw ParseError(lineno, "unterminated sentence " + std::to_string(current.id));
  for (auto& s : corpus.sentences) normalize(s.tree);
  return corpus;
}

// The tagset sidecar for `corpus.export` is `corpus.tagsets`.
inline std::filesystem::path tagsets_path_for(const std::filesystem::path& corpus_path) {
  auto p = corpus_path;
  p.replace_extension(".tagsets");
  return p;
}

inline Corpus read_corpus(const std::filesystem::path& corpus_path) {
  const auto tagsets = parse_tagsets(read_file(tagsets_path_for(corpus_path)));
  return parse_corpus(read_file(corpus_path), tagsets);
}

inline void write_corpus(const std::filesystem::path& corpus_path, const Corpus& corpus) {
  const auto text = serialize_corpus(corpus);
  write_file_atomic(tagsets_path_for(corpus_path), serialize_tagsets(corpus.tagsets));
  write_file_atomic(corpus_path, text);
}

}  // namespace argtree

#endif  // ARGTREE_CORPUS_HPP
