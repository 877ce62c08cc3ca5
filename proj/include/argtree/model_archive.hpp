#ifndef ARGTREE_MODEL_ARCHIVE_HPP
#define ARGTREE_MODEL_ARCHIVE_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "argtree/corpus.hpp"
#include "argtree/error.hpp"
#include "argtree/function_tagger.hpp"
#include "argtree/text.hpp"

namespace argtree {

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::string_view kModelFormatName = "argtree-model";

struct TrainingMetadata {
  std::string corpus_hash;  // fnv1a of the canonical corpus text
  std::string trained_at;   // caller supplied, e.g. an ISO date
  std::size_t sentences = 0;

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

struct ModelArchive {
  int version = kModelFormatVersion;
  ModelSet models;
  TagsetTriple tagsets;
  TrainingMetadata metadata;

  friend bool operator==(const ModelArchive&, const ModelArchive&) = default;
};

inline ModelArchive train_archive(const Corpus& corpus, std::string trained_at = {},
                                  double emission_smoothing = kDefaultEmissionSmoothing) {
  ModelArchive a;
  a.models = train(corpus, emission_smoothing);
  a.tagsets = corpus.tagsets;
  a.metadata = {fnv1a_hex(serialize_corpus(corpus)), std::move(trained_at), corpus.sentences.size()};
  return a;
}

namespace detail {

using nlohmann::ordered_json;

inline ordered_json tagset_json(const Tagset& t) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : t.entries()) arr.push_back({e.label, e.description});
  return arr;
}

inline ordered_json model_json(const CategoryModel& m) {
  const auto& fs = m.functions();
  const auto& ds = m.daughters();
  const std::size_t b = m.boundary();
  auto symbol = [&](std::size_t i) { return i == b ? std::string(kBoundary) : fs[i]; };
  const NgramCounts& c = m.counts();

  ordered_json j;
  j["functions"] = fs;
  j["daughters"] = ds;
  j["emission_smoothing"] = m.emission_smoothing();
  j["lambdas"] = {m.lambdas().unigram, m.lambdas().bigram, m.lambdas().trigram};

  ordered_json counts;
  counts["events"] = c.total();
  ordered_json uni = ordered_json::array(), bi = ordered_json::array(), tri = ordered_json::array();
  for (std::size_t x = 0; x <= b; ++x) {
    if (c.unigram(x)) uni.push_back({symbol(x), c.unigram(x)});
    for (std::size_t y = 0; y <= b; ++y) {
      if (c.bigram(x, y)) bi.push_back({symbol(x), symbol(y), c.bigram(x, y)});
      for (std::size_t z = 0; z <= b; ++z)
        if (c.trigram(x, y, z)) tri.push_back({symbol(x), symbol(y), symbol(z), c.trigram(x, y, z)});
    }
  }
  counts["unigram"] = std::move(uni);
  counts["bigram"] = std::move(bi);
  counts["trigram"] = std::move(tri);
  ordered_json em = ordered_json::array();
  for (std::size_t f = 0; f < fs.size(); ++f)
    for (std::size_t d = 0; d < ds.size(); ++d)
      if (m.emission_count(f, d)) em.push_back({fs[f], ds[d], m.emission_count(f, d)});
  counts["emission"] = std::move(em);
  j["counts"] = std::move(counts);

  // Derived tables: transition[a][b][c] over functions followed by "$",
  // emission[f][d] over daughters followed by the unknown slot.
  ordered_json trans = ordered_json::array();
  for (std::size_t x = 0; x <= b; ++x) {
    ordered_json plane = ordered_json::array();
    for (std::size_t y = 0; y <= b; ++y) {
      ordered_json row = ordered_json::array();
      for (std::size_t z = 0; z <= b; ++z) row.push_back(m.transition_probability(x, y, z));
      plane.push_back(std::move(row));
    }
    trans.push_back(std::move(plane));
  }
  ordered_json emit = ordered_json::array();
  for (std::size_t f = 0; f < fs.size(); ++f) {
    ordered_json row = ordered_json::array();
    for (std::size_t d = 0; d <= ds.size(); ++d) row.push_back(m.emission_probability(f, d));
    emit.push_back(std::move(row));
  }
  j["probabilities"] = {{"transition", std::move(trans)}, {"emission", std::move(emit)}};
  return j;
}

inline bool close(double stored, double computed) {
  if (stored == computed) return true;
  return std::fabs(stored - computed) <= 1e-12 * std::max(std::fabs(stored), std::fabs(computed));
}

inline CategoryModel model_from_json(const std::string& category, const ordered_json& j) {
  const auto functions = j.at("functions").get<std::vector<std::string>>();
  const auto daughters = j.at("daughters").get<std::vector<std::string>>();
  const double epsilon = j.at("emission_smoothing").get<double>();
  const auto& counts = j.at("counts");

  std::map<std::array<std::string, 3>, std::int64_t> tri;
  for (const auto& e : counts.at("trigram")) {
    if (!e.is_array() || e.size() != 4) throw ModelError("malformed trigram entry");
    tri[{e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<std::string>()}] += e[3].get<std::int64_t>();
  }
  std::map<std::pair<std::string, std::string>, std::int64_t> em;
  for (const auto& e : counts.at("emission")) {
    if (!e.is_array() || e.size() != 3) throw ModelError("malformed emission entry");
    em[{e[0].get<std::string>(), e[1].get<std::string>()}] += e[2].get<std::int64_t>();
  }
  CategoryModel m(category, functions, daughters, tri, em, epsilon);

  // Cross-check everything stored against what the counts imply.
  const std::string where = "model '" + category + "': ";
  const std::size_t b = m.boundary();
  auto sym = [&](const ordered_json& v) { return m.symbol_index(v.get<std::string>()); };
  if (counts.at("events").get<std::int64_t>() != m.counts().total()) throw ModelError(where + "event count mismatch");
  std::int64_t n = 0;
  for (const auto& e : counts.at("unigram")) {
    if (m.counts().unigram(sym(e.at(0))) != e.at(1).get<std::int64_t>()) throw ModelError(where + "unigram count mismatch");
    ++n;
  }
  for (const auto& e : counts.at("bigram")) {
    if (m.counts().bigram(sym(e.at(0)), sym(e.at(1))) != e.at(2).get<std::int64_t>())
      throw ModelError(where + "bigram count mismatch");
    ++n;
  }
  std::int64_t expected = 0;
  for (std::size_t x = 0; x <= b; ++x) {
    expected += m.counts().unigram(x) != 0;
    for (std::size_t y = 0; y <= b; ++y) expected += m.counts().bigram(x, y) != 0;
  }
  if (n != expected) throw ModelError(where + "unigram/bigram tables are incomplete");

  const auto lambdas = j.at("lambdas").get<std::vector<double>>();
  if (lambdas.size() != 3 || !close(lambdas[0], m.lambdas().unigram) || !close(lambdas[1], m.lambdas().bigram) ||
      !close(lambdas[2], m.lambdas().trigram))
    throw ModelError(where + "interpolation weights do not match the counts");

  const auto& trans = j.at("probabilities").at("transition");
  if (trans.size() != b + 1) throw ModelError(where + "transition table has the wrong shape");
  for (std::size_t x = 0; x <= b; ++x) {
    if (trans[x].size() != b + 1) throw ModelError(where + "transition table has the wrong shape");
    for (std::size_t y = 0; y <= b; ++y) {
      if (trans[x][y].size() != b + 1) throw ModelError(where + "transition table has the wrong shape");
      for (std::size_t z = 0; z <= b; ++z)
        if (!close(trans[x][y][z].get<double>(), m.transition_probability(x, y, z)))
          throw ModelError(where + "transition probabilities do not match the counts");
    }
  }
  const auto& emit = j.at("probabilities").at("emission");
  if (emit.size() != functions.size()) throw ModelError(where + "emission table has the wrong shape");
  for (std::size_t f = 0; f < functions.size(); ++f) {
    if (emit[f].size() != daughters.size() + 1) throw ModelError(where + "emission table has the wrong shape");
    for (std::size_t d = 0; d <= daughters.size(); ++d)
      if (!close(emit[f][d].get<double>(), m.emission_probability(f, d)))
        throw ModelError(where + "emission probabilities do not match the counts");
  }
  return m;
}

}  // namespace detail

inline std::string save_model(const ModelArchive& archive) {
  using detail::ordered_json;
  ordered_json j;
  j["format"] = kModelFormatName;
  j["version"] = archive.version;
  j["metadata"] = {{"corpus_hash", archive.metadata.corpus_hash},
                   {"trained_at", archive.metadata.trained_at},
                   {"sentences", archive.metadata.sentences}};
  j["tagsets"] = {{"words", detail::tagset_json(archive.tagsets.word_tags)},
                  {"phrases", detail::tagset_json(archive.tagsets.phrase_categories)},
                  {"edges", detail::tagset_json(archive.tagsets.edge_labels)}};
  ordered_json models = ordered_json::object();
  for (const auto& [category, model] : archive.models) models[category] = detail::model_json(model);
  j["models"] = std::move(models);
  return j.dump(1) + "\n";
}

inline ModelArchive load_model(std::string_view text) {
  using detail::ordered_json;
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ModelError(std::string("model archive is not well-formed: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kModelFormatName)
      throw ModelError("not a model archive");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw UnsupportedVersion("unsupported model archive version " + std::to_string(version) + " (expected " +
                               std::to_string(kModelFormatVersion) + ")");
    ModelArchive a;
    a.version = version;
    const auto& meta = j.at("metadata");
    a.metadata = {meta.at("corpus_hash").get<std::string>(), meta.at("trained_at").get<std::string>(),
                  meta.at("sentences").get<std::size_t>()};
    auto tagset = [&](const char* name) {
      Tagset t;
      for (const auto& e : j.at("tagsets").at(name)) t.add(e.at(0).get<std::string>(), e.at(1).get<std::string>());
      return t;
    };
    a.tagsets = {tagset("words"), tagset("phrases"), tagset("edges")};
    for (const auto& [category, mj] : j.at("models").items()) {
      if (!a.tagsets.phrase_categories.contains(category))
        throw ModelError("model for category '" + category + "' which is not in the phrase tagset");
      auto model = detail::model_from_json(category, mj);
      for (const auto& f : model.functions())
        if (!a.tagsets.edge_labels.contains(f))
          throw ModelError("model '" + category + "' uses function '" + f + "' which is not in the edge tagset");
      for (const auto& d : model.daughters())
        if (!a.tagsets.word_tags.contains(d) && !a.tagsets.phrase_categories.contains(d))
          throw ModelError("model '" + category + "' uses daughter '" + d + "' which is in no tagset");
      a.models.emplace(category, std::move(model));
    }
    return a;
  } catch (const ordered_json::exception& e) {
    throw ModelError(std::string("malformed model archive: ") + e.what());
  } catch (const DomainError& e) {
    throw ModelError(std::string("malformed model archive: ") + e.what());
  }
}

inline void save_model_file(const std::filesystem::path& path, const ModelArchive& archive) {
  write_file_atomic(path, save_model(archive));
}

inline ModelArchive load_model_file(const std::filesystem::path& path) { return load_model(read_file(path)); }

}  // namespace argtree

#endif  // ARGTREE_MODEL_ARCHIVE_HPP
