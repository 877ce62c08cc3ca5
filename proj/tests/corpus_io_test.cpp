#include <gtest/gtest.h>

#include <random>

#include "argtree/corpus.hpp"
#include "argtree/model_archive.hpp"
#include "argtree/tagset_format.hpp"
#include "fixtures.hpp"

namespace {

using namespace argtree;

const char* const kCrossingBlock =
    "#FORMAT argtree-export 1\n"
    "#BOS 1\n"
    "Selbst\tADV\tMO\t500\n"
    "besucht\tVVPP\tHD\t500\n"
    "hat\tVAFIN\tHD\t501\n"
    "Peter\tNE\tSB\t501\n"
    "Sabine\tNE\tOA\t500\n"
    "nie\tADV\tNG\t501\n"
    "#500\tVP\tOC\t501\n"
    "#501\tS\t--\t0\n"
    "#EOS 1\n";

std::size_t error_line(const std::string& text, const TagsetTriple& ts) {
  try {
    parse_corpus(text, ts);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected a parse error";
  return 0;
}

std::string error_message(const std::string& text, const TagsetTriple& ts) {
  try {
    parse_corpus(text, ts);
  } catch (const ParseError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected a parse error";
  return {};
}

TEST(ParseCorpus, OneSentenceWithCrossingBranches) {
  const auto c = parse_corpus(kCrossingBlock, fixtures::toy_tagsets());
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0].id, 1);
  EXPECT_EQ(c.sentences[0].tree.tokens.size(), 6u);
  EXPECT_EQ(c.sentences[0].tree.nodes.size(), 2u);
  EXPECT_EQ(c.sentences[0].tree, fixtures::crossing_vp_tree());
}

TEST(SerializeCorpus, CanonicalBlockOfTheCrossingExample) {
  Corpus c;
  c.tagsets = fixtures::toy_tagsets();
  c.sentences.push_back({1, fixtures::crossing_vp_tree()});
  EXPECT_EQ(serialize_corpus(c), kCrossingBlock);
}

TEST(ParseCorpus, EmptySentence) {
  const auto msg = error_message("#FORMAT argtree-export 1\n#BOS 4\n#EOS 4\n", fixtures::toy_tagsets());
  EXPECT_NE(msg.find("empty sentence"), std::string::npos) << msg;
}

TEST(ParseCorpus, MalformedLineCarriesLineNumberAndLayout) {
  const std::string text = "#FORMAT argtree-export 1\n#BOS 1\nSelbst\tADV\tMO\n#EOS 1\n";
  EXPECT_EQ(error_line(text, fixtures::toy_tagsets()), 3u);
  EXPECT_NE(error_message(text, fixtures::toy_tagsets()).find("FORM<TAB>POS<TAB>EDGE<TAB>PARENT"), std::string::npos);
}

TEST(ParseCorpus, DanglingParentNamesSentenceAndId) {
  std::string text = kCrossingBlock;
  text.replace(text.find("NG\t501"), 6, "NG\t509");
  const auto msg = error_message(text, fixtures::toy_tagsets());
  EXPECT_NE(msg.find("sentence 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("509"), std::string::npos) << msg;
}

TEST(ParseCorpus, DuplicateNodeId) {
  std::string text = kCrossingBlock;
  text.replace(text.find("#501\tS"), 4, "#500");
  const auto msg = error_message(text, fixtures::toy_tagsets());
  EXPECT_NE(msg.find("duplicate node id 500"), std::string::npos) << msg;
}

TEST(ParseCorpus, OtherStructuralErrors) {
  const auto ts = fixtures::toy_tagsets();
  EXPECT_THROW(parse_corpus("", ts), ParseError);
  EXPECT_THROW(parse_corpus("#BOS 1\n", ts), ParseError);
  EXPECT_THROW(parse_corpus("#FORMAT argtree-export 1\n#BOS 1\nx\tADV\t--\t0\n", ts), ParseError);  // no #EOS
  EXPECT_THROW(parse_corpus("#FORMAT argtree-export 1\n#BOS 1\nx\tADV\t--\t0\n#EOS 2\n", ts), ParseError);
  EXPECT_THROW(parse_corpus("#FORMAT argtree-export 1\n#BOS 1\nx\tBAD\t--\t0\n#EOS 1\n", ts), ParseError);
  EXPECT_THROW(parse_corpus("#FORMAT argtree-export 1\n#BOS 1\nx\tADV\t--\t0\n#EOS 1\n#BOS 1\ny\tADV\t--\t0\n#EOS 1\n", ts),
               ParseError);
}

TEST(SerializeCorpus, EmptyCorpusIsHeaderOnly) {
  Corpus c;
  c.tagsets = fixtures::toy_tagsets();
  EXPECT_EQ(serialize_corpus(c), "#FORMAT argtree-export 1\n");
  EXPECT_EQ(parse_corpus(serialize_corpus(c), c.tagsets), c);
}

TEST(SerializeCorpus, InvalidCorpusIsRejected) {
  Corpus c;
  c.tagsets = fixtures::toy_tagsets();
  auto t = fixtures::crossing_vp_tree();
  t.edges[0].label = "NOPE";
  c.sentences.push_back({1, t});
  EXPECT_THROW(serialize_corpus(c), ValidationError);
}

TEST(SerializeCorpus, SeedTreebankIsCanonical) {
  const auto text = read_file(fixtures::data_path("toy.export"));
  const auto c = parse_corpus(text, fixtures::toy_tagsets());
  EXPECT_EQ(c.sentences.size(), 12u);
  EXPECT_EQ(c.sentences[0].tree.comment, "Peter never visited Sabine himself");
  EXPECT_EQ(serialize_corpus(c), text);
}

TEST(SerializeCorpus, RandomCorporaRoundTripBitExact) {
  const auto ts = fixtures::toy_tagsets();
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 100; ++iter) {
    Corpus c;
    c.tagsets = ts;
    const std::size_t n = fixtures::pick(rng, 6);
    int id = 0;
    for (std::size_t i = 0; i < n; ++i) {
      id += 1 + static_cast<int>(fixtures::pick(rng, 3));
      c.sentences.push_back({id, fixtures::random_tree(rng, ts, 10, true)});
    }
    const auto text = serialize_corpus(c);
    const auto back = parse_corpus(text, ts);
    ASSERT_EQ(back, c);
    ASSERT_EQ(serialize_corpus(back), text);
  }
}

// Arbitrary bytes and mutated canonical files may fail, but only with a
// structured library error.
TEST(ParseCorpus, FuzzedInputNeverCrashes) {
  const auto ts = fixtures::toy_tagsets();
  const std::string seed = read_file(fixtures::data_path("toy.export"));
  std::mt19937_64 rng(2024);
  const std::string alphabet = "#BOSE \t\n0123456789-%AVNPSHD";
  int parsed = 0;
  for (int iter = 0; iter < 3000; ++iter) {
    std::string text;
    if (iter % 3 == 0) {
      const std::size_t len = fixtures::pick(rng, 200);
      for (std::size_t i = 0; i < len; ++i) text += static_cast<char>(fixtures::pick(rng, 256));
    } else {
      text = seed;
      const std::size_t edits = 1 + fixtures::pick(rng, 4);
      for (std::size_t e = 0; e < edits; ++e) {
        const std::size_t at = fixtures::pick(rng, text.size());
        switch (fixtures::pick(rng, 3)) {
          case 0: text[at] = alphabet[fixtures::pick(rng, alphabet.size())]; break;
          case 1: text.erase(at, 1 + fixtures::pick(rng, 8)); break;
          default: text.insert(at, 1, alphabet[fixtures::pick(rng, alphabet.size())]); break;
        }
      }
    }
    try {
      parse_corpus(text, ts);
      ++parsed;
    } catch (const Error&) {
    }
  }
  SUCCEED() << parsed << " mutated inputs still parsed";
}

TEST(Tagsets, AppendixListsParse) {
  const auto ts = fixtures::toy_tagsets();
  EXPECT_TRUE(ts.word_tags.contains("ADV"));
  EXPECT_EQ(ts.word_tags.entries()[2], (TagEntry{"ADV", "adverb"}));
  EXPECT_TRUE(ts.phrase_categories.contains("NP"));
  EXPECT_TRUE(ts.edge_labels.contains("SB"));
  EXPECT_EQ(serialize_tagsets(ts), read_file(fixtures::data_path("toy.tagsets")));
}

TEST(Tagsets, Errors) {
  EXPECT_THROW(parse_tagsets("%% words\nADV\tadverb\nADV\tagain\n%% phrases\nNP\n%% edges\nSB\n"), ParseError);
  EXPECT_THROW(parse_tagsets("%% words\n%% phrases\nNP\n%% edges\nSB\n"), ParseError);
  EXPECT_THROW(parse_tagsets("%% words\nADV\n%% phrases\nNP\n"), ParseError);
  EXPECT_THROW(parse_tagsets("ADV\n%% words\nADV\n%% phrases\nNP\n%% edges\nSB\n"), ParseError);
  EXPECT_THROW(parse_tagsets("%% words\nADV\n%% phrases\nNP\n%% edges\nSB\n%% misc\nX\n"), ParseError);
  EXPECT_THROW(parse_tagsets("%% words\nADV\n%% phrases\nNP\n%% edges\n--\n"), ParseError);
}

TEST(Tagsets, RandomRoundTrip) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 100; ++iter) {
    TagsetTriple ts;
    for (Tagset* t : {&ts.word_tags, &ts.phrase_categories, &ts.edge_labels}) {
      const std::size_t n = 1 + fixtures::pick(rng, 8);
      for (std::size_t i = 0; i < n; ++i) {
        std::string desc;
        if (fixtures::pick(rng, 2)) desc = "description " + std::to_string(fixtures::pick(rng, 100));
        t->add("L" + std::to_string(iter) + "_" + std::to_string(i), desc);
      }
    }
    const auto text = serialize_tagsets(ts);
    ASSERT_EQ(parse_tagsets(text), ts);
    ASSERT_EQ(serialize_tagsets(parse_tagsets(text)), text);
  }
}

TEST(ModelArchive, TrainedModelRoundTripsExactly) {
  const auto archive = train_archive(fixtures::toy_corpus(), "2026-10-16");
  const auto text = save_model(archive);
  const auto back = load_model(text);
  EXPECT_EQ(back, archive);
  EXPECT_EQ(save_model(back), text);
}

TEST(ModelArchive, TruncatedFileIsAnError) {
  const auto text = save_model(train_archive(fixtures::toy_corpus(), "x"));
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, text.size() / 2, text.size() - 3})
    EXPECT_THROW(load_model(text.substr(0, cut)), Error);
}

TEST(ModelArchive, UnknownCategoryIsAnError) {
  auto text = save_model(train_archive(fixtures::toy_corpus(), "x"));
  const auto at = text.find("\"VP\": {");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 4, "\"QQ\"");
  EXPECT_THROW(load_model(text), ModelError);
}

TEST(ModelArchive, VersionMismatchIsReported) {
  auto text = save_model(train_archive(fixtures::toy_corpus(), "x"));
  text.replace(text.find("\"version\": 1"), 12, "\"version\": 7");
  EXPECT_THROW(load_model(text), UnsupportedVersion);
}

TEST(ModelArchive, TamperedProbabilitiesAreDetected) {
  const auto archive = train_archive(fixtures::toy_corpus(), "x");
  auto j = nlohmann::ordered_json::parse(save_model(archive));
  j["models"]["S"]["probabilities"]["emission"][0][0] = 0.5;
  EXPECT_THROW(load_model(j.dump()), ModelError);
  j = nlohmann::ordered_json::parse(save_model(archive));
  j["models"]["S"]["lambdas"][0] = 0.0;
  EXPECT_THROW(load_model(j.dump()), ModelError);
  j = nlohmann::ordered_json::parse(save_model(archive));
  j["models"]["S"]["counts"]["unigram"][0][1] = 999;
  EXPECT_THROW(load_model(j.dump()), ModelError);
}

}  // namespace
