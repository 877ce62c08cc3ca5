#include <gtest/gtest.h>

#include <random>

#include "argtree/function_tagger.hpp"
#include "fixtures.hpp"

namespace {

using namespace argtree;

using Seq = std::vector<std::pair<std::string, std::string>>;  // (function, daughter)

ModelSet train_sequences(const std::string& category, const std::vector<Seq>& seqs, double eps = 0.1) {
  ModelTrainer tr(eps);
  for (const auto& s : seqs) {
    std::vector<std::string> fs, ds;
    for (const auto& [f, d] : s) {
      fs.push_back(f);
      ds.push_back(d);
    }
    tr.add_sequence(category, fs, ds);
  }
  return tr.build();
}

ModelSet train_functions(const std::vector<std::string>& seqs) {
  std::vector<Seq> out;
  for (const auto& s : seqs) {
    Seq q;
    for (char c : s) q.push_back({std::string(1, c), "T"});
    out.push_back(q);
  }
  return train_sequences("X", out);
}

void expect_normalized(const CategoryModel& m) {
  EXPECT_NEAR(m.lambdas().sum(), 1.0, 1e-9);
  EXPECT_GE(m.lambdas().unigram, 0.0);
  EXPECT_GE(m.lambdas().bigram, 0.0);
  EXPECT_GE(m.lambdas().trigram, 0.0);
  const std::size_t b = m.boundary();
  for (std::size_t x = 0; x <= b; ++x)
    for (std::size_t y = 0; y <= b; ++y) {
      double sum = 0;
      for (std::size_t z = 0; z <= b; ++z) sum += m.transition_probability(x, y, z);
      EXPECT_NEAR(sum, 1.0, 1e-9) << m.category() << " context " << x << "," << y;
    }
  for (std::size_t f = 0; f < m.state_count(); ++f) {
    double sum = 0;
    for (std::size_t d = 0; d <= m.daughters().size(); ++d) sum += m.emission_probability(f, d);
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Train, HundredCopiesOfTheCrossingExample) {
  Corpus c;
  c.tagsets = fixtures::toy_tagsets();
  for (int i = 1; i <= 100; ++i) c.sentences.push_back({i, fixtures::crossing_vp_tree()});
  const auto models = train(c);
  ASSERT_EQ(models.size(), 2u);
  const auto& s = models.at("S");
  EXPECT_EQ(s.counts().trigram(s.symbol_index("OC"), s.symbol_index("HD"), s.symbol_index("SB")), 100);
  EXPECT_EQ(s.emission_count(s.function_index("SB"), s.daughter_index("NE")), 100);
  EXPECT_EQ(s.counts().trigram(s.boundary(), s.boundary(), s.symbol_index("OC")), 100);
  EXPECT_EQ(s.counts().trigram(s.symbol_index("SB"), s.symbol_index("NG"), s.boundary()), 100);
  EXPECT_EQ(s.counts().total(), 500);
  const auto& vp = models.at("VP");
  EXPECT_EQ(vp.functions(), (std::vector<std::string>{"HD", "MO", "OA"}));
  EXPECT_EQ(vp.daughters(), (std::vector<std::string>{"ADV", "NE", "VVPP"}));
}

TEST(Train, NothingToTrainOn) {
  Corpus c;
  c.tagsets = fixtures::toy_tagsets();
  c.sentences.push_back({1, flat_tree({{"a", "ADV"}})});
  try {
    train(c);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_STREQ(e.what(), "nothing to train on");
  }
}

TEST(Train, SingleSentenceIsNormalized) {
  Corpus c;
  c.tagsets = fixtures::toy_tagsets();
  c.sentences.push_back({1, fixtures::crossing_vp_tree()});
  for (const auto& [q, m] : train(c)) expect_normalized(m);
}

TEST(Train, Deterministic) {
  const auto a = train(fixtures::toy_corpus());
  const auto b = train(fixtures::toy_corpus());
  EXPECT_EQ(a, b);
}

TEST(DeletedInterpolation, SingleCountsGiveAllWeightToUnigrams) {
  const auto m = train_functions({"ABBA"}).at("X");
  EXPECT_EQ(m.lambdas(), (Lambdas{1.0, 0.0, 0.0}));
}

// Each trigram occurs twice and always has the same continuation given two
// predecessors, while single predecessors are ambiguous.
TEST(DeletedInterpolation, DeterministicContinuationFavoursTrigrams) {
  const auto m = train_functions({"ABBA", "ABBA"}).at("X");
  EXPECT_DOUBLE_EQ(m.lambdas().unigram, 0.0);
  EXPECT_DOUBLE_EQ(m.lambdas().bigram, 0.2);
  EXPECT_DOUBLE_EQ(m.lambdas().trigram, 0.8);
}

// Counts scale linearly under duplication but the deleted ratios do not, so
// the weights can change. The two cases above are the same corpus at
// multiplicity 1 and 2.
TEST(DeletedInterpolation, DuplicatingTheCorpusCanMoveTheWeights) {
  const auto once = train_functions({"ABBA"}).at("X").lambdas();
  const auto twice = train_functions({"ABBA", "ABBA"}).at("X").lambdas();
  EXPECT_NE(once, twice);
}

TEST(DeletedInterpolation, AllMassOnOneFunction) {
  const auto m = train_functions({"A", "AA", "AAA", "A"}).at("X");
  expect_normalized(m);
}

TEST(DeletedInterpolation, EmptyCountsAreAnError) { EXPECT_THROW(deleted_interpolation(NgramCounts(3)), ModelError); }

// Reference values from an exact rational re-implementation.
TEST(CategoryModel, HandBuiltTwoStateModel) {
  const auto m = train_sequences("X", {{{"A", "x"}, {"B", "y"}}, {{"A", "x"}, {"A", "y"}, {"B", "y"}}, {{"B", "x"}}}).at("X");
  EXPECT_NEAR(m.lambdas().unigram, 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(m.lambdas().bigram, 7.0 / 9.0, 1e-15);
  EXPECT_EQ(m.lambdas().trigram, 0.0);
  const std::size_t b = m.boundary(), a = m.function_index("A"), bb = m.function_index("B");
  EXPECT_NEAR(m.transition_probability(b, b, a), 0.5925925925925926, 1e-15);
  EXPECT_NEAR(m.transition_probability(a, bb, b), 0.8518518518518519, 1e-15);
  EXPECT_NEAR(m.emission_probability(a, m.daughter_index("x")), 0.6363636363636364, 1e-15);
  EXPECT_NEAR(m.emission_probability(bb, m.daughter_index("zz")), 0.030303030303030304, 1e-15);
  expect_normalized(m);
}

TEST(CategoryModel, ConstructorRejectsBadInput) {
  const std::map<std::array<std::string, 3>, std::int64_t> tri{{{"$", "$", "A"}, 1}, {{"$", "A", "$"}, 1}};
  const std::map<std::pair<std::string, std::string>, std::int64_t> em{{{"A", "x"}, 1}};
  EXPECT_NO_THROW(CategoryModel("X", {"A"}, {"x"}, tri, em));
  EXPECT_THROW(CategoryModel("X", {}, {"x"}, tri, em), ModelError);
  EXPECT_THROW(CategoryModel("X", {"B", "A"}, {"x"}, tri, em), ModelError);
  EXPECT_THROW(CategoryModel("X", {"A"}, {"x"}, tri, em, 0.0), ModelError);
  EXPECT_THROW(CategoryModel("X", {"A"}, {"x"}, {{{"$", "$", "Z"}, 1}}, em), ModelError);
  EXPECT_THROW(CategoryModel("X", {"A"}, {"x"}, tri, {{{"A", "q"}, 1}}), ModelError);
  EXPECT_THROW(CategoryModel("X", {"A"}, {"x"}, {}, em), ModelError);
}

TEST(CategoryModel, NormalizedOnRandomCorpora) {
  const auto ts = fixtures::toy_tagsets();
  std::mt19937_64 rng(99);
  int trained = 0;
  for (int iter = 0; iter < 100; ++iter) {
    Corpus c;
    c.tagsets = ts;
    const std::size_t n = 1 + fixtures::pick(rng, 8);
    for (std::size_t i = 0; i < n; ++i) c.sentences.push_back({static_cast<int>(i + 1), fixtures::random_tree(rng, ts, 9, true)});
    ModelSet models;
    try {
      models = train(c);
    } catch (const ModelError&) {
      continue;  // no phrase nodes drawn
    }
    ++trained;
    for (const auto& [q, m] : models) expect_normalized(m);
  }
  EXPECT_GT(trained, 90);
}

TEST(CategoryModel, SeedTreebankIsNormalized) {
  for (const auto& [q, m] : train(fixtures::toy_corpus())) expect_normalized(m);
}

}  // namespace
