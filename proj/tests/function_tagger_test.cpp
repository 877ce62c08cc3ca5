#include <gtest/gtest.h>

#include <random>

#include "argtree/function_tagger.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace {

using namespace argtree;
using Strings = std::vector<std::string>;

CategoryModel two_state_model() {
  ModelTrainer tr;
  tr.add_sequence("X", {"A", "B"}, {"x", "y"});
  tr.add_sequence("X", {"A", "A", "B"}, {"x", "y", "y"});
  tr.add_sequence("X", {"B"}, {"x"});
  return tr.build().at("X");
}

Strings functions_of(const FunctionPrediction& p) { return p.functions; }

// Products worked out with exact rationals.
TEST(Score, HandBuiltModel) {
  const auto m = two_state_model();
  EXPECT_NEAR(score(m, Strings{"A", "B"}, Strings{"x", "y"}) / (288512.0 / 2381643.0), 1.0, 1e-12);
  EXPECT_NEAR(score(m, Strings{"B", "A", "B"}, Strings{"y", "z", "x"}) / (5152.0 / 64304361.0), 1.0, 1e-12);
  EXPECT_NEAR(score(m, Strings{"A"}, Strings{"q"}) / (32.0 / 24057.0), 1.0, 1e-12);
}

TEST(Score, Errors) {
  const auto m = two_state_model();
  EXPECT_THROW(log_score(m, Strings{}, Strings{}), DomainError);
  EXPECT_THROW(log_score(m, Strings{"A"}, Strings{"x", "y"}), DomainError);
  EXPECT_EQ(score(m, Strings{"Z"}, Strings{"x"}), 0.0);
}

TEST(Score, UnseenDaughtersShareTheFallback) {
  const auto m = two_state_model();
  std::mt19937_64 rng(1);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t k = 1 + oracle::pick(rng, 4);
    Strings fs(k), a(k), b(k);
    for (std::size_t i = 0; i < k; ++i) {
      fs[i] = oracle::pick(rng, 2) ? "A" : "B";
      if (oracle::pick(rng, 2)) {
        a[i] = b[i] = oracle::pick(rng, 2) ? "x" : "y";
      } else {
        a[i] = "unseen" + std::to_string(oracle::pick(rng, 10));
        b[i] = "other" + std::to_string(oracle::pick(rng, 10));
      }
    }
    EXPECT_EQ(log_score(m, fs, a), log_score(m, fs, b));
  }
}

TEST(Decode, SentenceOfTheCrossingExample) {
  const auto models = train(fixtures::toy_corpus());
  const auto p = decode(models.at("S"), Strings{"VP", "VAFIN", "NE", "ADV"});
  EXPECT_EQ(p.functions, (Strings{"OC", "HD", "SB", "NG"}));
  EXPECT_EQ(p.positions.size(), 4u);
  EXPECT_EQ(p.category, "S");
}

TEST(Decode, VerbPhraseOfTheCrossingExample) {
  const auto models = train(fixtures::toy_corpus());
  EXPECT_EQ(functions_of(decode(models.at("VP"), Strings{"ADV", "VVPP", "NE"})), (Strings{"MO", "HD", "OA"}));
}

TEST(Decode, NounPhraseWithModifiers) {
  const auto models = train(fixtures::toy_corpus());
  EXPECT_EQ(functions_of(decode(models.at("NP"), Strings{"ART", "AP", "NN", "PP"})), (Strings{"NK", "NK", "NK", "MNR"}));
}

TEST(Decode, SingleFunctionInventoryIsReliable) {
  ModelTrainer tr;
  tr.add_sequence("X", {"F", "F"}, {"a", "b"});
  const auto m = tr.build().at("X");
  const auto p = decode(m, Strings{"b", "c", "a", "a", "b"});
  EXPECT_EQ(p.functions, Strings(5, "F"));
  for (const auto& pos : p.positions) {
    EXPECT_EQ(pos.grade.level, Reliability::Reliable);
    EXPECT_TRUE(std::isinf(pos.grade.ratio));
    EXPECT_FALSE(pos.second);
  }
}

TEST(Decode, Errors) {
  const auto m = two_state_model();
  EXPECT_THROW(decode(m, Strings{}), DomainError);
  EXPECT_THROW(decode(m, Strings{"x"}, Thresholds{0.5, 100}), DomainError);
  EXPECT_THROW(decode(m, Strings{"x"}, Thresholds{10, 5}), DomainError);
}

TEST(Decode, AlternativeReportedWithinBeam) {
  const auto m = two_state_model();
  const auto p = decode(m, Strings{"x", "y"}, Thresholds{5, 1e6});
  for (const auto& pos : p.positions) {
    ASSERT_TRUE(pos.second);
    EXPECT_NE(pos.second->function, pos.function);
    EXPECT_NEAR(std::exp(p.log_probability - pos.second->log_probability), pos.grade.ratio, 1e-9 * pos.grade.ratio);
  }
}

TEST(Grade, Rules) {
  const Thresholds t;
  EXPECT_EQ(grade(std::log(1.0), std::log(0.5), t).level, Reliability::Unreliable);
  EXPECT_EQ(grade(std::log(1.0), std::log(0.1), t).level, Reliability::Marked);
  EXPECT_EQ(grade(std::log(1.0), std::log(0.2), t).level, Reliability::Marked);  // ratio 5 exactly
  EXPECT_EQ(grade(std::log(1.0), std::log(0.001), t).level, Reliability::Reliable);
  EXPECT_TRUE(std::isinf(grade(std::log(1.0), std::log(0.001), t).ratio));
  EXPECT_EQ(grade(kLogZero, kLogZero, t).level, Reliability::Unreliable);
  EXPECT_EQ(classify(5.0, t), Reliability::Marked);
  EXPECT_EQ(classify(100.0, t), Reliability::Reliable);
  EXPECT_EQ(classify(4.999, t), Reliability::Unreliable);
}

TEST(Decode, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(17);
  const Thresholds t;
  for (int iter = 0; iter < 300; ++iter) {
    const auto models = oracle::random_models(rng, 1, 5);
    const auto& m = models.begin()->second;
    const auto ds = oracle::random_daughters(rng, 6);
    const auto r = oracle::check_decode(m, ds, t);
    ASSERT_TRUE(r.ok) << r.why << " at iteration " << iter;
  }
}

TEST(Decode, RaisingTheBeamNeverPromotesToReliable) {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    const auto models = oracle::random_models(rng, 1, 4);
    const auto& m = models.begin()->second;
    const auto ds = oracle::random_daughters(rng, 5);
    const auto lo = decode(m, ds, Thresholds{5, 20});
    const auto hi = decode(m, ds, Thresholds{5, 2000});
    ASSERT_EQ(lo.functions, hi.functions);
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (lo.positions[i].grade.level != Reliability::Reliable) {
        EXPECT_NE(hi.positions[i].grade.level, Reliability::Reliable);
      }
  }
}

// Adding the same constant to every emission log-probability at one position
// leaves the argmax unchanged.
struct ScaledEmission {
  const CategoryModel* m;
  std::size_t position_marker;  // daughter label whose emissions are scaled
  double log_factor;

  std::size_t state_count() const { return m->state_count(); }
  double log_transition(std::size_t a, std::size_t b, std::size_t c) const { return m->log_transition(a, b, c); }
  double log_emission(std::size_t s, std::string_view d) const {
    const double base = m->log_emission(s, d);
    return d == "D" + std::to_string(position_marker) ? base + log_factor : base;
  }
};

TEST(Viterbi, EmissionScalingInvariance) {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 200; ++iter) {
    const auto models = oracle::random_models(rng, 1, 5);
    const auto& m = models.begin()->second;
    const auto ds = oracle::random_daughters(rng, 6);
    const auto base = viterbi_max_marginals(m, ds);
    const ScaledEmission scaled{&m, oracle::pick(rng, 5), std::log(0.001 + 10.0 * std::uniform_real_distribution<double>()(rng))};
    const auto other = viterbi_max_marginals(scaled, ds);
    // Ties may resolve either way after rounding; compare scores of the paths.
    Strings fs;
    for (auto s : other.best_path) fs.push_back(m.functions()[s]);
    EXPECT_TRUE(oracle::close(log_score(m, fs, ds), base.best_log_prob)) << iter;
  }
}

}  // namespace
