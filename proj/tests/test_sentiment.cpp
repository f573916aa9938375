#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmfcomm/random.hpp"
#include "mmfcomm/sentiment.hpp"
#include "mmfcomm/sentiment_io.hpp"

using namespace mmfcomm;
using namespace mmfcomm::sentiment;

namespace {

const SyntheticCorpus& fixture() {
  static const SyntheticCorpus c = synth_corpus({});
  return c;
}

// token 0 points one way, token 1 the other; label = majority token
struct Separable {
  EmbeddingTable table{{"good", "bad"}, 2, {1.0, 0.2, -1.0, 0.1}};
  LabeledCorpus corpus{{{{0, 0, 1}, 1}, {{0}, 1}, {{1, 1, 0}, 0}, {{1}, 0}, {{0, 0}, 1}, {{1, 1}, 0}}, 2};
};

double norm(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST(SynthCorpus, Deterministic) {
  const auto a = synth_corpus({});
  EXPECT_EQ(a.table, fixture().table);
  EXPECT_EQ(a.train, fixture().train);
  EXPECT_EQ(a.test, fixture().test);
  CorpusConfig other;
  other.seed = 8;
  EXPECT_NE(synth_corpus(other).train, fixture().train);
}

TEST(SynthCorpus, ShapeAndValidity) {
  const auto& c = fixture();
  EXPECT_EQ(c.table.size(), 512u);
  EXPECT_EQ(c.table.dim(), 16u);
  EXPECT_EQ(c.train.samples.size(), 2000u);
  EXPECT_EQ(c.test.samples.size(), 500u);
  EXPECT_NO_THROW(c.train.validate());
  EXPECT_NO_THROW(c.test.validate());
  for (const auto& s : c.train.samples) EXPECT_EQ(s.tokens.size(), 20u);
  EXPECT_NEAR(norm(c.axis), 1.0, 1e-12);
}

TEST(SynthCorpus, LabelsBalanced) {
  for (const auto* part : {&fixture().train, &fixture().test}) {
    int ones = 0;
    for (const auto& s : part->samples) ones += s.label;
    const double share = static_cast<double>(ones) / part->samples.size();
    EXPECT_NEAR(share, 0.5, 0.05);
  }
}

TEST(SynthCorpus, LabelFollowsProjection) {
  const auto& c = fixture();
  double m1 = 0.0, m0 = 0.0;
  int n1 = 0, n0 = 0;
  for (const auto& s : c.train.samples) {
    const double p = projection(s.tokens, c.table, c.axis);
    EXPECT_EQ(s.label, p > 0.0 ? 1 : 0);
    (s.label ? m1 : m0) += p;
    (s.label ? n1 : n0) += 1;
  }
  EXPECT_GT(m1 / n1, m0 / n0);
}

TEST(SynthCorpus, PolarityUnrelatedToIndexOrder) {
  // neighbours in original index order are no more alike than random pairs
  const auto& c = fixture();
  double adjacent = 0.0;
  for (std::size_t t = 1; t < c.polarity.size(); ++t) adjacent += std::abs(c.polarity[t] - c.polarity[t - 1]);
  adjacent /= static_cast<double>(c.polarity.size() - 1);
  EXPECT_GT(adjacent, 0.5);  // random pairs on [-1, 1] average 2/3
}

TEST(SynthCorpus, RejectsInfeasibleSizes) {
  CorpusConfig c;
  c.vocab_size = 4;
  EXPECT_THROW(synth_corpus(c), InvalidParameter);
  c = {};
  c.dim = 1;
  EXPECT_THROW(synth_corpus(c), InvalidParameter);
}

TEST(Train, LossDecreasesOverFirstEpochs) {
  const auto& c = fixture();
  const auto r = train_with_history(c.train, c.table, {});
  ASSERT_GE(r.losses.size(), 11u);
  for (std::size_t e = 1; e <= 10; ++e) EXPECT_LT(r.losses[e], r.losses[e - 1]) << e;
  EXPECT_NEAR(r.losses[0], std::log(2.0), 1e-12);
}

TEST(Train, Deterministic) {
  const auto& c = fixture();
  TrainConfig cfg;
  cfg.epochs = 20;
  const auto a = train(c.train, c.table, cfg), b = train(c.train, c.table, cfg);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Train, HeavyPenaltyShrinksWeights) {
  const auto& c = fixture();
  TrainConfig cfg;
  cfg.l2 = 1e6;
  cfg.epochs = 50;
  const auto clf = train(c.train, c.table, cfg);
  EXPECT_LT(norm(clf.weights), 1e-3);
  for (double w : clf.weights) EXPECT_TRUE(std::isfinite(w));
}

TEST(Train, SeparableCorpusIsFitPerfectly) {
  const Separable s;
  const auto clf = train(s.corpus, s.table, {});
  EXPECT_EQ(evaluate(clf, s.corpus, s.table), 0.0);
}

TEST(Train, RejectsBadConfig) {
  const Separable s;
  EXPECT_THROW(train(s.corpus, s.table, {0.0, 10, 0.0}), InvalidParameter);
  EXPECT_THROW(train(s.corpus, s.table, {1.0, 0, 0.0}), InvalidParameter);
  EXPECT_THROW(train(s.corpus, s.table, {1.0, 10, -1.0}), InvalidParameter);
  LabeledCorpus one_label{{{{0}, 1}}, 2};
  EXPECT_THROW(train(one_label, s.table, {}), InvalidParameter);
}

TEST(Predict, Properties) {
  const Separable s;
  const std::vector<int> seq{0, 1, 1};
  LinearClassifier zero{{0.0, 0.0}, 0.0};
  EXPECT_EQ(predict(zero, seq, s.table), 0.5);
  double last = 0.0;
  for (double b = -3.0; b <= 3.0; b += 0.5) {
    const double p = predict({{0.4, -0.2}, b}, seq, s.table);
    EXPECT_GT(p, last);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    last = p;
  }
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const LinearClassifier c{{rng.normal(), rng.normal()}, rng.normal()};
    const LinearClassifier neg{{-c.weights[0], -c.weights[1]}, -c.bias};
    const std::vector<double> f{rng.normal(), rng.normal()};
    EXPECT_NEAR(predict_features(neg, f), 1.0 - predict_features(c, f), 1e-15);
    // with features negated too, only the bias flips sign
    const std::vector<double> nf{-f[0], -f[1]};
    const LinearClassifier bias_only{c.weights, -c.bias};
    EXPECT_NEAR(predict_features(neg, nf), predict_features(bias_only, f), 1e-15);
  }
  EXPECT_THROW(predict(zero, std::vector<int>{}, s.table), InvalidParameter);
  EXPECT_THROW(predict(zero, std::vector<int>{2}, s.table), InvalidParameter);
}

TEST(Predict, LossIsStableForLargeMargins) {
  EXPECT_NEAR(logistic_loss(800.0, 1), 0.0, 1e-300);
  EXPECT_NEAR(logistic_loss(800.0, 0), 800.0, 1e-9);
  EXPECT_NEAR(logistic_loss(0.0, 1), std::log(2.0), 1e-15);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
}

TEST(Evaluate, Properties) {
  const auto& c = fixture();
  // bias-only classifier predicts one class for everything
  const LinearClassifier constant{std::vector<double>(16, 0.0), 1.0};
  int ones = 0;
  for (const auto& s : c.test.samples) ones += s.label;
  EXPECT_DOUBLE_EQ(evaluate(constant, c.test, c.table), 1.0 - static_cast<double>(ones) / 500.0);
  EXPECT_NEAR(evaluate(constant, c.test, c.table), 0.5, 0.05);

  const auto clf = train(c.train, c.table, {});
  auto shuffled = c.test;
  Rng rng(6);
  for (std::size_t i = shuffled.samples.size() - 1; i > 0; --i) {
    std::swap(shuffled.samples[i], shuffled.samples[rng.below(i + 1)]);
  }
  EXPECT_EQ(evaluate(clf, shuffled, c.table), evaluate(clf, c.test, c.table));
}

TEST(Evaluate, CleanBaselineIsAccurate) {
  const auto& c = fixture();
  const auto clf = train(c.train, c.table, {});
  EXPECT_LE(evaluate(clf, c.test, c.table), 0.05);
  EXPECT_NEAR(evaluate(clf, c.test, c.table), 0.008, 1e-12);
}

TEST(CorpusIo, RoundTripAndRejects) {
  const Separable s;
  std::stringstream ss;
  write_corpus(ss, s.corpus);
  EXPECT_EQ(read_corpus(ss), s.corpus);
  const char* bad[] = {"", "2\n", "1 2\n1 0\n", "2 2\n1 0\n0 2\n", "2 2\n1 0\n", "2 2\n1 0\n0\n", "2 2\n1 0\n5 1\n"};
  for (const char* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(read_corpus(in), ParseError) << text;
  }
}

TEST(ClassifierIo, RoundTripIsExact) {
  const auto& c = fixture();
  TrainConfig cfg;
  cfg.epochs = 30;
  const auto clf = train(c.train, c.table, cfg);
  std::stringstream ss;
  write_classifier(ss, clf);
  const auto back = read_classifier(ss);
  EXPECT_EQ(back.weights, clf.weights);
  EXPECT_EQ(back.bias, clf.bias);
  std::istringstream bad("3\n1 2 3\n");
  EXPECT_THROW(read_classifier(bad), ParseError);
}
