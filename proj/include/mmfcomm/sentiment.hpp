#pragma once

// Synthetic labelled corpus and a mean-pooled-embedding logistic classifier.
// The classifier only sees token embeddings, so a substituted token hurts it
// in proportion to how far its embedding is from the original.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mmfcomm/error.hpp"
#include "mmfcomm/random.hpp"
#include "mmfcomm/semantic.hpp"

namespace mmfcomm::sentiment {

using semantic::EmbeddingTable;

struct Sample {
  std::vector<int> tokens;
  int label = 0;
  bool operator==(const Sample&) const = default;
};

struct LabeledCorpus {
  std::vector<Sample> samples;
  int vocab_size = 0;

  void validate() const {
    require(vocab_size >= 1, "corpus vocab_size must be >= 1");
    require(!samples.empty(), "corpus is empty");
    bool has0 = false, has1 = false;
    for (const auto& s : samples) {
      require(!s.tokens.empty(), "corpus sequences must be non-empty");
      require(s.label == 0 || s.label == 1, "corpus labels must be 0 or 1");
      for (int t : s.tokens) require(t >= 0 && t < vocab_size, "corpus token index out of range");
      (s.label ? has1 : has0) = true;
    }
    require(has0 && has1, "corpus must contain both labels");
  }

  bool operator==(const LabeledCorpus&) const = default;
};

struct LinearClassifier {
  std::vector<double> weights;
  double bias = 0.0;
};

struct TrainConfig {
  double learning_rate = 2.0;
  int epochs = 400;
  double l2 = 0.001;

  void validate() const {
    require(learning_rate > 0.0, "learning_rate must be > 0");
    require(epochs >= 1, "epochs must be >= 1");
    require(l2 >= 0.0, "l2 must be >= 0");
  }
};

struct CorpusConfig {
  int vocab_size = 512;
  int dim = 16;
  int train_n = 2000;
  int test_n = 500;
  int seq_len = 20;
  std::uint64_t seed = 7;
  double bias = 0.45;       // probability a token is drawn from the target polarity
  double noise = 0.12;      // per-component embedding noise std

  void validate() const {
    require(vocab_size >= 8, "vocab_size must be >= 8");
    require(dim >= 2, "dim must be >= 2");
    require(train_n >= 2 && test_n >= 2, "train_n and test_n must be >= 2");
    require(seq_len >= 1, "seq_len must be >= 1");
    require(bias >= 0.0 && bias <= 1.0, "corpus bias must lie in [0, 1]");
    require(noise >= 0.0, "corpus noise must be >= 0");
  }
};

struct SyntheticCorpus {
  EmbeddingTable table;
  LabeledCorpus train;
  LabeledCorpus test;
  std::vector<double> axis;      // unit sentiment direction
  std::vector<double> polarity;  // per original token index
};

inline double projection(std::span<const int> tokens, const EmbeddingTable& table, std::span<const double> axis) {
  double acc = 0.0;
  for (int t : tokens) {
    const auto v = table.vector(static_cast<std::size_t>(t));
    for (std::size_t j = 0; j < v.size(); ++j) acc += v[j] * axis[j];
  }
  return acc / static_cast<double>(tokens.size());
}

// Token t gets polarity s_t on an even grid over [-1, 1], assigned in shuffled
// order so polarity is unrelated to the original index, and embedding
// s_t * u + noise. A sample picks a target polarity, draws each token from the
// matching half with probability `bias` (otherwise uniformly), and is labelled
// by the sign of its mean projection onto u.
inline SyntheticCorpus synth_corpus(const CorpusConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto v = static_cast<std::size_t>(cfg.vocab_size);
  const auto d = static_cast<std::size_t>(cfg.dim);

  std::vector<double> axis(d);
  double norm = 0.0;
  while (!(norm > 0.0)) {
    norm = 0.0;
    for (auto& a : axis) {
      a = rng.normal();
      norm += a * a;
    }
  }
  norm = std::sqrt(norm);
  for (auto& a : axis) a /= norm;

  std::vector<int> slot(v);
  std::iota(slot.begin(), slot.end(), 0);
  for (std::size_t i = v - 1; i > 0; --i) std::swap(slot[i], slot[rng.below(i + 1)]);
  std::vector<double> polarity(v);
  for (std::size_t t = 0; t < v; ++t) {
    polarity[t] = -1.0 + 2.0 * static_cast<double>(slot[t]) / static_cast<double>(v - 1);
  }

  std::vector<std::string> tokens(v);
  std::vector<double> vectors(v * d);
  for (std::size_t t = 0; t < v; ++t) {
    tokens[t] = "w" + std::to_string(t);
    double ss = 0.0;
    do {
      ss = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double x = polarity[t] * axis[j] + cfg.noise * rng.normal();
        vectors[t * d + j] = x;
        ss += x * x;
      }
    } while (!(ss > 0.0));
  }
  EmbeddingTable table(std::move(tokens), d, std::move(vectors));

  std::vector<int> positive, negative;
  for (std::size_t t = 0; t < v; ++t) (polarity[t] > 0.0 ? positive : negative).push_back(static_cast<int>(t));

  auto make = [&](int n) {
    LabeledCorpus corpus;
    corpus.vocab_size = cfg.vocab_size;
    corpus.samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const bool target_positive = rng.bernoulli(0.5);
      const auto& pool = target_positive ? positive : negative;
      Sample s;
      s.tokens.resize(static_cast<std::size_t>(cfg.seq_len));
      for (auto& tok : s.tokens) {
        tok = rng.bernoulli(cfg.bias) ? pool[rng.below(pool.size())] : static_cast<int>(rng.below(v));
      }
      s.label = projection(s.tokens, table, axis) >= 0.0 ? 1 : 0;
      corpus.samples.push_back(std::move(s));
    }
    return corpus;
  };
  LabeledCorpus train = make(cfg.train_n);
  LabeledCorpus test = make(cfg.test_n);
  train.validate();
  test.validate();
  return {std::move(table), std::move(train), std::move(test), std::move(axis), std::move(polarity)};
}

inline std::vector<double> mean_embedding(std::span<const int> tokens, const EmbeddingTable& table) {
  std::vector<double> f(table.dim(), 0.0);
  for (int t : tokens) {
    const auto v = table.vector(static_cast<std::size_t>(t));
    for (std::size_t j = 0; j < v.size(); ++j) f[j] += v[j];
  }
  for (auto& x : f) x /= static_cast<double>(tokens.size());
  return f;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-y z)) for y in {-1, +1}, stable for large |z|.
inline double logistic_loss(double z, int label) {
  const double m = label ? z : -z;
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

struct TrainResult {
  LinearClassifier classifier;
  std::vector<double> losses;  // objective before each epoch, then after the last one
};

// Full-batch gradient descent on mean logistic loss + l2 * |w|^2. The penalty
// is applied as an exact proximal step, w <- w / (1 + 2 lr l2), so any l2 is
// stable. The bias is not penalised.
inline TrainResult train_with_history(const LabeledCorpus& corpus, const EmbeddingTable& table,
                                      const TrainConfig& cfg) {
  cfg.validate();
  corpus.validate();
  require(static_cast<std::size_t>(corpus.vocab_size) <= table.size(), "corpus vocabulary exceeds embedding table");
  const std::size_t d = table.dim();
  const std::size_t n = corpus.samples.size();

  std::vector<double> x(n * d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = mean_embedding(corpus.samples[i].tokens, table);
    std::copy(f.begin(), f.end(), x.begin() + static_cast<std::ptrdiff_t>(i * d));
    y[i] = corpus.samples[i].label;
  }

  TrainResult result;
  auto& w = result.classifier.weights;
  auto& b = result.classifier.bias;
  w.assign(d, 0.0);
  b = 0.0;

  auto objective = [&]() {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i * d + j];
      loss += logistic_loss(z, y[i]);
    }
    double ww = 0.0;
    for (double v : w) ww += v * v;
    return loss / static_cast<double>(n) + cfg.l2 * ww;
  };

  std::vector<double> grad(d);
  const double shrink = 1.0 / (1.0 + 2.0 * cfg.learning_rate * cfg.l2);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    result.losses.push_back(objective());
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i * d + j];
      const double r = sigmoid(z) - static_cast<double>(y[i]);
      for (std::size_t j = 0; j < d; ++j) grad[j] += r * x[i * d + j];
      grad_b += r;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) w[j] = (w[j] - cfg.learning_rate * grad[j] * inv_n) * shrink;
    b -= cfg.learning_rate * grad_b * inv_n;
  }
  result.losses.push_back(objective());
  return result;
}

inline LinearClassifier train(const LabeledCorpus& corpus, const EmbeddingTable& table, const TrainConfig& cfg) {
  return train_with_history(corpus, table, cfg).classifier;
}

inline double predict_features(const LinearClassifier& clf, std::span<const double> features) {
  require(features.size() == clf.weights.size(), "classifier dimension mismatch");
  double z = clf.bias;
  for (std::size_t j = 0; j < features.size(); ++j) z += clf.weights[j] * features[j];
  return sigmoid(z);
}

inline double predict(const LinearClassifier& clf, std::span<const int> seq, const EmbeddingTable& table) {
  require(!seq.empty(), "predict: empty sequence");
  for (int t : seq) require(t >= 0 && static_cast<std::size_t>(t) < table.size(), "predict: token out of range");
  return predict_features(clf, mean_embedding(seq, table));
}

inline int classify(const LinearClassifier& clf, std::span<const int> seq, const EmbeddingTable& table) {
  return predict(clf, seq, table) >= 0.5 ? 1 : 0;
}

// Fraction of samples whose thresholded prediction differs from the label.
inline double evaluate(const LinearClassifier& clf, const LabeledCorpus& corpus, const EmbeddingTable& table) {
  require(!corpus.samples.empty(), "evaluate: empty corpus");
  std::size_t wrong = 0;
  for (const auto& s : corpus.samples) wrong += classify(clf, s.tokens, table) != s.label;
  return static_cast<double>(wrong) / static_cast<double>(corpus.samples.size());
}

}  // namespace mmfcomm::sentiment
