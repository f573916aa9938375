#pragma once

// Embedding-driven index ordering and the index-offset error model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mmfcomm/error.hpp"
#include "mmfcomm/random.hpp"

namespace mmfcomm::semantic {

class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<std::string> tokens, std::size_t dim, std::vector<double> vectors)
      : tokens_(std::move(tokens)), dim_(dim), vectors_(std::move(vectors)) {
    require(tokens_.size() >= 2, "embedding table needs at least two tokens");
    require(dim_ >= 1, "embedding dimension must be >= 1");
    require(vectors_.size() == tokens_.size() * dim_, "embedding data does not match V x d");
    for (std::size_t t = 0; t < tokens_.size(); ++t) {
      double ss = 0.0;
      for (double v : vector(t)) {
        require(std::isfinite(v), "embedding vector for '" + tokens_[t] + "' is not finite");
        ss += v * v;
      }
      require(ss > 0.0, "embedding vector for '" + tokens_[t] + "' is zero");
    }
  }

  std::size_t size() const { return tokens_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::span<const double> vector(std::size_t token) const { return {vectors_.data() + token * dim_, dim_}; }
  std::span<double> mutable_vector(std::size_t token) { return {vectors_.data() + token * dim_, dim_}; }

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::vector<std::string> tokens_;
  std::size_t dim_;
  std::vector<double> vectors_;
};

// Position p holds the original token index transmitted as symbol p.
struct IndexPermutation {
  std::vector<int> order;

  void validate(std::size_t vocab) const {
    require(order.size() == vocab, "permutation length does not match vocabulary");
    std::vector<char> seen(vocab, 0);
    for (int t : order) {
      require(t >= 0 && static_cast<std::size_t>(t) < vocab && !seen[static_cast<std::size_t>(t)],
              "permutation is not a bijection");
      seen[static_cast<std::size_t>(t)] = 1;
    }
  }

  // inverse()[token] = symbol position
  std::vector<int> inverse() const {
    std::vector<int> inv(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) inv[static_cast<std::size_t>(order[p])] = static_cast<int>(p);
    return inv;
  }

  static IndexPermutation identity(std::size_t n) {
    IndexPermutation p;
    p.order.resize(n);
    std::iota(p.order.begin(), p.order.end(), 0);
    return p;
  }

  bool operator==(const IndexPermutation&) const = default;
};

struct OffsetErrorModel {
  double error_rate = 0.43;
  std::vector<double> offset_weights{0.70, 0.15, 0.10, 0.05};  // offsets 1..D_max

  void validate() const {
    require(error_rate >= 0.0 && error_rate <= 1.0, "error_rate must lie in [0, 1]");
    require(!offset_weights.empty(), "offset model needs at least one offset");
    double sum = 0.0;
    for (double w : offset_weights) {
      require(w > 0.0, "offset weights must be positive");
      sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "offset weights must sum to 1");
  }
};

inline double cosine(std::span<const double> u, std::span<const double> v) {
  require(u.size() == v.size(), "cosine: dimension mismatch");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  require(uu > 0.0 && vv > 0.0, "cosine: zero vector");
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

// Nearest-neighbour chain: starting from `start`, repeatedly place the unplaced
// token with the highest cosine to the last placed one. Ties go to the smallest
// original index.
inline IndexPermutation greedy_order(const EmbeddingTable& table, int start = 0) {
  const std::size_t n = table.size();
  require(start >= 0 && static_cast<std::size_t>(start) < n, "greedy_order: start out of range");
  const std::size_t d = table.dim();

  std::vector<double> unit(n * d);
  for (std::size_t t = 0; t < n; ++t) {
    const auto v = table.vector(t);
    double ss = 0.0;
    for (double x : v) ss += x * x;
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t j = 0; j < d; ++j) unit[t * d + j] = v[j] * inv;
  }

  IndexPermutation perm;
  perm.order.reserve(n);
  std::vector<char> placed(n, 0);
  std::size_t current = static_cast<std::size_t>(start);
  perm.order.push_back(start);
  placed[current] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    const double* a = unit.data() + current * d;
    std::size_t best = n;
    double best_cos = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (placed[t]) continue;
      const double* b = unit.data() + t * d;
      double c = 0.0;
      for (std::size_t j = 0; j < d; ++j) c += a[j] * b[j];
      if (best == n || c > best_cos) {
        best = t;
        best_cos = c;
      }
    }
    placed[best] = 1;
    perm.order.push_back(static_cast<int>(best));
    current = best;
  }
  return perm;
}

// Mean cosine between tokens at adjacent positions.
inline double adjacency_mean(const IndexPermutation& perm, const EmbeddingTable& table) {
  perm.validate(table.size());
  double sum = 0.0;
  for (std::size_t p = 1; p < perm.order.size(); ++p) {
    sum += cosine(table.vector(static_cast<std::size_t>(perm.order[p - 1])),
                  table.vector(static_cast<std::size_t>(perm.order[p])));
  }
  return sum / static_cast<double>(perm.order.size() - 1);
}

// Draws from the offset model for one position. Returns 0 when no error.
inline int draw_offset(Rng& rng, const OffsetErrorModel& model) {
  if (!rng.bernoulli(model.error_rate)) return 0;
  const double u = rng.uniform();
  double acc = 0.0;
  int magnitude = static_cast<int>(model.offset_weights.size());
  for (std::size_t i = 0; i < model.offset_weights.size(); ++i) {
    acc += model.offset_weights[i];
    if (u < acc) {
      magnitude = static_cast<int>(i) + 1;
      break;
    }
  }
  return rng.bernoulli(0.5) ? magnitude : -magnitude;
}

// Independent per-position index errors; results clamped to [0, vocab_size).
inline std::vector<int> perturb(std::span<const int> seq, const OffsetErrorModel& model, int vocab_size,
                                std::uint64_t seed) {
  model.validate();
  require(vocab_size >= 1, "perturb: vocab_size must be >= 1");
  Rng rng(seed);
  std::vector<int> out(seq.begin(), seq.end());
  for (int& s : out) {
    require(s >= 0 && s < vocab_size, "perturb: index out of range");
    const int offset = draw_offset(rng, model);
    if (offset != 0) s = std::clamp(s + offset, 0, vocab_size - 1);
  }
  return out;
}

}  // namespace mmfcomm::semantic
