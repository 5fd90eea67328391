#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evotutor/core.hpp"

namespace evotutor {

// Unit-norm dense vector. Dimension is fixed per embedder / per index.
struct Embedding {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }

  double norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
  }
};

inline double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) throw Error(Errc::config, "embedding dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return dot;
}

// All embedder implementations must be deterministic: identical text yields an
// identical unit-norm vector.
class Embedder {
 public:
  virtual ~Embedder() = default;

  Embedding embed(const std::string& text) const {
    if (text.empty()) throw Error(Errc::input, "cannot embed empty text");
    Embedding e = embed_impl(text);
    double n = e.norm();
    if (n > 0.0) {
      for (double& v : e.values) v /= n;
    }
    return e;
  }

  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;

 private:
  virtual Embedding embed_impl(const std::string& text) const = 0;
};

// Test embedder: lowercase word tokens hashed into fixed buckets, counted,
// L2-normalized. Order-insensitive, captures crude lexical similarity.
class HashBagEmbedder final : public Embedder {
 public:
  explicit HashBagEmbedder(std::size_t dim = 256) : dim_(dim) {
    if (dim_ == 0) throw Error(Errc::config, "embedder dimension must be positive");
  }

  std::string id() const override { return "hash-bag-" + std::to_string(dim_); }
  std::size_t dimension() const override { return dim_; }

 private:
  Embedding embed_impl(const std::string& text) const override {
    Embedding e;
    e.values.assign(dim_, 0.0);
    auto tokens = tokenize(text);
    if (tokens.empty()) {
      // text with no alphanumeric runs still maps to a fixed direction
      e.values[fnv1a64("") % dim_] = 1.0;
      return e;
    }
    for (const auto& t : tokens) {
      e.values[fnv1a64(t) % dim_] += 1.0;
    }
    return e;
  }

  std::size_t dim_;
};

struct IndexEntry {
  std::string id;
  Embedding embedding;
};

struct Neighbor {
  std::string id;
  double similarity;
};

// Exact cosine k-NN over a small corpus. Brute force by design: results are
// reproducible and lifecycle decisions stay auditable. Ties break by id
// ascending.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(std::size_t dim) : dim_(dim) {}

  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  std::size_t dimension() const { return dim_.value_or(0); }

  void insert(const std::string& id, const Embedding& e) {
    if (entries_.count(id)) throw Error(Errc::input, "duplicate index id: " + id);
    check_dim(e);
    entries_.emplace(id, e);
  }

  void upsert(const std::string& id, const Embedding& e) {
    check_dim(e);
    entries_[id] = e;
  }

  void remove(const std::string& id) {
    if (entries_.erase(id) == 0) throw Error(Errc::lookup, "no such index entry: " + id);
  }

  const Embedding& at(const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw Error(Errc::lookup, "no such index entry: " + id);
    return it->second;
  }

  std::vector<Neighbor> knn(const Embedding& query, std::size_t k,
                            const std::optional<std::string>& exclude = std::nullopt) const {
    if (k == 0) throw Error(Errc::input, "k must be >= 1");
    std::vector<Neighbor> scored;
    scored.reserve(entries_.size());
    for (const auto& [id, emb] : entries_) {
      if (exclude && id == *exclude) continue;
      scored.push_back({id, cosine(query, emb)});
    }
    rank_neighbors(scored);
    if (scored.size() > k) scored.resize(k);
    return scored;
  }

  // Similarity-descending, id-ascending on ties. Shared so retrieval paths
  // rank identically to the index.
  static void rank_neighbors(std::vector<Neighbor>& scored) {
    std::sort(scored.begin(), scored.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.id < b.id;
    });
  }

 private:
  void check_dim(const Embedding& e) {
    if (!dim_) dim_ = e.dim();
    if (e.dim() != *dim_) throw Error(Errc::config, "embedding dimension mismatch");
  }

  std::map<std::string, Embedding> entries_;
  std::optional<std::size_t> dim_;
};

}  // namespace evotutor
