#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evotutor/core.hpp"
#include "evotutor/embedding.hpp"
#include "evotutor/jsonio.hpp"

namespace evotutor {

// Polarity of a profile feature relative to its key: the extractor decides
// whether the evidence asserts or negates the keyed statement, and a
// same-key match with opposite polarity is what counts as a contradiction.
enum class Polarity { Asserts, Negates };

inline const char* polarity_name(Polarity p) {
  return p == Polarity::Asserts ? "asserts" : "negates";
}

inline Polarity polarity_from(const std::string& s) {
  if (s == "asserts") return Polarity::Asserts;
  if (s == "negates") return Polarity::Negates;
  throw Error(Errc::parse, "unknown polarity: " + s);
}

struct QaPair {
  std::int64_t turn_index = 0;
  std::string question;
  std::string answer;
  Tick timestamp = 0;
};

// Sliding window of recent interactions. On saturation the whole window is
// consumed by consolidation rather than sliding one-out-one-in.
class ShortTermMemory {
 public:
  explicit ShortTermMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw Error(Errc::config, "window capacity must be positive");
  }

  // Returns true when the append fills the window.
  bool append(QaPair qa) {
    if (!window_.empty() && qa.turn_index <= window_.back().turn_index) {
      throw Error(Errc::ordering, "turn_index must be strictly increasing");
    }
    if (window_.size() >= capacity_) {
      throw Error(Errc::input, "window is saturated; consolidate before appending");
    }
    window_.push_back(std::move(qa));
    return window_.size() == capacity_;
  }

  void clear() { window_.clear(); }
  bool empty() const { return window_.empty(); }
  bool saturated() const { return window_.size() == capacity_; }
  std::size_t size() const { return window_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<QaPair>& window() const { return window_; }

 private:
  std::vector<QaPair> window_;
  std::size_t capacity_;
};

struct ProfileFeature {
  std::string key;    // short label, e.g. "mastery: sampling"
  std::string value;  // current evidence text
  double confidence = 0.5;
  Polarity polarity = Polarity::Asserts;
  Embedding embedding;  // unit-norm vector of the feature key text
  Tick created_at = 0;
  Tick last_updated = 0;
  std::uint64_t evidence_count = 0;
};

struct ConsolidationConfig {
  double learning_rate = 0.2;    // eta
  double match_threshold = 0.6;  // minimum similarity for a candidate to fuse
  std::size_t window_size = 4;
  double initial_confidence = 0.5;  // maximal-entropy start for new features
  double replace_floor = 0.15;      // below this a corrected feature is replaced

  void validate() const {
    if (!(learning_rate > 0.0 && learning_rate < 1.0))
      throw Error(Errc::config, "learning_rate must be in (0,1)");
    if (!(match_threshold > 0.0 && match_threshold < 1.0))
      throw Error(Errc::config, "match_threshold must be in (0,1)");
    if (window_size == 0) throw Error(Errc::config, "window_size must be positive");
  }
};

enum class ConfidenceEvent { Reinforcement, Correction };

// Momentum confidence update. Both branches are convex combinations with the
// fixed points 0 and 1, so the result stays in [0,1].
inline double update_confidence(double omega, double eta, ConfidenceEvent event) {
  if (event == ConfidenceEvent::Reinforcement) return omega + eta * (1.0 - omega);
  return omega - eta * omega;
}

struct FusionOutcome {
  enum class Kind { Inserted, Reinforced, Corrected } kind = Kind::Inserted;
  bool value_replaced = false;  // correction pushed confidence below the floor
  std::string key;              // key of the feature that was touched
};

// Port for turning a saturated window into candidate features. Candidates are
// ProfileFeature values with key/value/polarity/embedding/timestamps filled;
// confidence and evidence_count are assigned by fusion.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::vector<ProfileFeature> extract(const ShortTermMemory& stm) const = 0;
};

using SimilarityFn = std::function<double(const Embedding&, const Embedding&)>;

// Long-term cognitive memory for one student: structured features keyed by
// unique key text.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::string student_id) : student_id_(std::move(student_id)) {}

  const std::string& student_id() const { return student_id_; }
  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }

  const ProfileFeature* find(const std::string& key) const {
    auto it = features_.find(key);
    return it == features_.end() ? nullptr : &it->second;
  }

  // Key-sorted view; this is also the canonical serialization order.
  const std::map<std::string, ProfileFeature>& features() const { return features_; }

  // Match the candidate against the profile and reinforce, correct, or insert.
  FusionOutcome fuse(const ProfileFeature& candidate, const ConsolidationConfig& cfg,
                     const SimilarityFn& similarity = default_similarity) {
    cfg.validate();

    // Best-matching existing feature; ties break by key ascending (map order).
    const ProfileFeature* best = nullptr;
    double best_sim = -2.0;
    for (const auto& [key, feat] : features_) {
      double sim = similarity(feat.embedding, candidate.embedding);
      if (sim > best_sim) {
        best_sim = sim;
        best = &feat;
      }
    }
    // An identical key always fuses with its feature, whatever the embedder
    // thinks; key uniqueness is an invariant.
    auto same_key = features_.find(candidate.key);
    if (same_key != features_.end()) {
      best = &same_key->second;
      best_sim = 1.0;
    }

    if (best == nullptr || best_sim <= cfg.match_threshold) {
      ProfileFeature inserted = candidate;
      inserted.confidence = cfg.initial_confidence;
      inserted.evidence_count = 1;
      features_.emplace(inserted.key, std::move(inserted));
      return {FusionOutcome::Kind::Inserted, false, candidate.key};
    }

    ProfileFeature& f = features_.at(best->key);
    if (f.polarity == candidate.polarity) {
      // Consistent evidence: reinforce and keep the newest phrasing.
      f.confidence = update_confidence(f.confidence, cfg.learning_rate,
                                       ConfidenceEvent::Reinforcement);
      f.value = candidate.value;
      f.embedding = candidate.embedding;
      f.evidence_count += 1;
      f.last_updated = candidate.last_updated;
      return {FusionOutcome::Kind::Reinforced, false, f.key};
    }

    // Contradiction: weaken, and below the floor replace the entry outright.
    f.confidence =
        update_confidence(f.confidence, cfg.learning_rate, ConfidenceEvent::Correction);
    f.last_updated = candidate.last_updated;
    bool replaced = f.confidence < cfg.replace_floor;
    if (replaced) {
      f.value = candidate.value;
      f.polarity = candidate.polarity;
      f.embedding = candidate.embedding;
      f.confidence = cfg.initial_confidence;
      f.evidence_count = 1;
    }
    return {FusionOutcome::Kind::Corrected, replaced, f.key};
  }

  // Features with confidence >= min_confidence whose key contains key_filter,
  // sorted by confidence descending, then most recently updated, then key.
  std::vector<ProfileFeature> query(double min_confidence,
                                    const std::optional<std::string>& key_filter =
                                        std::nullopt) const {
    if (min_confidence < 0.0 || min_confidence > 1.0)
      throw Error(Errc::input, "min_confidence must be in [0,1]");
    std::vector<ProfileFeature> out;
    for (const auto& [key, feat] : features_) {
      if (feat.confidence < min_confidence) continue;
      if (key_filter && !contains(key, *key_filter)) continue;
      out.push_back(feat);
    }
    std::sort(out.begin(), out.end(), [](const ProfileFeature& a, const ProfileFeature& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      if (a.last_updated != b.last_updated) return a.last_updated > b.last_updated;
      return a.key < b.key;
    });
    return out;
  }

  Json to_json_lines() const {
    Json lines = Json::array();
    for (const auto& [key, f] : features_) {
      Json j;
      j["key"] = f.key;
      j["value"] = f.value;
      j["confidence"] = f.confidence;
      j["polarity"] = polarity_name(f.polarity);
      j["evidence_count"] = f.evidence_count;
      j["created_at"] = f.created_at;
      j["last_updated"] = f.last_updated;
      j["embedding"] = f.embedding.values;
      lines.push_back(std::move(j));
    }
    return lines;
  }

  std::string canonical_serialization() const {
    std::string out;
    for (const auto& line : to_json_lines()) {
      out += canonical_dump(line);
      out.push_back('\n');
    }
    return out;
  }

  void save(const std::string& path) const { write_file(path, canonical_serialization()); }

  static Profile load(const std::string& path, std::string student_id) {
    Profile p(std::move(student_id));
    for (const auto& j : read_lines(path)) {
      ProfileFeature f;
      f.key = j.at("key").get<std::string>();
      f.value = j.at("value").get<std::string>();
      f.confidence = j.at("confidence").get<double>();
      f.polarity = polarity_from(j.at("polarity").get<std::string>());
      f.evidence_count = j.at("evidence_count").get<std::uint64_t>();
      f.created_at = j.at("created_at").get<Tick>();
      f.last_updated = j.at("last_updated").get<Tick>();
      f.embedding.values = j.at("embedding").get<std::vector<double>>();
      p.features_.emplace(f.key, std::move(f));
    }
    return p;
  }

  static double default_similarity(const Embedding& a, const Embedding& b) {
    return cosine(a, b);
  }

 private:
  std::string student_id_;
  std::map<std::string, ProfileFeature> features_;
};

// Batch consolidation of a saturated window (or a session-end flush): extract
// candidates, fuse them in extraction order, then clear the window. If the
// extractor fails the window is retained and the error propagates — evidence
// is never silently dropped.
inline std::vector<FusionOutcome> consolidate(Profile& profile, ShortTermMemory& stm,
                                              const FeatureExtractor& extractor,
                                              const ConsolidationConfig& cfg) {
  std::vector<ProfileFeature> candidates = extractor.extract(stm);
  std::vector<FusionOutcome> outcomes;
  outcomes.reserve(candidates.size());
  for (const auto& c : candidates) outcomes.push_back(profile.fuse(c, cfg));
  stm.clear();
  return outcomes;
}

}  // namespace evotutor
