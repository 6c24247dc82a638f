#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace auxrl::embed {

/// Dimension produced by the sentence-encoder providers.
inline constexpr std::size_t kEmbeddingDim = 768;

using EmbeddingVector = std::vector<double>;

struct ObjectDescription {
  std::string proposition;
  std::string display_name;
  std::string description;
};

/// cos(u, v) = dot(u,v) / (|u||v|). Throws InvalidArgumentError on dimension
/// mismatch or a zero-norm vector.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

/// Per-object description text and embedding vector, keyed by proposition.
///
/// Serialises as JSON lines, one record per object:
///   {"proposition": ..., "display_name": ..., "description": ...,
///    "embedding": [768 numbers]}
/// An empty embedding array marks a described-but-not-yet-embedded record.
class EmbeddingStore {
 public:
  struct Entry {
    ObjectDescription description;
    EmbeddingVector embedding;  // empty or kEmbeddingDim values
  };

  void insert(ObjectDescription desc, EmbeddingVector embedding);

  bool contains(const std::string& proposition) const {
    return entries_.count(proposition) != 0;
  }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Throws InvalidArgumentError for an unknown proposition.
  const Entry& at(const std::string& proposition) const;
  const EmbeddingVector& embedding(const std::string& proposition) const;

  /// Propositions in sorted order.
  std::vector<std::string> propositions() const;

  const std::map<std::string, Entry>& entries() const { return entries_; }

  static EmbeddingStore load_jsonl(const std::filesystem::path& path);
  void save_jsonl(const std::filesystem::path& path) const;

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace auxrl::embed
