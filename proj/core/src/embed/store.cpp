#include "auxrl/embed/store.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "auxrl/util/errors.hpp"

namespace auxrl::embed {

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.size() != v.size()) {
    throw InvalidArgumentError("cosine_similarity: dimension mismatch");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    throw InvalidArgumentError("cosine_similarity: zero-norm vector");
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

void EmbeddingStore::insert(ObjectDescription desc, EmbeddingVector embedding) {
  if (desc.description.empty()) {
    throw InvalidArgumentError("EmbeddingStore: description must be non-empty");
  }
  if (!embedding.empty() && embedding.size() != kEmbeddingDim) {
    throw ProviderError("EmbeddingStore: embedding for '" + desc.proposition +
                        "' has dimension " + std::to_string(embedding.size()) +
                        ", expected " + std::to_string(kEmbeddingDim));
  }
  for (double x : embedding) {
    if (!std::isfinite(x)) {
      throw ProviderError("EmbeddingStore: non-finite embedding value for '" +
                          desc.proposition + "'");
    }
  }
  const std::string key = desc.proposition;
  entries_[key] = Entry{std::move(desc), std::move(embedding)};
}

const EmbeddingStore::Entry& EmbeddingStore::at(const std::string& proposition) const {
  auto it = entries_.find(proposition);
  if (it == entries_.end()) {
    throw InvalidArgumentError("EmbeddingStore: unknown proposition '" + proposition + "'");
  }
  return it->second;
}

const EmbeddingVector& EmbeddingStore::embedding(const std::string& proposition) const {
  const Entry& e = at(proposition);
  if (e.embedding.empty()) {
    throw InvalidArgumentError("EmbeddingStore: '" + proposition +
                               "' has no embedding yet");
  }
  return e.embedding;
}

std::vector<std::string> EmbeddingStore::propositions() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

EmbeddingStore EmbeddingStore::load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ProviderError("cannot open embedding file " + path.string());
  EmbeddingStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(path.string() + ":" + std::to_string(line_no) +
                          ": bad JSON record: " + e.what());
    }
    try {
      ObjectDescription d;
      d.proposition = rec.at("proposition").get<std::string>();
      d.display_name = rec.at("display_name").get<std::string>();
      d.description = rec.at("description").get<std::string>();
      EmbeddingVector v = rec.at("embedding").get<EmbeddingVector>();
      store.insert(std::move(d), std::move(v));
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(path.string() + ":" + std::to_string(line_no) +
                          ": missing or mistyped field: " + e.what());
    }
  }
  return store;
}

void EmbeddingStore::save_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ProviderError("cannot write embedding file " + path.string());
  for (const auto& [prop, entry] : entries_) {
    nlohmann::json rec;
    rec["proposition"] = entry.description.proposition;
    rec["display_name"] = entry.description.display_name;
    rec["description"] = entry.description.description;
    rec["embedding"] = entry.embedding;
    out << rec.dump() << '\n';
  }
}

}  // namespace auxrl::embed
