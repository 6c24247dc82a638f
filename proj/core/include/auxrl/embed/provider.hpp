#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "auxrl/embed/store.hpp"

namespace auxrl::embed {

/// Object to describe/embed: proposition identifier plus human-readable name.
struct ObjectName {
  std::string proposition;
  std::string display_name;
};

/// Produces a natural-language description of an object.
class DescriptionProvider {
 public:
  virtual ~DescriptionProvider() = default;
  virtual std::string describe(const ObjectName& object) = 0;
};

/// Produces an embedding vector for an object's description text.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingVector embed(const ObjectName& object,
                                const std::string& description) = 0;
};

/// Serves descriptions and embeddings from a bundled JSONL fixture file,
/// keyed by proposition. Throws ProviderError for objects absent from the
/// fixture.
class FixtureProvider : public DescriptionProvider, public EmbeddingProvider {
 public:
  explicit FixtureProvider(const std::filesystem::path& fixture_path);
  explicit FixtureProvider(EmbeddingStore fixtures);

  std::string describe(const ObjectName& object) override;
  EmbeddingVector embed(const ObjectName& object,
                        const std::string& description) override;

 private:
  EmbeddingStore fixtures_;
};

/// Deterministic test double: a seeded pseudo-random unit vector derived
/// from a hash of the description text. Identical text, identical vector.
class StubEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit StubEmbeddingProvider(std::uint64_t seed = 0) : seed_(seed) {}
  EmbeddingVector embed(const ObjectName& object,
                        const std::string& description) override;

 private:
  std::uint64_t seed_;
};

/// Trivial description double: names the object and its display name.
class StubDescriptionProvider : public DescriptionProvider {
 public:
  std::string describe(const ObjectName& object) override;
};

struct RemoteEndpointConfig {
  std::string describe_url;     // POST {"object", "prompt_template"} -> {"description"}
  std::string embed_url;        // POST {"text"} -> {"embedding": [768]}
  std::string token_env = "AUXRL_PROVIDER_TOKEN";  // bearer token variable
  std::string prompt_template =
      "Describe the household object '<name>', including its typical room, "
      "purpose, and related objects.";
  int timeout_seconds = 30;
};

/// HTTP description provider. Throws ProviderError when the endpoint is
/// unreachable or replies with a malformed body.
class RemoteDescriptionProvider : public DescriptionProvider {
 public:
  explicit RemoteDescriptionProvider(RemoteEndpointConfig config);
  std::string describe(const ObjectName& object) override;

 private:
  RemoteEndpointConfig config_;
};

/// HTTP embedding provider. Throws ProviderError on unreachable endpoints,
/// malformed bodies and wrong embedding dimensions.
class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEndpointConfig config);
  EmbeddingVector embed(const ObjectName& object,
                        const std::string& description) override;

 private:
  RemoteEndpointConfig config_;
};

/// One description per name, in input order. When `cache` is given the
/// records are written through to it (embedding column left empty for
/// objects not yet embedded).
std::vector<ObjectDescription> describe_objects(
    const std::vector<ObjectName>& names, DescriptionProvider& provider,
    const std::optional<std::filesystem::path>& cache = std::nullopt);

/// Embeds every description into a store; write-through to `cache` when
/// given. Dimension mismatches surface as ProviderError.
EmbeddingStore embed_objects(const std::vector<ObjectDescription>& descriptions,
                             EmbeddingProvider& provider,
                             const std::optional<std::filesystem::path>& cache =
                                 std::nullopt);

}  // namespace auxrl::embed
