#include "auxrl/embed/provider.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "auxrl/util/errors.hpp"
#include "auxrl/util/rng.hpp"

namespace auxrl::embed {

FixtureProvider::FixtureProvider(const std::filesystem::path& fixture_path)
    : fixtures_(EmbeddingStore::load_jsonl(fixture_path)) {}

FixtureProvider::FixtureProvider(EmbeddingStore fixtures)
    : fixtures_(std::move(fixtures)) {}

std::string FixtureProvider::describe(const ObjectName& object) {
  if (!fixtures_.contains(object.proposition)) {
    throw ProviderError("missing fixture entry for '" + object.display_name +
                        "' (proposition '" + object.proposition + "')");
  }
  return fixtures_.at(object.proposition).description.description;
}

EmbeddingVector FixtureProvider::embed(const ObjectName& object,
                                       const std::string& /*description*/) {
  if (!fixtures_.contains(object.proposition)) {
    throw ProviderError("missing fixture entry for '" + object.display_name +
                        "' (proposition '" + object.proposition + "')");
  }
  const EmbeddingVector& v = fixtures_.at(object.proposition).embedding;
  if (v.empty()) {
    throw ProviderError("fixture entry for '" + object.proposition +
                        "' has no embedding");
  }
  return v;
}

EmbeddingVector StubEmbeddingProvider::embed(const ObjectName& /*object*/,
                                             const std::string& description) {
  // FNV-1a over the text, mixed with the provider seed, drives the draw.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed_;
  for (unsigned char c : description) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  util::Rng rng(h);
  EmbeddingVector v(kEmbeddingDim);
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.next_gaussian();
    norm2 += x * x;
  }
  const double norm = std::sqrt(norm2);
  for (double& x : v) x /= norm;
  return v;
}

std::string StubDescriptionProvider::describe(const ObjectName& object) {
  return "A household object: " + object.display_name + " (" + object.proposition + ").";
}

namespace {

// httplib wants scheme://host[:port] and the path separately.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("provider URL must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

httplib::Headers auth_headers(const std::string& token_env) {
  httplib::Headers headers;
  if (!token_env.empty()) {
    if (const char* token = std::getenv(token_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  return headers;
}

nlohmann::json post_json(const std::string& url, const std::string& token_env,
                         int timeout_seconds, const nlohmann::json& body) {
  const auto [host, path] = split_url(url);
  httplib::Client client(host);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  auto res = client.Post(path, auth_headers(token_env), body.dump(),
                         "application/json");
  if (!res) {
    throw ProviderError("provider unreachable: " + url + " (" +
                        httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw ProviderError("provider error: " + url + " returned HTTP " +
                        std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError("malformed provider response from " + url + ": " + e.what());
  }
}

}  // namespace

RemoteDescriptionProvider::RemoteDescriptionProvider(RemoteEndpointConfig config)
    : config_(std::move(config)) {}

std::string RemoteDescriptionProvider::describe(const ObjectName& object) {
  nlohmann::json body;
  body["object"] = object.display_name;
  body["prompt_template"] = config_.prompt_template;
  const nlohmann::json res = post_json(config_.describe_url, config_.token_env,
                                       config_.timeout_seconds, body);
  if (!res.contains("description") || !res["description"].is_string()) {
    throw ProviderError("malformed provider response: missing 'description'");
  }
  return res["description"].get<std::string>();
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEndpointConfig config)
    : config_(std::move(config)) {}

EmbeddingVector RemoteEmbeddingProvider::embed(const ObjectName& /*object*/,
                                               const std::string& description) {
  nlohmann::json body;
  body["text"] = description;
  const nlohmann::json res = post_json(config_.embed_url, config_.token_env,
                                       config_.timeout_seconds, body);
  if (!res.contains("embedding") || !res["embedding"].is_array()) {
    throw ProviderError("malformed provider response: missing 'embedding'");
  }
  EmbeddingVector v;
  try {
    v = res["embedding"].get<EmbeddingVector>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed provider response: ") + e.what());
  }
  if (v.size() != kEmbeddingDim) {
    throw ProviderError("provider returned embedding of dimension " +
                        std::to_string(v.size()) + ", expected " +
                        std::to_string(kEmbeddingDim));
  }
  return v;
}

std::vector<ObjectDescription> describe_objects(
    const std::vector<ObjectName>& names, DescriptionProvider& provider,
    const std::optional<std::filesystem::path>& cache) {
  std::vector<ObjectDescription> out;
  out.reserve(names.size());
  EmbeddingStore cache_store;
  for (const auto& name : names) {
    ObjectDescription d;
    d.proposition = name.proposition;
    d.display_name = name.display_name;
    d.description = provider.describe(name);
    if (cache) cache_store.insert(d, {});
    out.push_back(std::move(d));
  }
  if (cache) cache_store.save_jsonl(*cache);
  return out;
}

EmbeddingStore embed_objects(const std::vector<ObjectDescription>& descriptions,
                             EmbeddingProvider& provider,
                             const std::optional<std::filesystem::path>& cache) {
  EmbeddingStore store;
  for (const auto& d : descriptions) {
    EmbeddingVector v =
        provider.embed(ObjectName{d.proposition, d.display_name}, d.description);
    if (v.size() != kEmbeddingDim) {
      throw ProviderError("embedding for '" + d.proposition + "' has dimension " +
                          std::to_string(v.size()) + ", expected " +
                          std::to_string(kEmbeddingDim));
    }
    store.insert(d, std::move(v));
  }
  if (cache) store.save_jsonl(*cache);
  return store;
}

}  // namespace auxrl::embed
