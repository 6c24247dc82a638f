#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "auxrl/embed/store.hpp"

namespace auxrl::embed {

struct ClusterModel {
  int k = 0;
  std::vector<EmbeddingVector> centroids;        // k centroids
  std::map<std::string, int> assignment;         // proposition -> cluster index
  double inertia = 0.0;                          // sum of squared distances
  std::vector<double> inertia_history;           // one value per Lloyd iteration

  bool operator==(const ClusterModel&) const = default;
};

/// Lloyd's algorithm with k-means++ seeding on the store's raw vectors
/// (Euclidean distance). Deterministic given the seed: identical inputs and
/// seed give a bit-identical model. Runs until assignments stop changing or
/// 300 iterations. Empty clusters are re-seeded at the point farthest from
/// its assigned centroid. Throws InvalidArgumentError unless
/// 1 <= k <= number of objects.
ClusterModel kmeans(const EmbeddingStore& store, int k, std::uint64_t seed);

/// Same algorithm on bare labelled points (used by tests and benchmarks).
ClusterModel kmeans_points(const std::vector<std::string>& labels,
                           const std::vector<EmbeddingVector>& points, int k,
                           std::uint64_t seed);

/// All propositions sharing p's cluster, p included, sorted. Throws
/// InvalidArgumentError for a proposition absent from the model.
std::vector<std::string> cluster_members(const ClusterModel& model,
                                         const std::string& proposition);

}  // namespace auxrl::embed
