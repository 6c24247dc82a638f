#include "auxrl/embed/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "auxrl/util/errors.hpp"
#include "auxrl/util/rng.hpp"

namespace auxrl::embed {

namespace {

constexpr int kMaxLloydIterations = 300;

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest_centroid(const EmbeddingVector& p,
                             const std::vector<EmbeddingVector>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// k-means++: first centroid uniform, the rest proportional to squared
// distance from the nearest centroid chosen so far.
std::vector<EmbeddingVector> seed_centroids(const std::vector<EmbeddingVector>& points,
                                            int k, util::Rng& rng) {
  std::vector<EmbeddingVector> centroids;
  centroids.push_back(points[rng.uniform_index(points.size())]);
  std::vector<double> dist2(points.size());
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      dist2[i] = squared_distance(points[i], centroids[nearest_centroid(points[i], centroids)]);
      total += dist2[i];
    }
    std::size_t chosen;
    if (total <= 0.0) {
      // All points coincide with existing centroids; any pick works.
      chosen = rng.uniform_index(points.size());
    } else {
      const double target = rng.next_double() * total;
      double acc = 0.0;
      chosen = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += dist2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(points[chosen]);
  }
  return centroids;
}

}  // namespace

ClusterModel kmeans_points(const std::vector<std::string>& labels,
                           const std::vector<EmbeddingVector>& points, int k,
                           std::uint64_t seed) {
  const std::size_t n = points.size();
  if (labels.size() != n) {
    throw InvalidArgumentError("kmeans: labels/points size mismatch");
  }
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw InvalidArgumentError("kmeans: k must satisfy 1 <= k <= number of points");
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw InvalidArgumentError("kmeans: ragged point dimensions");
  }

  util::Rng rng(seed);
  std::vector<EmbeddingVector> centroids = seed_centroids(points, k, rng);
  std::vector<std::size_t> assign(n, 0);

  ClusterModel model;
  model.k = k;

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    // Assignment step.
    bool changed = iter == 0;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest_centroid(points[i], centroids);
      if (c != assign[i]) changed = true;
      assign[i] = c;
      inertia += squared_distance(points[i], centroids[c]);
    }
    model.inertia_history.push_back(inertia);
    model.inertia = inertia;
    if (!changed) break;

    // Update step.
    std::vector<EmbeddingVector> sums(k, EmbeddingVector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) sums[assign[i]][d] += points[i][d];
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point farthest from its centroid.
        std::size_t far_i = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = squared_distance(points[i], centroids[assign[i]]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        centroids[c] = points[far_i];
      } else {
        for (std::size_t d = 0; d < dim; ++d) {
          centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
      }
    }
  }

  // Duplicate points can leave a cluster empty even after re-seeding (every
  // tie resolves to the lowest index). Hand each empty cluster one point so
  // the returned partition is total.
  for (int c = 0; c < k; ++c) {
    if (std::count(assign.begin(), assign.end(), static_cast<std::size_t>(c)) > 0)
      continue;
    std::size_t far_i = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::count(assign.begin(), assign.end(), assign[i]) <= 1) continue;
      const double d = squared_distance(points[i], centroids[assign[i]]);
      if (d > far_d) {
        far_d = d;
        far_i = i;
      }
    }
    assign[far_i] = static_cast<std::size_t>(c);
    centroids[c] = points[far_i];
  }
  {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inertia += squared_distance(points[i], centroids[assign[i]]);
    }
    model.inertia = inertia;
  }

  model.centroids = std::move(centroids);
  for (std::size_t i = 0; i < n; ++i) {
    model.assignment[labels[i]] = static_cast<int>(assign[i]);
  }
  return model;
}

ClusterModel kmeans(const EmbeddingStore& store, int k, std::uint64_t seed) {
  std::vector<std::string> labels = store.propositions();  // sorted
  std::vector<EmbeddingVector> points;
  points.reserve(labels.size());
  for (const auto& p : labels) points.push_back(store.embedding(p));
  return kmeans_points(labels, points, k, seed);
}

std::vector<std::string> cluster_members(const ClusterModel& model,
                                         const std::string& proposition) {
  auto it = model.assignment.find(proposition);
  if (it == model.assignment.end()) {
    throw InvalidArgumentError("cluster_members: unknown proposition '" +
                               proposition + "'");
  }
  std::vector<std::string> members;
  for (const auto& [p, c] : model.assignment) {
    if (c == it->second) members.push_back(p);
  }
  return members;
}

}  // namespace auxrl::embed
