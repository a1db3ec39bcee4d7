#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vizrec/common.hpp"

namespace vizrec {

// Agglomerative clustering, complete linkage, Euclidean distance.
// Cluster ids follow the usual convention: 0..n-1 are the input leaves, the
// merge at index m creates cluster n + m. Ties on merge distance (exact
// floating-point equality) are broken toward the smallest (a, b) id pair, so
// the tree is deterministic for a given input order.

struct Merge {
  int a = 0;
  int b = 0;  // a < b
  double height = 0.0;

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;
};

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Dendrogram hier_cluster(const std::vector<std::vector<double>>& vectors,
                               const std::vector<std::string>& labels) {
  const std::size_t n = vectors.size();
  if (n < 2) throw ValidationError("hier_cluster: need at least 2 vectors");
  if (labels.size() != n) throw ValidationError("hier_cluster: label count mismatch");
  for (const auto& v : vectors)
    if (v.size() != vectors.front().size())
      throw ValidationError("hier_cluster: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (labels[i] == labels[j])
        throw ValidationError("hier_cluster: duplicate label '" + labels[i] + "'");

  const std::size_t total = 2 * n - 1;
  std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] = euclidean(vectors[i], vectors[j]);

  std::vector<int> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back(static_cast<int>(i));

  Dendrogram out;
  out.leaves = labels;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    int best_a = -1, best_b = -1;
    double best_d = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        double d = dist[active[i]][active[j]];
        if (best_a < 0 || d < best_d) {
          best_d = d;
          best_a = active[i];
          best_b = active[j];
        }
      }
    int next_id = static_cast<int>(n + step);
    // Complete linkage: distance to the union is the farther of the parts.
    for (int k : active)
      if (k != best_a && k != best_b) {
        double d = std::max(dist[best_a][k], dist[best_b][k]);
        dist[next_id][k] = dist[k][next_id] = d;
      }
    active.erase(std::remove(active.begin(), active.end(), best_a), active.end());
    active.erase(std::remove(active.begin(), active.end(), best_b), active.end());
    active.push_back(next_id);
    out.merges.push_back({best_a, best_b, best_d});
  }
  return out;
}

// Leaf label groups after undoing the last k-1 merges. Groups keep leaf input
// order internally and are ordered by their smallest leaf index.
inline std::vector<std::vector<std::string>> cluster_cut(const Dendrogram& dg,
                                                         std::size_t k) {
  const std::size_t n = dg.leaves.size();
  if (k < 1 || k > n) throw ValidationError("cluster_cut: k out of range");
  std::vector<int> parent(2 * n - 1);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::size_t kept = n - k;  // merges to keep
  for (std::size_t m = 0; m < kept; ++m) {
    parent[dg.merges[m].a] = static_cast<int>(n + m);
    parent[dg.merges[m].b] = static_cast<int>(n + m);
  }
  auto root_of = [&](int i) {
    while (parent[i] != i) i = parent[i];
    return i;
  };
  std::vector<int> roots;
  std::vector<std::vector<std::string>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    int r = root_of(static_cast<int>(i));
    std::size_t g = 0;
    for (; g < roots.size(); ++g)
      if (roots[g] == r) break;
    if (g == roots.size()) {
      roots.push_back(r);
      groups.emplace_back();
    }
    groups[g].push_back(dg.leaves[i]);
  }
  return groups;
}

}  // namespace vizrec
