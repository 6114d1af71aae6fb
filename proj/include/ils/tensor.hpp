#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ils/csd.hpp"
#include "ils/errors.hpp"

namespace ils {

/// One vertex of a product cluster: a concept from each factor thread.
/// Coherent vertices pair a concept with itself, which happens when the two
/// threads share that concept id.
struct PairVertex {
  ConceptId left;
  ConceptId right;

  bool coherent() const { return left == right; }

  friend auto operator<=>(const PairVertex&, const PairVertex&) = default;
};

/// Tensor product of two threads. Vertices are all left x right concept
/// pairs; {(g,h),(g',h')} is an edge exactly when {g,g'} links the left
/// factor and {h,h'} links the right one. Edge weight is the product of the
/// two factor affinities. Built by tensor_product(); immutable afterwards.
class ProductCluster {
 public:
  struct Edge {
    PairVertex a;  // a < b
    PairVertex b;
    double weight = 0.0;
  };

  const Csd& left_factor() const noexcept { return left_; }
  const Csd& right_factor() const noexcept { return right_; }

  std::pair<std::string, std::string> factor_ids() const {
    return {left_.id(), right_.id()};
  }

  /// All |V(left)| x |V(right)| pair vertices in ascending order.
  const std::vector<PairVertex>& vertices() const noexcept { return vertices_; }
  /// Edges sorted by normalized endpoint pair.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_edge(const PairVertex& u, const PairVertex& v) const {
    const std::pair<const PairVertex&, const PairVertex&> key =
        u < v ? std::pair<const PairVertex&, const PairVertex&>{u, v}
              : std::pair<const PairVertex&, const PairVertex&>{v, u};
    auto it = std::lower_bound(
        edges_.begin(), edges_.end(), key, [](const Edge& e, const auto& k) {
          return std::pair<const PairVertex&, const PairVertex&>{e.a, e.b} < k;
        });
    return it != edges_.end() && it->a == key.first && it->b == key.second;
  }

  friend ProductCluster tensor_product(const Csd& kt1, const Csd& kt2);

 private:
  ProductCluster(Csd left, Csd right)
      : left_(std::move(left)), right_(std::move(right)) {}

  Csd left_;
  Csd right_;
  std::vector<PairVertex> vertices_;
  std::vector<Edge> edges_;
};

/// Materializes the tensor product of two valid threads. Deterministic:
/// vertices and edges come out sorted regardless of input ordering.
inline ProductCluster tensor_product(const Csd& kt1, const Csd& kt2) {
  ProductCluster cluster(kt1, kt2);

  cluster.vertices_.reserve(kt1.node_count() * kt2.node_count());
  for (const Concept& g : kt1.concepts()) {
    for (const Concept& h : kt2.concepts()) {
      cluster.vertices_.push_back(PairVertex{g.id(), h.id()});
    }
  }

  // Each pair of factor links induces exactly two product edges (the
  // straight and the crossed combination); distinct link pairs never
  // collide, so no deduplication is needed.
  cluster.edges_.reserve(2 * kt1.links().size() * kt2.links().size());
  for (const StrandedLink& e1 : kt1.links()) {
    for (const StrandedLink& e2 : kt2.links()) {
      const double weight = link_affinity(e1) * link_affinity(e2);
      auto add = [&](PairVertex u, PairVertex v) {
        if (v < u) std::swap(u, v);
        cluster.edges_.push_back(
            ProductCluster::Edge{std::move(u), std::move(v), weight});
      };
      add(PairVertex{e1.first(), e2.first()},
          PairVertex{e1.second(), e2.second()});
      add(PairVertex{e1.first(), e2.second()},
          PairVertex{e1.second(), e2.first()});
    }
  }
  std::sort(cluster.edges_.begin(), cluster.edges_.end(),
            [](const ProductCluster::Edge& x, const ProductCluster::Edge& y) {
              return std::pair{x.a, x.b} < std::pair{y.a, y.b};
            });
  return cluster;
}

/// Builds the product and cross-checks its edge count against the closed
/// form 2*|E(kt1)|*|E(kt2)| that holds for simple loopless factors. Returns
/// the edge count; a mismatch means a construction bug.
inline std::size_t edge_count_check(const Csd& kt1, const Csd& kt2) {
  const ProductCluster cluster = tensor_product(kt1, kt2);
  const std::size_t expected = 2 * kt1.links().size() * kt2.links().size();
  if (cluster.edge_count() != expected) {
    throw IlsError(ErrorCode::oracle_mismatch,
                   "product of '" + kt1.id() + "' and '" + kt2.id() +
                       "' has " + std::to_string(cluster.edge_count()) +
                       " edges, expected " + std::to_string(expected));
  }
  return cluster.edge_count();
}

}  // namespace ils
