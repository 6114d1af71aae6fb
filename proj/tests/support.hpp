// Shared test helpers: deterministic fixture builders, random-instance
// generators, and independent brute-force oracles. The oracles re-derive
// results straight from the definitions (all-pairs edge checks, Floyd-
// Warshall distances, naive path enumeration) so they never share logic
// with the code under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ils/ils.hpp"

namespace support {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// ---------------------------------------------------------------------------
// Fixtures (the worked example threads).

inline ils::Csd make_kt1(double decay = ils::kDefaultDecay) {
  using ils::Concept;
  using ils::ConceptId;
  using ils::StrandedLink;
  return ils::Csd::build(
      "kt1",
      {Concept(ConceptId("knn1"), "World"), Concept(ConceptId("knn2"), "Thing"),
       Concept(ConceptId("knn3"), "Living"),
       Concept(ConceptId("knn4"), "Non-living")},
      {StrandedLink(ConceptId("knn1"), ConceptId("knn2")),
       StrandedLink(ConceptId("knn2"), ConceptId("knn3")),
       StrandedLink(ConceptId("knn2"), ConceptId("knn4"))},
      {ConceptId("knn1")}, decay);
}

inline ils::Csd make_kt2(double decay = ils::kDefaultDecay) {
  using ils::Concept;
  using ils::ConceptId;
  using ils::StrandedLink;
  return ils::Csd::build(
      "kt2",
      {Concept(ConceptId("knn2"), "Thing"), Concept(ConceptId("knn3"), "Living"),
       Concept(ConceptId("knn5"), "Grow"), Concept(ConceptId("knn6"), "Breathe"),
       Concept(ConceptId("knn7"), "Animals")},
      {StrandedLink(ConceptId("knn2"), ConceptId("knn3")),
       StrandedLink(ConceptId("knn3"), ConceptId("knn5")),
       StrandedLink(ConceptId("knn3"), ConceptId("knn6")),
       StrandedLink(ConceptId("knn6"), ConceptId("knn7"))},
      {ConceptId("knn3")}, decay);
}

/// Five-concept chain knn1--knn2--knn3--knn4--knn5.
inline ils::Csd make_chain(std::vector<std::string> aku_ids,
                           double decay = ils::kDefaultDecay) {
  using ils::Concept;
  using ils::ConceptId;
  using ils::StrandedLink;
  const std::vector<std::string> labels = {"Continent", "Largest", "Continuous",
                                           "Landmass", "Earth"};
  std::vector<Concept> concepts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    concepts.emplace_back(ConceptId("knn" + std::to_string(i + 1)), labels[i]);
  }
  std::vector<StrandedLink> links;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    links.emplace_back(ConceptId("knn" + std::to_string(i)),
                       ConceptId("knn" + std::to_string(i + 1)));
  }
  std::vector<ConceptId> akus;
  for (std::string& id : aku_ids) akus.emplace_back(std::move(id));
  return ils::Csd::build("chain", std::move(concepts), std::move(links),
                         std::move(akus), decay);
}

// ---------------------------------------------------------------------------
// Random instances.

inline EdgeList random_connected_edges(std::mt19937& rng, std::size_t n,
                                       double extra_edge_prob = 0.3) {
  EdgeList edges;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    edges.emplace_back(pick(rng), i);
  }
  std::bernoulli_distribution flip(extra_edge_prob);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool in_tree =
          std::find(edges.begin(), edges.end(), std::make_pair(i, j)) !=
              edges.end() ||
          std::find(edges.begin(), edges.end(), std::make_pair(j, i)) !=
              edges.end();
      if (!in_tree && flip(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

/// Thread over ids `<prefix>0..<prefix>{n-1}` with the given edges; random
/// strand lists, a random proper non-empty AKU subset, random decay.
inline ils::Csd make_random_thread(std::mt19937& rng, const std::string& id,
                                   const std::string& prefix, std::size_t n,
                                   const EdgeList& edges) {
  using ils::Concept;
  using ils::ConceptId;
  using ils::Strand;
  using ils::StrandedLink;
  std::vector<Concept> concepts;
  for (std::size_t i = 0; i < n; ++i) {
    concepts.emplace_back(ConceptId(prefix + std::to_string(i)),
                          "label_" + prefix + std::to_string(i));
  }
  std::uniform_int_distribution<int> strand_count(1, 3);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<StrandedLink> links;
  for (const auto& [a, b] : edges) {
    std::vector<Strand> strands;
    const int count = strand_count(rng);
    for (int s = 0; s < count; ++s) {
      strands.push_back(Strand{"p" + std::to_string(s), weight(rng)});
    }
    links.emplace_back(ConceptId(prefix + std::to_string(a)),
                       ConceptId(prefix + std::to_string(b)),
                       std::move(strands));
  }
  std::uniform_int_distribution<std::size_t> aku_count(1, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<ConceptId> akus;
  const std::size_t count = aku_count(rng);
  for (std::size_t i = 0; i < count; ++i) {
    akus.emplace_back(prefix + std::to_string(order[i]));
  }
  std::uniform_real_distribution<double> decay(0.1, 0.9);
  return ils::Csd::build(id, std::move(concepts), std::move(links),
                         std::move(akus), decay(rng));
}

inline ils::Csd random_thread(std::mt19937& rng, const std::string& id,
                              const std::string& prefix, std::size_t min_n,
                              std::size_t max_n) {
  std::uniform_int_distribution<std::size_t> size(min_n, max_n);
  const std::size_t n = size(rng);
  return make_random_thread(rng, id, prefix, n, random_connected_edges(rng, n));
}

// ---------------------------------------------------------------------------
// Oracles.

inline bool oracle_connected(std::size_t n, const EdgeList& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : edges) parent[find(a)] = find(b);
  for (std::size_t i = 1; i < n; ++i) {
    if (find(i) != find(0)) return false;
  }
  return true;
}

/// Node weights by Floyd-Warshall hop distances (the implementation uses a
/// multi-source BFS instead).
inline std::map<ils::ConceptId, double> oracle_node_weights(
    const ils::Csd& csd) {
  std::vector<ils::ConceptId> ids;
  for (const ils::Concept& c : csd.concepts()) ids.push_back(c.id());
  const std::size_t n = ids.size();
  const std::size_t inf = n + 1;
  std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) dist[i][i] = 0;
  auto index_of = [&](const ils::ConceptId& id) {
    return static_cast<std::size_t>(
        std::find(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (const ils::StrandedLink& link : csd.links()) {
    const std::size_t a = index_of(link.first());
    const std::size_t b = index_of(link.second());
    dist[a][b] = dist[b][a] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
      }
    }
  }
  std::map<ils::ConceptId, double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = inf;
    for (const ils::ConceptId& aku : csd.akus()) {
      best = std::min(best, dist[i][index_of(aku)]);
    }
    weights.emplace(ids[i], best == 0 ? 1.0
                                      : std::pow(csd.decay(),
                                                 static_cast<double>(best)));
  }
  return weights;
}

/// Score recomputed from the formula with the same fold order as the
/// implementation but its own distance computation.
inline double oracle_csd_score(const ils::Csd& csd) {
  double log_sum = 0.0;
  for (const ils::StrandedLink& link : csd.links()) {
    log_sum += std::log(ils::link_affinity(link));
  }
  const double geo = std::exp(log_sum / static_cast<double>(csd.links().size()));
  const auto weights = oracle_node_weights(csd);
  double sum = 0.0;
  for (const auto& [id, w] : weights) sum += w;
  return geo * (sum / static_cast<double>(csd.node_count()));
}

using OracleEdge = std::pair<ils::PairVertex, ils::PairVertex>;

/// Definitional product edge set: every vertex pair is tested against the
/// biconditional on the factor links.
inline std::set<OracleEdge> oracle_product_edges(const ils::Csd& kt1,
                                                 const ils::Csd& kt2) {
  std::vector<ils::PairVertex> vertices;
  for (const ils::Concept& g : kt1.concepts()) {
    for (const ils::Concept& h : kt2.concepts()) {
      vertices.push_back(ils::PairVertex{g.id(), h.id()});
    }
  }
  std::set<OracleEdge> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      const ils::PairVertex& u = vertices[i];
      const ils::PairVertex& v = vertices[j];
      if (kt1.has_link(u.left, v.left) && kt2.has_link(u.right, v.right)) {
        edges.emplace(std::min(u, v), std::max(u, v));
      }
    }
  }
  return edges;
}

/// All simple paths of 1..max_edges edges over an adjacency map, one
/// orientation per path (the lexicographically smaller vertex sequence).
inline std::vector<std::vector<ils::PairVertex>> oracle_enumerate_paths(
    const std::set<OracleEdge>& edges, std::size_t max_edges) {
  std::set<ils::PairVertex> vertex_set;
  std::map<ils::PairVertex, std::vector<ils::PairVertex>> adj;
  for (const auto& [a, b] : edges) {
    vertex_set.insert(a);
    vertex_set.insert(b);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::vector<ils::PairVertex>> unique_paths;
  std::vector<ils::PairVertex> path;
  auto walk = [&](auto&& self, const ils::PairVertex& at) -> void {
    path.push_back(at);
    if (path.size() >= 2) {
      std::vector<ils::PairVertex> reversed(path.rbegin(), path.rend());
      unique_paths.insert(std::min(path, reversed));
    }
    if (path.size() <= max_edges) {
      for (const ils::PairVertex& next : adj[at]) {
        if (std::find(path.begin(), path.end(), next) == path.end()) {
          self(self, next);
        }
      }
    }
    path.pop_back();
  };
  for (const ils::PairVertex& start : vertex_set) walk(walk, start);
  return {unique_paths.begin(), unique_paths.end()};
}

/// Independent end-to-end pipeline: definitional edges, naive enumeration,
/// re-derived projection/inheritance/classification/dedup/ranking. Returns
/// the surviving threads named exactly like the implementation would.
inline std::vector<ils::Csd> oracle_valid_threads(
    const ils::Csd& kt1, const ils::Csd& kt2,
    const ils::ConstraintSet& constraints, std::size_t max_edges,
    double min_score, double derived_decay) {
  const auto edges = oracle_product_edges(kt1, kt2);
  struct Survivor {
    std::string key;
    double score;
    ils::Csd thread;
  };
  std::vector<Survivor> survivors;

  for (const auto& path : oracle_enumerate_paths(edges, max_edges)) {
    // Projection: left then right per vertex, consecutive repeats collapsed.
    std::vector<ils::ConceptId> trace;
    for (const ils::PairVertex& v : path) {
      for (const ils::ConceptId* id : {&v.left, &v.right}) {
        if (trace.empty() || !(trace.back() == *id)) trace.push_back(*id);
      }
    }
    std::set<ils::ConceptId> nodes(trace.begin(), trace.end());
    std::set<ils::ConceptId> akus;
    for (const ils::ConceptId& id : nodes) {
      if (kt1.is_aku(id) || kt2.is_aku(id)) akus.insert(id);
    }
    if (akus.empty() || akus.size() == nodes.size()) continue;

    std::set<std::string> labels;
    std::vector<ils::Concept> concepts;
    for (const ils::ConceptId& id : nodes) {
      const ils::Concept* c = kt1.find_concept(id);
      if (!c) c = kt2.find_concept(id);
      concepts.push_back(*c);
      labels.insert(ils::ascii_lower(c->label()));
    }
    bool incompatible = false;
    for (const auto& [a, b] : constraints.pairs()) {
      if (labels.count(a) && labels.count(b)) incompatible = true;
    }
    if (incompatible) continue;

    std::set<std::pair<ils::ConceptId, ils::ConceptId>> pair_set;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
      pair_set.emplace(std::min(trace[i], trace[i + 1]),
                       std::max(trace[i], trace[i + 1]));
    }
    std::vector<ils::StrandedLink> links;
    for (const auto& [a, b] : pair_set) {
      std::vector<ils::Strand> strands;
      for (const ils::Csd* factor : {&kt1, &kt2}) {
        if (const ils::StrandedLink* link = factor->find_link(a, b)) {
          strands.insert(strands.end(), link->strands().begin(),
                         link->strands().end());
        }
      }
      if (strands.empty()) strands.push_back(ils::Strand{"rel", 0.5});
      links.emplace_back(a, b, std::move(strands));
    }
    ils::Csd derived = ils::Csd::build(
        "candidate", std::move(concepts), std::move(links),
        std::vector<ils::ConceptId>(akus.begin(), akus.end()), derived_decay);
    const double score = oracle_csd_score(derived);
    if (score < min_score) continue;

    // Key: sorted nodes | sorted edges | sorted akus, matching the stated
    // canonical form.
    std::string key;
    for (const ils::ConceptId& id : nodes) {
      if (!key.empty()) key += ';';
      key += id.str();
    }
    key += '|';
    bool first = true;
    for (const auto& [a, b] : pair_set) {
      if (!first) key += ';';
      first = false;
      key += a.str() + "," + b.str();
    }
    key += '|';
    first = true;
    for (const ils::ConceptId& id : akus) {
      if (!first) key += ';';
      first = false;
      key += id.str();
    }

    bool replaced = false;
    bool duplicate = false;
    for (Survivor& s : survivors) {
      if (s.key != key) continue;
      duplicate = true;
      if (score > s.score) {
        s.score = score;
        s.thread = derived;
        replaced = true;
      }
      break;
    }
    (void)replaced;
    if (!duplicate) survivors.push_back(Survivor{key, score, std::move(derived)});
  }

  std::stable_sort(survivors.begin(), survivors.end(),
                   [](const Survivor& x, const Survivor& y) {
                     if (x.score != y.score) return x.score > y.score;
                     return x.key < y.key;
                   });
  std::vector<ils::Csd> out;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    out.push_back(survivors[i].thread.with_id(
        kt1.id() + "x" + kt2.id() + "-" + std::to_string(i + 1)));
  }
  return out;
}

}  // namespace support
