#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ils/concept_store.hpp"
#include "ils/errors.hpp"

namespace ils {

inline constexpr double kDefaultDecay = 0.5;

/// A knowledge thread: a connected graph of concepts with a designated
/// non-empty apex set (AKUs). Every node outside the apex set is an SKU;
/// both sets must be non-empty. Node weights decay geometrically with hop
/// distance from the nearest AKU.
///
/// Construction goes through build(); instances always satisfy the
/// invariants. Values are immutable and freely copyable.
class Csd {
 public:
  /// Validating factory. Rejects, in this order: bad id, fewer than two
  /// concepts, duplicate concept ids, a decay outside (0,1), malformed
  /// links (dangling endpoints, duplicates; self-loops are rejected by
  /// StrandedLink itself), unknown AKU ids, an empty AKU set, an AKU set
  /// covering every node, and a disconnected graph.
  static Csd build(std::string id, std::vector<Concept> concepts,
                   std::vector<StrandedLink> links,
                   std::vector<ConceptId> akus,
                   double decay = kDefaultDecay) {
    if (!is_valid_id_token(id)) {
      throw IlsError(ErrorCode::invalid_id,
                     "thread id '" + id + "' (want non-empty [A-Za-z0-9_-]+)");
    }
    if (concepts.size() < 2) {
      throw IlsError(ErrorCode::too_few_nodes,
                     "a thread needs at least two concepts");
    }
    if (!(decay > 0.0) || !(decay < 1.0)) {
      throw IlsError(ErrorCode::bad_decay, "decay must lie in (0,1)");
    }

    Csd csd;
    csd.id_ = std::move(id);
    std::sort(concepts.begin(), concepts.end(),
              [](const Concept& a, const Concept& b) { return a.id() < b.id(); });
    for (std::size_t i = 1; i < concepts.size(); ++i) {
      if (concepts[i - 1].id() == concepts[i].id()) {
        throw IlsError(ErrorCode::duplicate_id,
                       "concept id '" + concepts[i].id().str() +
                           "' declared twice");
      }
    }
    csd.concepts_ = std::move(concepts);
    csd.decay_ = decay;

    std::sort(links.begin(), links.end(),
              [](const StrandedLink& a, const StrandedLink& b) {
                return a.endpoints() < b.endpoints();
              });
    for (std::size_t i = 0; i < links.size(); ++i) {
      const StrandedLink& link = links[i];
      for (const ConceptId* end : {&link.first(), &link.second()}) {
        if (!csd.contains(*end)) {
          throw IlsError(ErrorCode::dangling_endpoint,
                         "link endpoint '" + end->str() +
                             "' is not a declared concept");
        }
      }
      if (i > 0 && links[i - 1].endpoints() == link.endpoints()) {
        throw IlsError(ErrorCode::duplicate_link,
                       "link '" + link.first().str() + "'--'" +
                           link.second().str() + "' declared twice");
      }
    }
    csd.links_ = std::move(links);

    std::sort(akus.begin(), akus.end());
    akus.erase(std::unique(akus.begin(), akus.end()), akus.end());
    for (const ConceptId& aku : akus) {
      if (!csd.contains(aku)) {
        throw IlsError(ErrorCode::unknown_concept,
                       "aku '" + aku.str() + "' is not a declared concept");
      }
    }
    if (akus.empty()) {
      throw IlsError(ErrorCode::no_aku, "thread designates no AKU");
    }
    if (akus.size() == csd.concepts_.size()) {
      throw IlsError(ErrorCode::no_sku,
                     "every concept is an AKU; at least one SKU required");
    }
    csd.akus_ = std::move(akus);

    if (!csd.connected()) {
      throw IlsError(ErrorCode::disconnected, "thread graph is not connected");
    }
    return csd;
  }

  const std::string& id() const noexcept { return id_; }
  /// Concepts in ascending id order.
  const std::vector<Concept>& concepts() const noexcept { return concepts_; }
  /// Links sorted by normalized endpoint pair.
  const std::vector<StrandedLink>& links() const noexcept { return links_; }
  /// AKU ids, sorted, duplicate-free.
  const std::vector<ConceptId>& akus() const noexcept { return akus_; }
  double decay() const noexcept { return decay_; }
  std::size_t node_count() const noexcept { return concepts_.size(); }

  bool contains(const ConceptId& id) const {
    return find_concept(id) != nullptr;
  }

  bool is_aku(const ConceptId& id) const {
    return std::binary_search(akus_.begin(), akus_.end(), id);
  }

  const Concept* find_concept(const ConceptId& id) const {
    auto it = std::lower_bound(
        concepts_.begin(), concepts_.end(), id,
        [](const Concept& c, const ConceptId& key) { return c.id() < key; });
    if (it == concepts_.end() || !(it->id() == id)) return nullptr;
    return &*it;
  }

  const Concept& concept_at(const ConceptId& id) const {
    const Concept* c = find_concept(id);
    if (!c) {
      throw IlsError(ErrorCode::unknown_concept,
                     "concept '" + id.str() + "' is not part of thread '" +
                         id_ + "'");
    }
    return *c;
  }

  const StrandedLink* find_link(const ConceptId& a, const ConceptId& b) const {
    const std::pair<const ConceptId&, const ConceptId&> key =
        a < b ? std::pair<const ConceptId&, const ConceptId&>{a, b}
              : std::pair<const ConceptId&, const ConceptId&>{b, a};
    auto it = std::lower_bound(links_.begin(), links_.end(), key,
                               [](const StrandedLink& link, const auto& k) {
                                 return link.endpoints() < k;
                               });
    if (it == links_.end() || !(it->endpoints() == key)) return nullptr;
    return &*it;
  }

  bool has_link(const ConceptId& a, const ConceptId& b) const {
    return find_link(a, b) != nullptr;
  }

  /// Same thread under a different id (derived threads get rank-based ids).
  Csd with_id(std::string new_id) const {
    if (!is_valid_id_token(new_id)) {
      throw IlsError(ErrorCode::invalid_id, "thread id '" + new_id + "'");
    }
    Csd copy = *this;
    copy.id_ = std::move(new_id);
    return copy;
  }

 private:
  Csd() = default;

  bool connected() const {
    std::set<ConceptId> seen{concepts_.front().id()};
    std::deque<ConceptId> frontier{concepts_.front().id()};
    while (!frontier.empty()) {
      ConceptId current = frontier.front();
      frontier.pop_front();
      for (const StrandedLink& link : links_) {
        if (!link.touches(current)) continue;
        const ConceptId& next =
            link.first() == current ? link.second() : link.first();
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
    return seen.size() == concepts_.size();
  }

  std::string id_;
  std::vector<Concept> concepts_;
  std::vector<StrandedLink> links_;
  std::vector<ConceptId> akus_;
  double decay_ = kDefaultDecay;
};

/// Neighbor lists in ascending id order, keyed by ascending id.
inline std::map<ConceptId, std::vector<ConceptId>> adjacency(const Csd& csd) {
  std::map<ConceptId, std::vector<ConceptId>> adj;
  for (const Concept& c : csd.concepts()) adj.emplace(c.id(), std::vector<ConceptId>{});
  for (const StrandedLink& link : csd.links()) {
    adj.at(link.first()).push_back(link.second());
    adj.at(link.second()).push_back(link.first());
  }
  for (auto& [id, neighbors] : adj) std::sort(neighbors.begin(), neighbors.end());
  return adj;
}

/// Node weight map: weight(v) = decay^d(v) with d(v) the unweighted hop
/// distance to the nearest AKU. AKUs get exactly 1.
inline std::map<ConceptId, double> node_weights(const Csd& csd) {
  const auto adj = adjacency(csd);
  std::map<ConceptId, std::size_t> dist;
  std::deque<ConceptId> frontier;
  for (const ConceptId& aku : csd.akus()) {
    dist.emplace(aku, 0);
    frontier.push_back(aku);
  }
  while (!frontier.empty()) {
    ConceptId current = frontier.front();
    frontier.pop_front();
    const std::size_t next_dist = dist.at(current) + 1;
    for (const ConceptId& neighbor : adj.at(current)) {
      if (dist.emplace(neighbor, next_dist).second) frontier.push_back(neighbor);
    }
  }
  std::map<ConceptId, double> weights;
  for (const auto& [id, d] : dist) {
    weights.emplace(id, d == 0 ? 1.0 : std::pow(csd.decay(), static_cast<double>(d)));
  }
  return weights;
}

/// Thread strength in (0,1]: geometric mean of link affinities times the
/// arithmetic mean of node weights. Deterministic: both folds run in the
/// stored (sorted) order.
inline double csd_score(const Csd& csd) {
  double log_sum = 0.0;
  for (const StrandedLink& link : csd.links()) {
    log_sum += std::log(link_affinity(link));
  }
  const double geo =
      std::exp(log_sum / static_cast<double>(csd.links().size()));
  const auto weights = node_weights(csd);
  double weight_sum = 0.0;
  for (const auto& [id, w] : weights) weight_sum += w;
  return geo * (weight_sum / static_cast<double>(csd.node_count()));
}

/// Deduplication key: "<nodes>|<edges>|<akus>" with nodes and akus as
/// ";"-joined sorted ids and each edge as "min,max", sorted. Two threads get
/// the same key exactly when node set, edge set, and AKU set all coincide;
/// ids are global so no isomorphism search is involved.
inline std::string canonical_form(const Csd& csd) {
  std::string key;
  for (const Concept& c : csd.concepts()) {
    if (!key.empty()) key += ';';
    key += c.id().str();
  }
  key += '|';
  bool first_link = true;
  for (const StrandedLink& link : csd.links()) {
    if (!first_link) key += ';';
    first_link = false;
    key += link.first().str();
    key += ',';
    key += link.second().str();
  }
  key += '|';
  bool first_aku = true;
  for (const ConceptId& aku : csd.akus()) {
    if (!first_aku) key += ';';
    first_aku = false;
    key += aku.str();
  }
  return key;
}

}  // namespace ils
