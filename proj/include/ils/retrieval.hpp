#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ils/csd.hpp"
#include "ils/errors.hpp"

namespace ils {

/// One query hit: a thread containing the queried concept, the anchor
/// concept that matched, and that anchor's node weight inside the thread.
struct QueryResult {
  const Csd* thread = nullptr;
  double score = 0.0;
  ConceptId anchor;
  double anchor_weight = 0.0;
};

/// Read-only collection of threads (originals plus derived). Thread ids are
/// unique; queries are deterministic. Results keep pointers into the store,
/// so do not add threads while holding them.
class ThreadStore {
 public:
  const Csd& add_thread(Csd thread) {
    for (const Csd& existing : threads_) {
      if (existing.id() == thread.id()) {
        throw IlsError(ErrorCode::duplicate_id,
                       "thread id '" + thread.id() + "' already in store");
      }
    }
    threads_.push_back(std::move(thread));
    return threads_.back();
  }

  const std::vector<Csd>& threads() const noexcept { return threads_; }
  std::size_t size() const noexcept { return threads_.size(); }

  const Csd* find_thread(std::string_view id) const {
    for (const Csd& thread : threads_) {
      if (thread.id() == id) return &thread;
    }
    return nullptr;
  }

  /// Threads containing a concept whose label matches case-insensitively,
  /// ranked by (thread score desc, anchor weight desc, canonical form asc)
  /// and truncated to top_k. One result per thread; when several concepts
  /// of a thread match, the anchor is the heaviest one (smallest id on
  /// ties).
  std::vector<QueryResult> query(std::string_view label,
                                 std::size_t top_k = 10) const {
    if (top_k < 1) {
      throw IlsError(ErrorCode::usage_error, "top_k must be >= 1");
    }
    const std::string folded = ascii_lower(label);
    std::vector<QueryResult> results;
    std::vector<std::string> keys;
    for (const Csd& thread : threads_) {
      const ConceptId* anchor = nullptr;
      double anchor_weight = 0.0;
      std::map<ConceptId, double> weights;
      for (const Concept& node : thread.concepts()) {
        if (ascii_lower(node.label()) != folded) continue;
        if (weights.empty()) weights = node_weights(thread);
        const double w = weights.at(node.id());
        if (!anchor || w > anchor_weight) {
          anchor = &node.id();
          anchor_weight = w;
        }
      }
      if (!anchor) continue;
      results.push_back(
          QueryResult{&thread, csd_score(thread), *anchor, anchor_weight});
      keys.push_back(canonical_form(thread));
    }

    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (results[x].score != results[y].score) {
        return results[x].score > results[y].score;
      }
      if (results[x].anchor_weight != results[y].anchor_weight) {
        return results[x].anchor_weight > results[y].anchor_weight;
      }
      return keys[x] < keys[y];
    });
    std::vector<QueryResult> ranked;
    ranked.reserve(std::min(top_k, order.size()));
    for (std::size_t index : order) {
      if (ranked.size() == top_k) break;
      ranked.push_back(results[index]);
    }
    return ranked;
  }

 private:
  std::vector<Csd> threads_;
};

/// Breadth-first walk of a thread from `from`, neighbors visited in
/// ascending id order; yields each node once with its node weight.
inline std::vector<std::pair<ConceptId, double>> traverse(
    const Csd& thread, const ConceptId& from) {
  if (!thread.contains(from)) {
    throw IlsError(ErrorCode::unknown_concept,
                   "concept '" + from.str() + "' is not part of thread '" +
                       thread.id() + "'");
  }
  const auto adj = adjacency(thread);
  const auto weights = node_weights(thread);
  std::vector<std::pair<ConceptId, double>> visited;
  std::set<ConceptId> seen{from};
  std::deque<ConceptId> frontier{from};
  while (!frontier.empty()) {
    const ConceptId current = frontier.front();
    frontier.pop_front();
    visited.emplace_back(current, weights.at(current));
    for (const ConceptId& neighbor : adj.at(current)) {
      if (seen.insert(neighbor).second) frontier.push_back(neighbor);
    }
  }
  return visited;
}

}  // namespace ils
