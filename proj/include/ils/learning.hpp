#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ils/csd.hpp"
#include "ils/errors.hpp"
#include "ils/tensor.hpp"

namespace ils {

enum class Verdict {
  unclassified,
  valid,
  invalid_no_aku,
  invalid_no_sku,
  invalid_incompatible,
  invalid_weak,
};

inline std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::unclassified: return "Unclassified";
    case Verdict::valid: return "Valid";
    case Verdict::invalid_no_aku: return "InvalidNoAku";
    case Verdict::invalid_no_sku: return "InvalidNoSku";
    case Verdict::invalid_incompatible: return "InvalidIncompatible";
    case Verdict::invalid_weak: return "InvalidWeak";
  }
  return "Unclassified";
}

/// User-declared pairs of concept labels that must not appear together in
/// one derived thread. Matching is ASCII-case-insensitive; a label cannot
/// be declared incompatible with itself.
class ConstraintSet {
 public:
  void add_incompatible(std::string_view a, std::string_view b) {
    std::string fa = ascii_lower(a);
    std::string fb = ascii_lower(b);
    if (fa.empty() || fb.empty()) {
      throw IlsError(ErrorCode::empty_label, "incompatible pair label is empty");
    }
    if (fa == fb) {
      throw IlsError(ErrorCode::self_pair,
                     "label '" + fa + "' declared incompatible with itself");
    }
    if (fb < fa) std::swap(fa, fb);
    pairs_.emplace(std::move(fa), std::move(fb));
  }

  bool empty() const noexcept { return pairs_.empty(); }
  std::size_t size() const noexcept { return pairs_.size(); }

  /// Folded (min,max) pairs in deterministic order.
  const std::set<std::pair<std::string, std::string>>& pairs() const noexcept {
    return pairs_;
  }

  /// First declared pair fully contained in `folded_labels`, if any.
  std::optional<std::pair<std::string, std::string>> violation(
      const std::set<std::string>& folded_labels) const {
    for (const auto& pair : pairs_) {
      if (folded_labels.count(pair.first) && folded_labels.count(pair.second)) {
        return pair;
      }
    }
    return std::nullopt;
  }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

/// One candidate pulled out of a product cluster: a simple path of pair
/// vertices, its projection back to concepts, and the thread derived from
/// that projection. A concept is an AKU of the candidate exactly when it is
/// an AKU in either factor. `derived` is absent when the projection has no
/// AKU or no SKU; those candidates can only be classified as invalid.
struct CandidateCsd {
  enum class StructuralDefect { none, no_aku, no_sku };

  std::vector<PairVertex> product_path;
  std::vector<ConceptId> concept_trace;
  std::optional<Csd> derived;
  StructuralDefect defect = StructuralDefect::none;
  Verdict verdict = Verdict::unclassified;
  double score = 0.0;
  std::pair<std::string, std::string> factor_ids;
};

struct ExtractOptions {
  std::size_t max_path_edges = 4;
  std::size_t candidate_cap = 100000;
  /// Decay assigned to derived threads (factors keep their own).
  double derived_decay = kDefaultDecay;
};

namespace detail {

/// Projects a product path to its concept trace: per vertex emit left then
/// right (one id for coherent vertices), then collapse consecutive repeats.
inline std::vector<ConceptId> project_trace(
    const std::vector<PairVertex>& path) {
  std::vector<ConceptId> trace;
  auto emit = [&](const ConceptId& id) {
    if (trace.empty() || !(trace.back() == id)) trace.push_back(id);
  };
  for (const PairVertex& vertex : path) {
    emit(vertex.left);
    if (!vertex.coherent()) emit(vertex.right);
  }
  return trace;
}

/// Strands for a derived link: the factor strands for that concept pair,
/// left factor first, both when both threads carry the link; a single
/// default strand when the pair is a novel cross-link.
inline std::vector<Strand> derived_strands(const ConceptId& a,
                                           const ConceptId& b, const Csd& kt1,
                                           const Csd& kt2) {
  std::vector<Strand> strands;
  for (const Csd* factor : {&kt1, &kt2}) {
    if (const StrandedLink* link = factor->find_link(a, b)) {
      strands.insert(strands.end(), link->strands().begin(),
                     link->strands().end());
    }
  }
  if (strands.empty()) strands.push_back(Strand{"rel", 0.5});
  return strands;
}

inline CandidateCsd make_candidate(std::vector<PairVertex> path,
                                   const Csd& kt1, const Csd& kt2,
                                   double derived_decay) {
  CandidateCsd candidate;
  candidate.factor_ids = {kt1.id(), kt2.id()};
  candidate.concept_trace = project_trace(path);
  candidate.product_path = std::move(path);

  std::vector<ConceptId> nodes = candidate.concept_trace;
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<ConceptId> akus;
  for (const ConceptId& id : nodes) {
    if (kt1.is_aku(id) || kt2.is_aku(id)) akus.push_back(id);
  }
  if (akus.empty()) {
    candidate.defect = CandidateCsd::StructuralDefect::no_aku;
    return candidate;
  }
  if (akus.size() == nodes.size()) {
    candidate.defect = CandidateCsd::StructuralDefect::no_sku;
    return candidate;
  }

  std::vector<Concept> concepts;
  concepts.reserve(nodes.size());
  for (const ConceptId& id : nodes) {
    const Concept* found = kt1.find_concept(id);
    if (!found) found = kt2.find_concept(id);
    concepts.push_back(*found);
  }

  std::set<std::pair<ConceptId, ConceptId>> seen_pairs;
  std::vector<StrandedLink> links;
  for (std::size_t i = 0; i + 1 < candidate.concept_trace.size(); ++i) {
    ConceptId a = candidate.concept_trace[i];
    ConceptId b = candidate.concept_trace[i + 1];
    if (b < a) std::swap(a, b);
    if (!seen_pairs.emplace(a, b).second) continue;
    links.emplace_back(a, b, derived_strands(a, b, kt1, kt2));
  }

  candidate.derived =
      Csd::build("candidate", std::move(concepts), std::move(links),
                 std::move(akus), derived_decay);
  return candidate;
}

}  // namespace detail

/// Enumerates every simple path of 1..max_path_edges edges in the cluster,
/// counting a path and its reverse once, and derives a candidate thread per
/// path. Order is deterministic: depth-first from each start vertex in
/// ascending order, neighbors ascending, keeping the orientation whose front
/// vertex is the smaller endpoint. Throws BudgetExceeded beyond the cap.
inline std::vector<CandidateCsd> extract_candidates(
    const ProductCluster& cluster, ExtractOptions options = {}) {
  if (options.max_path_edges < 1) {
    throw IlsError(ErrorCode::usage_error, "max_path_edges must be >= 1");
  }
  const std::vector<PairVertex>& vertices = cluster.vertices();
  const std::size_t vertex_count = vertices.size();

  auto index_of = [&](const PairVertex& v) {
    return static_cast<std::size_t>(
        std::lower_bound(vertices.begin(), vertices.end(), v) -
        vertices.begin());
  };
  std::vector<std::vector<std::size_t>> adj(vertex_count);
  for (const ProductCluster::Edge& edge : cluster.edges()) {
    const std::size_t a = index_of(edge.a);
    const std::size_t b = index_of(edge.b);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& neighbors : adj) std::sort(neighbors.begin(), neighbors.end());

  std::vector<CandidateCsd> candidates;
  std::vector<std::size_t> path;
  std::vector<bool> on_path(vertex_count, false);

  auto emit = [&]() {
    if (candidates.size() >= options.candidate_cap) {
      throw IlsError(ErrorCode::budget_exceeded,
                     "candidate count exceeds cap of " +
                         std::to_string(options.candidate_cap));
    }
    std::vector<PairVertex> product_path;
    product_path.reserve(path.size());
    for (std::size_t index : path) product_path.push_back(vertices[index]);
    candidates.push_back(detail::make_candidate(
        std::move(product_path), cluster.left_factor(),
        cluster.right_factor(), options.derived_decay));
  };

  auto dfs = [&](auto&& self) -> void {
    const std::size_t edges = path.size() - 1;
    if (edges >= 1 && path.front() < path.back()) emit();
    if (edges == options.max_path_edges) return;
    for (std::size_t neighbor : adj[path.back()]) {
      if (on_path[neighbor]) continue;
      path.push_back(neighbor);
      on_path[neighbor] = true;
      self(self);
      on_path[neighbor] = false;
      path.pop_back();
    }
  };

  for (std::size_t start = 0; start < vertex_count; ++start) {
    path.assign(1, start);
    on_path[start] = true;
    dfs(dfs);
    on_path[start] = false;
  }
  return candidates;
}

/// Assigns the candidate's verdict by the first failing rule, in fixed
/// order: no inherited AKU, no SKU, an incompatible label pair in the trace,
/// then score below min_score. Survivors are Valid. The score is csd_score
/// of the derived thread (0 when no thread could be derived).
inline CandidateCsd classify(CandidateCsd candidate,
                             const ConstraintSet& constraints,
                             double min_score = 0.0) {
  if (candidate.defect == CandidateCsd::StructuralDefect::no_aku) {
    candidate.verdict = Verdict::invalid_no_aku;
    candidate.score = 0.0;
    return candidate;
  }
  if (candidate.defect == CandidateCsd::StructuralDefect::no_sku) {
    candidate.verdict = Verdict::invalid_no_sku;
    candidate.score = 0.0;
    return candidate;
  }
  candidate.score = csd_score(*candidate.derived);
  std::set<std::string> labels;
  for (const Concept& node : candidate.derived->concepts()) {
    labels.insert(ascii_lower(node.label()));
  }
  if (constraints.violation(labels)) {
    candidate.verdict = Verdict::invalid_incompatible;
    return candidate;
  }
  if (candidate.score < min_score) {
    candidate.verdict = Verdict::invalid_weak;
    return candidate;
  }
  candidate.verdict = Verdict::valid;
  return candidate;
}

/// Post-learning survivor set: unique canonical forms, strongest first.
struct CandidateSet {
  std::vector<CandidateCsd> valid;     // unique keys, score desc, key asc
  std::vector<CandidateCsd> rejected;  // classification order, with verdicts
};

/// Splits classified candidates into rejected and valid, deduplicating the
/// valid ones by canonical form (keeping the highest-scoring representative,
/// first-seen on ties) and ordering them by score descending with canonical
/// form as the tie break.
inline CandidateSet sieve(std::vector<CandidateCsd> candidates) {
  CandidateSet out;
  std::vector<std::string> keys;
  std::map<std::string, std::size_t> best_by_key;
  for (CandidateCsd& candidate : candidates) {
    if (candidate.verdict == Verdict::unclassified) {
      throw IlsError(ErrorCode::usage_error,
                     "sieve requires classified candidates");
    }
    if (candidate.verdict != Verdict::valid) {
      out.rejected.push_back(std::move(candidate));
      continue;
    }
    std::string key = canonical_form(*candidate.derived);
    auto [it, inserted] = best_by_key.try_emplace(key, out.valid.size());
    if (inserted) {
      out.valid.push_back(std::move(candidate));
      keys.push_back(std::move(key));
    } else if (candidate.score > out.valid[it->second].score) {
      out.valid[it->second] = std::move(candidate);
    }
  }

  std::vector<std::size_t> order(out.valid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (out.valid[x].score != out.valid[y].score) {
      return out.valid[x].score > out.valid[y].score;
    }
    return keys[x] < keys[y];
  });
  std::vector<CandidateCsd> sorted;
  sorted.reserve(out.valid.size());
  for (std::size_t index : order) sorted.push_back(std::move(out.valid[index]));
  out.valid = std::move(sorted);
  return out;
}

/// The surviving threads re-identified as "<left>x<right>-<rank>" with rank
/// the 1-based position in the valid ordering.
inline std::vector<Csd> derived_threads(const CandidateSet& set) {
  std::vector<Csd> threads;
  threads.reserve(set.valid.size());
  for (std::size_t i = 0; i < set.valid.size(); ++i) {
    const CandidateCsd& candidate = set.valid[i];
    threads.push_back(candidate.derived->with_id(
        candidate.factor_ids.first + "x" + candidate.factor_ids.second + "-" +
        std::to_string(i + 1)));
  }
  return threads;
}

struct CombineOptions {
  double decay = kDefaultDecay;
  std::size_t max_path_edges = 4;
  std::size_t candidate_cap = 100000;
  double min_score = 0.0;
};

struct CombineResult {
  CandidateSet set;
  std::vector<Csd> derived;
};

/// Full pipeline for one thread pair: tensor product, candidate extraction,
/// classification, sieve, and derived-thread naming.
inline CombineResult combine_threads(const Csd& kt1, const Csd& kt2,
                                     const ConstraintSet& constraints,
                                     CombineOptions options = {}) {
  const ProductCluster cluster = tensor_product(kt1, kt2);
  ExtractOptions extract_options;
  extract_options.max_path_edges = options.max_path_edges;
  extract_options.candidate_cap = options.candidate_cap;
  extract_options.derived_decay = options.decay;
  std::vector<CandidateCsd> candidates =
      extract_candidates(cluster, extract_options);
  for (CandidateCsd& candidate : candidates) {
    candidate = classify(std::move(candidate), constraints, options.min_score);
  }
  CombineResult result;
  result.set = sieve(std::move(candidates));
  result.derived = derived_threads(result.set);
  return result;
}

}  // namespace ils
