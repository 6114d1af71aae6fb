#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ils/errors.hpp"

namespace ils {

/// ASCII-only case folding. Labels are free-form UTF-8 but label matching is
/// defined over ASCII letters; non-ASCII bytes pass through unchanged.
inline std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline bool is_valid_id_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

/// Machine key of a concept node. Case-sensitive; ids are global, so the
/// same token in two threads denotes the same concept.
class ConceptId {
 public:
  explicit ConceptId(std::string token) : value_(std::move(token)) {
    if (!is_valid_id_token(value_)) {
      throw IlsError(ErrorCode::invalid_id,
                     "concept id '" + value_ +
                         "' (want non-empty [A-Za-z0-9_-]+)");
    }
  }

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const ConceptId&, const ConceptId&) = default;

 private:
  std::string value_;
};

/// One knowledge node: an id plus a human-readable label. Distinct ids with
/// equal labels are distinct nodes.
class Concept {
 public:
  Concept(ConceptId id, std::string label)
      : id_(std::move(id)), label_(std::move(label)) {
    if (label_.empty()) {
      throw IlsError(ErrorCode::empty_label,
                     "concept '" + id_.str() + "' has an empty label");
    }
    if (label_.find('\n') != std::string::npos ||
        label_.find('\r') != std::string::npos) {
      throw IlsError(ErrorCode::bad_label,
                     "concept '" + id_.str() +
                         "' label contains a line break");
    }
  }

  const ConceptId& id() const noexcept { return id_; }
  const std::string& label() const noexcept { return label_; }

 private:
  ConceptId id_;
  std::string label_;
};

/// One strand of a multi-strand link: a property name and a weight in (0,1].
struct Strand {
  std::string property_label;
  double weight = 0.5;
};

namespace detail {

inline void check_strand(const Strand& strand) {
  if (strand.property_label.empty()) {
    throw IlsError(ErrorCode::bad_label, "strand property label is empty");
  }
  for (char c : strand.property_label) {
    if (c == ':' || c == ';' || c == '"' || c == ' ' || c == '\t' ||
        c == '\n' || c == '\r') {
      throw IlsError(ErrorCode::bad_label,
                     "strand label '" + strand.property_label +
                         "' contains a reserved character");
    }
  }
  if (!(strand.weight > 0.0) || !(strand.weight <= 1.0)) {
    throw IlsError(ErrorCode::bad_weight,
                   "strand weight must lie in (0,1]");
  }
}

}  // namespace detail

/// Undirected link between two distinct concepts, carrying one or more
/// strands. Endpoints are normalized so first() < second(); the affinity
/// (noisy-OR over strand weights) is fixed at construction and independent
/// of strand order.
class StrandedLink {
 public:
  StrandedLink(ConceptId a, ConceptId b,
               std::vector<Strand> strands = {Strand{"rel", 0.5}})
      : first_(std::move(a)), second_(std::move(b)),
        strands_(std::move(strands)) {
    if (first_ == second_) {
      throw IlsError(ErrorCode::self_loop,
                     "link from '" + first_.str() + "' to itself");
    }
    if (second_ < first_) std::swap(first_, second_);
    if (strands_.empty()) {
      throw IlsError(ErrorCode::bad_weight,
                     "link '" + first_.str() + "'--'" + second_.str() +
                         "' has no strands");
    }
    for (const Strand& s : strands_) detail::check_strand(s);

    // Noisy-OR over weights sorted ascending, so the value is exactly
    // invariant under strand permutation. Clamped from below by the largest
    // strand weight, which the exact value can never fall short of.
    std::vector<double> weights;
    weights.reserve(strands_.size());
    for (const Strand& s : strands_) weights.push_back(s.weight);
    std::sort(weights.begin(), weights.end());
    double miss = 1.0;
    for (double w : weights) miss *= (1.0 - w);
    affinity_ = std::max(1.0 - miss, weights.back());
  }

  const ConceptId& first() const noexcept { return first_; }
  const ConceptId& second() const noexcept { return second_; }
  const std::vector<Strand>& strands() const noexcept { return strands_; }
  double affinity() const noexcept { return affinity_; }

  bool touches(const ConceptId& id) const {
    return id == first_ || id == second_;
  }

  std::pair<const ConceptId&, const ConceptId&> endpoints() const {
    return {first_, second_};
  }

 private:
  ConceptId first_;
  ConceptId second_;
  std::vector<Strand> strands_;
  double affinity_ = 0.0;
};

/// Aggregate link thickness in (0,1]: the probability-style noisy-OR
/// 1 - prod(1 - w_i) over the strand weights.
inline double link_affinity(const StrandedLink& link) {
  return link.affinity();
}

/// Id-keyed collection of concepts. Single writer during ingestion, then
/// read-only; all queries are deterministic.
class ConceptStore {
 public:
  const Concept& add_concept(ConceptId id, std::string label) {
    return add_concept(Concept(std::move(id), std::move(label)));
  }

  const Concept& add_concept(Concept node) {
    auto [it, inserted] = by_id_.try_emplace(node.id(), std::move(node));
    if (!inserted) {
      throw IlsError(ErrorCode::duplicate_id,
                     "concept id '" + it->first.str() + "' already present");
    }
    return it->second;
  }

  bool contains(const ConceptId& id) const { return by_id_.count(id) > 0; }

  const Concept* find(const ConceptId& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &it->second;
  }

  /// All concepts whose label equals `label` ignoring ASCII case, in
  /// ascending id order.
  std::vector<Concept> find_by_label(std::string_view label) const {
    const std::string folded = ascii_lower(label);
    std::vector<Concept> out;
    for (const auto& [id, node] : by_id_) {
      if (ascii_lower(node.label()) == folded) out.push_back(node);
    }
    return out;
  }

  std::size_t size() const noexcept { return by_id_.size(); }

  auto begin() const { return by_id_.begin(); }
  auto end() const { return by_id_.end(); }

 private:
  std::map<ConceptId, Concept> by_id_;
};

}  // namespace ils
