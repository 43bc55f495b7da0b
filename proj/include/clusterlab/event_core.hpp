#pragma once

// Symmetric event families: a ground set X, members E_i (s-subsets of X),
// the random subset X_p and the realized index set I = {i : E_i ⊆ X_p}.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "clusterlab/exact_prob.hpp"

namespace clusterlab {

using IndexSet = std::vector<std::uint32_t>;  // sorted, distinct

class EventFamily {
 public:
  /// Members must each have `uniformity` distinct elements below
  /// `ground_size`. They are sorted internally; duplicates are rejected.
  EventFamily(std::uint32_t ground_size, std::uint32_t uniformity, std::vector<IndexSet> members);

  std::uint32_t ground_size() const { return ground_size_; }
  std::uint32_t uniformity() const { return uniformity_; }
  std::size_t size() const { return members_.size(); }  // N
  const IndexSet& member(std::size_t i) const { return members_.at(i); }
  const std::vector<IndexSet>& members() const { return members_; }

  /// Ground elements as 64-bit words (bit e set iff e ∈ E_i).
  std::span<const std::uint64_t> member_words(std::size_t i) const {
    return {words_.data() + i * word_count_, word_count_};
  }
  std::size_t word_count() const { return word_count_; }

 private:
  std::uint32_t ground_size_;
  std::uint32_t uniformity_;
  std::vector<IndexSet> members_;
  std::size_t word_count_;
  std::vector<std::uint64_t> words_;
};

/// A set Y ⊆ [N] of member indices. Non-owning reference to its family.
class Outcome {
 public:
  /// Sorts and validates; throws std::out_of_range / std::invalid_argument.
  Outcome(const EventFamily& family, IndexSet indices);

  const EventFamily& family() const { return *family_; }
  const IndexSet& indices() const { return indices_; }
  bool contains(std::uint32_t i) const;
  /// Yᶜ in ascending order.
  IndexSet complement() const;

 private:
  const EventFamily* family_;
  IndexSet indices_;
};

/// R(Y): union of E_j over j ∈ Y.
IndexSet revealed_set(const EventFamily& family, const Outcome& y);

/// i ~ j: i != j and E_i ∩ E_j != ∅.
bool overlaps(const EventFamily& family, std::size_t i, std::size_t j);

struct IndexClasses {
  IndexSet neutral;  // no overlapping member of Y
  IndexSet simple;   // exactly one
  IndexSet complex;  // two or more
};
IndexClasses classify_indices(const EventFamily& family, const Outcome& y);

/// Pr(I = Y) > 0, i.e. no j ∉ Y has E_j ⊆ R(Y).
bool is_possible(const EventFamily& family, const Outcome& y);

/// {i : E_i ⊆ subset}; `subset` is a sorted set of ground elements.
Outcome realized_outcome(const EventFamily& family, const IndexSet& subset);

/// Neutral, then simple, then complex; ascending index within each class.
IndexSet default_chain_order(const EventFamily& family, const Outcome& y);

struct ChainReport {
  IndexSet order;                 // permutation of Yᶜ
  std::vector<Rational> pi_seq;   // π_j in `order`
  std::uint32_t revealed_size = 0;
  Rational product_prob;          // p^{|R(Y)|} ∏ (1 - π_j)
};

struct ChainOptions {
  std::optional<IndexSet> order;  // defaults to default_chain_order()
  std::uint32_t max_free_elements = 24;
  unsigned workers = 1;
};

/// Exact conditional chain for Pr(I = Y): each
/// π_j = Pr(A'_j | no earlier A'_i) is obtained by summing over all subsets
/// of X \ R(Y). Throws GuardExceeded past `max_free_elements` and
/// std::invalid_argument if Y is not possible or the order is not a
/// permutation of Yᶜ.
ChainReport conditional_chain(const EventFamily& family, const Outcome& y, const Rational& p,
                              const ChainOptions& options = {});

/// Whether every pair of members is related by an automorphism of the
/// family (brute force over ground permutations; tiny instances only).
bool is_symmetric_family(const EventFamily& family);

}  // namespace clusterlab
