#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netsmt/net.hpp"

namespace netsmt {

/// Set of marked places of a safe net, stored as a fixed-size bitset.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t place_count) : size_(place_count), words_((place_count + 63) / 64, 0) {}
  Marking(std::size_t place_count, const std::vector<PlaceIndex>& marked);

  std::size_t place_count() const { return size_; }
  bool contains(PlaceIndex p) const { return (words_[p / 64] >> (p % 64)) & 1U; }
  void insert(PlaceIndex p) { words_[p / 64] |= std::uint64_t{1} << (p % 64); }
  void erase(PlaceIndex p) { words_[p / 64] &= ~(std::uint64_t{1} << (p % 64)); }
  std::vector<PlaceIndex> places() const;
  std::size_t hash() const;

  bool operator==(const Marking&) const = default;
  auto operator<=>(const Marking& other) const { return words_ <=> other.words_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const { return m.hash(); }
};

/// Symmetric irreflexive relation over places 0..n-1, stored as an
/// adjacency matrix. Pairs are unordered by construction.
class ConcurrencyRelation {
 public:
  ConcurrencyRelation() = default;
  explicit ConcurrencyRelation(std::size_t place_count);

  std::size_t place_count() const { return size_; }
  /// Adds {a, b}. Self pairs are ignored.
  void add(PlaceIndex a, PlaceIndex b);
  bool concurrent(PlaceIndex a, PlaceIndex b) const { return a != b && adj_[a * size_ + b]; }
  std::size_t degree(PlaceIndex p) const { return degree_[p]; }
  std::size_t pair_count() const { return pairs_; }
  /// All pairs (a, b) with a < b, in ascending lexicographic order.
  std::vector<std::pair<PlaceIndex, PlaceIndex>> pairs() const;
  std::vector<PlaceIndex> neighbours(PlaceIndex p) const;

  bool operator==(const ConcurrencyRelation&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<bool> adj_;
  std::vector<std::size_t> degree_;
  std::size_t pairs_ = 0;
};

/// All markings reachable from the initial marking under interleaving
/// semantics, sorted. Throws NotSafe when a firing would put a second token
/// into a place and StateLimitExceeded when more than `state_limit`
/// markings are discovered.
std::vector<Marking> explore_reachable(const PetriNet& net, std::size_t state_limit);

/// Pairs of distinct places marked together in at least one marking.
ConcurrencyRelation concurrency_relation(const std::vector<Marking>& markings);

/// Reads the .conc format: one "p q" pair per line, '#' comments allowed.
ConcurrencyRelation parse_conc(std::string_view text, const PlaceNumbering& places);
std::string print_conc(const ConcurrencyRelation& rel, const PlaceNumbering& places);

/// Exact chromatic number of the conflict graph, by DSATUR branch and
/// bound. `budget` bounds the number of search nodes (BudgetExceeded).
std::size_t chromatic_number(const ConcurrencyRelation& rel, std::uint64_t budget = 50'000'000);

/// Colors used by first-fit greedy coloring in place order; an upper bound
/// on the chromatic number.
std::size_t greedy_color_count(const ConcurrencyRelation& rel);

}  // namespace netsmt
