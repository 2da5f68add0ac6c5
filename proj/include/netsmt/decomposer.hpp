#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "netsmt/concurrency.hpp"
#include "netsmt/encoder.hpp"
#include "netsmt/net.hpp"
#include "netsmt/smt.hpp"

namespace netsmt {

/// Units a model allows for each place, indexed by #p - 1. Bit-vector
/// models may allow several units per place.
struct UnitAssignment {
  std::vector<std::set<std::size_t>> units;
  bool operator==(const UnitAssignment&) const = default;
};

/// One unit per place, indexed by #p - 1; 0 marks an unassigned place.
struct Partition {
  std::vector<std::size_t> unit_of;
  bool operator==(const Partition&) const = default;
};

UnitAssignment assignment_from_model(const ModelAssignment& model, const EncodingConfig& cfg,
                                     const PlaceNumbering& num);

/// First-fit decreasing: places in decreasing conflict degree (ties by
/// ascending #p) each take the smallest allowed unit not already used by
/// a concurrent place. Throws Error(ConflictDetected) if none is left.
Partition ffd_repair(const UnitAssignment& assign, const ConcurrencyRelation& rel);

struct Violation {
  enum class Kind { Unassigned, UnitOutOfRange, SharedUnit };
  Kind kind;
  PlaceIndex place = 0;
  PlaceIndex other = 0;  // SharedUnit only
  std::size_t unit = 0;

  std::string describe(const PlaceNumbering& num) const;
  bool operator==(const Violation&) const = default;
};

/// Empty when `part` maps every place to 1..n and no concurrent pair
/// shares a unit.
std::vector<Violation> validate_partition(const Partition& part, const ConcurrencyRelation& rel, std::size_t n);

/// Flat NUPN: a root unit whose children are the leaf units.
struct Nupn {
  std::vector<std::vector<std::string>> units;  // leaf units, places in declaration order
  std::string to_text() const;
  bool operator==(const Nupn&) const = default;
};

/// Leaf units for the nonempty partition classes, renumbered densely in
/// ascending unit order. Throws Error(InvalidPartition) when the
/// partition does not validate against `rel`.
Nupn emit_nupn(const Partition& part, const PetriNet& net, const ConcurrencyRelation& rel);

/// Reads the text produced by Nupn::to_text.
Nupn parse_nupn(std::string_view text);

/// True when no two places of any leaf unit are concurrent.
bool is_unit_safe(const Nupn& nupn, const ConcurrencyRelation& rel, const PlaceNumbering& num);

using DecisionProcedure = std::function<Verdict(std::size_t num_units)>;

/// Smallest n in [1, greedy upper bound] that `decide` reports SAT, by
/// binary search. `decide` throws Error(SolverInconclusive) when it
/// cannot answer.
std::size_t find_min_units(const ConcurrencyRelation& rel, const DecisionProcedure& decide);

/// find_min_units backed by oracle_sat.
std::size_t find_min_units(const ConcurrencyRelation& rel, const PlaceNumbering& num, Fragment fragment);

}  // namespace netsmt
