#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netsmt {

using PlaceIndex = std::size_t;

struct Transition {
  std::string id;
  std::vector<PlaceIndex> inputs;   // sorted, unique
  std::vector<PlaceIndex> outputs;  // sorted, unique

  bool operator==(const Transition&) const = default;
};

/// Ordinary safe place/transition net. Arcs are sets of place indices, so
/// every arc has multiplicity one. Place order is declaration order.
struct PetriNet {
  std::string name = "net";
  std::vector<std::string> places;
  std::vector<Transition> transitions;
  std::vector<PlaceIndex> initial_marking;  // sorted, unique

  std::size_t place_count() const { return places.size(); }
  bool operator==(const PetriNet&) const = default;
};

/// Parses the line-oriented .pnet format:
///
///     net <name>
///     places <id> <id> ...
///     transition <id>: <in-ids> -> <out-ids>
///     marking <id> <id> ...
///
/// `#` starts a comment. `places` and `marking` lines are cumulative.
/// Throws Error (SyntaxError, DuplicateIdentifier, UnknownPlaceInArc,
/// EmptyNet); messages carry the offending line number.
PetriNet parse_net(std::string_view text);

/// Inverse of parse_net for any valid net.
std::string print_net(const PetriNet& net);

bool is_identifier(std::string_view token);

/// Bijection place -> 1..card(P), following declaration order.
class PlaceNumbering {
 public:
  PlaceNumbering() = default;
  explicit PlaceNumbering(std::vector<std::string> places);

  /// 1-based number of `place`; throws std::out_of_range for unknown names.
  std::size_t number(std::string_view place) const;
  /// Name of the place numbered `k` (1-based).
  const std::string& place(std::size_t k) const { return order_.at(k - 1); }
  std::size_t size() const { return order_.size(); }
  const std::vector<std::string>& places() const { return order_; }

  bool operator==(const PlaceNumbering& other) const { return order_ == other.order_; }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::size_t> index_;
};

PlaceNumbering numbering(const PetriNet& net);

}  // namespace netsmt
