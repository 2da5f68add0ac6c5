#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netsmt/concurrency.hpp"
#include "netsmt/net.hpp"
#include "netsmt/smt.hpp"

namespace netsmt {

enum class Fragment { QF_BV, QF_DT, QF_IDL, QF_UFBV, QF_UFDT, QF_UFIDL };

inline constexpr std::array<Fragment, 6> kAllFragments{Fragment::QF_BV,   Fragment::QF_DT,   Fragment::QF_IDL,
                                                       Fragment::QF_UFBV, Fragment::QF_UFDT, Fragment::QF_UFIDL};

/// Logic name, e.g. "QF_UFBV".
std::string_view to_string(Fragment f);
/// Case-insensitive inverse of to_string.
std::optional<Fragment> parse_fragment(std::string_view name);
bool has_uninterpreted_function(Fragment f);

struct EncodingConfig {
  Fragment fragment = Fragment::QF_BV;
  std::size_t num_units = 1;
  bool emit_status_hint = false;
  /// Largest bit-vector width the encoder will emit (WidthOverflow above).
  std::size_t max_width = 1024;
};

/// Width of the UF argument in QF_UFBV: ceil(log2(place_count)), at least 1.
std::size_t index_width(std::size_t place_count);

/// Argument code of place number `k` in QF_UFBV: k-1 in binary.
BitVector place_code(std::size_t k, std::size_t width);

/// Constructor names of the Place datatype in QF_UFDT, one per place in
/// numbering order. Source identifiers are kept unless they collide with
/// another symbol of the script, in which case they get a `p_` prefix.
std::vector<std::string> place_constructor_names(const PlaceNumbering& num, std::size_t num_units);

/// The term standing for "the units of place #p" (b_p, x_p, u(lambda(#p)),
/// u(p) or u(#p)), indexed by #p - 1.
std::vector<Term> place_terms(const PlaceNumbering& num, const EncodingConfig& cfg);

/// Builds the partition formula "places split into cfg.num_units
/// conflict-free units" in cfg.fragment. Concurrent pairs are asserted in
/// ascending (#p1, #p2) order, then the per-place constraints in
/// ascending #p. Throws Error(WidthOverflow).
SmtScript encode(const ConcurrencyRelation& rel, const PlaceNumbering& num, const EncodingConfig& cfg);

/// `<net>_<FRAGMENT>_n<units>.smt2`
std::string smt_file_name(std::string_view net_name, const EncodingConfig& cfg);

struct Cardinality {
  enum class Kind { Finite, PowerOfTwo, Infinite };
  Kind kind = Kind::Finite;
  std::uint64_t value = 0;  // count, or the exponent for PowerOfTwo

  static Cardinality finite(std::uint64_t n) { return {Kind::Finite, n}; }
  static Cardinality power_of_two(std::uint64_t e) { return {Kind::PowerOfTwo, e}; }
  static Cardinality infinite() { return {Kind::Infinite, 0}; }

  /// "16", "2^17" or "inf".
  std::string to_string() const;
  bool operator==(const Cardinality&) const = default;
};

/// Table columns of a formula. num_variables and card are set for the
/// plain fragments; card_in and card_out for the UF fragments.
struct FormulaStats {
  std::optional<std::size_t> num_variables;
  std::optional<Cardinality> card;
  std::optional<Cardinality> card_in;
  std::optional<Cardinality> card_out;
  std::size_t num_asserts = 0;
  std::size_t num_ops = 0;

  bool operator==(const FormulaStats&) const = default;
};

/// Measured from the script's declarations and assertions. num_ops counts
/// every operator application node (=, distinct, or, bvand, extract and
/// UF application); symbols and literals are leaves.
FormulaStats formula_stats(const SmtScript& script);

enum class Verdict { Sat, Unsat };
std::string_view to_string(Verdict v);

/// Largest unit a place numbered `k` may take under the fragment's
/// symmetry-breaking constraints.
std::size_t symmetry_bound(Fragment f, std::size_t k, std::size_t num_units);

/// Backtracking search for a coloring c with c(p) <= symmetry_bound and
/// distinct units on concurrent pairs. Returns units indexed by #p - 1, or
/// nullopt when none exists. Throws Error(BudgetExceeded).
std::optional<std::vector<std::size_t>> oracle_coloring(const ConcurrencyRelation& rel, const PlaceNumbering& num,
                                                        const EncodingConfig& cfg,
                                                        std::uint64_t budget = 50'000'000);

Verdict oracle_sat(const ConcurrencyRelation& rel, const PlaceNumbering& num, const EncodingConfig& cfg,
                   std::uint64_t budget = 50'000'000);

}  // namespace netsmt
