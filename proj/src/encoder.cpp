#include "netsmt/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "netsmt/error.hpp"

namespace netsmt {

std::string_view to_string(Fragment f) {
  switch (f) {
    case Fragment::QF_BV: return "QF_BV";
    case Fragment::QF_DT: return "QF_DT";
    case Fragment::QF_IDL: return "QF_IDL";
    case Fragment::QF_UFBV: return "QF_UFBV";
    case Fragment::QF_UFDT: return "QF_UFDT";
    case Fragment::QF_UFIDL: return "QF_UFIDL";
  }
  return {};
}

std::optional<Fragment> parse_fragment(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto f : kAllFragments) {
    if (to_string(f) == upper) return f;
  }
  return std::nullopt;
}

bool has_uninterpreted_function(Fragment f) {
  return f == Fragment::QF_UFBV || f == Fragment::QF_UFDT || f == Fragment::QF_UFIDL;
}

std::string_view to_string(Verdict v) { return v == Verdict::Sat ? "sat" : "unsat"; }

std::size_t index_width(std::size_t place_count) {
  std::size_t w = 0;
  while ((std::size_t{1} << w) < place_count) ++w;
  return std::max<std::size_t>(w, 1);
}

BitVector place_code(std::size_t k, std::size_t width) { return BitVector::from_uint(width, k - 1); }

namespace {

const std::set<std::string>& reserved_symbols() {
  static const std::set<std::string> words{
      "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite", "let", "forall", "exists",
      "match", "par", "as", "_", "!", "Bool", "Int", "Unit", "Place", "u", "BINARY", "DECIMAL", "HEXADECIMAL",
      "NUMERAL", "STRING", "bvand", "extract", "check-sat", "assert", "exit"};
  return words;
}

std::string constant_name(Fragment f, std::size_t k) {
  return (f == Fragment::QF_BV ? "b_p" : "x_p") + std::to_string(k);
}

std::string unit_name(std::size_t u) { return "u" + std::to_string(u); }

}  // namespace

std::vector<std::string> place_constructor_names(const PlaceNumbering& num, std::size_t num_units) {
  std::set<std::string> taken = reserved_symbols();
  for (std::size_t u = 1; u <= num_units; ++u) taken.insert(unit_name(u));
  // Identifiers that are free keep their spelling; reserve them first so a
  // prefixed name never steals a later place's own identifier.
  std::vector<bool> clashes(num.size(), false);
  std::set<std::string> own;
  for (std::size_t k = 1; k <= num.size(); ++k) {
    const std::string& p = num.place(k);
    clashes[k - 1] = taken.contains(p) || !own.insert(p).second;
  }
  taken.insert(own.begin(), own.end());
  std::vector<std::string> names;
  names.reserve(num.size());
  for (std::size_t k = 1; k <= num.size(); ++k) {
    std::string name = num.place(k);
    if (clashes[k - 1]) {
      do {
        name = "p_" + name;
      } while (taken.contains(name));
      taken.insert(name);
    }
    names.push_back(std::move(name));
  }
  return names;
}

std::vector<Term> place_terms(const PlaceNumbering& num, const EncodingConfig& cfg) {
  std::vector<Term> terms;
  terms.reserve(num.size());
  switch (cfg.fragment) {
    case Fragment::QF_BV:
    case Fragment::QF_DT:
    case Fragment::QF_IDL:
      for (std::size_t k = 1; k <= num.size(); ++k) terms.push_back(symbol(constant_name(cfg.fragment, k)));
      break;
    case Fragment::QF_UFBV: {
      std::size_t w = index_width(num.size());
      for (std::size_t k = 1; k <= num.size(); ++k) terms.push_back(apply("u", {bv_literal(place_code(k, w))}));
      break;
    }
    case Fragment::QF_UFDT:
      for (auto& c : place_constructor_names(num, cfg.num_units)) terms.push_back(apply("u", {symbol(c)}));
      break;
    case Fragment::QF_UFIDL:
      for (std::size_t k = 1; k <= num.size(); ++k) {
        terms.push_back(apply("u", {int_literal(static_cast<std::int64_t>(k))}));
      }
      break;
  }
  return terms;
}

std::size_t symmetry_bound(Fragment f, std::size_t k, std::size_t num_units) {
  switch (f) {
    case Fragment::QF_BV:
    case Fragment::QF_UFBV:
      // some bit among positions 1..min(#p, n) is set
      return std::min(k, num_units);
    case Fragment::QF_DT:
    case Fragment::QF_UFDT:
      // x_p in 1..#p when #p < n; otherwise any of the n constructors
      return k < num_units ? k : num_units;
    case Fragment::QF_IDL:
    case Fragment::QF_UFIDL:
      // x_p in 1..#p when #p < n; otherwise the bounding disjunction 1..n
      return k < num_units ? k : num_units;
  }
  return num_units;
}

SmtScript encode(const ConcurrencyRelation& rel, const PlaceNumbering& num, const EncodingConfig& cfg) {
  const std::size_t n = cfg.num_units;
  const std::size_t places = num.size();
  if (n < 1) throw std::invalid_argument("number of units must be at least 1");
  if (rel.place_count() != places) throw std::invalid_argument("relation and numbering disagree on place count");
  if (places == 0) throw Error(ErrorKind::EmptyNet, "no places to encode");

  const Fragment f = cfg.fragment;
  const bool bitvec = f == Fragment::QF_BV || f == Fragment::QF_UFBV;
  if (bitvec && n > cfg.max_width) {
    throw Error(ErrorKind::WidthOverflow,
                std::to_string(n) + " units exceed the maximum bit-vector width " + std::to_string(cfg.max_width));
  }
  if (f == Fragment::QF_UFBV && index_width(places) > cfg.max_width) {
    throw Error(ErrorKind::WidthOverflow, "place index width exceeds " + std::to_string(cfg.max_width));
  }

  SmtScript script;
  script.logic = std::string(to_string(f));

  Sort value_sort = Sort::integer();
  if (bitvec) {
    value_sort = Sort::bitvec(n);
  } else if (f == Fragment::QF_DT || f == Fragment::QF_UFDT) {
    DatatypeDecl unit{"Unit", {}};
    for (std::size_t u = 1; u <= n; ++u) unit.constructors.push_back(unit_name(u));
    script.datatypes.push_back(std::move(unit));
    value_sort = Sort::datatype("Unit");
  }

  switch (f) {
    case Fragment::QF_BV:
    case Fragment::QF_DT:
    case Fragment::QF_IDL:
      for (std::size_t k = 1; k <= places; ++k) script.functions.push_back({constant_name(f, k), {}, value_sort});
      break;
    case Fragment::QF_UFBV:
      script.functions.push_back({"u", {Sort::bitvec(index_width(places))}, value_sort});
      break;
    case Fragment::QF_UFDT:
      script.datatypes.push_back({"Place", place_constructor_names(num, n)});
      script.functions.push_back({"u", {Sort::datatype("Place")}, value_sort});
      break;
    case Fragment::QF_UFIDL:
      script.functions.push_back({"u", {Sort::integer()}, value_sort});
      break;
  }

  const auto terms = place_terms(num, cfg);

  for (auto [a, b] : rel.pairs()) {
    if (bitvec) {
      script.assertions.push_back(eq(bvand(terms[a], terms[b]), bv_literal(BitVector(n))));
    } else {
      script.assertions.push_back(distinct(terms[a], terms[b]));
    }
  }

  for (std::size_t k = 1; k <= places; ++k) {
    const Term& x = terms[k - 1];
    std::vector<Term> disjuncts;
    if (bitvec) {
      for (std::size_t u = 1; u <= std::min(k, n); ++u) {
        disjuncts.push_back(distinct(extract(u - 1, 0, x), bv_literal(BitVector(u))));
      }
    } else if (f == Fragment::QF_DT || f == Fragment::QF_UFDT) {
      if (k >= n) continue;
      for (std::size_t u = 1; u <= k; ++u) disjuncts.push_back(eq(x, symbol(unit_name(u))));
    } else {
      std::size_t bound = k < n ? k : n;
      for (std::size_t u = 1; u <= bound; ++u) {
        disjuncts.push_back(eq(x, int_literal(static_cast<std::int64_t>(u))));
      }
    }
    script.assertions.push_back(disjunction(std::move(disjuncts)));
  }

  if (cfg.emit_status_hint) {
    try {
      script.status = std::string(to_string(oracle_sat(rel, num, cfg)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BudgetExceeded) throw;
      script.status = "unknown";
    }
  }
  return script;
}

std::string smt_file_name(std::string_view net_name, const EncodingConfig& cfg) {
  return std::string(net_name) + "_" + std::string(to_string(cfg.fragment)) + "_n" + std::to_string(cfg.num_units) +
         ".smt2";
}

std::string Cardinality::to_string() const {
  switch (kind) {
    case Kind::Finite: return std::to_string(value);
    case Kind::PowerOfTwo: return "2^" + std::to_string(value);
    case Kind::Infinite: return "inf";
  }
  return {};
}

namespace {

Cardinality cardinality_of(const Sort& s, const SmtScript& script) {
  switch (s.kind) {
    case Sort::Kind::Bool: return Cardinality::finite(2);
    case Sort::Kind::Int: return Cardinality::infinite();
    case Sort::Kind::BitVec: return Cardinality::power_of_two(s.width);
    case Sort::Kind::Datatype:
      for (const auto& dt : script.datatypes) {
        if (dt.name == s.name) return Cardinality::finite(dt.constructors.size());
      }
      throw std::invalid_argument("undeclared datatype '" + s.name + "'");
  }
  return {};
}

}  // namespace

FormulaStats formula_stats(const SmtScript& script) {
  FormulaStats stats;
  stats.num_asserts = script.assertions.size();
  for (const auto& a : script.assertions) stats.num_ops += count_operators(a);

  auto uf = std::find_if(script.functions.begin(), script.functions.end(),
                         [](const FunctionDecl& f) { return !f.params.empty(); });
  if (uf != script.functions.end()) {
    stats.card_in = cardinality_of(uf->params.front(), script);
    stats.card_out = cardinality_of(uf->result, script);
  } else {
    stats.num_variables = script.functions.size();
    if (!script.functions.empty()) stats.card = cardinality_of(script.functions.front().result, script);
  }
  return stats;
}

namespace {

class ColoringSearch {
 public:
  ColoringSearch(const ConcurrencyRelation& rel, const EncodingConfig& cfg, std::uint64_t budget)
      : rel_(rel), cfg_(cfg), budget_(budget), unit_(rel.place_count(), 0) {}

  bool run() { return place(0); }
  const std::vector<std::size_t>& units() const { return unit_; }

 private:
  bool place(PlaceIndex p) {
    if (p == unit_.size()) return true;
    if (++nodes_ > budget_) {
      throw Error(ErrorKind::BudgetExceeded, "oracle search exceeded " + std::to_string(budget_) + " nodes");
    }
    const std::size_t bound = symmetry_bound(cfg_.fragment, p + 1, cfg_.num_units);
    for (std::size_t u = 1; u <= bound; ++u) {
      bool clash = false;
      for (PlaceIndex q = 0; q < p && !clash; ++q) clash = unit_[q] == u && rel_.concurrent(p, q);
      if (clash) continue;
      unit_[p] = u;
      if (place(p + 1)) return true;
    }
    unit_[p] = 0;
    return false;
  }

  const ConcurrencyRelation& rel_;
  const EncodingConfig& cfg_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<std::size_t> unit_;
};

}  // namespace

std::optional<std::vector<std::size_t>> oracle_coloring(const ConcurrencyRelation& rel, const PlaceNumbering& num,
                                                        const EncodingConfig& cfg, std::uint64_t budget) {
  if (rel.place_count() != num.size()) throw std::invalid_argument("relation and numbering disagree on place count");
  if (cfg.num_units < 1) throw std::invalid_argument("number of units must be at least 1");
  ColoringSearch search(rel, cfg, budget);
  if (!search.run()) return std::nullopt;
  return search.units();
}

Verdict oracle_sat(const ConcurrencyRelation& rel, const PlaceNumbering& num, const EncodingConfig& cfg,
                   std::uint64_t budget) {
  return oracle_coloring(rel, num, cfg, budget) ? Verdict::Sat : Verdict::Unsat;
}

}  // namespace netsmt
