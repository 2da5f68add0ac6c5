#include "netsmt/decomposer.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "netsmt/error.hpp"

namespace netsmt {

UnitAssignment assignment_from_model(const ModelAssignment& model, const EncodingConfig& cfg,
                                     const PlaceNumbering& num) {
  const std::size_t n = cfg.num_units;
  const auto terms = place_terms(num, cfg);
  UnitAssignment out;
  out.units.resize(num.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string key = to_string(terms[i]);
    auto it = model.values.find(key);
    if (it == model.values.end()) {
      throw Error(ErrorKind::MissingVariable, "model has no value for " + key + " (place " + num.place(i + 1) + ")");
    }
    const Value& v = it->second;
    auto out_of_range = [&](const std::string& what) {
      return Error(ErrorKind::ValueOutOfRange, key + " = " + what + " is not a unit in 1.." + std::to_string(n));
    };
    std::set<std::size_t>& units = out.units[i];
    switch (v.kind) {
      case Value::Kind::BitVec:
        if (v.bits.width() != n || v.bits.is_zero()) throw out_of_range(v.to_string());
        for (std::size_t b = 0; b < n; ++b) {
          if (v.bits.bit(b)) units.insert(b + 1);
        }
        break;
      case Value::Kind::Int:
        if (v.integer < 1 || static_cast<std::size_t>(v.integer) > n) throw out_of_range(v.to_string());
        units.insert(static_cast<std::size_t>(v.integer));
        break;
      case Value::Kind::Constructor: {
        std::size_t u = 0;
        const std::string& c = v.constructor;
        if (c.size() > 1 && c[0] == 'u' && std::all_of(c.begin() + 1, c.end(), ::isdigit) && c[1] != '0') {
          u = std::stoul(c.substr(1));
        }
        if (u < 1 || u > n) throw out_of_range(v.to_string());
        units.insert(u);
        break;
      }
      case Value::Kind::Bool: throw out_of_range(v.to_string());
    }
  }
  return out;
}

Partition ffd_repair(const UnitAssignment& assign, const ConcurrencyRelation& rel) {
  const std::size_t count = assign.units.size();
  if (rel.place_count() != count) throw std::invalid_argument("assignment and relation disagree on place count");

  std::vector<PlaceIndex> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](PlaceIndex a, PlaceIndex b) { return rel.degree(a) > rel.degree(b); });

  Partition part;
  part.unit_of.assign(count, 0);
  for (PlaceIndex p : order) {
    for (std::size_t u : assign.units[p]) {
      bool fits = true;
      for (PlaceIndex q = 0; q < count && fits; ++q) fits = !(part.unit_of[q] == u && rel.concurrent(p, q));
      if (fits) {
        part.unit_of[p] = u;
        break;
      }
    }
    if (part.unit_of[p] == 0) {
      throw Error(ErrorKind::ConflictDetected,
                  "place #" + std::to_string(p + 1) + " has no allowed unit free of concurrent places");
    }
  }
  return part;
}

std::string Violation::describe(const PlaceNumbering& num) const {
  switch (kind) {
    case Kind::Unassigned: return "place " + num.place(place + 1) + " is not assigned to a unit";
    case Kind::UnitOutOfRange:
      return "place " + num.place(place + 1) + " is assigned to out-of-range unit " + std::to_string(unit);
    case Kind::SharedUnit:
      return "concurrent places " + num.place(place + 1) + " and " + num.place(other + 1) + " share unit " +
             std::to_string(unit);
  }
  return {};
}

std::vector<Violation> validate_partition(const Partition& part, const ConcurrencyRelation& rel, std::size_t n) {
  std::vector<Violation> out;
  const std::size_t count = rel.place_count();
  for (PlaceIndex p = 0; p < count; ++p) {
    std::size_t u = p < part.unit_of.size() ? part.unit_of[p] : 0;
    if (u == 0) out.push_back({Violation::Kind::Unassigned, p, 0, 0});
    else if (u > n) out.push_back({Violation::Kind::UnitOutOfRange, p, 0, u});
  }
  for (auto [a, b] : rel.pairs()) {
    if (a >= part.unit_of.size() || b >= part.unit_of.size()) continue;
    if (part.unit_of[a] != 0 && part.unit_of[a] == part.unit_of[b]) {
      out.push_back({Violation::Kind::SharedUnit, a, b, part.unit_of[a]});
    }
  }
  return out;
}

std::string Nupn::to_text() const {
  std::string out = "root\n";
  for (std::size_t i = 0; i < units.size(); ++i) {
    out += "unit u" + std::to_string(i + 1) + ":";
    for (const auto& p : units[i]) out += " " + p;
    out += "\n";
  }
  return out;
}

Nupn emit_nupn(const Partition& part, const PetriNet& net, const ConcurrencyRelation& rel) {
  std::size_t max_unit = 0;
  for (auto u : part.unit_of) max_unit = std::max(max_unit, u);
  auto violations = validate_partition(part, rel, std::max<std::size_t>(max_unit, 1));
  if (part.unit_of.size() != net.place_count() || rel.place_count() != net.place_count() || !violations.empty()) {
    std::string what = "partition is not a valid decomposition";
    if (!violations.empty()) what += ": " + violations.front().describe(numbering(net));
    throw Error(ErrorKind::InvalidPartition, what);
  }
  std::map<std::size_t, std::vector<std::string>> classes;
  for (PlaceIndex p = 0; p < net.place_count(); ++p) classes[part.unit_of[p]].push_back(net.places[p]);
  Nupn nupn;
  for (auto& [unit, places] : classes) nupn.units.push_back(std::move(places));
  return nupn;
}

Nupn parse_nupn(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  Nupn nupn;
  bool root = false;
  auto fail = [&](const std::string& what) {
    return Error(ErrorKind::SyntaxError, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string first;
    if (!(words >> first)) continue;
    if (!root) {
      if (first != "root") throw fail("expected 'root'");
      root = true;
      continue;
    }
    std::string label;
    if (first != "unit" || !(words >> label) || label != "u" + std::to_string(nupn.units.size() + 1) + ":") {
      throw fail("expected 'unit u" + std::to_string(nupn.units.size() + 1) + ": ...'");
    }
    std::vector<std::string> places;
    for (std::string p; words >> p;) places.push_back(p);
    nupn.units.push_back(std::move(places));
  }
  if (!root) throw fail("missing 'root' line");
  return nupn;
}

bool is_unit_safe(const Nupn& nupn, const ConcurrencyRelation& rel, const PlaceNumbering& num) {
  for (const auto& unit : nupn.units) {
    for (std::size_t i = 0; i < unit.size(); ++i) {
      for (std::size_t j = i + 1; j < unit.size(); ++j) {
        if (rel.concurrent(num.number(unit[i]) - 1, num.number(unit[j]) - 1)) return false;
      }
    }
  }
  return true;
}

std::size_t find_min_units(const ConcurrencyRelation& rel, const DecisionProcedure& decide) {
  std::size_t lo = 1;
  std::size_t hi = std::max<std::size_t>(1, greedy_color_count(rel));
  // invariant: decide(hi) is SAT (greedy coloring is a witness), and every
  // n < lo is UNSAT
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (decide(mid) == Verdict::Sat) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

std::size_t find_min_units(const ConcurrencyRelation& rel, const PlaceNumbering& num, Fragment fragment) {
  return find_min_units(rel, [&](std::size_t n) {
    EncodingConfig cfg;
    cfg.fragment = fragment;
    cfg.num_units = n;
    return oracle_sat(rel, num, cfg);
  });
}

}  // namespace netsmt
