#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netsmt/bench.hpp"
#include "netsmt/concurrency.hpp"
#include "netsmt/decomposer.hpp"
#include "netsmt/encoder.hpp"
#include "netsmt/error.hpp"
#include "netsmt/net.hpp"
#include "netsmt/smt.hpp"
#include "netsmt/solver.hpp"

namespace py = pybind11;
using namespace netsmt;

namespace {

Fragment fragment_arg(const std::string& name) {
  auto f = parse_fragment(name);
  if (!f) throw py::value_error("unknown fragment '" + name + "'");
  return *f;
}

struct Loaded {
  PetriNet net;
  PlaceNumbering num;
  ConcurrencyRelation rel;
};

Loaded load(const std::string& net_text, std::size_t state_limit) {
  Loaded l;
  l.net = parse_net(net_text);
  l.num = numbering(l.net);
  l.rel = concurrency_relation(explore_reachable(l.net, state_limit));
  return l;
}

EncodingConfig config(const std::string& fragment, std::size_t units, bool status_hint = false) {
  if (units == 0) throw py::value_error("units must be at least 1");
  EncodingConfig cfg;
  cfg.fragment = fragment_arg(fragment);
  cfg.num_units = units;
  cfg.emit_status_hint = status_hint;
  return cfg;
}

py::object cardinality(const std::optional<Cardinality>& c) {
  if (!c) return py::none();
  return py::str(c->to_string());
}

constexpr std::size_t kStateLimit = 1'000'000;

}  // namespace

PYBIND11_MODULE(_netsmt, m) {
  m.doc() = "Partition safe Petri nets into sequential units through SMT formulas";

  static py::exception<Error> error(m, "NetsmtError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error)(e.what());
      instance.attr("kind") = py::str(std::string(to_string(e.kind())));
      PyErr_SetObject(error.ptr(), instance.ptr());
    }
  });

  m.def("fragments", [] {
    std::vector<std::string> out;
    for (Fragment f : kAllFragments) out.emplace_back(to_string(f));
    return out;
  }, "Names of the six supported logic fragments.");

  m.def("places", [](const std::string& net_text) { return parse_net(net_text).places; }, py::arg("net"),
        "Place identifiers of a .pnet text, in numbering order.");

  m.def(
      "concurrent_pairs",
      [](const std::string& net_text, std::size_t state_limit) {
        Loaded l = load(net_text, state_limit);
        std::vector<std::pair<std::string, std::string>> out;
        for (auto [a, b] : l.rel.pairs()) out.emplace_back(l.net.places[a], l.net.places[b]);
        return out;
      },
      py::arg("net"), py::arg("state_limit") = kStateLimit, "Pairs of places marked together in a reachable marking.");

  m.def(
      "chromatic_number",
      [](const std::string& net_text, std::size_t state_limit) {
        return chromatic_number(load(net_text, state_limit).rel);
      },
      py::arg("net"), py::arg("state_limit") = kStateLimit);

  m.def(
      "encode",
      [](const std::string& net_text, const std::string& fragment, std::size_t units, bool status_hint,
         std::size_t state_limit) {
        Loaded l = load(net_text, state_limit);
        return print_smtlib(encode(l.rel, l.num, config(fragment, units, status_hint)));
      },
      py::arg("net"), py::arg("fragment"), py::arg("units"), py::arg("status_hint") = false,
      py::arg("state_limit") = kStateLimit, "SMT-LIB text of the partition formula.");

  m.def(
      "formula_stats",
      [](const std::string& smt_text) {
        FormulaStats s = formula_stats(read_smtlib(smt_text));
        py::dict d;
        d["num_variables"] = s.num_variables ? py::object(py::int_(*s.num_variables)) : py::none();
        d["card"] = cardinality(s.card);
        d["card_in"] = cardinality(s.card_in);
        d["card_out"] = cardinality(s.card_out);
        d["num_asserts"] = s.num_asserts;
        d["num_ops"] = s.num_ops;
        return d;
      },
      py::arg("smt"));

  m.def(
      "oracle",
      [](const std::string& net_text, std::size_t units, const std::string& fragment, std::size_t state_limit) {
        Loaded l = load(net_text, state_limit);
        return std::string(to_string(oracle_sat(l.rel, l.num, config(fragment, units))));
      },
      py::arg("net"), py::arg("units"), py::arg("fragment") = "QF_BV", py::arg("state_limit") = kStateLimit,
      "'sat' or 'unsat', decided by exhaustive search.");

  m.def(
      "min_units",
      [](const std::string& net_text, const std::string& fragment, std::size_t state_limit) {
        Loaded l = load(net_text, state_limit);
        return find_min_units(l.rel, l.num, fragment_arg(fragment));
      },
      py::arg("net"), py::arg("fragment") = "QF_BV", py::arg("state_limit") = kStateLimit);

  m.def(
      "decompose",
      [](const std::string& net_text, const std::string& fragment, std::size_t units, const std::string& model,
         std::size_t state_limit) {
        Loaded l = load(net_text, state_limit);
        EncodingConfig cfg = config(fragment, units);
        SmtScript script = encode(l.rel, l.num, cfg);
        Partition part = ffd_repair(assignment_from_model(parse_model(model, cfg, script), cfg, l.num), l.rel);
        return emit_nupn(part, l.net, l.rel).to_text();
      },
      py::arg("net"), py::arg("fragment"), py::arg("units"), py::arg("model"), py::arg("state_limit") = kStateLimit,
      "NUPN text for a solver model of the formula; raises NetsmtError on an invalid model.");

  m.def(
      "select",
      [](const std::string& records_csv, std::size_t target) {
        return selection_csv(select_from_csv(records_csv, target));
      },
      py::arg("records"), py::arg("target") = 100, "Selection CSV for a records CSV.");
}
