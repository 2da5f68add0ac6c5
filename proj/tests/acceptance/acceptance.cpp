// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Solver-backed checks run when `z3` resolves on
// $SOLVER_PATH or $PATH (integration mode) and are reported as skipped
// otherwise.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "netsmt/bench.hpp"
#include "netsmt/decomposer.hpp"
#include "netsmt/encoder.hpp"
#include "netsmt/error.hpp"
#include "netsmt/solver.hpp"
#include "support/oracles.hpp"

using namespace netsmt;
using namespace netsmt::testing;

namespace {

// Tolerances and sizes of the acceptance criteria.
constexpr double kOracleTimeLimit = 60.0;     // criterion 1, seconds
constexpr std::size_t kExhaustivePlaces = 5;  // criteria 1 and 7
constexpr std::size_t kRandomGraphs = 100;    // criteria 1 and 7
constexpr std::size_t kRandomMaxPlaces = 12;
constexpr std::size_t kInstances = 50;     // criterion 2
constexpr std::size_t kUnitsPerInstance = 3;
constexpr std::size_t kPrefixMaxUnits = 6;  // criterion 5
constexpr double kSelectionTimeLimit = 5.0;  // criterion 6, seconds
constexpr std::size_t kMinRecords = 500, kMaxRecords = 5000;
constexpr std::size_t kTarget = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string first_failure;

  void fail(const std::string& why) {
    if (pass) first_failure = why;
    pass = false;
  }
};

EncodingConfig config(Fragment f, std::size_t n, bool hint = false) {
  EncodingConfig cfg;
  cfg.fragment = f;
  cfg.num_units = n;
  cfg.emit_status_hint = hint;
  return cfg;
}

std::string describe(const ConcurrencyRelation& rel) {
  std::ostringstream out;
  out << rel.place_count() << " places {";
  for (auto [a, b] : rel.pairs()) out << " " << a + 1 << "-" << b + 1;
  out << " }";
  return out.str();
}

std::vector<ConcurrencyRelation> criterion1_graphs() {
  std::vector<ConcurrencyRelation> graphs;
  for_each_small_graph(kExhaustivePlaces, [&](const ConcurrencyRelation& rel) { graphs.push_back(rel); });
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<std::size_t> places(1, kRandomMaxPlaces);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  for (std::size_t i = 0; i < kRandomGraphs; ++i) graphs.push_back(random_graph(rng, places(rng), density(rng)));
  return graphs;
}

/// Runs `f(i)` for i in [0, count) on all hardware threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f) {
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::optional<SolverSpec> integration_solver() {
  if (!resolve_executable("z3")) return std::nullopt;
  SolverSpec z3;
  z3.name = "z3";
  z3.command = {"z3", "-smt2", "{file}"};
  z3.timeout_s = 60;
  return z3;
}

Verdict solver_verdict(const SmtScript& script, const SolverSpec& spec, std::optional<std::string>* model = nullptr) {
  SolverRun run = solve_script(script, {spec});
  if (model) *model = run.raw_model;
  return run.status == SolverStatus::Sat ? Verdict::Sat : Verdict::Unsat;
}

void report(int index, const std::string& title, const Outcome& o) {
  std::cout << "AC" << index << " " << (o.pass ? "PASS" : "FAIL") << "  " << title << ": " << o.detail;
  if (!o.pass) std::cout << " -- first failure: " << o.first_failure;
  std::cout << std::endl;
}

// 1. oracle_sat(n) <=> n >= chi for every fragment's symmetry convention.
Outcome oracle_equivalence(const std::vector<ConcurrencyRelation>& graphs) {
  Outcome o;
  auto start = Clock::now();
  std::size_t checks = 0;
  for (const auto& rel : graphs) {
    auto num = numbering_for(rel.place_count());
    std::size_t chi = rel.place_count() <= kExhaustivePlaces ? brute_chromatic(rel) : chromatic_number(rel);
    for (std::size_t n = 1; n <= rel.place_count() + 1; ++n) {
      for (Fragment f : kAllFragments) {
        ++checks;
        bool sat = oracle_sat(rel, num, config(f, n)) == Verdict::Sat;
        if (sat != (n >= chi)) {
          o.fail(describe(rel) + " n=" + std::to_string(n) + " " + std::string(to_string(f)));
        }
      }
    }
  }
  double elapsed = seconds_since(start);
  if (elapsed >= kOracleTimeLimit) o.fail("took " + std::to_string(elapsed) + " s");
  std::ostringstream d;
  d << graphs.size() << " graphs, " << checks << " checks, " << std::fixed << std::setprecision(2) << elapsed
    << " s (limit " << kOracleTimeLimit << " s)";
  o.detail = d.str();
  return o;
}

struct Instance {
  ConcurrencyRelation rel;
  PlaceNumbering num;
  std::size_t n = 1;
  Verdict oracle = Verdict::Unsat;
  std::array<SmtScript, 6> scripts;
  std::array<std::optional<Verdict>, 6> solver;
  std::array<std::optional<std::string>, 6> solver_model;
  std::array<bool, 6> solver_accepted{};
};

std::vector<Instance> build_instances() {
  std::vector<Instance> out;
  std::mt19937 rng(7919);
  std::uniform_int_distribution<std::size_t> places(3, 8);
  std::uniform_real_distribution<double> density(0.2, 0.8);
  for (std::size_t i = 0; i < kInstances; ++i) {
    auto rel = random_graph(rng, places(rng), density(rng));
    std::size_t chi = chromatic_number(rel);
    // chi - 1, chi, chi + 1: both verdicts on every instance where possible
    std::vector<std::size_t> ns;
    for (std::size_t n = chi > 1 ? chi - 1 : 1; ns.size() < kUnitsPerInstance; ++n) ns.push_back(n);
    for (std::size_t n : ns) {
      Instance inst;
      inst.rel = rel;
      inst.num = numbering_for(rel.place_count());
      inst.n = n;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

// 2. All six encodings of an instance share one verdict.
Outcome equisatisfiability(std::vector<Instance>& instances, const std::optional<SolverSpec>& solver) {
  Outcome o;
  std::size_t sat = 0, brute_checked = 0;
  for (auto& inst : instances) {
    std::optional<Verdict> first;
    for (std::size_t i = 0; i < kAllFragments.size(); ++i) {
      Fragment f = kAllFragments[i];
      inst.scripts[i] = encode(inst.rel, inst.num, config(f, inst.n, true));
      Verdict v = inst.scripts[i].status == std::optional<std::string>("sat") ? Verdict::Sat : Verdict::Unsat;
      if (!first) first = v;
      if (v != *first) o.fail(describe(inst.rel) + " n=" + std::to_string(inst.n) + " " + std::string(to_string(f)));
      // Independent check of the emitted constraints where enumeration is cheap.
      if (inst.rel.place_count() <= 5 && inst.n <= 3) {
        ++brute_checked;
        bool b = brute_force_script(inst.scripts[i], inst.num, config(f, inst.n)).has_value();
        if (b != (v == Verdict::Sat)) o.fail("enumeration disagrees: " + describe(inst.rel));
      }
    }
    inst.oracle = *first;
    if (inst.oracle == Verdict::Sat) ++sat;
  }
  std::ostringstream d;
  d << instances.size() << " instances x 6 fragments, " << sat << " sat, " << brute_checked
    << " scripts cross-checked by enumeration";

  if (solver) {
    SolverSpec spec = *solver;
    spec.produces_models = true;
    std::mutex mu;
    std::size_t disagreements = 0;
    parallel_for(instances.size() * kAllFragments.size(), [&](std::size_t job) {
      auto& inst = instances[job / kAllFragments.size()];
      std::size_t i = job % kAllFragments.size();
      try {
        std::optional<std::string> model;
        Verdict v = solver_verdict(inst.scripts[i], spec, &model);
        std::lock_guard lock(mu);
        inst.solver[i] = v;
        inst.solver_model[i] = model;
        inst.solver_accepted[i] = true;
        if (v != inst.oracle) {
          ++disagreements;
          o.fail("z3 disagrees: " + describe(inst.rel) + " n=" + std::to_string(inst.n) + " " +
                 std::string(to_string(kAllFragments[i])));
        }
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        o.fail(std::string("z3: ") + e.what());
      }
    });
    d << "; z3 agreed on " << instances.size() * kAllFragments.size() - disagreements << "/"
      << instances.size() * kAllFragments.size() << " runs";
  } else {
    d << "; integration mode skipped (z3 not found)";
  }
  o.detail = d.str();
  return o;
}

bool decomposes(const Instance& inst, Fragment f, const SmtScript& script, const std::string& raw_model,
                std::string& why) {
  try {
    auto cfg = config(f, inst.n);
    auto model = parse_model(raw_model, cfg, script);
    auto part = ffd_repair(assignment_from_model(model, cfg, inst.num), inst.rel);
    auto violations = validate_partition(part, inst.rel, inst.n);
    if (!violations.empty()) {
      why = violations.front().describe(inst.num);
      return false;
    }
    PetriNet net;
    net.places = inst.num.places();
    auto nupn = emit_nupn(part, net, inst.rel);
    if (!is_unit_safe(parse_nupn(nupn.to_text()), inst.rel, inst.num)) {
      why = "unit not safe";
      return false;
    }
    return true;
  } catch (const Error& e) {
    why = e.what();
    return false;
  }
}

// 3. model -> assignment -> FFD -> validation -> unit-safe NUPN.
Outcome decomposition_validity(const std::vector<Instance>& instances, bool integration) {
  Outcome o;
  std::size_t replayed = 0, solved = 0;
  for (const auto& inst : instances) {
    if (inst.oracle != Verdict::Sat) continue;
    for (std::size_t i = 0; i < kAllFragments.size(); ++i) {
      Fragment f = kAllFragments[i];
      const auto& script = inst.scripts[i];
      std::string why;
      auto coloring = oracle_coloring(inst.rel, inst.num, config(f, inst.n));
      if (!coloring) {
        o.fail("no oracle model: " + describe(inst.rel));
        continue;
      }
      auto text = print_model(model_from_coloring(*coloring, inst.rel, inst.num, config(f, inst.n)), script);
      ++replayed;
      if (!decomposes(inst, f, script, text, why)) o.fail("oracle model, " + describe(inst.rel) + ": " + why);
      if (integration && inst.solver_model[i]) {
        ++solved;
        if (!decomposes(inst, f, script, *inst.solver_model[i], why)) {
          o.fail("z3 model, " + describe(inst.rel) + " " + std::string(to_string(f)) + ": " + why);
        }
      }
    }
  }
  std::ostringstream d;
  d << replayed << " replayed oracle models";
  if (integration) d << ", " << solved << " z3 models";
  d << " decomposed and validated";
  o.detail = d.str();
  return o;
}

// 4. Column semantics of the generated scripts.
Outcome table_semantics() {
  Outcome o;
  std::mt19937 rng(104729);
  std::size_t scripts = 0;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) o.fail(what);
  };
  std::vector<std::size_t> sizes;
  for (std::size_t k = 1; k <= 40; ++k) sizes.push_back(k);
  // card_in powers 2^5 .. 2^10
  for (std::size_t k : {17, 32, 33, 56, 64, 65, 80, 128, 129, 200, 256, 257, 512, 513, 1000, 1024}) sizes.push_back(k);
  for (std::size_t k : sizes) {
    auto rel = random_graph(rng, k, k > 100 ? 0.01 : 0.3);
    auto num = numbering_for(k);
    std::size_t w = 0;
    while ((std::size_t{1} << w) < k) ++w;
    w = std::max<std::size_t>(w, 1);
    for (std::size_t n : {1, 2, 5}) {
      auto bv = formula_stats(encode(rel, num, config(Fragment::QF_BV, n)));
      auto dt = formula_stats(encode(rel, num, config(Fragment::QF_DT, n)));
      auto idl = formula_stats(encode(rel, num, config(Fragment::QF_IDL, n)));
      auto ufbv = formula_stats(encode(rel, num, config(Fragment::QF_UFBV, n)));
      auto ufdt = formula_stats(encode(rel, num, config(Fragment::QF_UFDT, n)));
      auto ufidl = formula_stats(encode(rel, num, config(Fragment::QF_UFIDL, n)));
      scripts += 6;
      std::string at = " at " + std::to_string(k) + " places, n=" + std::to_string(n);
      check(bv.card == Cardinality::power_of_two(n) && bv.num_variables == k && !bv.card_in, "QF_BV card" + at);
      check(dt.card == Cardinality::finite(n) && dt.num_variables == k && !dt.card_in, "QF_DT card" + at);
      check(idl.card == Cardinality::infinite() && idl.num_variables == k && !idl.card_in, "QF_IDL card" + at);
      check(ufbv.card_in == Cardinality::power_of_two(w) && !ufbv.card, "QF_UFBV card_in" + at);
      check(ufdt.card_in == Cardinality::finite(k) && !ufdt.card, "QF_UFDT card_in" + at);
      check(ufidl.card_in == Cardinality::infinite() && !ufidl.card, "QF_UFIDL card_in" + at);
    }
  }
  o.detail = std::to_string(scripts) + " scripts, " + std::to_string(sizes.size()) + " net sizes up to 1024 places";
  return o;
}

// 5. Expanded symmetry disjunction == collapsed prefix test.
Outcome prefix_disjunction() {
  Outcome o;
  std::size_t checks = 0;
  for (std::size_t n = 1; n <= kPrefixMaxUnits; ++n) {
    for (std::size_t k = 1; k <= kPrefixMaxUnits + 1; ++k) {
      auto script = encode(ConcurrencyRelation(k), numbering_for(k), config(Fragment::QF_BV, n));
      const Term& constraint = script.assertions.at(k - 1);
      std::size_t m = std::min(k, n);
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        ++checks;
        ModelAssignment model;
        model.values["b_p" + std::to_string(k)] = Value::of_bits(BitVector::from_uint(n, v));
        bool collapsed = (v & ((std::uint64_t{1} << m) - 1)) != 0;
        if (evaluate(constraint, model).boolean != collapsed) {
          o.fail("n=" + std::to_string(n) + " #p=" + std::to_string(k) + " value " + std::to_string(v));
        }
      }
    }
  }
  o.detail = std::to_string(checks) + " bit-vector values for n <= " + std::to_string(kPrefixMaxUnits);
  return o;
}

std::string synthetic_records(std::mt19937& rng, std::size_t per_family) {
  std::ostringstream csv;
  csv << "formula,fragment,status,solver,time_s,file_size\n";
  std::uniform_real_distribution<double> log_time(0.0, std::log(6000.0));
  std::uniform_int_distribution<std::uint64_t> size(1000, 5'000'000);
  std::size_t id = 0;
  for (const char* frag : {"QF_BV", "QF_DT", "QF_IDL", "QF_UFBV", "QF_UFDT", "QF_UFIDL"}) {
    for (const char* status : {"sat", "unsat"}) {
      for (std::size_t i = 0; i < per_family; ++i, ++id) {
        std::uint64_t bytes = size(rng);
        for (const char* solver : {"s1", "s2", "s3"}) {
          csv << "phi" << id << ',' << frag << ',' << status << ',' << solver << ',';
          if (rng() % 4) csv << std::exp(log_time(rng));
          csv << ',' << bytes << '\n';
        }
      }
    }
  }
  return csv.str();
}

// 6. Benchmark selection on synthetic timing records.
Outcome selection_pipeline() {
  Outcome o;
  std::mt19937 rng(1299709);
  auto start = Clock::now();
  std::size_t families = 0;
  for (std::size_t per_family : {kMinRecords, std::size_t{1200}, std::size_t{2500}, kMaxRecords}) {
    std::string csv = synthetic_records(rng, per_family);
    auto first = select_from_csv(csv, kTarget);
    auto again = select_from_csv(csv, kTarget);
    if (selection_csv(first) != selection_csv(again)) o.fail("rerun differs at " + std::to_string(per_family));
    for (const auto& fam : first) {
      ++families;
      std::size_t supply = 0;
      for (auto [k, c] : fam.class_sizes) supply += c;
      if (fam.chosen.size() != std::min(kTarget, supply)) o.fail("chosen " + std::to_string(fam.chosen.size()));
      // Spread <= 1, except for classes that ran out of records.
      auto counts = fam.per_class_counts();
      std::size_t hi = 0;
      for (auto [k, c] : counts) hi = std::max(hi, c);
      for (auto [k, size] : fam.class_sizes) {
        std::size_t c = counts.contains(k) ? counts.at(k) : 0;
        if (c + 1 < hi && c < size) o.fail("class " + std::to_string(k) + " chose " + std::to_string(c));
      }
      for (const auto& c : fam.chosen) {
        double t = c.record.min_time().value_or(-1);
        if (t < kMinSolveTime || t > kMaxSolveTime) o.fail("min_time outside window: " + std::to_string(t));
      }
    }
  }
  double elapsed = seconds_since(start);
  if (elapsed >= kSelectionTimeLimit) o.fail("took " + std::to_string(elapsed) + " s");
  std::ostringstream d;
  d << families << " families of " << kMinRecords << ".." << kMaxRecords << " records, " << std::fixed
    << std::setprecision(2) << elapsed << " s (limit " << kSelectionTimeLimit << " s)";
  o.detail = d.str();
  return o;
}

// 7. min-units == chromatic number.
Outcome min_units(const std::vector<ConcurrencyRelation>& graphs, const std::optional<SolverSpec>& solver) {
  Outcome o;
  std::mutex mu;
  std::size_t oracle_checked = 0, solver_checked = 0;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const auto& rel = graphs[g];
    Fragment f = kAllFragments[g % kAllFragments.size()];
    std::size_t chi = rel.place_count() <= kExhaustivePlaces ? brute_chromatic(rel) : chromatic_number(rel);
    ++oracle_checked;
    if (find_min_units(rel, numbering_for(rel.place_count()), f) != chi) o.fail("oracle backend: " + describe(rel));
  }
  if (solver) {
    parallel_for(graphs.size(), [&](std::size_t g) {
      const auto& rel = graphs[g];
      Fragment f = kAllFragments[g % kAllFragments.size()];
      auto num = numbering_for(rel.place_count());
      std::size_t chi = rel.place_count() <= kExhaustivePlaces ? brute_chromatic(rel) : chromatic_number(rel);
      try {
        std::size_t got = find_min_units(rel, [&](std::size_t n) {
          return solver_verdict(encode(rel, num, config(f, n)), *solver);
        });
        std::lock_guard lock(mu);
        ++solver_checked;
        if (got != chi) o.fail("z3 backend " + std::string(to_string(f)) + ": " + describe(rel));
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        o.fail(std::string("z3 backend: ") + e.what());
      }
    });
  }
  std::ostringstream d;
  d << oracle_checked << " graphs via oracle";
  if (solver) d << ", " << solver_checked << " via z3 (fragments rotated)";
  else d << "; integration mode skipped (z3 not found)";
  o.detail = d.str();
  return o;
}

// 8. Emitted files read back; z3 accepts each fragment.
Outcome well_formedness(const std::vector<Instance>& instances, bool integration) {
  Outcome o;
  std::size_t files = 0;
  std::array<std::size_t, 6> accepted{};
  for (const auto& inst : instances) {
    for (std::size_t i = 0; i < kAllFragments.size(); ++i) {
      const auto& script = inst.scripts[i];
      ++files;
      std::string text = print_smtlib(script);
      try {
        auto forms = read_sexprs(text);
        std::string reprinted;
        for (const auto& f : forms) reprinted += to_string(f) + "\n";
        if (reprinted != text) o.fail("S-expression reprint differs");
        if (read_smtlib(text) != script) o.fail("script read-back differs");
      } catch (const Error& e) {
        o.fail(e.what());
      }
      auto problems = check_well_formed(script);
      if (!problems.empty()) o.fail(problems.front());
      if (inst.solver_accepted[i]) ++accepted[i];
    }
  }
  std::ostringstream d;
  d << files << " files read back";
  if (integration) {
    d << "; z3 accepted";
    for (std::size_t i = 0; i < kAllFragments.size(); ++i) {
      d << " " << to_string(kAllFragments[i]) << "=" << accepted[i];
      if (accepted[i] == 0) o.fail("z3 accepted no " + std::string(to_string(kAllFragments[i])) + " file");
    }
  } else {
    d << "; integration mode skipped (z3 not found)";
  }
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  auto solver = integration_solver();
  std::cout << "integration mode: " << (solver ? "on (z3)" : "off") << std::endl;

  auto graphs = criterion1_graphs();
  std::vector<Outcome> outcomes;
  auto record = [&](int index, const std::string& title, Outcome o) {
    report(index, title, o);
    outcomes.push_back(std::move(o));
  };

  record(1, "oracle equivalence", oracle_equivalence(graphs));
  auto instances = build_instances();
  record(2, "cross-fragment equisatisfiability", equisatisfiability(instances, solver));
  record(3, "end-to-end decomposition validity", decomposition_validity(instances, solver.has_value()));
  record(4, "table-semantics invariants", table_semantics());
  record(5, "prefix-disjunction equivalence", prefix_disjunction());
  record(6, "selection pipeline", selection_pipeline());
  record(7, "min-units equals chromatic number", min_units(graphs, solver));
  record(8, "SMT-LIB well-formedness", well_formedness(instances, solver.has_value()));

  bool all = std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.pass; });
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
