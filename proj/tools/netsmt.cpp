// netsmt: Petri net decomposition through SMT partition formulas.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netsmt/bench.hpp"
#include "netsmt/concurrency.hpp"
#include "netsmt/decomposer.hpp"
#include "netsmt/encoder.hpp"
#include "netsmt/error.hpp"
#include "netsmt/net.hpp"
#include "netsmt/solver.hpp"

namespace fs = std::filesystem;
using namespace netsmt;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

struct Options {
  std::string net;
  std::string conc;
  std::string fragment;
  std::size_t units = 0;
  bool min_units = false;
  std::string solvers;
  std::string out;
  std::size_t state_limit = 1'000'000;
  bool status_hint = false;
  std::size_t jobs = 1;
  std::string model;
  std::size_t target = 100;
  std::vector<std::string> files;
};

struct Loaded {
  PetriNet net;
  PlaceNumbering num;
  ConcurrencyRelation rel;
};

Loaded load(const Options& o) {
  Loaded l;
  l.net = parse_net(read_file(o.net));
  l.num = numbering(l.net);
  if (!o.conc.empty()) {
    l.rel = parse_conc(read_file(o.conc), l.num);
  } else {
    l.rel = concurrency_relation(explore_reachable(l.net, o.state_limit));
  }
  return l;
}

Fragment fragment_of(const Options& o, Fragment fallback) {
  if (o.fragment.empty()) return fallback;
  auto f = parse_fragment(o.fragment);
  if (!f) throw UsageError("unknown fragment '" + o.fragment + "'");
  return *f;
}

std::vector<SolverSpec> solvers_of(const Options& o) {
  if (o.solvers.empty()) return {};
  return load_solver_config(o.solvers);
}

DecisionProcedure decision_for(const Loaded& l, Fragment fragment, const std::vector<SolverSpec>& specs) {
  if (specs.empty()) {
    return [&l, fragment](std::size_t n) { return oracle_sat(l.rel, l.num, EncodingConfig{fragment, n}); };
  }
  return [&l, fragment, &specs](std::size_t n) {
    SolverRun run = solve_script(encode(l.rel, l.num, EncodingConfig{fragment, n}), specs);
    return run.status == SolverStatus::Sat ? Verdict::Sat : Verdict::Unsat;
  };
}

int cmd_relation(const Options& o) {
  Loaded l = load(o);
  std::string text = print_conc(l.rel, l.num);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    fs::path path = fs::path(o.out) / (l.net.name + ".conc");
    write_file(path, text);
    std::cout << path.string() << "\n";
  }
  return 0;
}

int cmd_encode(const Options& o) {
  Loaded l = load(o);
  EncodingConfig cfg;
  cfg.fragment = fragment_of(o, Fragment::QF_BV);
  cfg.emit_status_hint = o.status_hint;
  cfg.num_units = o.min_units ? find_min_units(l.rel, decision_for(l, cfg.fragment, solvers_of(o))) : o.units;
  SmtScript script = encode(l.rel, l.num, cfg);
  fs::path path = fs::path(o.out.empty() ? "." : o.out) / smt_file_name(l.net.name, cfg);
  write_file(path, print_smtlib(script));
  std::cout << path.string() << "\n";
  return 0;
}

std::string column(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "-"; }
std::string column(const std::optional<Cardinality>& c) { return c ? c->to_string() : "-"; }

int cmd_stats(const Options& o) {
  std::cout << "file\tlogic\t#variables\tcard\tcard_in\tcard_out\t#asserts\t#ops\n";
  for (const auto& file : o.files) {
    SmtScript script = read_smtlib(read_file(file));
    FormulaStats s = formula_stats(script);
    std::cout << file << '\t' << script.logic << '\t' << column(s.num_variables) << '\t' << column(s.card) << '\t'
              << column(s.card_in) << '\t' << column(s.card_out) << '\t' << s.num_asserts << '\t' << s.num_ops
              << '\n';
  }
  return 0;
}

int cmd_solve(const Options& o) {
  auto specs = solvers_of(o);
  std::vector<fs::path> files(o.files.begin(), o.files.end());
  auto runs = run_solvers(specs, files, o.jobs);
  std::cout << "file\tsolver\tstatus\ttime_s\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    std::cout << files[i / specs.size()].string() << '\t' << r.solver << '\t' << to_string(r.status) << '\t'
              << std::fixed << std::setprecision(3) << r.wall_time << '\n';
  }
  return 0;
}

int cmd_decompose(const Options& o) {
  Loaded l = load(o);
  EncodingConfig cfg{fragment_of(o, Fragment::QF_BV), o.units};
  SmtScript script = encode(l.rel, l.num, cfg);

  std::string raw;
  if (!o.model.empty()) {
    raw = read_file(o.model);
  } else {
    auto specs = solvers_of(o);
    for (auto& s : specs) s.produces_models = true;
    SolverRun run = solve_script(script, specs);
    if (run.status != SolverStatus::Sat) {
      throw Error(ErrorKind::SolverInconclusive, "formula is unsat: no decomposition into " +
                                                     std::to_string(cfg.num_units) + " units");
    }
    raw = run.raw_model.value_or("");
  }

  ModelAssignment model = parse_model(raw, cfg, script);
  Partition part = ffd_repair(assignment_from_model(model, cfg, l.num), l.rel);
  auto violations = validate_partition(part, l.rel, cfg.num_units);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "netsmt: " << v.describe(l.num) << "\n";
    throw Error(ErrorKind::InvalidPartition, "refusing to emit an invalid decomposition");
  }
  std::string text = emit_nupn(part, l.net, l.rel).to_text();
  if (o.out.empty()) {
    std::cout << text;
  } else {
    fs::path path = fs::path(o.out) / (l.net.name + ".nupn");
    write_file(path, text);
    std::cout << path.string() << "\n";
  }
  return 0;
}

int cmd_min_units(const Options& o) {
  Loaded l = load(o);
  auto specs = solvers_of(o);
  std::cout << find_min_units(l.rel, decision_for(l, fragment_of(o, Fragment::QF_BV), specs)) << "\n";
  return 0;
}

int cmd_select(const Options& o) {
  std::string text = selection_csv(select_from_csv(read_file(o.files.at(0)), o.target));
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
  return 0;
}

int cmd_oracle(const Options& o) {
  Loaded l = load(o);
  EncodingConfig cfg{fragment_of(o, Fragment::QF_BV), o.units};
  std::cout << to_string(oracle_sat(l.rel, l.num, cfg)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decompose safe Petri nets into flat NUPNs through SMT partition formulas"};
  app.require_subcommand(1);
  Options o;

  const std::string fragments = "qf_bv|qf_dt|qf_idl|qf_ufbv|qf_ufdt|qf_ufidl";
  auto add_net = [&](CLI::App* sub) {
    sub->add_option("net", o.net, "input .pnet file")->required()->check(CLI::ExistingFile);
    sub->add_option("--conc", o.conc, "read the concurrency relation from a .conc file")->check(CLI::ExistingFile);
    sub->add_option("--state-limit", o.state_limit, "maximum number of reachable markings")
        ->check(CLI::PositiveNumber);
  };

  auto* relation = app.add_subcommand("relation", "compute the concurrency relation (.conc)");
  add_net(relation);
  relation->add_option("--out", o.out, "output directory (default: stdout)");

  auto* enc = app.add_subcommand("encode", "write the partition formula (.smt2)");
  add_net(enc);
  enc->add_option("--fragment", o.fragment, fragments)->required();
  auto* units_opt = enc->add_option("--units", o.units, "number of units")->check(CLI::PositiveNumber);
  auto* min_opt = enc->add_flag("--min-units", o.min_units, "use the least satisfiable number of units");
  units_opt->excludes(min_opt);
  enc->add_flag("--status-hint", o.status_hint, "add (set-info :status ...) computed by the oracle");
  enc->add_option("--solvers", o.solvers, "solver config used by --min-units (default: oracle)")
      ->check(CLI::ExistingFile);
  enc->add_option("--out", o.out, "output directory (default: .)");

  auto* stats = app.add_subcommand("stats", "print formula metrics of .smt2 files");
  stats->add_option("files", o.files, ".smt2 files")->required()->check(CLI::ExistingFile);

  auto* solve = app.add_subcommand("solve", "run configured solvers on .smt2 files");
  solve->add_option("files", o.files, ".smt2 files")->required()->check(CLI::ExistingFile);
  solve->add_option("--solvers", o.solvers, "solver config (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--jobs", o.jobs, "parallel solver processes")->check(CLI::PositiveNumber);

  auto* decompose = app.add_subcommand("decompose", "turn a model into a validated flat NUPN");
  add_net(decompose);
  decompose->add_option("--fragment", o.fragment, fragments)->required();
  decompose->add_option("--units", o.units, "number of units")->required()->check(CLI::PositiveNumber);
  auto* model_opt = decompose->add_option("--model", o.model, "solver model (get-model output)")
                        ->check(CLI::ExistingFile);
  auto* solvers_opt = decompose->add_option("--solvers", o.solvers, "solver config used to obtain a model")
                          ->check(CLI::ExistingFile);
  model_opt->excludes(solvers_opt);
  decompose->add_option("--out", o.out, "output directory (default: stdout)");

  auto* min_units = app.add_subcommand("min-units", "least number of units admitting a decomposition");
  add_net(min_units);
  min_units->add_option("--fragment", o.fragment, fragments + " (default qf_bv)");
  min_units->add_option("--solvers", o.solvers, "solver config (default: built-in oracle)")
      ->check(CLI::ExistingFile);

  auto* select = app.add_subcommand("select", "pick benchmark families from solver timing records");
  select->add_option("records", o.files, "records CSV")->required()->expected(1)->check(CLI::ExistingFile);
  select->add_option("--target", o.target, "formulas per family")->check(CLI::PositiveNumber);
  select->add_option("--out", o.out, "output CSV (default: stdout)");

  auto* oracle = app.add_subcommand("oracle", "decide the partition formula by exhaustive search");
  add_net(oracle);
  oracle->add_option("--units", o.units, "number of units")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--fragment", o.fragment, fragments + " (default qf_bv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*enc && !o.min_units && o.units == 0) throw UsageError("encode needs --units N or --min-units");
    if (*decompose && o.model.empty() && o.solvers.empty()) throw UsageError("decompose needs --model or --solvers");
    if (*relation) return cmd_relation(o);
    if (*enc) return cmd_encode(o);
    if (*stats) return cmd_stats(o);
    if (*solve) return cmd_solve(o);
    if (*decompose) return cmd_decompose(o);
    if (*min_units) return cmd_min_units(o);
    if (*select) return cmd_select(o);
    if (*oracle) return cmd_oracle(o);
  } catch (const UsageError& e) {
    std::cerr << "netsmt: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "netsmt: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "netsmt: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
