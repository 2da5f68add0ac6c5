#include <cstdlib>

#include "doctest.h"
#include "netsmt/error.hpp"
#include "netsmt/solver.hpp"
#include "support/oracles.hpp"
#include "support/stubs.hpp"

using namespace netsmt;
using namespace netsmt::testing;

namespace {

SolverSpec stub_spec(const std::filesystem::path& exe, double timeout = 5.0) {
  SolverSpec s;
  s.name = exe.filename().string();
  s.command = {exe.string(), "{file}"};
  s.timeout_s = timeout;
  return s;
}

EncodingConfig config(Fragment f, std::size_t n) {
  EncodingConfig cfg;
  cfg.fragment = f;
  cfg.num_units = n;
  return cfg;
}

SmtScript two_place_script(Fragment f, std::size_t n = 2) {
  ConcurrencyRelation rel(2);
  rel.add(0, 1);
  return encode(rel, numbering_for(2), config(f, n));
}

ErrorKind model_error(std::string_view raw, Fragment f) {
  try {
    parse_model(raw, config(f, 2), two_place_script(f));
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("stub solver statuses") {
  StubDir dir;
  auto input = dir.file("in.smt2", "(check-sat)\n");
  CHECK(run_solver(stub_spec(dir.script("true-sayer", "echo sat")), input).status == SolverStatus::Sat);
  CHECK(run_solver(stub_spec(dir.script("no-sayer", "echo unsat")), input).status == SolverStatus::Unsat);
  CHECK(run_solver(stub_spec(dir.script("shrug", "echo unknown")), input).status == SolverStatus::Unknown);
  CHECK(run_solver(stub_spec(dir.script("garbage", "echo '(error \"line 1\")'")), input).status == SolverStatus::Error);
  CHECK(run_solver(stub_spec(dir.script("silent", "exit 3")), input).status == SolverStatus::Error);
  CHECK(run_solver(stub_spec(dir.script("noisy", "echo oops >&2; echo sat")), input).status == SolverStatus::Sat);
  auto run = run_solver(stub_spec(dir.script("echo-file", "test -f \"$1\" && echo sat")), input);
  CHECK(run.status == SolverStatus::Sat);
  CHECK_FALSE(run.raw_model.has_value());
  CHECK(run.solver == "echo-file");
}

TEST_CASE("timeouts kill the whole process group") {
  StubDir dir;
  auto input = dir.file("in.smt2", "");
  auto sleeper = stub_spec(dir.script("sleeper", "sleep 20 & sleep 20; wait"), 0.5);
  auto run = run_solver(sleeper, input);
  CHECK(run.status == SolverStatus::Timeout);
  CHECK(run.wall_time >= 0.5);
  CHECK(run.wall_time <= 0.5 + sleeper.grace_s);
}

TEST_CASE("spawn failures") {
  StubDir dir;
  auto input = dir.file("in.smt2", "");
  try {
    run_solver(stub_spec(dir.path() / "does-not-exist"), input);
    FAIL("expected SpawnFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpawnFailure);
  }
  SolverSpec bare;
  bare.name = "x";
  bare.command = {"netsmt-no-such-solver-anywhere", "{file}"};
  CHECK_THROWS_AS(run_solver(bare, input), Error);
}

TEST_CASE("model production wraps the input") {
  StubDir dir;
  auto input = dir.file("in.smt2", "(set-logic QF_BV)\n(check-sat)\n(exit)\n");
  auto spec = stub_spec(dir.script("modeler",
                                   "echo sat; grep -c 'produce-models true' \"$1\"; grep -c '(get-model)' \"$1\""));
  spec.produces_models = true;
  auto run = run_solver(spec, input);
  CHECK(run.status == SolverStatus::Sat);
  REQUIRE(run.raw_model.has_value());
  CHECK(*run.raw_model == "1\n1\n");
}

TEST_CASE("solver entries: validation and configuration") {
  SolverSpec s;
  s.name = "z";
  s.command = {"z3", "-smt2"};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.command = {"z3", "{file}", "{file}"};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.command = {"z3", "-file:{file}"};
  CHECK_NOTHROW(validate(s));
  s.timeout_s = 0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);

  auto specs = parse_solver_config(
      R"({"solvers": [{"name": "z3", "command": ["z3", "-smt2", "{file}"], "timeout": 30, "produces_models": true},
                      {"name": "cvc", "command": ["cvc5", "{file}"], "timeout": 2.5}]})");
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].produces_models);
  CHECK(specs[0].timeout_s == 30.0);
  CHECK(specs[1].command == std::vector<std::string>{"cvc5", "{file}"});
  CHECK_FALSE(specs[1].produces_models);
  CHECK(parse_solver_config(R"([{"name": "a", "command": ["a", "{file}"], "timeout": 1}])").size() == 1);
  CHECK_THROWS_AS(parse_solver_config("[{\"name\": \"a\"}]"), Error);
  CHECK_THROWS_AS(parse_solver_config("not json"), Error);
  CHECK_THROWS_AS(parse_solver_config(R"([{"name": "a", "command": ["a"], "timeout": 1}])"), Error);
}

TEST_CASE("solver search path") {
  StubDir dir;
  dir.script("netsmt-test-solver", "echo unsat");
  const char* old = std::getenv("SOLVER_PATH");
  std::string saved = old ? old : "";
  ::setenv("SOLVER_PATH", dir.path().c_str(), 1);
  auto found = resolve_executable("netsmt-test-solver");
  REQUIRE(found.has_value());
  CHECK(*found == dir.path() / "netsmt-test-solver");
  SolverSpec s;
  s.name = "by-name";
  s.command = {"netsmt-test-solver", "{file}"};
  CHECK(run_solver(s, dir.file("in.smt2", "")).status == SolverStatus::Unsat);
  if (old) ::setenv("SOLVER_PATH", saved.c_str(), 1);
  else ::unsetenv("SOLVER_PATH");
  CHECK_FALSE(resolve_executable("netsmt-test-solver").has_value());
}

TEST_CASE("parallel runs keep file-major order") {
  StubDir dir;
  std::vector<std::filesystem::path> files;
  for (int i = 0; i < 6; ++i) files.push_back(dir.file("f" + std::to_string(i) + ".smt2", i % 2 ? "unsat" : "sat"));
  auto reader = stub_spec(dir.script("reader", "sleep 0.05; cat \"$1\"; echo"));
  auto yes = stub_spec(dir.script("yes", "echo sat"));
  auto runs = run_solvers({reader, yes}, files, 4);
  REQUIRE(runs.size() == 12);
  for (int i = 0; i < 6; ++i) {
    CHECK(runs[2 * i].solver == "reader");
    CHECK(runs[2 * i].status == (i % 2 ? SolverStatus::Unsat : SolverStatus::Sat));
    CHECK(runs[2 * i + 1].solver == "yes");
  }
}

TEST_CASE("solve_script returns the first conclusive answer") {
  StubDir dir;
  auto script = two_place_script(Fragment::QF_DT);
  auto shrug = stub_spec(dir.script("shrug", "echo unknown"));
  auto yes = stub_spec(dir.script("yes", "echo sat"));
  CHECK(solve_script(script, {shrug, yes}).solver == "yes");
  try {
    solve_script(script, {shrug});
    FAIL("expected SolverInconclusive");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SolverInconclusive);
  }
}

TEST_CASE("constant models") {
  auto dt = parse_model("(define-fun x_p1 () Unit u2)\n(define-fun x_p2 () Unit u1)", config(Fragment::QF_DT, 2),
                        two_place_script(Fragment::QF_DT));
  CHECK(dt.values.at("x_p1") == Value::of_constructor("u2"));

  auto bv = parse_model("((define-fun b_p1 () (_ BitVec 2) #b01) (define-fun b_p2 () (_ BitVec 2) #b10))",
                        config(Fragment::QF_BV, 2), two_place_script(Fragment::QF_BV));
  CHECK(bv.values.at("b_p1") == Value::of_bits(BitVector::from_uint(2, 1)));
  CHECK(bv.values.at("b_p2") == Value::of_bits(BitVector::from_uint(2, 2)));
  CHECK(BitVector::parse("#xa") == BitVector::from_uint(4, 10));

  auto idl = parse_model(
      "(model (define-fun x_p1 () Int (- 3)) (define-fun x_p2 () Int (let ((a 2)) a)))", config(Fragment::QF_IDL, 2),
      two_place_script(Fragment::QF_IDL));
  CHECK(idl.values.at("x_p1") == Value::of_int(-3));
  CHECK(idl.values.at("x_p2") == Value::of_int(2));
}

TEST_CASE("function models are evaluated at every place argument") {
  auto script = two_place_script(Fragment::QF_UFBV);
  auto m = parse_model("(define-fun u ((a (_ BitVec 1))) (_ BitVec 2) (ite (= a #b0) #b01 #b10))",
                       config(Fragment::QF_UFBV, 2), script);
  CHECK(m.values.size() == 2);
  CHECK(m.values.at("(u #b0)") == Value::of_bits(BitVector::from_uint(2, 1)));
  CHECK(m.values.at("(u #b1)") == Value::of_bits(BitVector::from_uint(2, 2)));

  auto ufdt = parse_model(
      "(define-fun u ((x!0 Place)) Unit (ite (and (not (= x!0 p1)) (or false (= x!0 p2))) u2 u1))",
      config(Fragment::QF_UFDT, 2), two_place_script(Fragment::QF_UFDT));
  CHECK(ufdt.values.at("(u p1)") == Value::of_constructor("u1"));
  CHECK(ufdt.values.at("(u p2)") == Value::of_constructor("u2"));

  auto ufidl = parse_model(
      "(define-fun k!0 ((x Int)) Int (ite (distinct x 1) 2 1))\n(define-fun u ((x!0 Int)) Int (k!0 x!0))",
      config(Fragment::QF_UFIDL, 2), two_place_script(Fragment::QF_UFIDL));
  CHECK(ufidl.values.at("(u 1)") == Value::of_int(1));
  CHECK(ufidl.values.at("(u 2)") == Value::of_int(2));

  auto as_sort = parse_model("(define-fun u ((x!0 Place)) Unit (as u2 Unit))", config(Fragment::QF_UFDT, 2),
                             two_place_script(Fragment::QF_UFDT));
  CHECK(as_sort.values.at("(u p1)") == Value::of_constructor("u2"));
}

TEST_CASE("malformed models") {
  CHECK(model_error("(define-fun x_p1 () Unit u2)", Fragment::QF_DT) == ErrorKind::MissingVariable);
  CHECK(model_error("(define-fun u ((x!0 Place)) Unit ((as const (Array Place Unit)) u1))", Fragment::QF_UFDT) ==
        ErrorKind::UnparsableModel);
  CHECK(model_error("(define-fun b_p1 () (_ BitVec 2) #b01", Fragment::QF_BV) == ErrorKind::UnparsableModel);
  CHECK(model_error("(define-fun b_p1 () (_ BitVec 2) 7) (define-fun b_p2 () (_ BitVec 2) #b01)", Fragment::QF_BV) ==
        ErrorKind::UnparsableModel);
  CHECK(model_error("(define-fun b_p1 () (_ BitVec 2) #b001) (define-fun b_p2 () (_ BitVec 2) #b01)",
                    Fragment::QF_BV) == ErrorKind::UnparsableModel);
}

TEST_CASE("print then parse is the identity on models") {
  std::mt19937 rng(31);
  for (int i = 0; i < 60; ++i) {
    std::size_t k = 1 + rng() % 6;
    auto rel = random_graph(rng, k, 0.4);
    auto num = numbering_for(k);
    for (Fragment f : kAllFragments) {
      auto cfg = config(f, 1 + rng() % 4);
      auto script = encode(rel, num, cfg);
      auto values = candidate_values(script, f, cfg.num_units, k);
      ModelAssignment m;
      for (const auto& t : place_terms(num, cfg)) m.values[to_string(t)] = values[rng() % values.size()];
      CHECK(parse_model(print_model(m, script), cfg, script) == m);
    }
  }
}
