#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netsmt/encoder.hpp"
#include "netsmt/smt.hpp"

namespace netsmt {

enum class SolverStatus { Sat, Unsat, Unknown, Timeout, Error };
std::string_view to_string(SolverStatus s);

/// An external solver. `command` is an argv template; exactly one argument
/// contains the `{file}` placeholder.
struct SolverSpec {
  std::string name;
  std::vector<std::string> command;
  double timeout_s = 60.0;
  bool produces_models = false;
  /// Extra time allowed for the kill to land after the timeout fires.
  double grace_s = 1.0;
};

/// Throws std::invalid_argument when the placeholder or timeout is wrong.
void validate(const SolverSpec& spec);

/// JSON solver configuration, either a list of entries or an object with a
/// "solvers" list. Entry keys: name, command, timeout, produces_models.
std::vector<SolverSpec> parse_solver_config(std::string_view json_text);
std::vector<SolverSpec> load_solver_config(const std::filesystem::path& path);

/// Looks `program` up in $SOLVER_PATH, then $PATH. Names containing '/'
/// are taken as paths.
std::optional<std::filesystem::path> resolve_executable(const std::string& program);

struct SolverRun {
  std::string solver;
  SolverStatus status = SolverStatus::Error;
  double wall_time = 0.0;  // seconds
  std::optional<std::string> raw_model;
};

/// Runs one solver on one file. The child gets its own process group and
/// is killed with SIGKILL when `timeout_s` elapses. When `produces_models`
/// is set, the solver reads a copy of the file with model
/// production enabled and a trailing (get-model). Throws
/// Error(SpawnFailure) when the executable cannot be started.
SolverRun run_solver(const SolverSpec& spec, const std::filesystem::path& file);

/// Every (file, solver) pair on a pool of `jobs` threads. Results are in
/// file-major order regardless of completion order.
std::vector<SolverRun> run_solvers(const std::vector<SolverSpec>& specs,
                                   const std::vector<std::filesystem::path>& files, std::size_t jobs);

/// Writes `script` to a temporary file and runs `specs` in order until one
/// answers sat or unsat; that run is returned. Throws
/// Error(SolverInconclusive) when every solver times out, errs or says
/// unknown.
SolverRun solve_script(const SmtScript& script, const std::vector<SolverSpec>& specs);

/// Reads a get-model response (define-fun forms, optionally wrapped in a
/// list or `(model ...)`) and evaluates it at every place term of `script`.
/// Function bodies may use ite, =, distinct, and, or, not, let and calls to
/// other defined functions. Throws Error(UnparsableModel) or
/// Error(MissingVariable).
ModelAssignment parse_model(std::string_view raw, const EncodingConfig& cfg, const SmtScript& script);

/// SMT-LIB model text for `model`, as define-fun forms. Constants map to
/// nullary definitions; UF entries are folded into one ite chain per
/// function. Used to feed replayed models through parse_model.
std::string print_model(const ModelAssignment& model, const SmtScript& script);

}  // namespace netsmt
