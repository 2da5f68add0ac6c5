#include "netsmt/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "netsmt/error.hpp"

namespace netsmt {

std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Unknown: return "unknown";
    case SolverStatus::Timeout: return "timeout";
    case SolverStatus::Error: return "error";
  }
  return {};
}

namespace {
constexpr std::string_view kPlaceholder = "{file}";

std::size_t count_placeholders(const std::string& s) {
  std::size_t n = 0;
  for (auto pos = s.find(kPlaceholder); pos != std::string::npos; pos = s.find(kPlaceholder, pos + 1)) ++n;
  return n;
}
}  // namespace

void validate(const SolverSpec& spec) {
  std::size_t holders = 0;
  for (const auto& arg : spec.command) holders += count_placeholders(arg);
  if (spec.command.empty()) throw std::invalid_argument("solver '" + spec.name + "' has an empty command");
  if (holders != 1) {
    throw std::invalid_argument("solver '" + spec.name + "' command must contain {file} exactly once");
  }
  if (!(spec.timeout_s > 0)) throw std::invalid_argument("solver '" + spec.name + "' timeout must be positive");
  if (spec.grace_s < 0) throw std::invalid_argument("solver '" + spec.name + "' grace must not be negative");
}

std::vector<SolverSpec> parse_solver_config(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SyntaxError, std::string("solver config: ") + e.what());
  }
  const nlohmann::json& list = doc.is_object() ? doc.at("solvers") : doc;
  if (!list.is_array()) throw Error(ErrorKind::SyntaxError, "solver config: expected a list of solvers");
  std::vector<SolverSpec> specs;
  for (const auto& entry : list) {
    try {
      SolverSpec s;
      s.name = entry.at("name").get<std::string>();
      s.command = entry.at("command").get<std::vector<std::string>>();
      s.timeout_s = entry.at("timeout").get<double>();
      s.produces_models = entry.value("produces_models", false);
      s.grace_s = entry.value("grace", 1.0);
      validate(s);
      specs.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SyntaxError, std::string("solver config: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorKind::SyntaxError, std::string("solver config: ") + e.what());
    }
  }
  return specs;
}

std::vector<SolverSpec> load_solver_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solver_config(buf.str());
}

std::optional<std::filesystem::path> resolve_executable(const std::string& program) {
  namespace fs = std::filesystem;
  auto runnable = [](const fs::path& p) { return ::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p); };
  if (program.find('/') != std::string::npos) {
    if (runnable(program)) return fs::path(program);
    return std::nullopt;
  }
  for (const char* var : {"SOLVER_PATH", "PATH"}) {
    const char* value = std::getenv(var);
    if (!value) continue;
    std::stringstream dirs(value);
    for (std::string dir; std::getline(dirs, dir, ':');) {
      if (dir.empty()) continue;
      fs::path candidate = fs::path(dir) / program;
      if (runnable(candidate)) return candidate;
    }
  }
  return std::nullopt;
}

namespace {

// Temporary copy of an SMT-LIB file that asks for a model after check-sat.
class ModelRequestFile {
 public:
  explicit ModelRequestFile(const std::filesystem::path& source) {
    std::ifstream in(source);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + source.string());
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    auto exit_pos = text.rfind("(exit)");
    if (exit_pos != std::string::npos && text.find_first_not_of(" \t\r\n", exit_pos + 6) == std::string::npos) {
      text.resize(exit_pos);
    }
    text = "(set-option :produce-models true)\n" + text + "(get-model)\n(exit)\n";

    std::string pattern = (std::filesystem::temp_directory_path() / "netsmt-XXXXXX.smt2").string();
    int fd = ::mkstemps(pattern.data(), 5);
    if (fd < 0) throw Error(ErrorKind::IoError, "cannot create temporary file");
    path_ = pattern;
    std::size_t written = 0;
    while (written < text.size()) {
      ssize_t n = ::write(fd, text.data() + written, text.size() - written);
      if (n <= 0) {
        ::close(fd);
        throw Error(ErrorKind::IoError, "cannot write temporary file");
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~ModelRequestFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  ModelRequestFile(const ModelRequestFile&) = delete;
  ModelRequestFile& operator=(const ModelRequestFile&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct Pipe {
  int fds[2] = {-1, -1};
  explicit Pipe(int flags = 0) {
    if (::pipe2(fds, flags) != 0) throw Error(ErrorKind::SpawnFailure, "pipe: " + std::string(std::strerror(errno)));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]);
    fds[1] = -1;
  }
};

struct ProcessResult {
  std::string out;
  bool timed_out = false;
  double seconds = 0.0;
};

ProcessResult run_process(const std::filesystem::path& exe, const std::vector<std::string>& argv, double timeout_s) {
  using clock = std::chrono::steady_clock;
  Pipe out(O_CLOEXEC);
  Pipe exec_error(O_CLOEXEC);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const auto start = clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorKind::SpawnFailure, "fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    ::setpgid(0, 0);
    int devnull = ::open("/dev/null", O_RDWR);
    ::dup2(devnull, STDIN_FILENO);
    ::dup2(devnull, STDERR_FILENO);
    ::dup2(out.fds[1], STDOUT_FILENO);
    ::execv(exe.c_str(), cargv.data());
    int err = errno;
    [[maybe_unused]] auto ignored = ::write(exec_error.fds[1], &err, sizeof err);
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  out.close_write();
  exec_error.close_write();

  int child_errno = 0;
  if (::read(exec_error.fds[0], &child_errno, sizeof child_errno) == sizeof child_errno) {
    ::waitpid(pid, nullptr, 0);
    throw Error(ErrorKind::SpawnFailure, "cannot execute " + exe.string() + ": " + std::strerror(child_errno));
  }

  const auto deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(timeout_s));
  ProcessResult result;
  bool eof = false;
  bool reaped = false;
  char buf[4096];
  while (!reaped) {
    auto now = clock::now();
    if (now >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      result.timed_out = true;
      break;
    }
    int wait_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    if (!eof) {
      pollfd pfd{out.fds[0], POLLIN, 0};
      int ready = ::poll(&pfd, 1, std::min(wait_ms, 50));
      if (ready > 0) {
        ssize_t n = ::read(out.fds[0], buf, sizeof buf);
        if (n > 0) result.out.append(buf, static_cast<std::size_t>(n));
        else if (n == 0) eof = true;
      }
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(std::min(wait_ms, 5)));
    }
    if (::waitpid(pid, nullptr, WNOHANG) == pid) reaped = true;
  }
  if (reaped) {
    // drain whatever the child wrote before exiting
    while (true) {
      pollfd pfd{out.fds[0], POLLIN, 0};
      if (::poll(&pfd, 1, 0) <= 0) break;
      ssize_t n = ::read(out.fds[0], buf, sizeof buf);
      if (n <= 0) break;
      result.out.append(buf, static_cast<std::size_t>(n));
    }
  }
  result.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return result;
}

SolverStatus status_from_output(std::string_view out) {
  auto begin = out.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return SolverStatus::Error;
  auto end = out.find_first_of(" \t\r\n()", begin);
  std::string_view token = out.substr(begin, end == std::string_view::npos ? out.size() - begin : end - begin);
  if (token == "sat") return SolverStatus::Sat;
  if (token == "unsat") return SolverStatus::Unsat;
  if (token == "unknown") return SolverStatus::Unknown;
  return SolverStatus::Error;
}

}  // namespace

SolverRun run_solver(const SolverSpec& spec, const std::filesystem::path& file) {
  validate(spec);
  auto exe = resolve_executable(spec.command.front());
  if (!exe) throw Error(ErrorKind::SpawnFailure, "solver executable '" + spec.command.front() + "' not found");

  std::optional<ModelRequestFile> request;
  std::filesystem::path input = file;
  if (spec.produces_models) {
    request.emplace(file);
    input = request->path();
  }

  std::vector<std::string> argv;
  for (auto arg : spec.command) {
    if (auto pos = arg.find(kPlaceholder); pos != std::string::npos) arg.replace(pos, kPlaceholder.size(), input.string());
    argv.push_back(std::move(arg));
  }

  ProcessResult proc = run_process(*exe, argv, spec.timeout_s);
  SolverRun run;
  run.solver = spec.name;
  run.wall_time = proc.seconds;
  run.status = proc.timed_out ? SolverStatus::Timeout : status_from_output(proc.out);
  if (run.status == SolverStatus::Sat && spec.produces_models) {
    auto nl = proc.out.find('\n');
    run.raw_model = nl == std::string::npos ? std::string() : proc.out.substr(nl + 1);
  }
  return run;
}

std::vector<SolverRun> run_solvers(const std::vector<SolverSpec>& specs,
                                   const std::vector<std::filesystem::path>& files, std::size_t jobs) {
  const std::size_t total = specs.size() * files.size();
  std::vector<SolverRun> runs(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        runs[i] = run_solver(specs[i % specs.size()], files[i / specs.size()]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::max<std::size_t>(1, std::min(jobs, total)); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

SolverRun solve_script(const SmtScript& script, const std::vector<SolverSpec>& specs) {
  std::string pattern = (std::filesystem::temp_directory_path() / "netsmt-XXXXXX.smt2").string();
  int fd = ::mkstemps(pattern.data(), 5);
  if (fd < 0) throw Error(ErrorKind::IoError, "cannot create temporary file");
  ::close(fd);
  std::filesystem::path path = pattern;
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  } cleanup{path};
  {
    std::ofstream out(path);
    out << print_smtlib(script);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  }
  std::string summary;
  for (const auto& spec : specs) {
    SolverRun run = run_solver(spec, path);
    if (run.status == SolverStatus::Sat || run.status == SolverStatus::Unsat) return run;
    summary += " " + spec.name + "=" + std::string(to_string(run.status));
  }
  throw Error(ErrorKind::SolverInconclusive, "no solver decided the formula:" + (summary.empty() ? " none configured" : summary));
}

// ---------------------------------------------------------------------------
// Models

namespace {

[[noreturn]] void unparsable(const std::string& what) { throw Error(ErrorKind::UnparsableModel, what); }

struct Definition {
  std::vector<std::string> params;
  Sexpr body;
};

class ModelEvaluator {
 public:
  explicit ModelEvaluator(std::map<std::string, Definition> defs) : defs_(std::move(defs)) {}

  bool defines(const std::string& name) const { return defs_.contains(name); }

  Value call(const std::string& name, const std::vector<Value>& args) {
    auto it = defs_.find(name);
    if (it == defs_.end()) throw Error(ErrorKind::MissingVariable, "model does not define '" + name + "'");
    const Definition& def = it->second;
    if (def.params.size() != args.size()) unparsable("arity mismatch calling '" + name + "'");
    if (++depth_ > 10000) unparsable("model definitions recurse");
    std::map<std::string, Value> env;
    for (std::size_t i = 0; i < args.size(); ++i) env[def.params[i]] = args[i];
    Value v = eval(def.body, env);
    --depth_;
    return v;
  }

 private:
  Value eval(const Sexpr& s, const std::map<std::string, Value>& env) {
    if (s.is_atom()) return atom(s.atom, env);
    if (s.items.empty()) unparsable("empty expression in model");
    const Sexpr& head = s.items[0];
    if (head.is_list) {
      if (head.has_head("as")) unparsable("unsupported array/const form '" + to_string(s) + "'");
      unparsable("unsupported expression '" + to_string(s) + "'");
    }
    const std::string& op = head.atom;
    auto arg = [&](std::size_t i) { return eval(s.items.at(i), env); };
    const std::size_t n = s.items.size() - 1;

    if (op == "ite") {
      if (n != 3) unparsable("malformed ite");
      Value c = arg(1);
      if (c.kind != Value::Kind::Bool) unparsable("non-Boolean ite condition");
      return c.boolean ? arg(2) : arg(3);
    }
    if (op == "=" || op == "distinct") {
      if (n < 2) unparsable("malformed " + op);
      std::vector<Value> vs;
      for (std::size_t i = 1; i <= n; ++i) vs.push_back(arg(i));
      bool all_eq = true, all_diff = true;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
          if (vs[i] == vs[j]) all_diff = false;
          else all_eq = false;
        }
      }
      return Value::of_bool(op == "=" ? all_eq : all_diff);
    }
    if (op == "and" || op == "or") {
      bool is_and = op == "and";
      for (std::size_t i = 1; i <= n; ++i) {
        Value v = arg(i);
        if (v.kind != Value::Kind::Bool) unparsable("non-Boolean operand of " + op);
        if (v.boolean != is_and) return Value::of_bool(!is_and);
      }
      return Value::of_bool(is_and);
    }
    if (op == "not") {
      if (n != 1) unparsable("malformed not");
      Value v = arg(1);
      if (v.kind != Value::Kind::Bool) unparsable("non-Boolean operand of not");
      return Value::of_bool(!v.boolean);
    }
    if (op == "-" && n == 1) {
      Value v = arg(1);
      if (v.kind != Value::Kind::Int) unparsable("unary minus on a non-integer");
      return Value::of_int(-v.integer);
    }
    if (op == "let") {
      if (n != 2 || !s.items[1].is_list) unparsable("malformed let");
      std::map<std::string, Value> inner = env;
      for (const auto& binding : s.items[1].items) {
        if (!binding.is_list || binding.items.size() != 2 || !binding.items[0].is_atom()) unparsable("malformed let binding");
        inner[unquote_symbol(binding.items[0].atom)] = eval(binding.items[1], env);
      }
      return eval(s.items[2], inner);
    }
    if (op == "as") {
      if (n != 2 || !s.items[1].is_atom()) unparsable("malformed as");
      return Value::of_constructor(unquote_symbol(s.items[1].atom));
    }
    if (op == "_") {
      // (_ bvN w)
      if (n == 2 && s.items[1].is_atom() && s.items[1].atom.starts_with("bv")) {
        try {
          std::uint64_t value = std::stoull(s.items[1].atom.substr(2));
          std::size_t width = std::stoul(s.items[2].atom);
          if (width < 64 && (value >> width) != 0) unparsable("bit-vector value exceeds width");
          return Value::of_bits(BitVector::from_uint(width, value));
        } catch (const std::logic_error&) {
          unparsable("bad bit-vector literal '" + to_string(s) + "'");
        }
      }
      unparsable("unsupported indexed term '" + to_string(s) + "'");
    }
    std::string name = unquote_symbol(op);
    if (defs_.contains(name)) {
      std::vector<Value> args;
      for (std::size_t i = 1; i <= n; ++i) args.push_back(arg(i));
      return call(name, args);
    }
    unparsable("unsupported operator '" + op + "' in model");
  }

  Value atom(const std::string& a, const std::map<std::string, Value>& env) {
    std::string name = unquote_symbol(a);
    if (auto it = env.find(name); it != env.end()) return it->second;
    if (a.starts_with("#b") || a.starts_with("#x")) {
      try {
        return Value::of_bits(BitVector::parse(a));
      } catch (const Error&) {
        unparsable("bad bit-vector literal '" + a + "'");
      }
    }
    if (!a.empty() && std::all_of(a.begin(), a.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      try {
        return Value::of_int(std::stoll(a));
      } catch (const std::logic_error&) {
        unparsable("integer out of range '" + a + "'");
      }
    }
    if (a == "true") return Value::of_bool(true);
    if (a == "false") return Value::of_bool(false);
    if (auto it = defs_.find(name); it != defs_.end() && it->second.params.empty()) return call(name, {});
    return Value::of_constructor(name);
  }

  std::map<std::string, Definition> defs_;
  int depth_ = 0;
};

std::map<std::string, Definition> collect_definitions(std::string_view raw) {
  std::vector<Sexpr> forms;
  try {
    forms = read_sexprs(raw);
  } catch (const Error& e) {
    unparsable(std::string("model: ") + e.what());
  }
  // unwrap "( ... )" and "(model ...)"
  if (forms.size() == 1 && forms[0].is_list && !forms[0].has_head("define-fun")) {
    std::vector<Sexpr> inner = forms[0].items;
    if (!inner.empty() && inner.front().is_atom("model")) inner.erase(inner.begin());
    forms = std::move(inner);
  }
  std::map<std::string, Definition> defs;
  for (const auto& f : forms) {
    if (f.has_head("define-fun")) {
      if (f.items.size() != 5 || !f.items[1].is_atom() || !f.items[2].is_list) unparsable("malformed define-fun");
      Definition def;
      for (const auto& p : f.items[2].items) {
        if (!p.is_list || p.items.size() != 2 || !p.items[0].is_atom()) unparsable("malformed parameter list");
        def.params.push_back(unquote_symbol(p.items[0].atom));
      }
      def.body = f.items[4];
      defs[unquote_symbol(f.items[1].atom)] = std::move(def);
    } else if (f.has_head("error")) {
      unparsable("solver reported " + to_string(f));
    } else if (f.has_head("declare-fun") || f.has_head("declare-sort") || f.has_head("declare-datatypes") ||
               f.has_head("forall")) {
      // cardinality constraints and sort declarations carry no place values
    } else {
      unparsable("unexpected form in model: " + to_string(f));
    }
  }
  return defs;
}

bool value_has_sort(const Value& v, const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::BitVec: return v.kind == Value::Kind::BitVec && v.bits.width() == s.width;
    case Sort::Kind::Int: return v.kind == Value::Kind::Int;
    case Sort::Kind::Datatype: return v.kind == Value::Kind::Constructor;
    case Sort::Kind::Bool: return v.kind == Value::Kind::Bool;
  }
  return false;
}

void collect_applications(const Term& t, const std::string& fn, std::vector<Term>& out, std::set<std::string>& seen) {
  if (t.kind == TermKind::Apply && t.name == fn) {
    if (seen.insert(to_string(t)).second) out.push_back(t);
    return;
  }
  for (const auto& a : t.args) collect_applications(a, fn, out, seen);
}

}  // namespace

ModelAssignment parse_model(std::string_view raw, const EncodingConfig& cfg, const SmtScript& script) {
  if (script.logic != to_string(cfg.fragment)) {
    throw std::invalid_argument("script logic " + script.logic + " does not match " +
                                std::string(to_string(cfg.fragment)));
  }
  ModelEvaluator model(collect_definitions(raw));
  ModelAssignment out;

  if (!has_uninterpreted_function(cfg.fragment)) {
    for (const auto& f : script.functions) {
      if (!model.defines(f.name)) {
        throw Error(ErrorKind::MissingVariable, "model has no value for '" + f.name + "'");
      }
      Value v = model.call(f.name, {});
      if (!value_has_sort(v, f.result)) unparsable("value of '" + f.name + "' has the wrong sort");
      out.values[f.name] = std::move(v);
    }
    return out;
  }

  for (const auto& f : script.functions) {
    if (f.params.empty()) continue;
    std::vector<Term> keys;
    if (f.params.front().kind == Sort::Kind::Datatype) {
      for (const auto& dt : script.datatypes) {
        if (dt.name != f.params.front().name) continue;
        for (const auto& c : dt.constructors) keys.push_back(apply(f.name, {symbol(c)}));
      }
    } else {
      std::set<std::string> seen;
      for (const auto& a : script.assertions) collect_applications(a, f.name, keys, seen);
    }
    if (!model.defines(f.name)) throw Error(ErrorKind::MissingVariable, "model does not define '" + f.name + "'");
    for (const auto& key : keys) {
      std::vector<Value> args;
      for (const auto& a : key.args) args.push_back(evaluate(a, ModelAssignment{}));
      Value v = model.call(f.name, args);
      if (!value_has_sort(v, f.result)) unparsable("value of '" + to_string(key) + "' has the wrong sort");
      out.values[to_string(key)] = std::move(v);
    }
  }
  return out;
}

std::string print_model(const ModelAssignment& model, const SmtScript& script) {
  std::string out = "(\n";
  for (const auto& f : script.functions) {
    if (f.params.empty()) {
      auto it = model.values.find(f.name);
      if (it == model.values.end()) continue;
      out += "  (define-fun " + quote_symbol(f.name) + " () " + f.result.to_smt() + " " + it->second.to_string() + ")\n";
      continue;
    }
    std::vector<std::pair<std::string, std::string>> cases;  // argument, value
    std::string prefix = "(" + quote_symbol(f.name) + " ";
    for (const auto& [key, value] : model.values) {
      if (!key.starts_with(prefix)) continue;
      cases.emplace_back(key.substr(prefix.size(), key.size() - prefix.size() - 1), value.to_string());
    }
    if (cases.empty()) continue;
    std::string body = cases.back().second;
    for (std::size_t i = cases.size() - 1; i-- > 0;) {
      body = "(ite (= x!0 " + cases[i].first + ") " + cases[i].second + " " + body + ")";
    }
    out += "  (define-fun " + quote_symbol(f.name) + " ((x!0 " + f.params.front().to_smt() + ")) " +
           f.result.to_smt() + " " + body + ")\n";
  }
  out += ")\n";
  return out;
}

}  // namespace netsmt
