#include "netsmt/smt.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "netsmt/error.hpp"

namespace netsmt {

// ---------------------------------------------------------------------------
// BitVector

BitVector BitVector::from_uint(std::size_t width, std::uint64_t value) {
  BitVector v(width);
  for (std::size_t i = 0; i < width && i < 64; ++i) v.set(i, (value >> i) & 1U);
  return v;
}

BitVector BitVector::parse(std::string_view literal) {
  auto bad = [&] { return Error(ErrorKind::SyntaxError, "invalid bit-vector literal '" + std::string(literal) + "'"); };
  if (literal.size() < 3 || literal[0] != '#') throw bad();
  std::string_view digits = literal.substr(2);
  if (literal[1] == 'b') {
    BitVector v(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
      char c = digits[digits.size() - 1 - i];
      if (c != '0' && c != '1') throw bad();
      v.set(i, c == '1');
    }
    return v;
  }
  if (literal[1] == 'x') {
    BitVector v(digits.size() * 4);
    for (std::size_t i = 0; i < digits.size(); ++i) {
      char c = digits[digits.size() - 1 - i];
      int nibble = 0;
      if (c >= '0' && c <= '9') nibble = c - '0';
      else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
      else throw bad();
      for (int b = 0; b < 4; ++b) v.set(i * 4 + b, (nibble >> b) & 1);
    }
    return v;
  }
  throw bad();
}

bool BitVector::is_zero() const {
  return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

BitVector BitVector::extract(std::size_t hi, std::size_t lo) const {
  BitVector out(hi - lo + 1);
  for (std::size_t i = lo; i <= hi; ++i) out.set(i - lo, bits_[i]);
  return out;
}

BitVector BitVector::operator&(const BitVector& other) const {
  BitVector out(width());
  for (std::size_t i = 0; i < width(); ++i) out.set(i, bits_[i] && other.bits_[i]);
  return out;
}

std::string BitVector::to_smt() const {
  std::string s = "#b";
  for (std::size_t i = width(); i-- > 0;) s += bits_[i] ? '1' : '0';
  return s;
}

std::string Sort::to_smt() const {
  switch (kind) {
    case Kind::Bool: return "Bool";
    case Kind::Int: return "Int";
    case Kind::BitVec: return "(_ BitVec " + std::to_string(width) + ")";
    case Kind::Datatype: return quote_symbol(name);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Term construction

Term symbol(std::string name) {
  Term t;
  t.kind = TermKind::Symbol;
  t.name = std::move(name);
  return t;
}

Term bv_literal(BitVector bits) {
  Term t;
  t.kind = TermKind::BvLiteral;
  t.bits = std::move(bits);
  return t;
}

Term int_literal(std::int64_t value) {
  Term t;
  t.kind = TermKind::IntLiteral;
  t.integer = value;
  return t;
}

namespace {
Term node(TermKind kind, std::vector<Term> args) {
  Term t;
  t.kind = kind;
  t.args = std::move(args);
  return t;
}
}  // namespace

Term eq(Term a, Term b) { return node(TermKind::Eq, {std::move(a), std::move(b)}); }
Term distinct(Term a, Term b) { return node(TermKind::Distinct, {std::move(a), std::move(b)}); }
Term bvand(Term a, Term b) { return node(TermKind::BvAnd, {std::move(a), std::move(b)}); }

Term disjunction(std::vector<Term> disjuncts) {
  if (disjuncts.size() == 1) return std::move(disjuncts.front());
  return node(TermKind::Or, std::move(disjuncts));
}

Term extract(std::size_t hi, std::size_t lo, Term t) {
  Term e = node(TermKind::Extract, {std::move(t)});
  e.hi = hi;
  e.lo = lo;
  return e;
}

Term apply(std::string function, std::vector<Term> args) {
  Term t = node(TermKind::Apply, std::move(args));
  t.name = std::move(function);
  return t;
}

namespace {

Sexpr int_sexpr(std::int64_t v) {
  if (v < 0) return Sexpr::make_list({Sexpr::make_atom("-"), Sexpr::make_atom(std::to_string(-v))});
  return Sexpr::make_atom(std::to_string(v));
}

Sexpr app_sexpr(std::string head, const std::vector<Term>& args) {
  std::vector<Sexpr> items{Sexpr::make_atom(std::move(head))};
  for (const auto& a : args) items.push_back(to_sexpr(a));
  return Sexpr::make_list(std::move(items));
}

}  // namespace

Sexpr to_sexpr(const Term& t) {
  switch (t.kind) {
    case TermKind::Symbol: return Sexpr::make_atom(quote_symbol(t.name));
    case TermKind::BvLiteral: return Sexpr::make_atom(t.bits.to_smt());
    case TermKind::IntLiteral: return int_sexpr(t.integer);
    case TermKind::Eq: return app_sexpr("=", t.args);
    case TermKind::Distinct: return app_sexpr("distinct", t.args);
    case TermKind::Or: return app_sexpr("or", t.args);
    case TermKind::BvAnd: return app_sexpr("bvand", t.args);
    case TermKind::Extract: {
      Sexpr op = Sexpr::make_list({Sexpr::make_atom("_"), Sexpr::make_atom("extract"),
                                   Sexpr::make_atom(std::to_string(t.hi)), Sexpr::make_atom(std::to_string(t.lo))});
      return Sexpr::make_list({std::move(op), to_sexpr(t.args.front())});
    }
    case TermKind::Apply: return app_sexpr(quote_symbol(t.name), t.args);
  }
  return {};
}

std::string to_string(const Term& t) { return to_string(to_sexpr(t)); }

std::size_t count_operators(const Term& t) {
  if (t.is_leaf()) return 0;
  std::size_t n = 1;
  for (const auto& a : t.args) n += count_operators(a);
  return n;
}

// ---------------------------------------------------------------------------
// Printing

std::string print_smtlib(const SmtScript& script) {
  std::string out;
  out += "(set-info :smt-lib-version 2.6)\n";
  if (script.status) out += "(set-info :status " + *script.status + ")\n";
  out += "(set-logic " + script.logic + ")\n";
  for (const auto& dt : script.datatypes) {
    out += "(declare-datatypes ((" + quote_symbol(dt.name) + " 0)) ((";
    for (std::size_t i = 0; i < dt.constructors.size(); ++i) {
      if (i) out += ' ';
      out += "(" + quote_symbol(dt.constructors[i]) + ")";
    }
    out += ")))\n";
  }
  for (const auto& f : script.functions) {
    out += "(declare-fun " + quote_symbol(f.name) + " (";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ' ';
      out += f.params[i].to_smt();
    }
    out += ") " + f.result.to_smt() + ")\n";
  }
  for (const auto& a : script.assertions) {
    out += "(assert ";
    out += to_string(a);
    out += ")\n";
  }
  out += "(check-sat)\n(exit)\n";
  return out;
}

// ---------------------------------------------------------------------------
// Reading

namespace {

[[noreturn]] void syntax(const Sexpr& at, const std::string& what) {
  throw Error(ErrorKind::SyntaxError, "line " + std::to_string(at.line) + ": " + what);
}

std::size_t parse_index(const Sexpr& s) {
  if (!s.is_atom()) syntax(s, "expected a numeral");
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.atom.data(), s.atom.data() + s.atom.size(), v);
  if (ec != std::errc{} || ptr != s.atom.data() + s.atom.size()) syntax(s, "expected a numeral, got '" + s.atom + "'");
  return v;
}

bool is_numeral(std::string_view a) {
  return !a.empty() && std::all_of(a.begin(), a.end(), [](char c) { return c >= '0' && c <= '9'; });
}

class ScriptReader {
 public:
  SmtScript read(std::string_view text) {
    for (const auto& cmd : read_sexprs(text)) command(cmd);
    return std::move(script_);
  }

 private:
  void command(const Sexpr& c) {
    if (!c.is_list || c.items.empty() || !c.items[0].is_atom()) syntax(c, "expected a command");
    const std::string& head = c.items[0].atom;
    if (head == "set-info") {
      if (c.items.size() == 3 && c.items[1].is_atom(":status")) script_.status = c.items[2].atom;
    } else if (head == "set-option" || head == "check-sat" || head == "exit" || head == "get-model") {
    } else if (head == "set-logic") {
      if (c.items.size() != 2) syntax(c, "malformed set-logic");
      script_.logic = c.items[1].atom;
    } else if (head == "declare-datatypes") {
      if (c.items.size() != 3 || !c.items[1].is_list || !c.items[2].is_list ||
          c.items[1].items.size() != c.items[2].items.size()) {
        syntax(c, "malformed declare-datatypes");
      }
      for (std::size_t i = 0; i < c.items[1].items.size(); ++i) {
        const Sexpr& head_decl = c.items[1].items[i];
        if (!head_decl.is_list || head_decl.items.size() != 2 || !head_decl.items[1].is_atom("0")) {
          syntax(head_decl, "only non-parametric datatypes are supported");
        }
        datatype(unquote_symbol(head_decl.items[0].atom), c.items[2].items[i]);
      }
    } else if (head == "declare-datatype") {
      if (c.items.size() != 3) syntax(c, "malformed declare-datatype");
      datatype(unquote_symbol(c.items[1].atom), c.items[2]);
    } else if (head == "declare-fun") {
      if (c.items.size() != 4 || !c.items[1].is_atom() || !c.items[2].is_list) syntax(c, "malformed declare-fun");
      FunctionDecl f{unquote_symbol(c.items[1].atom), {}, sort(c.items[3])};
      for (const auto& p : c.items[2].items) f.params.push_back(sort(p));
      script_.functions.push_back(std::move(f));
    } else if (head == "declare-const") {
      if (c.items.size() != 3 || !c.items[1].is_atom()) syntax(c, "malformed declare-const");
      script_.functions.push_back(FunctionDecl{unquote_symbol(c.items[1].atom), {}, sort(c.items[2])});
    } else if (head == "assert") {
      if (c.items.size() != 2) syntax(c, "malformed assert");
      script_.assertions.push_back(term(c.items[1]));
    } else {
      syntax(c, "unsupported command '" + head + "'");
    }
  }

  void datatype(std::string name, const Sexpr& ctors) {
    if (!ctors.is_list) syntax(ctors, "expected constructor list");
    DatatypeDecl dt{std::move(name), {}};
    for (const auto& c : ctors.items) {
      if (!c.is_list || c.items.size() != 1 || !c.items[0].is_atom()) {
        syntax(c, "only nullary constructors are supported");
      }
      dt.constructors.push_back(unquote_symbol(c.items[0].atom));
    }
    script_.datatypes.push_back(std::move(dt));
  }

  Sort sort(const Sexpr& s) {
    if (s.is_atom("Bool")) return Sort::boolean();
    if (s.is_atom("Int")) return Sort::integer();
    if (s.is_list && s.items.size() == 3 && s.items[0].is_atom("_") && s.items[1].is_atom("BitVec")) {
      return Sort::bitvec(parse_index(s.items[2]));
    }
    if (s.is_atom()) return Sort::datatype(unquote_symbol(s.atom));
    syntax(s, "unsupported sort");
  }

  Term term(const Sexpr& s) {
    if (s.is_atom()) {
      const std::string& a = s.atom;
      if (a.starts_with("#b") || a.starts_with("#x")) return bv_literal(BitVector::parse(a));
      if (is_numeral(a)) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
        if (ec != std::errc{}) syntax(s, "integer literal out of range");
        return int_literal(v);
      }
      return symbol(unquote_symbol(a));
    }
    if (s.items.empty()) syntax(s, "empty term");
    const Sexpr& head = s.items[0];
    if (head.is_list) {
      if (head.items.size() == 4 && head.items[0].is_atom("_") && head.items[1].is_atom("extract") &&
          s.items.size() == 2) {
        return extract(parse_index(head.items[2]), parse_index(head.items[3]), term(s.items[1]));
      }
      syntax(s, "unsupported indexed operator");
    }
    std::vector<Term> args;
    for (std::size_t i = 1; i < s.items.size(); ++i) args.push_back(term(s.items[i]));
    const std::string& op = head.atom;
    if (op == "-" && args.size() == 1 && args[0].kind == TermKind::IntLiteral) return int_literal(-args[0].integer);
    if (op == "=" || op == "distinct" || op == "bvand") {
      if (args.size() != 2) syntax(s, "'" + op + "' expects two arguments");
      if (op == "=") return eq(std::move(args[0]), std::move(args[1]));
      if (op == "distinct") return distinct(std::move(args[0]), std::move(args[1]));
      return bvand(std::move(args[0]), std::move(args[1]));
    }
    if (op == "or") {
      if (args.size() < 2) syntax(s, "'or' expects at least two arguments");
      return node(TermKind::Or, std::move(args));
    }
    if (args.empty()) syntax(s, "application without arguments");
    return apply(unquote_symbol(op), std::move(args));
  }

  SmtScript script_;
};

}  // namespace

SmtScript read_smtlib(std::string_view text) { return ScriptReader().read(text); }

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

class SortChecker {
 public:
  explicit SortChecker(const SmtScript& s) : script_(s) {}

  std::vector<std::string> run() {
    std::set<std::string> names;
    for (const auto& dt : script_.datatypes) {
      if (!datatypes_.insert(dt.name).second) problem("datatype '" + dt.name + "' declared twice");
      if (dt.constructors.empty()) problem("datatype '" + dt.name + "' has no constructors");
      for (const auto& c : dt.constructors) {
        if (!constructors_.emplace(c, dt.name).second) problem("constructor '" + c + "' declared twice");
      }
    }
    for (const auto& f : script_.functions) {
      for (const auto& p : f.params) check_sort(p, f.name);
      check_sort(f.result, f.name);
      if (constructors_.contains(f.name) || !functions_.emplace(f.name, &f).second) {
        problem("symbol '" + f.name + "' declared twice");
      }
    }
    for (std::size_t i = 0; i < script_.assertions.size(); ++i) {
      auto s = sort_of(script_.assertions[i]);
      if (s && *s != Sort::boolean()) problem("assertion " + std::to_string(i + 1) + " is not Boolean");
    }
    return std::move(problems_);
  }

 private:
  void problem(std::string p) { problems_.push_back(std::move(p)); }

  void check_sort(const Sort& s, const std::string& where) {
    if (s.kind == Sort::Kind::Datatype && !datatypes_.contains(s.name)) {
      problem("'" + where + "' uses undeclared sort '" + s.name + "'");
    }
    if (s.kind == Sort::Kind::BitVec && s.width == 0) problem("'" + where + "' uses a zero-width bit vector");
  }

  std::optional<Sort> sort_of(const Term& t) {
    switch (t.kind) {
      case TermKind::Symbol: {
        if (auto it = functions_.find(t.name); it != functions_.end()) {
          if (!it->second->params.empty()) {
            problem("function '" + t.name + "' used as a constant");
            return std::nullopt;
          }
          return it->second->result;
        }
        if (auto it = constructors_.find(t.name); it != constructors_.end()) return Sort::datatype(it->second);
        problem("undeclared symbol '" + t.name + "'");
        return std::nullopt;
      }
      case TermKind::BvLiteral: return Sort::bitvec(t.bits.width());
      case TermKind::IntLiteral: return Sort::integer();
      case TermKind::Eq:
      case TermKind::Distinct: {
        auto sorts = arg_sorts(t);
        if (!sorts) return std::nullopt;
        for (const auto& s : *sorts) {
          if (s != sorts->front()) {
            problem("mixed sorts in '" + to_string(t) + "'");
            return std::nullopt;
          }
        }
        return Sort::boolean();
      }
      case TermKind::Or: {
        auto sorts = arg_sorts(t);
        if (!sorts) return std::nullopt;
        for (const auto& s : *sorts) {
          if (s != Sort::boolean()) problem("non-Boolean disjunct in '" + to_string(t) + "'");
        }
        return Sort::boolean();
      }
      case TermKind::BvAnd: {
        auto sorts = arg_sorts(t);
        if (!sorts) return std::nullopt;
        if ((*sorts)[0].kind != Sort::Kind::BitVec || (*sorts)[0] != (*sorts)[1]) {
          problem("bvand width mismatch in '" + to_string(t) + "'");
          return std::nullopt;
        }
        return (*sorts)[0];
      }
      case TermKind::Extract: {
        auto s = sort_of(t.args.at(0));
        if (!s) return std::nullopt;
        if (s->kind != Sort::Kind::BitVec || t.hi < t.lo || t.hi >= s->width) {
          problem("extract out of range in '" + to_string(t) + "'");
          return std::nullopt;
        }
        return Sort::bitvec(t.hi - t.lo + 1);
      }
      case TermKind::Apply: {
        auto it = functions_.find(t.name);
        if (it == functions_.end()) {
          problem("undeclared function '" + t.name + "'");
          return std::nullopt;
        }
        auto sorts = arg_sorts(t);
        if (!sorts) return std::nullopt;
        if (*sorts != it->second->params) {
          problem("argument sorts do not match '" + t.name + "' in '" + to_string(t) + "'");
          return std::nullopt;
        }
        return it->second->result;
      }
    }
    return std::nullopt;
  }

  std::optional<std::vector<Sort>> arg_sorts(const Term& t) {
    std::vector<Sort> out;
    for (const auto& a : t.args) {
      auto s = sort_of(a);
      if (!s) return std::nullopt;
      out.push_back(*s);
    }
    if (out.empty()) {
      problem("operator without arguments");
      return std::nullopt;
    }
    return out;
  }

  const SmtScript& script_;
  std::set<std::string> datatypes_;
  std::map<std::string, std::string> constructors_;
  std::map<std::string, const FunctionDecl*> functions_;
  std::vector<std::string> problems_;
};

}  // namespace

std::vector<std::string> check_well_formed(const SmtScript& script) { return SortChecker(script).run(); }

// ---------------------------------------------------------------------------
// Evaluation

std::string Value::to_string() const {
  switch (kind) {
    case Kind::Bool: return boolean ? "true" : "false";
    case Kind::BitVec: return bits.to_smt();
    case Kind::Int: return integer < 0 ? "(- " + std::to_string(-integer) + ")" : std::to_string(integer);
    case Kind::Constructor: return quote_symbol(constructor);
  }
  return {};
}

Value evaluate(const Term& t, const ModelAssignment& model) {
  auto arg = [&](std::size_t i) { return evaluate(t.args.at(i), model); };
  switch (t.kind) {
    case TermKind::Symbol: {
      if (auto it = model.values.find(t.name); it != model.values.end()) return it->second;
      return Value::of_constructor(t.name);
    }
    case TermKind::BvLiteral: return Value::of_bits(t.bits);
    case TermKind::IntLiteral: return Value::of_int(t.integer);
    case TermKind::Eq: {
      Value first = arg(0);
      for (std::size_t i = 1; i < t.args.size(); ++i) {
        if (!(arg(i) == first)) return Value::of_bool(false);
      }
      return Value::of_bool(true);
    }
    case TermKind::Distinct: {
      std::vector<Value> vs;
      for (std::size_t i = 0; i < t.args.size(); ++i) vs.push_back(arg(i));
      for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
          if (vs[i] == vs[j]) return Value::of_bool(false);
        }
      }
      return Value::of_bool(true);
    }
    case TermKind::Or: {
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (arg(i).boolean) return Value::of_bool(true);
      }
      return Value::of_bool(false);
    }
    case TermKind::BvAnd: return Value::of_bits(arg(0).bits & arg(1).bits);
    case TermKind::Extract: return Value::of_bits(arg(0).bits.extract(t.hi, t.lo));
    case TermKind::Apply: {
      std::string key = "(" + quote_symbol(t.name);
      for (std::size_t i = 0; i < t.args.size(); ++i) key += " " + arg(i).to_string();
      key += ")";
      if (auto it = model.values.find(key); it != model.values.end()) return it->second;
      throw Error(ErrorKind::MissingVariable, "model has no value for " + key);
    }
  }
  return {};
}

bool satisfies(const SmtScript& script, const ModelAssignment& model) {
  return std::all_of(script.assertions.begin(), script.assertions.end(), [&](const Term& a) {
    Value v = evaluate(a, model);
    return v.kind == Value::Kind::Bool && v.boolean;
  });
}

}  // namespace netsmt
