#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netsmt/sexpr.hpp"

namespace netsmt {

/// Fixed-width bit vector. Bit 0 is the least significant bit; SMT-LIB
/// literals print most significant bit first.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t width) : bits_(width, false) {}

  static BitVector from_uint(std::size_t width, std::uint64_t value);
  /// Accepts `#b...` and `#x...` literals; throws Error(SyntaxError).
  static BitVector parse(std::string_view literal);

  std::size_t width() const { return bits_.size(); }
  bool bit(std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v = true) { bits_[i] = v; }
  bool is_zero() const;
  /// Bits hi..lo inclusive, as a vector of width hi-lo+1.
  BitVector extract(std::size_t hi, std::size_t lo) const;
  BitVector operator&(const BitVector& other) const;
  std::string to_smt() const;

  bool operator==(const BitVector&) const = default;

 private:
  std::vector<bool> bits_;
};

struct Sort {
  enum class Kind { Bool, BitVec, Int, Datatype };
  Kind kind = Kind::Bool;
  std::size_t width = 0;
  std::string name;

  static Sort boolean() { return {Kind::Bool, 0, {}}; }
  static Sort bitvec(std::size_t w) { return {Kind::BitVec, w, {}}; }
  static Sort integer() { return {Kind::Int, 0, {}}; }
  static Sort datatype(std::string n) { return {Kind::Datatype, 0, std::move(n)}; }

  std::string to_smt() const;
  bool operator==(const Sort&) const = default;
};

enum class TermKind { Symbol, BvLiteral, IntLiteral, Eq, Distinct, Or, BvAnd, Extract, Apply };

/// Typed term tree for the formulas this project emits. Leaves are
/// symbols and literals; every other kind is an operator application.
struct Term {
  TermKind kind = TermKind::Symbol;
  std::string name;  // Symbol, or the applied function for Apply
  BitVector bits;
  std::int64_t integer = 0;
  std::size_t hi = 0, lo = 0;  // Extract
  std::vector<Term> args;

  bool is_leaf() const {
    return kind == TermKind::Symbol || kind == TermKind::BvLiteral || kind == TermKind::IntLiteral;
  }
  bool operator==(const Term&) const = default;
};

Term symbol(std::string name);
Term bv_literal(BitVector bits);
Term int_literal(std::int64_t value);
Term eq(Term a, Term b);
Term distinct(Term a, Term b);
/// Disjunction; a single disjunct is returned unwrapped.
Term disjunction(std::vector<Term> disjuncts);
Term bvand(Term a, Term b);
Term extract(std::size_t hi, std::size_t lo, Term t);
Term apply(std::string function, std::vector<Term> args);

Sexpr to_sexpr(const Term& t);
std::string to_string(const Term& t);
/// Number of operator-application nodes in `t`.
std::size_t count_operators(const Term& t);

struct DatatypeDecl {
  std::string name;
  std::vector<std::string> constructors;
  bool operator==(const DatatypeDecl&) const = default;
};

struct FunctionDecl {
  std::string name;
  std::vector<Sort> params;  // empty for constants
  Sort result;
  bool operator==(const FunctionDecl&) const = default;
};

struct SmtScript {
  std::string logic;
  std::optional<std::string> status;  // sat / unsat / unknown
  std::vector<DatatypeDecl> datatypes;
  std::vector<FunctionDecl> functions;
  std::vector<Term> assertions;

  bool operator==(const SmtScript&) const = default;
};

/// Deterministic SMT-LIB 2.6 text: set-info lines, set-logic,
/// declarations, one assert per line, check-sat, exit.
std::string print_smtlib(const SmtScript& script);

/// Reads the subset of SMT-LIB 2.6 produced by print_smtlib back into a
/// script. Throws Error(SyntaxError) on anything else.
SmtScript read_smtlib(std::string_view text);

/// Declared-before-use and sort checks. Returns one message per problem;
/// empty means the script is well formed.
std::vector<std::string> check_well_formed(const SmtScript& script);

struct Value {
  enum class Kind { Bool, BitVec, Int, Constructor };
  Kind kind = Kind::Bool;
  bool boolean = false;
  BitVector bits;
  std::int64_t integer = 0;
  std::string constructor;

  static Value of_bool(bool b) { return Value{Kind::Bool, b, {}, 0, {}}; }
  static Value of_bits(BitVector v) { return Value{Kind::BitVec, false, std::move(v), 0, {}}; }
  static Value of_int(std::int64_t i) { return Value{Kind::Int, false, {}, i, {}}; }
  static Value of_constructor(std::string c) { return Value{Kind::Constructor, false, {}, 0, std::move(c)}; }

  std::string to_string() const;
  bool operator==(const Value&) const = default;
};

/// Values of the place-standing terms of a script (constants such as
/// `x_p1`, or applications such as `(u #b01)`), keyed by term text.
struct ModelAssignment {
  std::map<std::string, Value> values;
  bool operator==(const ModelAssignment&) const = default;
};

/// Evaluates `t` where constants and function applications are looked up
/// by term text in `model`. Unbound symbols evaluate to constructors;
/// unbound applications throw Error(MissingVariable).
Value evaluate(const Term& t, const ModelAssignment& model);

/// True when every assertion of `script` evaluates to true under `model`.
bool satisfies(const SmtScript& script, const ModelAssignment& model);

}  // namespace netsmt
