#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace netsmt {

/// Untyped S-expression as read from SMT-LIB text. Atoms keep their source
/// spelling (`#b01`, `|a b|`, `"str"`, `:keyword`, numerals).
struct Sexpr {
  bool is_list = false;
  std::string atom;
  std::vector<Sexpr> items;
  std::size_t line = 0;

  static Sexpr make_atom(std::string text) { return Sexpr{false, std::move(text), {}, 0}; }
  static Sexpr make_list(std::vector<Sexpr> items) { return Sexpr{true, {}, std::move(items), 0}; }

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  /// True for a list whose first element is the atom `head`.
  bool has_head(std::string_view head) const {
    return is_list && !items.empty() && items.front().is_atom(head);
  }

  bool operator==(const Sexpr& other) const { return is_list == other.is_list && atom == other.atom && items == other.items; }
};

/// Reads every top-level S-expression in `text`. Handles `;` comments,
/// `|quoted symbols|` and `"string literals"` (with `""` escapes).
/// Throws Error(SyntaxError) with the line number on malformed input.
std::vector<Sexpr> read_sexprs(std::string_view text);

/// Single-line rendering with one space between list items.
std::string to_string(const Sexpr& s);

/// True when `name` can be printed as an SMT-LIB simple symbol.
bool is_simple_symbol(std::string_view name);
/// `name` as-is when simple, `|name|` otherwise.
std::string quote_symbol(std::string_view name);
/// Strips the bars of a quoted symbol.
std::string unquote_symbol(std::string_view atom);

}  // namespace netsmt
