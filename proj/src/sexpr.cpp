#include "netsmt/sexpr.hpp"

#include <algorithm>
#include <cctype>

#include "netsmt/error.hpp"

namespace netsmt {
namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Sexpr> read_all() {
    std::vector<Sexpr> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      if (text_[pos_] == ')') fail("unexpected ')'");
      out.push_back(read());
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::SyntaxError, "line " + std::to_string(line_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Sexpr read() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    std::size_t start_line = line_;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      std::vector<Sexpr> items;
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) {
          throw Error(ErrorKind::SyntaxError,
                      "line " + std::to_string(start_line) + ": unbalanced '(' (missing ')')");
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        items.push_back(read());
      }
      Sexpr s = Sexpr::make_list(std::move(items));
      s.line = start_line;
      return s;
    }
    std::size_t begin = pos_;
    if (c == '|') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '|') {
        if (text_[pos_] == '\\') fail("backslash in quoted symbol");
        if (text_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ >= text_.size()) fail("unterminated quoted symbol");
      ++pos_;
    } else if (c == '"') {
      ++pos_;
      while (true) {
        if (pos_ >= text_.size()) fail("unterminated string literal");
        if (text_[pos_] == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        if (text_[pos_] == '\n') ++line_;
        ++pos_;
      }
    } else {
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';' || d == '|' ||
            d == '"') {
          break;
        }
        ++pos_;
      }
    }
    Sexpr s = Sexpr::make_atom(std::string(text_.substr(begin, pos_ - begin)));
    s.line = start_line;
    return s;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

void render(const Sexpr& s, std::string& out) {
  if (!s.is_list) {
    out += s.atom;
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ' ';
    render(s.items[i], out);
  }
  out += ')';
}

}  // namespace

std::vector<Sexpr> read_sexprs(std::string_view text) { return Reader(text).read_all(); }

std::string to_string(const Sexpr& s) {
  std::string out;
  render(s, out);
  return out;
}

bool is_simple_symbol(std::string_view name) {
  if (name.empty()) return false;
  static constexpr std::string_view kExtra = "~!@$%^&*_-+=<>.?/";
  auto ok = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || kExtra.find(c) != std::string_view::npos;
  };
  if (std::isdigit(static_cast<unsigned char>(name.front()))) return false;
  return std::all_of(name.begin(), name.end(), ok);
}

std::string quote_symbol(std::string_view name) {
  if (is_simple_symbol(name)) return std::string(name);
  return "|" + std::string(name) + "|";
}

std::string unquote_symbol(std::string_view atom) {
  if (atom.size() >= 2 && atom.front() == '|' && atom.back() == '|') {
    return std::string(atom.substr(1, atom.size() - 2));
  }
  return std::string(atom);
}

}  // namespace netsmt
