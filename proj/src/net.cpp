#include "netsmt/net.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "netsmt/error.hpp"

namespace netsmt {
namespace {

[[noreturn]] void fail(ErrorKind kind, std::size_t line, const std::string& what) {
  throw Error(kind, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

struct PendingTransition {
  std::string id;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::size_t line;
};

std::vector<std::string> identifier_list(std::string_view s, std::size_t line,
                                         std::string_view what) {
  std::vector<std::string> ids;
  std::set<std::string_view> seen;
  for (auto tok : split_ws(s)) {
    if (!is_identifier(tok)) fail(ErrorKind::SyntaxError, line, "invalid identifier '" + std::string(tok) + "'");
    if (!seen.insert(tok).second) {
      fail(ErrorKind::DuplicateIdentifier, line,
           "place '" + std::string(tok) + "' repeated in " + std::string(what));
    }
    ids.emplace_back(tok);
  }
  return ids;
}

}  // namespace

bool is_identifier(std::string_view token) {
  if (token.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(token.front())) return false;
  return std::all_of(token.begin(), token.end(),
                     [&](char c) { return alpha(c) || digit(c) || c == '.'; });
}

PetriNet parse_net(std::string_view text) {
  PetriNet net;
  bool have_name = false;
  std::unordered_map<std::string, PlaceIndex> place_index;
  std::vector<PendingTransition> pending;
  std::set<std::string> transition_ids;
  std::vector<std::pair<std::string, std::size_t>> marked;
  std::set<std::string> marked_seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto words = split_ws(line);
    if (words.empty()) continue;

    std::string_view keyword = words.front();
    std::string_view rest = line.substr(line.find(keyword) + keyword.size());

    if (keyword == "net") {
      if (have_name) fail(ErrorKind::SyntaxError, line_no, "duplicate 'net' line");
      if (words.size() != 2 || !is_identifier(words[1])) {
        fail(ErrorKind::SyntaxError, line_no, "expected 'net <name>'");
      }
      net.name = std::string(words[1]);
      have_name = true;
    } else if (keyword == "places") {
      if (words.size() < 2) fail(ErrorKind::SyntaxError, line_no, "'places' needs at least one identifier");
      for (auto& id : identifier_list(rest, line_no, "places line")) {
        if (place_index.contains(id)) fail(ErrorKind::DuplicateIdentifier, line_no, "place '" + id + "' declared twice");
        place_index.emplace(id, net.places.size());
        net.places.push_back(id);
      }
    } else if (keyword == "transition") {
      auto colon = rest.find(':');
      if (colon == std::string_view::npos) fail(ErrorKind::SyntaxError, line_no, "expected 'transition <id>: <in> -> <out>'");
      auto id_words = split_ws(rest.substr(0, colon));
      if (id_words.size() != 1 || !is_identifier(id_words[0])) {
        fail(ErrorKind::SyntaxError, line_no, "invalid transition identifier");
      }
      std::string_view arcs = rest.substr(colon + 1);
      auto arrow = arcs.find("->");
      if (arrow == std::string_view::npos || arcs.find("->", arrow + 2) != std::string_view::npos) {
        fail(ErrorKind::SyntaxError, line_no, "expected exactly one '->' in transition");
      }
      PendingTransition t{std::string(id_words[0]),
                          identifier_list(arcs.substr(0, arrow), line_no, "transition inputs"),
                          identifier_list(arcs.substr(arrow + 2), line_no, "transition outputs"), line_no};
      if (!transition_ids.insert(t.id).second) {
        fail(ErrorKind::DuplicateIdentifier, line_no, "transition '" + t.id + "' declared twice");
      }
      pending.push_back(std::move(t));
    } else if (keyword == "marking") {
      for (auto& id : identifier_list(rest, line_no, "marking")) {
        if (!marked_seen.insert(id).second) fail(ErrorKind::DuplicateIdentifier, line_no, "place '" + id + "' marked twice");
        marked.emplace_back(id, line_no);
      }
    } else {
      fail(ErrorKind::SyntaxError, line_no, "unknown keyword '" + std::string(keyword) + "'");
    }
  }

  if (net.places.empty()) throw Error(ErrorKind::EmptyNet, "net declares no places");

  auto resolve = [&](const std::vector<std::string>& ids, std::size_t line, std::string_view ctx) {
    std::vector<PlaceIndex> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
      auto it = place_index.find(id);
      if (it == place_index.end()) {
        fail(ErrorKind::UnknownPlaceInArc, line, "undeclared place '" + id + "' in " + std::string(ctx));
      }
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  for (const auto& t : pending) {
    net.transitions.push_back(Transition{t.id, resolve(t.inputs, t.line, "transition " + t.id),
                                         resolve(t.outputs, t.line, "transition " + t.id)});
  }
  for (const auto& [id, line] : marked) {
    net.initial_marking.push_back(resolve({id}, line, "marking").front());
  }
  std::sort(net.initial_marking.begin(), net.initial_marking.end());
  return net;
}

std::string print_net(const PetriNet& net) {
  std::ostringstream out;
  out << "net " << net.name << '\n';
  out << "places";
  for (const auto& p : net.places) out << ' ' << p;
  out << '\n';
  for (const auto& t : net.transitions) {
    out << "transition " << t.id << ":";
    for (auto p : t.inputs) out << ' ' << net.places[p];
    out << " ->";
    for (auto p : t.outputs) out << ' ' << net.places[p];
    out << '\n';
  }
  if (!net.initial_marking.empty()) {
    out << "marking";
    for (auto p : net.initial_marking) out << ' ' << net.places[p];
    out << '\n';
  }
  return out.str();
}

PlaceNumbering::PlaceNumbering(std::vector<std::string> places) : order_(std::move(places)) {
  index_.reserve(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) index_.emplace(order_[i], i + 1);
}

std::size_t PlaceNumbering::number(std::string_view place) const {
  auto it = index_.find(std::string(place));
  if (it == index_.end()) throw std::out_of_range("unknown place '" + std::string(place) + "'");
  return it->second;
}

PlaceNumbering numbering(const PetriNet& net) { return PlaceNumbering(net.places); }

}  // namespace netsmt
