#include "netsmt/concurrency.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_set>

#include "netsmt/error.hpp"

namespace netsmt {

Marking::Marking(std::size_t place_count, const std::vector<PlaceIndex>& marked) : Marking(place_count) {
  for (auto p : marked) insert(p);
}

std::vector<PlaceIndex> Marking::places() const {
  std::vector<PlaceIndex> out;
  for (std::size_t p = 0; p < size_; ++p) {
    if (contains(p)) out.push_back(p);
  }
  return out;
}

std::size_t Marking::hash() const {
  // FNV-1a over the words
  std::uint64_t h = 1469598103934665603ULL;
  for (auto w : words_) {
    h ^= w;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

ConcurrencyRelation::ConcurrencyRelation(std::size_t place_count)
    : size_(place_count), adj_(place_count * place_count, false), degree_(place_count, 0) {}

void ConcurrencyRelation::add(PlaceIndex a, PlaceIndex b) {
  if (a == b || adj_[a * size_ + b]) return;
  adj_[a * size_ + b] = true;
  adj_[b * size_ + a] = true;
  ++degree_[a];
  ++degree_[b];
  ++pairs_;
}

std::vector<std::pair<PlaceIndex, PlaceIndex>> ConcurrencyRelation::pairs() const {
  std::vector<std::pair<PlaceIndex, PlaceIndex>> out;
  out.reserve(pairs_);
  for (PlaceIndex a = 0; a < size_; ++a) {
    for (PlaceIndex b = a + 1; b < size_; ++b) {
      if (adj_[a * size_ + b]) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<PlaceIndex> ConcurrencyRelation::neighbours(PlaceIndex p) const {
  std::vector<PlaceIndex> out;
  for (PlaceIndex q = 0; q < size_; ++q) {
    if (concurrent(p, q)) out.push_back(q);
  }
  return out;
}

std::vector<Marking> explore_reachable(const PetriNet& net, std::size_t state_limit) {
  const std::size_t n = net.place_count();
  Marking initial(n, net.initial_marking);

  std::unordered_set<Marking, MarkingHash> seen{initial};
  std::deque<Marking> work{initial};
  if (seen.size() > state_limit) {
    throw Error(ErrorKind::StateLimitExceeded, "state limit " + std::to_string(state_limit) + " exceeded");
  }

  while (!work.empty()) {
    Marking current = std::move(work.front());
    work.pop_front();
    for (const auto& t : net.transitions) {
      bool enabled = std::all_of(t.inputs.begin(), t.inputs.end(),
                                 [&](PlaceIndex p) { return current.contains(p); });
      if (!enabled) continue;
      Marking next = current;
      for (auto p : t.inputs) next.erase(p);
      for (auto p : t.outputs) {
        if (next.contains(p)) {
          throw Error(ErrorKind::NotSafe, "firing transition '" + t.id + "' puts a second token in place '" +
                                              net.places[p] + "'");
        }
        next.insert(p);
      }
      if (seen.insert(next).second) {
        if (seen.size() > state_limit) {
          throw Error(ErrorKind::StateLimitExceeded, "state limit " + std::to_string(state_limit) + " exceeded");
        }
        work.push_back(std::move(next));
      }
    }
  }

  std::vector<Marking> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

ConcurrencyRelation concurrency_relation(const std::vector<Marking>& markings) {
  if (markings.empty()) return {};
  ConcurrencyRelation rel(markings.front().place_count());
  for (const auto& m : markings) {
    auto marked = m.places();
    for (std::size_t i = 0; i < marked.size(); ++i) {
      for (std::size_t j = i + 1; j < marked.size(); ++j) rel.add(marked[i], marked[j]);
    }
  }
  return rel;
}

ConcurrencyRelation parse_conc(std::string_view text, const PlaceNumbering& places) {
  ConcurrencyRelation rel(places.size());
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> ids;
    for (std::string w; words >> w;) ids.push_back(w);
    if (ids.empty()) continue;
    if (ids.size() != 2) {
      throw Error(ErrorKind::SyntaxError, "line " + std::to_string(line_no) + ": expected two places");
    }
    std::size_t a = 0, b = 0;
    try {
      a = places.number(ids[0]);
      b = places.number(ids[1]);
    } catch (const std::out_of_range& e) {
      throw Error(ErrorKind::UnknownPlaceInArc, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (a == b) {
      throw Error(ErrorKind::SyntaxError, "line " + std::to_string(line_no) + ": a place is not concurrent to itself");
    }
    rel.add(a - 1, b - 1);
  }
  return rel;
}

std::string print_conc(const ConcurrencyRelation& rel, const PlaceNumbering& places) {
  std::string out;
  for (auto [a, b] : rel.pairs()) {
    out += places.place(a + 1);
    out += ' ';
    out += places.place(b + 1);
    out += '\n';
  }
  return out;
}

std::size_t greedy_color_count(const ConcurrencyRelation& rel) {
  const std::size_t n = rel.place_count();
  std::vector<std::size_t> color(n, 0);
  std::size_t used = n == 0 ? 0 : 1;
  for (PlaceIndex p = 0; p < n; ++p) {
    std::vector<bool> taken(n + 2, false);
    for (PlaceIndex q = 0; q < p; ++q) {
      if (rel.concurrent(p, q)) taken[color[q]] = true;
    }
    std::size_t c = 1;
    while (taken[c]) ++c;
    color[p] = c;
    used = std::max(used, c);
  }
  return used;
}

namespace {

// DSATUR branch and bound: pick the uncolored vertex with the most
// distinct neighbour colors (ties: highest degree, then lowest index),
// try every used color plus one fresh color while below the incumbent.
class Dsatur {
 public:
  Dsatur(const ConcurrencyRelation& rel, std::uint64_t budget)
      : rel_(rel), n_(rel.place_count()), budget_(budget), color_(n_, 0) {
    adj_.resize(n_);
    for (PlaceIndex p = 0; p < n_; ++p) adj_[p] = rel.neighbours(p);
  }

  std::size_t solve() {
    if (n_ == 0) return 0;
    best_ = greedy_color_count(rel_);
    search(0, 0);
    return best_;
  }

 private:
  void search(std::size_t colored, std::size_t used) {
    if (++nodes_ > budget_) {
      throw Error(ErrorKind::BudgetExceeded, "chromatic number search exceeded " + std::to_string(budget_) + " nodes");
    }
    if (used >= best_) return;
    if (colored == n_) {
      best_ = used;
      return;
    }
    PlaceIndex v = pick();
    std::vector<bool> forbidden(used + 2, false);
    for (auto q : adj_[v]) {
      if (color_[q] != 0) forbidden[color_[q]] = true;
    }
    for (std::size_t c = 1; c <= used + 1 && c < best_; ++c) {
      if (forbidden[c]) continue;
      color_[v] = c;
      search(colored + 1, std::max(used, c));
      color_[v] = 0;
      if (used >= best_) break;
    }
  }

  PlaceIndex pick() const {
    PlaceIndex best = n_;
    std::size_t best_sat = 0, best_deg = 0;
    for (PlaceIndex p = 0; p < n_; ++p) {
      if (color_[p] != 0) continue;
      std::set<std::size_t> seen;
      for (auto q : adj_[p]) {
        if (color_[q] != 0) seen.insert(color_[q]);
      }
      std::size_t sat = seen.size();
      std::size_t deg = adj_[p].size();
      if (best == n_ || sat > best_sat || (sat == best_sat && deg > best_deg)) {
        best = p;
        best_sat = sat;
        best_deg = deg;
      }
    }
    return best;
  }

  const ConcurrencyRelation& rel_;
  std::size_t n_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::size_t best_ = 0;
  std::vector<std::size_t> color_;
  std::vector<std::vector<PlaceIndex>> adj_;
};

}  // namespace

std::size_t chromatic_number(const ConcurrencyRelation& rel, std::uint64_t budget) {
  return Dsatur(rel, budget).solve();
}

}  // namespace netsmt
