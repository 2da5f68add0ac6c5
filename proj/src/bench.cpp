#include "netsmt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "netsmt/error.hpp"

namespace netsmt {

std::string_view to_string(Satisfiability s) { return s == Satisfiability::Sat ? "SAT" : "UNSAT"; }

std::optional<double> BenchmarkRecord::min_time() const {
  std::optional<double> best;
  for (const auto& [solver, t] : solver_times) {
    if (t && (!best || *t < *best)) best = t;
  }
  return best;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  for (auto& f : out) {
    auto b = f.find_first_not_of(" \t");
    auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

RecordSet parse_records_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return Error(ErrorKind::SyntaxError, "records line " + std::to_string(line_no) + ": " + what);
  };

  bool header = false;
  struct Partial {
    BenchmarkRecord record;
    std::set<Satisfiability> answers;
    bool size_conflict = false;
    bool fragment_conflict = false;
  };
  std::map<std::string, Partial> by_formula;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line.starts_with('#')) continue;
    auto fields = split_csv_line(line);
    if (!header) {
      static const std::vector<std::string> expected{"formula", "fragment", "status", "solver", "time_s", "file_size"};
      if (fields != expected) throw fail("expected header formula,fragment,status,solver,time_s,file_size");
      header = true;
      continue;
    }
    if (fields.size() != 6) throw fail("expected 6 fields");
    const auto& formula = fields[0];
    if (formula.empty()) throw fail("empty formula id");

    std::uint64_t size = 0;
    auto [p, ec] = std::from_chars(fields[5].data(), fields[5].data() + fields[5].size(), size);
    if (ec != std::errc{} || p != fields[5].data() + fields[5].size()) throw fail("bad file_size '" + fields[5] + "'");

    std::optional<double> time;
    std::string status = lower(fields[2]);
    if (!fields[4].empty() && fields[4] != "-") {
      try {
        std::size_t used = 0;
        double t = std::stod(fields[4], &used);
        if (used != fields[4].size() || !(t >= 0)) throw fail("bad time_s '" + fields[4] + "'");
        time = t;
      } catch (const std::logic_error&) {
        throw fail("bad time_s '" + fields[4] + "'");
      }
    }
    bool answered = (status == "sat" || status == "unsat") && time.has_value();

    auto [it, inserted] = by_formula.try_emplace(formula);
    Partial& part = it->second;
    if (inserted) {
      part.record.formula = formula;
      part.record.fragment = fields[1];
      part.record.file_size = size;
    } else {
      part.size_conflict |= part.record.file_size != size;
      part.fragment_conflict |= part.record.fragment != fields[1];
    }
    if (answered) {
      Satisfiability s = status == "sat" ? Satisfiability::Sat : Satisfiability::Unsat;
      part.answers.insert(s);
      part.record.status = s;
      part.record.solver_times[fields[3]] = time;
    } else {
      part.record.solver_times.try_emplace(fields[3], std::nullopt);
    }
  }
  if (!header) throw Error(ErrorKind::SyntaxError, "records file has no header");

  RecordSet out;
  for (auto& [formula, part] : by_formula) {
    if (part.answers.size() != 1 || part.size_conflict || part.fragment_conflict) {
      out.rejected.push_back(formula);
    } else {
      out.records.push_back(std::move(part.record));
    }
  }
  return out;
}

std::map<FamilyKey, std::vector<BenchmarkRecord>> group_families(const std::vector<BenchmarkRecord>& records) {
  std::map<FamilyKey, std::vector<BenchmarkRecord>> out;
  for (const auto& r : records) out[FamilyKey{r.fragment, r.status}].push_back(r);
  return out;
}

long minute_class(double seconds) { return static_cast<long>(std::floor(seconds / 60.0 + 0.5)); }

Classes classify(const std::vector<BenchmarkRecord>& records) {
  Classes classes;
  for (const auto& r : records) {
    auto t = r.min_time();
    if (!t || *t < kMinSolveTime || *t > kMaxSolveTime) continue;
    classes[minute_class(*t)].push_back(r);
  }
  for (auto& [key, members] : classes) {
    std::sort(members.begin(), members.end(), [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
      return std::tie(a.file_size, a.formula) < std::tie(b.file_size, b.formula);
    });
  }
  return classes;
}

std::map<long, std::size_t> FamilySelection::per_class_counts() const {
  std::map<long, std::size_t> counts;
  for (const auto& [key, size] : class_sizes) counts[key] = 0;
  for (const auto& c : chosen) ++counts[c.class_key];
  return counts;
}

FamilySelection select_family(const Classes& classes, std::size_t target) {
  FamilySelection sel;
  for (const auto& [key, members] : classes) sel.class_sizes[key] = members.size();
  if (!classes.empty() && !classes.begin()->second.empty()) {
    const auto& r = classes.begin()->second.front();
    sel.family = FamilyKey{r.fragment, r.status};
  }

  std::map<long, std::size_t> taken;
  bool progress = true;
  while (sel.chosen.size() < target && progress) {
    progress = false;
    for (const auto& [key, members] : classes) {
      if (sel.chosen.size() >= target) break;
      std::size_t& next = taken[key];
      if (next >= members.size()) continue;
      sel.chosen.push_back(Chosen{members[next], key, sel.chosen.size() + 1});
      ++next;
      progress = true;
    }
  }
  return sel;
}

std::string selection_csv(const std::vector<FamilySelection>& families) {
  std::string out = "formula,class,rank\n";
  for (const auto& fam : families) {
    std::size_t supply = 0;
    for (const auto& [key, size] : fam.class_sizes) supply += size;
    for (const auto& c : fam.chosen) {
      out += c.record.formula + "," + std::to_string(c.class_key) + "," + std::to_string(c.rank) + "\n";
    }
    out += "# family=";
    out += fam.family ? fam.family->fragment + "/" + std::string(to_string(fam.family->status)) : std::string("-");
    out += " classes=" + std::to_string(fam.class_sizes.size()) + " supply=" + std::to_string(supply) +
           " chosen=" + std::to_string(fam.chosen.size()) + "\n";
  }
  return out;
}

std::vector<FamilySelection> select_from_csv(std::string_view text, std::size_t target) {
  std::vector<FamilySelection> out;
  for (const auto& [key, records] : group_families(parse_records_csv(text).records)) {
    FamilySelection sel = select_family(classify(records), target);
    sel.family = key;
    out.push_back(std::move(sel));
  }
  return out;
}

}  // namespace netsmt
