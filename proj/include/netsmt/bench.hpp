#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netsmt {

enum class Satisfiability { Sat, Unsat };
std::string_view to_string(Satisfiability s);

/// One formula's timings across the solver set.
struct BenchmarkRecord {
  std::string formula;
  std::string fragment;
  Satisfiability status = Satisfiability::Sat;
  std::map<std::string, std::optional<double>> solver_times;  // nullopt: timeout or no answer
  std::uint64_t file_size = 0;

  /// Smallest present solver time; nullopt when no solver answered.
  std::optional<double> min_time() const;
  bool operator==(const BenchmarkRecord&) const = default;
};

struct RecordSet {
  std::vector<BenchmarkRecord> records;  // sorted by formula id
  std::vector<std::string> rejected;     // formulas with conflicting or missing answers
};

/// Reads the records CSV (header formula,fragment,status,solver,time_s,file_size),
/// one row per (formula, solver). Rows with an empty time or a status
/// other than sat/unsat count as no answer. Formulas whose solvers
/// disagree on sat/unsat, or that no solver answered, are rejected.
RecordSet parse_records_csv(std::string_view text);

struct FamilyKey {
  std::string fragment;
  Satisfiability status;
  auto operator<=>(const FamilyKey&) const = default;
};

std::map<FamilyKey, std::vector<BenchmarkRecord>> group_families(const std::vector<BenchmarkRecord>& records);

inline constexpr double kMinSolveTime = 10.0;
inline constexpr double kMaxSolveTime = 3600.0;

/// Minute key of a solve time: round half up of seconds / 60.
long minute_class(double seconds);

using Classes = std::map<long, std::vector<BenchmarkRecord>>;

/// Keeps records whose min_time lies in [10 s, 3600 s] and groups them by
/// minute_class. Each class is sorted by (file_size, formula).
Classes classify(const std::vector<BenchmarkRecord>& records);

struct Chosen {
  BenchmarkRecord record;
  long class_key = 0;
  std::size_t rank = 0;  // 1-based position in the selection
};

struct FamilySelection {
  std::optional<FamilyKey> family;
  std::map<long, std::size_t> class_sizes;
  std::vector<Chosen> chosen;

  /// How many records each class contributed.
  std::map<long, std::size_t> per_class_counts() const;
};

/// Round-robin over classes in ascending key order; every pass takes the
/// smallest unchosen record (by file size, then formula id) of each
/// class that still has one, until `target` records are chosen or the
/// supply runs out.
FamilySelection select_family(const Classes& classes, std::size_t target = 100);

/// Selection CSV: header "formula,class,rank", one row per chosen record,
/// then "# family=<fragment>/<status> classes=<k> supply=<s> chosen=<c>".
std::string selection_csv(const std::vector<FamilySelection>& families);

/// classify + select_family for every family in `text`.
std::vector<FamilySelection> select_from_csv(std::string_view text, std::size_t target = 100);

}  // namespace netsmt
