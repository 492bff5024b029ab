#pragma once

// TREC-style effectiveness measures over binary relevance, plus the paired
// sign-flip randomization test used to compare two systems.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace semsearch {

using Qrels = std::map<std::string, std::set<std::string>>;
using RunResult = std::map<std::string, std::vector<std::string>>;

inline constexpr std::array<double, 11> kRecallLevels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                                         0.6, 0.7, 0.8, 0.9, 1.0};

struct CurvePoint {
  double recall = 0.0;
  double value = 0.0;
};

struct MetricReport {
  std::map<std::string, double> per_query_ap;
  double map = 0.0;
  std::array<CurvePoint, 11> pr_curve{};
  std::array<CurvePoint, 11> f_curve{};
  std::vector<std::string> warnings;
};

/// "query_id 0 doc_id rel" per line; rel must be 0 or 1 and only rel = 1
/// is kept. Blank and '#' lines are skipped. A repeated (query, doc) pair is
/// a ParseError.
Qrels parse_qrels(const std::filesystem::path& path);

/// "query_id Q0 doc_id rank score tag" per line, ordered by rank within a
/// query. Blank and '#' lines are skipped. A doc repeated within a query is
/// a ParseError.
RunResult parse_run(const std::filesystem::path& path);

/// Throws std::invalid_argument on an empty relevant set or a duplicate in
/// the ranking.
double average_precision(std::span<const std::string> ranking, const std::set<std::string>& relevant);

/// Interpolated precision at the 11 standard recall levels.
std::array<double, 11> interpolated_precision(std::span<const std::string> ranking,
                                              const std::set<std::string>& relevant);

/// Fills per_query_ap and map. Judged queries without relevant docs are
/// skipped with a warning; run queries absent from the qrels are ignored
/// with a warning; judged queries absent from the run score 0. Throws
/// DataError when no judged query appears in the run.
MetricReport mean_average_precision(const RunResult& run, const Qrels& qrels);

/// mean_average_precision plus the averaged P-R and F-R curves, where
/// F = 2PR/(P+R) at recall level R and 0 when P + R = 0.
MetricReport evaluate(const RunResult& run, const Qrels& qrels);

/// Two-sided paired randomization test on per-query scores. Permutation i
/// draws its signs from a private splitmix64 stream seeded with
/// splitmix64(seed) + i, one bit per pair, so results are independent of
/// how permutations are scheduled. A permuted |mean| that equals the
/// observed one within 1e-12 relative counts as at least as extreme.
/// p = (count + 1) / (permutations + 1).
double randomization_test(std::span<const double> a, std::span<const double> b,
                          std::size_t permutations, std::uint64_t seed);

/// JSON report {"manifest", "per_query_ap", "map", "pr_curve", "f_curve",
/// "warnings"}; `manifest_json` is embedded as-is (must be valid JSON).
std::string report_to_json(const MetricReport& report, const std::string& manifest_json);
/// Reads per_query_ap, map and the curves back from report_to_json output.
MetricReport report_from_json(const std::filesystem::path& path);

/// "recall<TAB>precision<TAB>f" rows under a "# manifest" line.
std::string curves_to_tsv(const MetricReport& report, const std::string& manifest_json);

}  // namespace semsearch
