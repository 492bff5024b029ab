#include "semsearch/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "semsearch/error.hpp"

namespace semsearch {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    for (std::string f; ss >> f;) fields.push_back(std::move(f));
    fn(fields, line_no);
  }
}

long parse_long(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ParseError(path.string(), line, "bad integer '" + s + "'");
  return v;
}

void check_ranking(std::span<const std::string> ranking) {
  std::unordered_set<std::string_view> seen;
  for (const auto& d : ranking)
    if (!seen.insert(d).second) throw std::invalid_argument("duplicate doc '" + d + "' in ranking");
}

}  // namespace

Qrels parse_qrels(const std::filesystem::path& path) {
  Qrels qrels;
  std::set<std::pair<std::string, std::string>> judged;
  for_each_record(path, [&](const std::vector<std::string>& f, std::size_t line) {
    if (f.size() != 4) throw ParseError(path.string(), line, "expected 'query_id 0 doc_id rel'");
    const long rel = parse_long(f[3], path, line);
    if (rel != 0 && rel != 1) throw ParseError(path.string(), line, "relevance must be 0 or 1");
    if (!judged.emplace(f[0], f[2]).second)
      throw ParseError(path.string(), line, "duplicate judgment for " + f[0] + " " + f[2]);
    auto& docs = qrels[f[0]];
    if (rel == 1) docs.insert(f[2]);
  });
  return qrels;
}

RunResult parse_run(const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::pair<long, std::string>>> rows;
  std::map<std::string, std::set<std::string>> seen;
  for_each_record(path, [&](const std::vector<std::string>& f, std::size_t line) {
    if (f.size() != 6) throw ParseError(path.string(), line, "expected 'query_id Q0 doc_id rank score tag'");
    const long rank = parse_long(f[3], path, line);
    if (!seen[f[0]].insert(f[2]).second)
      throw ParseError(path.string(), line, "doc " + f[2] + " repeated for query " + f[0]);
    rows[f[0]].emplace_back(rank, f[2]);
  });
  RunResult run;
  for (auto& [qid, list] : rows) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& out = run[qid];
    for (auto& [_, doc] : list) out.push_back(std::move(doc));
  }
  return run;
}

double average_precision(std::span<const std::string> ranking, const std::set<std::string>& relevant) {
  if (relevant.empty()) throw std::invalid_argument("average_precision needs a nonempty relevant set");
  check_ranking(ranking);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!relevant.contains(ranking[i])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

std::array<double, 11> interpolated_precision(std::span<const std::string> ranking,
                                              const std::set<std::string>& relevant) {
  if (relevant.empty()) throw std::invalid_argument("interpolated_precision needs a nonempty relevant set");
  check_ranking(ranking);
  // (recall, precision) at every relevant hit; interpolation only needs these.
  std::vector<std::pair<double, double>> points;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!relevant.contains(ranking[i])) continue;
    ++hits;
    points.emplace_back(static_cast<double>(hits) / static_cast<double>(relevant.size()),
                        static_cast<double>(hits) / static_cast<double>(i + 1));
  }
  std::array<double, 11> out{};
  for (std::size_t l = 0; l < kRecallLevels.size(); ++l) {
    double best = 0.0;
    for (const auto& [r, p] : points)
      if (r >= kRecallLevels[l] - 1e-12) best = std::max(best, p);
    out[l] = best;
  }
  return out;
}

MetricReport mean_average_precision(const RunResult& run, const Qrels& qrels) {
  MetricReport report;
  bool overlap = false;
  for (const auto& [qid, _] : run) {
    if (qrels.contains(qid)) overlap = true;
    else report.warnings.push_back("query " + qid + " has no judgments; ignored");
  }
  if (!overlap) throw DataError("run and qrels share no query");

  static const std::vector<std::string> kEmpty;
  double sum = 0.0;
  for (const auto& [qid, relevant] : qrels) {
    if (relevant.empty()) {
      report.warnings.push_back("query " + qid + " has no relevant documents; excluded");
      continue;
    }
    auto it = run.find(qid);
    const auto& ranking = it == run.end() ? kEmpty : it->second;
    const double ap = average_precision(ranking, relevant);
    report.per_query_ap[qid] = ap;
    sum += ap;
  }
  if (report.per_query_ap.empty()) throw DataError("no judged query has relevant documents");
  report.map = sum / static_cast<double>(report.per_query_ap.size());
  return report;
}

MetricReport evaluate(const RunResult& run, const Qrels& qrels) {
  MetricReport report = mean_average_precision(run, qrels);
  static const std::vector<std::string> kEmpty;
  std::array<double, 11> sum{};
  for (const auto& [qid, _] : report.per_query_ap) {
    auto it = run.find(qid);
    const auto p = interpolated_precision(it == run.end() ? kEmpty : it->second, qrels.at(qid));
    for (std::size_t l = 0; l < sum.size(); ++l) sum[l] += p[l];
  }
  const auto n = static_cast<double>(report.per_query_ap.size());
  for (std::size_t l = 0; l < sum.size(); ++l) {
    const double p = sum[l] / n;
    const double r = kRecallLevels[l];
    report.pr_curve[l] = {r, p};
    report.f_curve[l] = {r, p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0};
  }
  return report;
}

double randomization_test(std::span<const double> a, std::span<const double> b,
                          std::size_t permutations, std::uint64_t seed) {
  if (a.size() != b.size()) throw std::invalid_argument("randomization_test: length mismatch");
  if (a.empty()) throw std::invalid_argument("randomization_test: empty input");
  if (permutations == 0) throw std::invalid_argument("randomization_test: permutations must be >= 1");

  const std::size_t n = a.size();
  std::vector<double> diff(n);
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    observed += diff[i];
  }
  observed = std::fabs(observed);
  const double threshold = observed - 1e-12 * std::max(1.0, observed);

  std::uint64_t base_state = seed;
  const std::uint64_t base = splitmix64(base_state);
  std::size_t count = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    std::uint64_t state = base + p;
    double sum = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = splitmix64(state);
      sum += (bits & 1) ? -diff[i] : diff[i];
      bits >>= 1;
    }
    if (std::fabs(sum) >= threshold) ++count;
  }
  return static_cast<double>(count + 1) / static_cast<double>(permutations + 1);
}

std::string report_to_json(const MetricReport& report, const std::string& manifest_json) {
  nlohmann::ordered_json j;
  j["manifest"] = json::parse(manifest_json);
  j["per_query_ap"] = report.per_query_ap;
  j["map"] = report.map;
  auto curve = [](const std::array<CurvePoint, 11>& c) {
    auto arr = json::array();
    for (const auto& p : c) arr.push_back({{"recall", p.recall}, {"value", p.value}});
    return arr;
  };
  j["pr_curve"] = curve(report.pr_curve);
  j["f_curve"] = curve(report.f_curve);
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

MetricReport report_from_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
    MetricReport r;
    r.per_query_ap = j.at("per_query_ap").get<std::map<std::string, double>>();
    r.map = j.at("map").get<double>();
    auto curve = [&](const char* key, std::array<CurvePoint, 11>& out) {
      const auto& arr = j.at(key);
      if (arr.size() != out.size()) throw DataError(std::string(key) + " must have 11 points");
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {arr[i].at("recall").get<double>(), arr[i].at("value").get<double>()};
    };
    curve("pr_curve", r.pr_curve);
    curve("f_curve", r.f_curve);
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string curves_to_tsv(const MetricReport& report, const std::string& manifest_json) {
  std::ostringstream out;
  out << "# manifest " << json::parse(manifest_json).dump() << "\n";
  out << "recall\tprecision\tf\n";
  for (std::size_t l = 0; l < report.pr_curve.size(); ++l)
    out << report.pr_curve[l].recall << '\t' << report.pr_curve[l].value << '\t'
        << report.f_curve[l].value << '\n';
  return out.str();
}

}  // namespace semsearch
