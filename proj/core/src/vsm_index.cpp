#include "semsearch/vsm_index.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <system_error>

#include "semsearch/error.hpp"

namespace semsearch {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view text, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParseError(path.string(), line, "bad number '" + std::string(text) + "'");
  return v;
}

std::uint32_t parse_uint(std::string_view text, const std::filesystem::path& path, std::size_t line) {
  std::uint32_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParseError(path.string(), line, "bad integer '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double idf_from(std::size_t doc_count, std::size_t df) {
  if (df == 0) return 0.0;
  return std::max(std::log(static_cast<double>(doc_count) / static_cast<double>(df)), kIdfFloor);
}

double clamp_cosine(double c) { return std::clamp(c, 0.0, 1.0); }

}  // namespace

double tf_weight(double tf) {
  if (tf <= 0.0) return 0.0;
  return tf >= 1.0 ? 1.0 + std::log(tf) : tf;
}

Vocabulary::Vocabulary(std::vector<std::string> sorted_unique_terms)
    : terms_(std::move(sorted_unique_terms)) {
  for (std::uint32_t i = 0; i < terms_.size(); ++i) ids_.emplace(terms_[i], i);
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TermBag query_term_bag(const QueryRepresentation& query, double latent_term_weight) {
  TermBag bag;
  for (const auto& t : query.terms) bag[t] += 1.0;
  for (const auto& l : query.latent_terms) bag[l.term] += latent_term_weight;
  return bag;
}

InvertedIndex InvertedIndex::build(std::span<const AnnotatedDocument> docs) {
  InvertedIndex index;
  std::vector<const AnnotatedDocument*> ordered;
  for (const auto& d : docs) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->doc_id < b->doc_id; });
  for (std::size_t i = 1; i < ordered.size(); ++i)
    if (ordered[i]->doc_id == ordered[i - 1]->doc_id)
      throw DataError("duplicate doc_id '" + ordered[i]->doc_id + "'");

  // Serialized bags per document, then the vocabulary over their union.
  std::vector<std::map<std::string, double>> bags(ordered.size());
  std::set<std::string> all_terms;
  for (std::size_t d = 0; d < ordered.size(); ++d) {
    index.doc_ids_.push_back(ordered[d]->doc_id);
    index.doc_lookup_.emplace(ordered[d]->doc_id, static_cast<std::uint32_t>(d));
    for (const auto& [term, tf] : ordered[d]->terms) {
      if (tf <= 0.0) continue;
      auto key = term.serialize();
      bags[d][key] += tf;
      all_terms.insert(key);
    }
  }
  index.vocabulary_ = Vocabulary({all_terms.begin(), all_terms.end()});
  index.postings_.resize(index.vocabulary_.size());
  for (std::size_t d = 0; d < bags.size(); ++d)
    for (const auto& [key, tf] : bags[d])
      index.postings_[*index.vocabulary_.id(key)].push_back({static_cast<std::uint32_t>(d), tf});

  std::vector<double> sq(index.doc_ids_.size(), 0.0);
  for (std::uint32_t t = 0; t < index.postings_.size(); ++t) {
    const double idf = index.idf(t);
    for (const auto& p : index.postings_[t]) {
      const double w = tf_weight(p.tf) * idf;
      sq[p.doc] += w * w;
    }
  }
  for (double s : sq) index.doc_norms_.push_back(std::sqrt(s));
  return index;
}

double InvertedIndex::idf(std::uint32_t term_id) const {
  return idf_from(doc_count(), postings_[term_id].size());
}

std::optional<std::uint32_t> InvertedIndex::doc_index(std::string_view doc_id) const {
  auto it = doc_lookup_.find(std::string(doc_id));
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

double InvertedIndex::doc_norm(std::string_view doc_id) const {
  auto i = doc_index(doc_id);
  return i ? doc_norms_[*i] : 0.0;
}

SearchResult InvertedIndex::search(const QueryRepresentation& query, const SearchOptions& options) const {
  return search(query_term_bag(query, options.latent_term_weight), options.k);
}

SearchResult InvertedIndex::search(const TermBag& query_bag, std::size_t k) const {
  if (k == 0) throw std::invalid_argument("search needs k >= 1");
  SearchResult result;
  std::vector<std::pair<std::uint32_t, double>> weights;
  double q_sq = 0.0;
  for (const auto& [term, tf] : query_bag) {
    auto id = vocabulary_.id(term.serialize());
    if (!id) continue;
    const double w = tf_weight(tf) * idf(*id);
    if (w <= 0.0) continue;
    weights.emplace_back(*id, w);
    q_sq += w * w;
  }
  if (weights.empty()) {
    result.no_effective_terms = true;
    return result;
  }
  // Accumulate in ascending term-id order so that the summation order is the
  // same as score_document's.
  std::sort(weights.begin(), weights.end());
  std::vector<double> acc(doc_count(), 0.0);
  for (const auto& [id, qw] : weights) {
    const double idf_t = idf(id);
    for (const auto& p : postings_[id]) acc[p.doc] += qw * tf_weight(p.tf) * idf_t;
  }
  const double q_norm = std::sqrt(q_sq);
  for (std::uint32_t d = 0; d < acc.size(); ++d) {
    if (acc[d] <= 0.0 || doc_norms_[d] <= 0.0) continue;
    result.docs.push_back({doc_ids_[d], clamp_cosine(acc[d] / (q_norm * doc_norms_[d]))});
  }
  std::sort(result.docs.begin(), result.docs.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  if (result.docs.size() > k) result.docs.resize(k);
  return result;
}

std::vector<std::string> InvertedIndex::matched_terms(const TermBag& query_bag,
                                                      std::string_view doc_id) const {
  std::vector<std::string> out;
  auto d = doc_index(doc_id);
  if (!d) return out;
  for (const auto& [term, tf] : query_bag) {
    auto key = term.serialize();
    auto id = vocabulary_.id(key);
    if (!id) continue;
    const auto& list = postings_[*id];
    auto it = std::lower_bound(list.begin(), list.end(), *d,
                               [](const Posting& p, std::uint32_t doc) { return p.doc < doc; });
    if (it != list.end() && it->doc == *d) out.push_back(std::move(key));
  }
  return out;
}

void InvertedIndex::save(const std::filesystem::path& dir,
                         std::span<const std::string> header_lines) const {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("vocab.tsv");
    for (std::uint32_t t = 0; t < vocabulary_.size(); ++t) out << t << '\t' << vocabulary_.term(t) << '\n';
  }
  {
    auto out = open("postings.tsv");
    for (std::uint32_t t = 0; t < postings_.size(); ++t)
      for (const auto& p : postings_[t])
        out << t << '\t' << doc_ids_[p.doc] << '\t' << format_double(p.tf) << '\n';
  }
  {
    auto out = open("meta.tsv");
    for (const auto& h : header_lines) out << '#' << h << '\n';
    out << "doc_count\t" << doc_ids_.size() << '\n';
    for (std::size_t d = 0; d < doc_ids_.size(); ++d)
      out << doc_ids_[d] << '\t' << format_double(doc_norms_[d]) << '\n';
  }
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& dir, std::vector<std::string>* header) {
  InvertedIndex index;
  auto open = [&](const char* name) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw DataError("cannot open " + (dir / name).string());
    return in;
  };

  {
    const auto path = dir / "meta.tsv";
    auto in = open("meta.tsv");
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> declared;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (line.front() == '#') {
        if (header) header->push_back(line.substr(1));
        continue;
      }
      auto f = split_tabs(line);
      if (f.size() != 2) throw ParseError(path.string(), line_no, "expected two tab-separated fields");
      if (!declared && f[0] == "doc_count") {
        declared = parse_uint(f[1], path, line_no);
        continue;
      }
      const std::string doc(f[0]);
      if (!index.doc_lookup_.emplace(doc, static_cast<std::uint32_t>(index.doc_ids_.size())).second)
        throw ParseError(path.string(), line_no, "duplicate doc_id '" + doc + "'");
      if (!index.doc_ids_.empty() && doc < index.doc_ids_.back())
        throw ParseError(path.string(), line_no, "doc ids must be sorted");
      index.doc_ids_.push_back(doc);
      index.doc_norms_.push_back(parse_double(f[1], path, line_no));
    }
    if (!declared || *declared != index.doc_ids_.size())
      throw ParseError(path.string(), line_no, "doc_count does not match the listed documents");
  }
  {
    const auto path = dir / "vocab.tsv";
    auto in = open("vocab.tsv");
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> terms;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto f = split_tabs(line);
      if (f.size() != 2) throw ParseError(path.string(), line_no, "expected term_id<TAB>term");
      if (parse_uint(f[0], path, line_no) != terms.size())
        throw ParseError(path.string(), line_no, "term ids must be dense and ascending");
      terms.emplace_back(f[1]);
    }
    index.vocabulary_ = Vocabulary(std::move(terms));
  }
  {
    const auto path = dir / "postings.tsv";
    auto in = open("postings.tsv");
    index.postings_.resize(index.vocabulary_.size());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto f = split_tabs(line);
      if (f.size() != 3) throw ParseError(path.string(), line_no, "expected term_id<TAB>doc_id<TAB>tf");
      const auto term = parse_uint(f[0], path, line_no);
      if (term >= index.postings_.size()) throw ParseError(path.string(), line_no, "unknown term id");
      auto doc = index.doc_index(f[1]);
      if (!doc) throw ParseError(path.string(), line_no, "unknown doc_id '" + std::string(f[1]) + "'");
      auto& list = index.postings_[term];
      if (!list.empty() && list.back().doc >= *doc)
        throw ParseError(path.string(), line_no, "postings must be sorted by doc_id");
      list.push_back({*doc, parse_double(f[2], path, line_no)});
    }
  }
  return index;
}

double score_document(const AnnotatedDocument& doc, const QueryRepresentation& query,
                      const InvertedIndex& index, double latent_term_weight) {
  return score_document(doc, query_term_bag(query, latent_term_weight), index);
}

double score_document(const AnnotatedDocument& doc, const TermBag& query_bag,
                      const InvertedIndex& index) {
  if (!index.doc_index(doc.doc_id)) throw UnknownIdError("document '" + doc.doc_id + "' is not indexed");

  // Dense vectors over the vocabulary, built straight from the bags.
  const auto n = index.vocabulary().size();
  std::vector<double> dv(n, 0.0), qv(n, 0.0);
  std::map<std::uint32_t, double> dtf, qtf;
  for (const auto& [term, tf] : doc.terms)
    if (tf > 0.0)
      if (auto id = index.vocabulary().id(term.serialize())) dtf[*id] += tf;
  for (const auto& [term, tf] : query_bag)
    if (auto id = index.vocabulary().id(term.serialize())) qtf[*id] += tf;
  for (const auto& [id, tf] : dtf) dv[id] = tf_weight(tf) * index.idf(id);
  for (const auto& [id, tf] : qtf) qv[id] = tf_weight(tf) * index.idf(id);

  double dot = 0.0, dd = 0.0, qq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += qv[i] * dv[i];
    dd += dv[i] * dv[i];
    qq += qv[i] * qv[i];
  }
  if (dd <= 0.0 || qq <= 0.0) return 0.0;
  return clamp_cosine(dot / (std::sqrt(qq) * std::sqrt(dd)));
}

}  // namespace semsearch
