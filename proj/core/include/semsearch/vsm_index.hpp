#pragma once

// Generalized vector space model over serialized terms: inverted index with
// log-tf * idf weights and cosine ranking.
//
//   w(t, d) = (1 + ln tf) * max(ln(N / df), idf_floor)     for tf >= 1
//   w(t, d) = tf * max(ln(N / df), idf_floor)              for 0 < tf < 1
//
// The second branch only matters for fractional virtual/latent weights; it
// keeps weights positive and meets the first branch at tf = 1.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semsearch/annotation.hpp"

namespace semsearch {

inline constexpr double kIdfFloor = 0.01;

double tf_weight(double tf);

/// Bijection between serialized terms and dense ids. Ids follow the sorted
/// order of the serialized terms, so they do not depend on insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> sorted_unique_terms);

  std::size_t size() const { return terms_.size(); }
  std::optional<std::uint32_t> id(std::string_view term) const;
  const std::string& term(std::uint32_t id) const { return terms_[id]; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Posting {
  std::uint32_t doc = 0;  // index into InvertedIndex::doc_ids()
  double tf = 0.0;
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
};

struct SearchResult {
  std::vector<ScoredDoc> docs;
  /// True when no query term exists in the vocabulary; docs is then empty.
  bool no_effective_terms = false;
};

struct SearchOptions {
  std::size_t k = 1000;
  double latent_term_weight = 1.0;
};

/// Query terms plus weighted latent terms, folded into one bag.
TermBag query_term_bag(const QueryRepresentation& query, double latent_term_weight);

class InvertedIndex {
 public:
  /// Throws DataError on a duplicate doc_id. Input order does not matter.
  static InvertedIndex build(std::span<const AnnotatedDocument> docs);

  /// Reads vocab.tsv, postings.tsv and meta.tsv. Lines of meta.tsv starting
  /// with '#' are returned through `header` when given.
  static InvertedIndex load(const std::filesystem::path& dir,
                            std::vector<std::string>* header = nullptr);
  /// `header_lines` are written verbatim (each prefixed with '#') at the
  /// top of meta.tsv.
  void save(const std::filesystem::path& dir, std::span<const std::string> header_lines = {}) const;

  std::size_t doc_count() const { return doc_ids_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  std::span<const Posting> postings(std::uint32_t term_id) const { return postings_[term_id]; }
  std::size_t doc_freq(std::uint32_t term_id) const { return postings_[term_id].size(); }
  double idf(std::uint32_t term_id) const;
  /// Euclidean norm of a document's weighted vector; 0 for an unknown doc.
  double doc_norm(std::string_view doc_id) const;
  std::optional<std::uint32_t> doc_index(std::string_view doc_id) const;

  SearchResult search(const QueryRepresentation& query, const SearchOptions& options) const;
  SearchResult search(const TermBag& query_bag, std::size_t k) const;

  /// Query terms (serialized) that also occur in the given document.
  std::vector<std::string> matched_terms(const TermBag& query_bag, std::string_view doc_id) const;

 private:
  Vocabulary vocabulary_;
  std::vector<std::vector<Posting>> postings_;  // by term id, sorted by doc
  std::vector<std::string> doc_ids_;            // sorted
  std::vector<double> doc_norms_;
  std::unordered_map<std::string, std::uint32_t> doc_lookup_;
};

/// Dense cosine between one indexed document and a query, computed from the
/// document's own term bag with the index's idf values. Test oracle for
/// InvertedIndex::search. Throws UnknownIdError when the doc is not indexed.
double score_document(const AnnotatedDocument& doc, const QueryRepresentation& query,
                      const InvertedIndex& index, double latent_term_weight = 1.0);
double score_document(const AnnotatedDocument& doc, const TermBag& query_bag,
                      const InvertedIndex& index);

}  // namespace semsearch
