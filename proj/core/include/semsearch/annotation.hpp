#pragma once

// Turns raw document and query text into generalized terms. Documents get
// every implied named-entity pattern and lexicon-word feature added as
// virtual terms; queries keep only the most specific representation of each
// concept, so exact term matching is enough at search time.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "semsearch/generalized_term.hpp"
#include "semsearch/ontology_store.hpp"
#include "semsearch/text.hpp"
#include "semsearch/wsd.hpp"

namespace semsearch {

/// Half-open range of token positions.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool overlaps(const TokenSpan& other) const { return begin < other.end && other.begin < end; }
  auto operator<=>(const TokenSpan&) const = default;
};

struct NEAnnotation {
  TokenSpan span;
  std::optional<std::string> name;  // normalized
  std::optional<std::string> class_id;
  std::optional<std::string> entity_id;
};

struct WWResolved {
  std::string synset_id;
};
struct WWTied {
  std::string msc;
};
struct WWUnresolved {};

struct WWAnnotation {
  TokenSpan span;
  std::string form;  // form as stored in the lexicon ontology
  std::variant<WWResolved, WWTied, WWUnresolved> resolution;
};

struct AnnotatedDocument {
  std::string doc_id;
  TermBag terms;
  std::size_t source_length = 0;  // non-stop tokens
};

struct LatentTerm {
  GeneralizedTerm term;
  std::string provenance;
};

struct QueryRepresentation {
  std::string query_id;
  std::vector<GeneralizedTerm> terms;
  std::vector<LatentTerm> latent_terms;
};

/// Interrogative word -> NE class. Words mapped to nothing stay stop words.
class InterrogativeTable {
 public:
  /// where->Location, who->Person, when->TimeInterval.
  InterrogativeTable();
  explicit InterrogativeTable(std::map<std::string, std::string> mapping);

  std::optional<std::string> map(std::string_view token) const;
  const std::map<std::string, std::string>& mapping() const { return mapping_; }

 private:
  std::map<std::string, std::string> mapping_;
};

struct AnnotationConfig {
  bool use_ne = true;
  bool use_ww = true;
  double virtual_term_weight = 1.0;
  PprConfig wsd;
  InterrogativeTable interrogatives;
};

/// Entity names, aliases, class labels and synset forms keyed by their
/// normalized token sequences, for longest-match recognition over lemmas.
class Gazetteer {
 public:
  struct NameEntry {
    std::string name;                     // normalized surface name
    std::vector<std::string> entity_ids;  // sorted; size > 1 means ambiguous
  };

  Gazetteer(const OntologyStore& store, const Lexicon& lexicon);

  /// Longest name/alias/class label starting at `pos`. Names beat class
  /// labels of the same length.
  struct EntityHit {
    std::size_t length = 0;
    const NameEntry* name = nullptr;
    const std::string* class_id = nullptr;
  };
  std::optional<EntityHit> match_entity(std::span<const std::string> lemmas, std::size_t pos) const;

  struct FormHit {
    std::size_t length = 0;
    const std::string* form = nullptr;
  };
  std::optional<FormHit> match_form(std::span<const std::string> lemmas, std::size_t pos) const;

 private:
  std::map<std::vector<std::string>, NameEntry> names_;
  std::map<std::vector<std::string>, std::string> class_labels_;
  std::map<std::vector<std::string>, std::string> forms_;
  std::size_t max_length_ = 0;
};

std::vector<NEAnnotation> recognize_entities(std::span<const std::string> lemmas,
                                             const Gazetteer& gazetteer,
                                             const OntologyStore& store);

/// Every implied NE pattern: (n/*/*), (*/c/*), (n/c/*), (alias/*/*),
/// (*/super/*), (n/super/*), (alias/c/*), (alias/super/*), (*/*/id), over all
/// aliases and all ancestor classes. Only patterns whose inputs exist are
/// emitted for partial annotations.
std::vector<GeneralizedTerm> expand_ne_features(const NEAnnotation& ann, const OntologyStore& store);

/// Implied lexicon-word features. Resolved sense s: s, forms of s, direct
/// hypernyms h and their forms, and form(s)/h pairs. Tied on msc m with
/// apparent form f: f, f/m, forms of m, m, forms and senses of m's direct
/// hypernyms, and f/hypernym(m). Unresolved yields just f.
std::vector<GeneralizedTerm> expand_ww_features(const WWAnnotation& ann, const OntologyStore& store);

/// Single most specific term for a query-side concept.
GeneralizedTerm most_specific_term(const NEAnnotation& ann);
GeneralizedTerm most_specific_term(const WWAnnotation& ann);

class Annotator {
 public:
  Annotator(const OntologyStore& store, const Lexicon& lexicon, const SenseGraph& graph,
            AnnotationConfig config);

  const AnnotationConfig& config() const { return config_; }
  const Gazetteer& gazetteer() const { return gazetteer_; }
  const OntologyStore& store() const { return store_; }
  const Lexicon& lexicon() const { return lexicon_; }

  AnnotatedDocument annotate_document(std::string doc_id, std::string_view text) const;
  QueryRepresentation represent_query(std::string query_id, std::string_view text) const;

  /// Shared first half of both pipelines, exposed for tests and --explain.
  struct Analysis {
    std::vector<Token> tokens;  // non-stop tokens only
    std::vector<NEAnnotation> entities;
    std::vector<WWAnnotation> words;
    std::vector<std::size_t> keyword_positions;
  };
  Analysis analyze(std::string_view text) const;

 private:
  const OntologyStore& store_;
  const Lexicon& lexicon_;
  const SenseGraph& graph_;
  AnnotationConfig config_;
  Gazetteer gazetteer_;
};

}  // namespace semsearch
