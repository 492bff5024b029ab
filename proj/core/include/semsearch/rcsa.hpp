#pragma once

// Relation-constrained spreading activation: finds concepts that a query
// implies but does not name, by following exactly one fact whose relation
// the query itself expresses. csa_expand is the unconstrained baseline that
// takes every one-hop fact neighbour.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semsearch/annotation.hpp"
#include "semsearch/generalized_term.hpp"
#include "semsearch/ontology_store.hpp"
#include "semsearch/text.hpp"

namespace semsearch {

/// Maximum gap, in tokens, between a verb phrase and the spatial phrase it
/// fuses with ("born in the north of").
inline constexpr std::size_t kVerbSpatialWindow = 4;

/// Spans index the unfiltered token sequence.
struct RelationMention {
  TokenSpan span;
  std::string relation;
  bool is_spatial = false;
  std::optional<std::string> verb_relation;  // set only on fused spatial mentions
};

struct ConceptMention {
  ConceptRef ref;
  TokenSpan span;
};

enum class C2Kind { located_entity, ne_class, ww };
std::string_view to_string(C2Kind kind);

struct QueryTriple {
  ConceptRef c1;
  std::string relation;
  ConceptRef c2;
  C2Kind c2_kind = C2Kind::ww;
  std::optional<std::string> r_spatial;
  std::optional<std::string> r_fact;
};

/// Relation names used for ontology edges that are not stored as facts.
inline constexpr std::string_view kInstanceOfEdge = "instanceOf";
inline constexpr std::string_view kHyponymOfEdge = "hyponymOf";

struct LatentConcept {
  ConceptRef ref;
  char branch = 'b';  // 'a' spatial, 'b' part-of, 'c' class, 'd' hyponym
  /// Ontology edge linking the latent concept to C2. For branches a and b
  /// this is a fact-store fact; for c it is (C4 instanceOf class) and for d
  /// (C4 hyponymOf C2), both checked against the taxonomies instead.
  Fact edge_fact;
  Fact support_fact;  // (C1, R, C4), always in the fact store

  /// {"concept","branch","edge_fact","support_fact"} on one line.
  std::string trace_json() const;
};

/// Longest dictionary match over surface tokens and over lemmas, whichever
/// is longer. A non-spatial mention ending at most kVerbSpatialWindow tokens
/// before a spatial one is folded into it as its verb relation.
std::vector<RelationMention> recognize_relation_phrases(std::span<const Token> tokens,
                                                        const OntologyStore& store);

/// Entities, class labels and synset forms over the non-stop tokens, in
/// span order. An entity or class match wins over any form match it
/// overlaps. Ambiguous names yield one mention per candidate entity, and
/// ambiguous forms one per sense.
std::vector<ConceptMention> recognize_initial_concepts(std::span<const Token> tokens,
                                                       const Gazetteer& gazetteer,
                                                       const OntologyStore& store);

/// C1 is the nearest concept ending before the mention and C2 the nearest
/// starting after it. When C1 is a class and C2 is not, the two swap so
/// the class lands in the C2 slot. Triples whose C2 is an entity outside
/// the Location hierarchy are dropped.
std::vector<QueryTriple> form_triples(std::span<const ConceptMention> concepts,
                                      std::span<const RelationMention> mentions,
                                      const OntologyStore& store);

/// One branch per c2_kind, one fact hop, fact relation equal to the query
/// relation (r_fact for the spatial branch). At most one latent per
/// concept; the smallest justification wins.
std::vector<LatentConcept> derive_latent_concepts(const QueryTriple& triple, const OntologyStore& store);

/// True when both recorded edges still hold in `store` and match the branch
/// rules for `triple`.
bool replay_provenance(const LatentConcept& latent, const QueryTriple& triple, const OntologyStore& store);

/// entity -> NETriple(main_name/*/*), synset -> WWForm per form,
/// class -> NETriple(*/class/*). Deduplicated, first occurrence order.
std::vector<GeneralizedTerm> render_latent_concepts(std::span<const ConceptRef> concepts,
                                                    const OntologyStore& store);

/// Same concepts as keyword terms: the filtered lemmas of the main name,
/// of every synset form, or of the class label.
std::vector<GeneralizedTerm> render_latent_keywords(std::span<const ConceptRef> concepts,
                                                    const OntologyStore& store,
                                                    const Lexicon& lexicon);

/// Every concept one fact away from an initial concept, in either
/// direction and over any relation, minus the initial concepts. Sorted.
std::vector<ConceptRef> csa_neighbors(std::span<const ConceptRef> concepts, const OntologyStore& store);

std::vector<GeneralizedTerm> csa_expand(std::span<const ConceptRef> concepts, const OntologyStore& store);

struct RcsaAnalysis {
  std::vector<Token> tokens;
  std::vector<RelationMention> mentions;
  std::vector<ConceptMention> concepts;
  std::vector<QueryTriple> triples;
  /// Union over triples, minus initial concepts. triple_of[i] indexes the
  /// triple that produced latents[i].
  std::vector<LatentConcept> latents;
  std::vector<std::size_t> triple_of;

  std::vector<ConceptRef> initial_concepts() const;  // deduplicated, span order
  std::vector<ConceptRef> latent_concepts() const;
};

RcsaAnalysis analyze_query_relations(std::string_view text, const Lexicon& lexicon,
                                     const Gazetteer& gazetteer, const OntologyStore& store);

}  // namespace semsearch
