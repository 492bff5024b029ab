#pragma once

// The three ontologies (named entities with their class hierarchy, the
// lexicon of synsets with its hypernym DAG, and the fact store) plus the
// relation-phrase dictionary, loaded once and read concurrently afterwards.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace semsearch {

enum class ConceptKind { entity, synset, class_ };

/// Tagged reference to an entity, a synset or a class. Serialized with the
/// "ent:", "ww:" or "cls:" prefix.
struct ConceptRef {
  ConceptKind kind = ConceptKind::entity;
  std::string id;

  static ConceptRef entity(std::string id) { return {ConceptKind::entity, std::move(id)}; }
  static ConceptRef synset(std::string id) { return {ConceptKind::synset, std::move(id)}; }
  static ConceptRef class_(std::string id) { return {ConceptKind::class_, std::move(id)}; }

  /// Throws std::invalid_argument on an unknown prefix or empty id.
  static ConceptRef parse(std::string_view text);
  std::string str() const;

  auto operator<=>(const ConceptRef&) const = default;
};

struct ClassNode {
  std::string id;
  std::string label;
  std::vector<std::string> parent_ids;
};

struct EntityRecord {
  std::string id;
  std::string main_name;
  std::vector<std::string> aliases;  // never contains main_name
  std::string class_id;
};

enum class SynsetEdge { hyponym, holonym, meronym, similarity };

std::string_view to_string(SynsetEdge edge);

struct Synset {
  std::string id;
  std::vector<std::string> forms;         // lowercased
  std::vector<std::string> hypernym_ids;  // sorted, unique
  std::vector<std::pair<SynsetEdge, std::string>> other_edges;
};

struct Fact {
  ConceptRef subject;
  std::string relation;
  ConceptRef object;

  std::string str() const;  // "subject relation object"
  auto operator<=>(const Fact&) const = default;
};

/// Partially bound fact; unset positions are wildcards.
struct FactPattern {
  std::optional<ConceptRef> subject;
  std::optional<std::string> relation;
  std::optional<ConceptRef> object;
};

struct RelationPhraseEntry {
  std::vector<std::string> phrase;
  std::string relation;
  bool is_spatial = false;
};

struct RelationMatch {
  std::string relation;
  bool is_spatial = false;
  std::size_t length = 0;  // tokens consumed
};

struct OntologyPaths {
  std::filesystem::path entities;
  std::filesystem::path classes;
  std::filesystem::path synsets;
  std::filesystem::path facts;
  std::filesystem::path relation_phrases;
};

/// Lowercases and collapses runs of whitespace to single spaces.
std::string normalize_name(std::string_view name);

class OntologyStore {
 public:
  static OntologyStore load(const OntologyPaths& paths);

  /// Validates in-memory records with the same rules as load(). Used by
  /// tests that need small hand-built ontologies.
  static OntologyStore from_records(std::vector<ClassNode> classes,
                                    std::vector<EntityRecord> entities,
                                    std::vector<Synset> synsets,
                                    std::vector<Fact> facts,
                                    std::vector<RelationPhraseEntry> phrases);

  const std::vector<ClassNode>& classes() const { return classes_; }
  const std::vector<EntityRecord>& entities() const { return entities_; }
  const std::vector<Synset>& synsets() const { return synsets_; }
  const std::vector<Fact>& facts() const { return facts_; }
  const std::vector<RelationPhraseEntry>& relation_phrases() const { return phrases_; }

  const ClassNode* find_class(std::string_view id) const;
  const EntityRecord* find_entity(std::string_view id) const;
  const Synset* find_synset(std::string_view id) const;
  bool contains(const ConceptRef& ref) const;

  /// Entities whose main name or an alias equals `name` after
  /// normalize_name(). Sorted by entity id.
  std::vector<const EntityRecord*> entities_by_name(std::string_view name) const;

  /// Strict ancestors of a class, breadth-first, deduplicated.
  std::vector<std::string> super_classes(std::string_view class_id) const;
  /// Reflexive: is_subclass_of(c, c) holds.
  bool is_subclass_of(std::string_view class_id, std::string_view ancestor_id) const;

  /// Synsets containing the (already lemmatized) form, ordered by id.
  std::vector<const Synset*> synsets_for_form(std::string_view form) const;
  std::vector<std::string> hyponyms(std::string_view synset_id) const;

  /// Reflexive-transitive hypernym closure; value is the shortest hypernym
  /// path length from the argument.
  std::map<std::string, int> hypernym_closure(std::string_view synset_id) const;

  /// Length of the longest hypernym path from the synset up to a root.
  int root_depth(std::string_view synset_id) const;

  /// Most specific common hypernym of a nonempty set of senses: the common
  /// reflexive ancestor with the greatest root_depth, smallest id on ties.
  std::string msc_hypernym(std::span<const std::string> senses) const;

  /// Facts matching every bound position, in (subject, relation, object)
  /// order. Throws std::invalid_argument when nothing is bound.
  std::vector<Fact> facts_matching(const FactPattern& pattern) const;
  bool has_fact(const Fact& fact) const;

  /// Longest dictionary phrase that is a prefix of `tokens`.
  std::optional<RelationMatch> map_relation_phrase(std::span<const std::string> tokens) const;
  std::size_t max_phrase_length() const { return max_phrase_length_; }

 private:
  OntologyStore() = default;
  void validate_and_index();

  std::vector<ClassNode> classes_;
  std::vector<EntityRecord> entities_;
  std::vector<Synset> synsets_;
  std::vector<Fact> facts_;
  std::vector<RelationPhraseEntry> phrases_;

  std::unordered_map<std::string, std::size_t> class_index_;
  std::unordered_map<std::string, std::size_t> entity_index_;
  std::unordered_map<std::string, std::size_t> synset_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> name_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> form_index_;
  std::unordered_map<std::string, std::vector<std::string>> hyponym_index_;
  std::unordered_map<std::string, int> root_depth_;
  std::unordered_map<std::string, std::vector<std::size_t>> facts_by_subject_;
  std::unordered_map<std::string, std::vector<std::size_t>> facts_by_object_;
  std::unordered_map<std::string, std::vector<std::size_t>> facts_by_relation_;
  std::map<std::vector<std::string>, std::size_t> phrase_index_;
  std::size_t max_phrase_length_ = 0;
};

}  // namespace semsearch
