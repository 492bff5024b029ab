#pragma once

// Wiring shared by the command-line tool and the end-to-end tests: model
// presets, configuration files, run manifests, corpus/topic readers and the
// per-preset query pipeline.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semsearch/annotation.hpp"
#include "semsearch/ontology_store.hpp"
#include "semsearch/rcsa.hpp"
#include "semsearch/text.hpp"
#include "semsearch/vsm_index.hpp"
#include "semsearch/wsd.hpp"

namespace semsearch::app {

enum class Expansion { none, csa, rcsa };
std::string_view to_string(Expansion e);

struct ModelConfig {
  std::string name;
  bool use_ne = false;
  bool use_ww = false;
  Expansion expansion = Expansion::none;
  double virtual_term_weight = 1.0;
  double latent_term_weight = 1.0;
  PprConfig wsd;
  /// Render latent concepts as keywords even when ne/ww are on.
  bool latent_keywords = false;

  /// Latent concepts become keywords whenever the index holds no NE or WW
  /// terms, or when forced.
  bool keyword_latents() const { return latent_keywords || (!use_ne && !use_ww); }
};

/// lexical, ne_kw, ww_kw, ne_ww_kw, csa, rcsa, semantic.
const std::vector<std::string>& preset_names();
/// Throws std::invalid_argument for an unknown name.
ModelConfig preset(std::string_view name);

/// Paths inside a config file are relative to the file's directory.
struct Settings {
  OntologyPaths ontology;
  std::filesystem::path stopwords;
  std::filesystem::path lemmas;
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> topics;
  std::optional<std::filesystem::path> qrels;
  std::uint64_t seed = 42;
  std::size_t k = 1000;
  double virtual_term_weight = 1.0;
  double latent_term_weight = 1.0;
  PprConfig wsd;
  std::optional<std::map<std::string, std::string>> interrogatives;

  static Settings load(const std::filesystem::path& config_file);
  /// Copies the numeric knobs into a preset.
  ModelConfig apply(ModelConfig model) const;
};

struct RunManifest {
  std::string corpus;
  OntologyPaths ontology;
  std::string preset;
  std::string index;
  std::string topics;
  std::string qrels;
  std::uint64_t seed = 0;

  static RunManifest from(const Settings& settings, std::string preset);
  /// Single-line JSON object.
  std::string to_json() const;
};

struct CorpusDoc {
  std::string docno;
  std::string text;
};
/// JSONL ({"docno","text"} per line) when the first non-blank byte is '{',
/// otherwise TREC SGML (<DOC><DOCNO>..</DOCNO><TEXT>..</TEXT></DOC>).
std::vector<CorpusDoc> load_corpus(const std::filesystem::path& path);

struct Topic {
  std::string qid;
  std::string query;
};
/// JSONL with {"qid","query"} per line.
std::vector<Topic> load_topics(const std::filesystem::path& path);

struct QueryPlan {
  QueryRepresentation representation;
  RcsaAnalysis relations;
  std::vector<ConceptRef> latent_concepts;
};

class Engine {
 public:
  Engine(const Settings& settings, ModelConfig model);

  const ModelConfig& model() const { return model_; }
  const OntologyStore& store() const { return *store_; }
  const Lexicon& lexicon() const { return *lexicon_; }
  const Annotator& annotator() const { return *annotator_; }

  AnnotatedDocument annotate(std::string doc_id, std::string_view text) const;
  std::vector<AnnotatedDocument> annotate_corpus(std::span<const CorpusDoc> docs) const;
  InvertedIndex build_index(std::span<const CorpusDoc> docs) const;

  /// Base representation for the preset plus its expansion.
  QueryPlan plan_query(std::string qid, std::string_view text) const;

  /// Appends rendered `concepts` to `rep` as latent terms, skipping terms
  /// the query already has. `provenance[i]` labels concepts[i].
  void add_latent_concepts(QueryRepresentation& rep, std::span<const ConceptRef> concepts,
                           std::span<const std::string> provenance) const;

  /// Header lines recorded in an index built by this engine.
  std::vector<std::string> index_header(const RunManifest& manifest) const;
  /// Throws DataError when the index flags differ from the preset's.
  void check_index_header(std::span<const std::string> header) const;

 private:
  ModelConfig model_;
  std::unique_ptr<OntologyStore> store_;
  std::unique_ptr<Lexicon> lexicon_;
  std::unique_ptr<SenseGraph> graph_;
  std::unique_ptr<Annotator> annotator_;
};

/// "# manifest {json}" followed by "qid Q0 doc rank score tag" lines.
std::string format_run(const std::vector<std::pair<std::string, SearchResult>>& results,
                       const std::string& tag, const std::string& manifest_json);

}  // namespace semsearch::app
