#include "engine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "semsearch/error.hpp"

namespace semsearch::app {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    fn(j, line_no);
  }
}

std::string required(const json& j, const char* key, const std::filesystem::path& path, std::size_t line) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string())
    throw ParseError(path.string(), line, std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

std::string strip_tags(std::string_view s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') in_tag = true;
    else if (c == '>') in_tag = false;
    else if (!in_tag) out.push_back(c);
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<CorpusDoc> parse_sgml(const std::string& data, const std::filesystem::path& path) {
  std::vector<CorpusDoc> docs;
  std::size_t pos = 0;
  auto line_of = [&](std::size_t offset) {
    return static_cast<std::size_t>(std::count(data.begin(), data.begin() + static_cast<long>(offset), '\n')) + 1;
  };
  while ((pos = data.find("<DOC>", pos)) != std::string::npos) {
    const auto end = data.find("</DOC>", pos);
    if (end == std::string::npos) throw ParseError(path.string(), line_of(pos), "unterminated <DOC>");
    const std::string_view doc(data.data() + pos, end - pos);
    const auto no_b = doc.find("<DOCNO>");
    const auto no_e = doc.find("</DOCNO>");
    if (no_b == std::string_view::npos || no_e == std::string_view::npos || no_e < no_b)
      throw ParseError(path.string(), line_of(pos), "<DOC> without <DOCNO>");
    CorpusDoc d;
    d.docno = trim(doc.substr(no_b + 7, no_e - no_b - 7));
    std::size_t t = 0;
    while ((t = doc.find("<TEXT>", t)) != std::string_view::npos) {
      const auto te = doc.find("</TEXT>", t);
      if (te == std::string_view::npos) throw ParseError(path.string(), line_of(pos + t), "unterminated <TEXT>");
      if (!d.text.empty()) d.text += '\n';
      d.text += strip_tags(doc.substr(t + 6, te - t - 6));
      t = te + 7;
    }
    docs.push_back(std::move(d));
    pos = end + 6;
  }
  return docs;
}

}  // namespace

std::string_view to_string(Expansion e) {
  switch (e) {
    case Expansion::none: return "none";
    case Expansion::csa: return "csa";
    case Expansion::rcsa: return "rcsa";
  }
  return "?";
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"lexical", "ne_kw", "ww_kw", "ne_ww_kw",
                                                 "csa", "rcsa", "semantic"};
  return names;
}

ModelConfig preset(std::string_view name) {
  ModelConfig m;
  m.name = std::string(name);
  if (name == "lexical") return m;
  if (name == "ne_kw") { m.use_ne = true; return m; }
  if (name == "ww_kw") { m.use_ww = true; return m; }
  if (name == "ne_ww_kw") { m.use_ne = m.use_ww = true; return m; }
  if (name == "csa") { m.expansion = Expansion::csa; return m; }
  if (name == "rcsa") { m.expansion = Expansion::rcsa; return m; }
  if (name == "semantic") {
    m.use_ne = m.use_ww = true;
    m.expansion = Expansion::rcsa;
    return m;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

Settings Settings::load(const std::filesystem::path& config_file) {
  const auto base = config_file.parent_path();
  json j;
  try {
    j = json::parse(read_file(config_file));
  } catch (const json::exception& e) {
    throw DataError(config_file.string() + ": " + e.what());
  }
  auto path_at = [&](const json& obj, const char* key) -> std::filesystem::path {
    if (!obj.contains(key) || !obj[key].is_string())
      throw DataError(config_file.string() + ": missing path '" + key + "'");
    return base / obj[key].get<std::string>();
  };
  auto optional_path = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!j.contains(key)) return std::nullopt;
    return path_at(j, key);
  };

  Settings s;
  try {
    const auto& onto = j.at("ontology");
    s.ontology = {path_at(onto, "entities"), path_at(onto, "classes"), path_at(onto, "synsets"),
                  path_at(onto, "facts"), path_at(onto, "relation_phrases")};
    const auto& lex = j.at("lexicon");
    s.stopwords = path_at(lex, "stopwords");
    s.lemmas = path_at(lex, "lemmas");
    s.corpus = optional_path("corpus");
    s.topics = optional_path("topics");
    s.qrels = optional_path("qrels");
    s.seed = j.value("seed", s.seed);
    s.k = j.value("k", s.k);
    s.virtual_term_weight = j.value("virtual_term_weight", s.virtual_term_weight);
    s.latent_term_weight = j.value("latent_term_weight", s.latent_term_weight);
    if (j.contains("wsd")) {
      const auto& w = j["wsd"];
      s.wsd.damping = w.value("damping", s.wsd.damping);
      s.wsd.max_iterations = w.value("max_iterations", s.wsd.max_iterations);
      s.wsd.epsilon = w.value("epsilon", s.wsd.epsilon);
      s.wsd.tie_ratio = w.value("tie_ratio", s.wsd.tie_ratio);
      s.wsd.context_window = w.value("context_window", s.wsd.context_window);
    }
    if (j.contains("interrogatives"))
      s.interrogatives = j["interrogatives"].get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw DataError(config_file.string() + ": " + e.what());
  }
  try {
    s.wsd.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(config_file.string() + ": " + e.what());
  }
  return s;
}

ModelConfig Settings::apply(ModelConfig model) const {
  model.virtual_term_weight = virtual_term_weight;
  model.latent_term_weight = latent_term_weight;
  model.wsd = wsd;
  return model;
}

RunManifest RunManifest::from(const Settings& settings, std::string preset) {
  RunManifest m;
  m.corpus = settings.corpus ? settings.corpus->string() : "";
  m.ontology = settings.ontology;
  m.preset = std::move(preset);
  m.topics = settings.topics ? settings.topics->string() : "";
  m.qrels = settings.qrels ? settings.qrels->string() : "";
  m.seed = settings.seed;
  return m;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["corpus"] = corpus;
  j["ontology"] = {{"entities", ontology.entities.string()},
                   {"classes", ontology.classes.string()},
                   {"synsets", ontology.synsets.string()},
                   {"facts", ontology.facts.string()},
                   {"relation_phrases", ontology.relation_phrases.string()}};
  j["preset"] = preset;
  j["index"] = index;
  j["topics"] = topics;
  j["qrels"] = qrels;
  j["seed"] = seed;
  return j.dump();
}

std::vector<CorpusDoc> load_corpus(const std::filesystem::path& path) {
  const auto data = read_file(path);
  const auto first = data.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  if (data[first] != '{') return parse_sgml(data, path);
  std::vector<CorpusDoc> docs;
  for_each_json_line(path, [&](const json& j, std::size_t line) {
    docs.push_back({required(j, "docno", path, line), required(j, "text", path, line)});
  });
  return docs;
}

std::vector<Topic> load_topics(const std::filesystem::path& path) {
  std::vector<Topic> topics;
  std::set<std::string> seen;
  for_each_json_line(path, [&](const json& j, std::size_t line) {
    Topic t{required(j, "qid", path, line), required(j, "query", path, line)};
    if (!seen.insert(t.qid).second) throw ParseError(path.string(), line, "duplicate qid '" + t.qid + "'");
    topics.push_back(std::move(t));
  });
  return topics;
}

Engine::Engine(const Settings& settings, ModelConfig model) : model_(std::move(model)) {
  store_ = std::make_unique<OntologyStore>(OntologyStore::load(settings.ontology));
  lexicon_ = std::make_unique<Lexicon>(Lexicon::load(settings.stopwords, settings.lemmas));
  graph_ = std::make_unique<SenseGraph>(SenseGraph::build(*store_));
  AnnotationConfig config;
  config.use_ne = model_.use_ne;
  config.use_ww = model_.use_ww;
  config.virtual_term_weight = model_.virtual_term_weight;
  config.wsd = model_.wsd;
  if (settings.interrogatives) config.interrogatives = InterrogativeTable(*settings.interrogatives);
  annotator_ = std::make_unique<Annotator>(*store_, *lexicon_, *graph_, std::move(config));
}

AnnotatedDocument Engine::annotate(std::string doc_id, std::string_view text) const {
  return annotator_->annotate_document(std::move(doc_id), text);
}

std::vector<AnnotatedDocument> Engine::annotate_corpus(std::span<const CorpusDoc> docs) const {
  std::vector<AnnotatedDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(annotate(d.docno, d.text));
  return out;
}

InvertedIndex Engine::build_index(std::span<const CorpusDoc> docs) const {
  const auto annotated = annotate_corpus(docs);
  return InvertedIndex::build(annotated);
}

QueryPlan Engine::plan_query(std::string qid, std::string_view text) const {
  QueryPlan plan;
  plan.representation = annotator_->represent_query(std::move(qid), text);
  if (model_.expansion == Expansion::none) return plan;

  plan.relations = analyze_query_relations(text, *lexicon_, annotator_->gazetteer(), *store_);
  std::vector<std::string> provenance;
  if (model_.expansion == Expansion::rcsa) {
    plan.latent_concepts = plan.relations.latent_concepts();
    for (const auto& l : plan.relations.latents) provenance.push_back(l.trace_json());
  } else {
    const auto initial = plan.relations.initial_concepts();
    plan.latent_concepts = csa_neighbors(initial, *store_);
    const std::set<ConceptRef> initial_set(initial.begin(), initial.end());
    for (const auto& c : plan.latent_concepts) {
      // First fact (in store order) that links c to an initial concept.
      std::string support;
      for (const auto& f : store_->facts_matching({c, std::nullopt, std::nullopt}))
        if (initial_set.contains(f.object)) { support = f.str(); break; }
      if (support.empty())
        for (const auto& f : store_->facts_matching({std::nullopt, std::nullopt, c}))
          if (initial_set.contains(f.subject)) { support = f.str(); break; }
      nlohmann::ordered_json j;
      j["concept"] = c.str();
      j["branch"] = "csa";
      j["edge_fact"] = nullptr;
      j["support_fact"] = support;
      provenance.push_back(j.dump());
    }
  }
  add_latent_concepts(plan.representation, plan.latent_concepts, provenance);
  return plan;
}

void Engine::add_latent_concepts(QueryRepresentation& rep, std::span<const ConceptRef> concepts,
                                 std::span<const std::string> provenance) const {
  if (provenance.size() != concepts.size())
    throw std::invalid_argument("add_latent_concepts: one provenance entry per concept");
  std::set<GeneralizedTerm> present(rep.terms.begin(), rep.terms.end());
  for (const auto& l : rep.latent_terms) present.insert(l.term);
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto one = concepts.subspan(i, 1);
    const auto terms = model_.keyword_latents() ? render_latent_keywords(one, *store_, *lexicon_)
                                                : render_latent_concepts(one, *store_);
    for (const auto& t : terms)
      if (present.insert(t).second) rep.latent_terms.push_back({t, provenance[i]});
  }
}

std::vector<std::string> Engine::index_header(const RunManifest& manifest) const {
  char weight[64];
  std::snprintf(weight, sizeof weight, "%.17g", model_.virtual_term_weight);
  return {"manifest " + manifest.to_json(), "preset " + model_.name,
          std::string("use_ne ") + (model_.use_ne ? "1" : "0"),
          std::string("use_ww ") + (model_.use_ww ? "1" : "0"),
          std::string("virtual_term_weight ") + weight};
}

void Engine::check_index_header(std::span<const std::string> header) const {
  std::optional<bool> ne, ww;
  std::string built_with = "?";
  for (const auto& line : header) {
    if (line == "use_ne 0" || line == "use_ne 1") ne = line.back() == '1';
    if (line == "use_ww 0" || line == "use_ww 1") ww = line.back() == '1';
    if (line.starts_with("preset ")) built_with = line.substr(7);
  }
  if (!ne || !ww) throw DataError("index does not record the preset it was built with");
  if (*ne != model_.use_ne || *ww != model_.use_ww)
    throw DataError("index built with preset '" + built_with + "' is incompatible with preset '" +
                    model_.name + "'");
}

std::string format_run(const std::vector<std::pair<std::string, SearchResult>>& results,
                       const std::string& tag, const std::string& manifest_json) {
  std::ostringstream out;
  out << "# manifest " << manifest_json << '\n';
  char score[64];
  for (const auto& [qid, result] : results) {
    for (std::size_t r = 0; r < result.docs.size(); ++r) {
      std::snprintf(score, sizeof score, "%.10f", result.docs[r].score);
      out << qid << " Q0 " << result.docs[r].doc_id << ' ' << (r + 1) << ' ' << score << ' ' << tag << '\n';
    }
  }
  return out.str();
}

}  // namespace semsearch::app
