#include "semsearch/ontology_store.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "semsearch/error.hpp"

namespace semsearch {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

/// Calls `fn(json, line_number)` for every non-blank line of a JSONL file.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (is_blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (!obj.is_object()) throw ParseError(path.string(), line_no, "expected a JSON object");
    try {
      fn(obj, line_no);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
}

std::string required_string(const json& obj, const char* key, const std::filesystem::path& path,
                            std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw ParseError(path.string(), line, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

std::vector<std::string> optional_strings(const json& obj, const char* key,
                                          const std::filesystem::path& path, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_array()) throw ParseError(path.string(), line, std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string())
      throw ParseError(path.string(), line, std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

/// Three-colour DFS over `parents`; throws CycleError naming a node on the
/// first back edge found.
void check_acyclic(const std::vector<std::string>& nodes,
                   const std::function<const std::vector<std::string>&(const std::string&)>& parents,
                   const std::string& graph) {
  enum class Mark { white, grey, black };
  std::unordered_map<std::string, Mark> mark;
  for (const auto& n : nodes) mark[n] = Mark::white;

  for (const auto& root : nodes) {
    if (mark[root] != Mark::white) continue;
    // Iterative DFS: (node, next parent index).
    std::vector<std::pair<std::string, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& ps = parents(node);
      if (next < ps.size()) {
        const std::string p = ps[next++];
        if (mark[p] == Mark::grey) throw CycleError(p, graph);
        if (mark[p] == Mark::white) {
          mark[p] = Mark::grey;
          stack.emplace_back(p, 0);
        }
      } else {
        mark[node] = Mark::black;
        stack.pop_back();
      }
    }
  }
}

}  // namespace

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (unsigned char c : name) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

ConceptRef ConceptRef::parse(std::string_view text) {
  auto take = [&](std::string_view prefix, ConceptKind kind) -> std::optional<ConceptRef> {
    if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
    auto id = text.substr(prefix.size());
    if (id.empty()) throw std::invalid_argument("empty concept id in '" + std::string(text) + "'");
    return ConceptRef{kind, std::string(id)};
  };
  if (auto r = take("ent:", ConceptKind::entity)) return *r;
  if (auto r = take("ww:", ConceptKind::synset)) return *r;
  if (auto r = take("cls:", ConceptKind::class_)) return *r;
  throw std::invalid_argument("concept reference needs an ent:, ww: or cls: prefix: '" +
                              std::string(text) + "'");
}

std::string ConceptRef::str() const {
  switch (kind) {
    case ConceptKind::entity: return "ent:" + id;
    case ConceptKind::synset: return "ww:" + id;
    case ConceptKind::class_: return "cls:" + id;
  }
  return id;
}

std::string_view to_string(SynsetEdge edge) {
  switch (edge) {
    case SynsetEdge::hyponym: return "hyponym";
    case SynsetEdge::holonym: return "holonym";
    case SynsetEdge::meronym: return "meronym";
    case SynsetEdge::similarity: return "similarity";
  }
  return "?";
}

std::string Fact::str() const { return subject.str() + " " + relation + " " + object.str(); }

OntologyStore OntologyStore::load(const OntologyPaths& paths) {
  std::vector<ClassNode> classes;
  for_each_jsonl(paths.classes, [&](const json& obj, std::size_t line) {
    ClassNode c;
    c.id = required_string(obj, "id", paths.classes, line);
    c.label = required_string(obj, "label", paths.classes, line);
    c.parent_ids = optional_strings(obj, "parents", paths.classes, line);
    classes.push_back(std::move(c));
  });

  std::vector<EntityRecord> entities;
  for_each_jsonl(paths.entities, [&](const json& obj, std::size_t line) {
    EntityRecord e;
    e.id = required_string(obj, "id", paths.entities, line);
    e.main_name = required_string(obj, "name", paths.entities, line);
    e.aliases = optional_strings(obj, "aliases", paths.entities, line);
    e.class_id = required_string(obj, "class", paths.entities, line);
    if (normalize_name(e.main_name).empty())
      throw ParseError(paths.entities.string(), line, "entity '" + e.id + "' has an empty name");
    entities.push_back(std::move(e));
  });

  std::vector<Synset> synsets;
  for_each_jsonl(paths.synsets, [&](const json& obj, std::size_t line) {
    Synset s;
    s.id = required_string(obj, "id", paths.synsets, line);
    s.forms = optional_strings(obj, "forms", paths.synsets, line);
    if (s.forms.empty())
      throw ParseError(paths.synsets.string(), line, "synset '" + s.id + "' has no forms");
    s.hypernym_ids = optional_strings(obj, "hypernyms", paths.synsets, line);
    if (auto it = obj.find("edges"); it != obj.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError(paths.synsets.string(), line, "'edges' must be an array");
      for (const auto& edge : *it) {
        const auto type = required_string(edge, "type", paths.synsets, line);
        auto target = required_string(edge, "target", paths.synsets, line);
        SynsetEdge kind;
        if (type == "hyponym") kind = SynsetEdge::hyponym;
        else if (type == "holonym") kind = SynsetEdge::holonym;
        else if (type == "meronym") kind = SynsetEdge::meronym;
        else if (type == "similarity") kind = SynsetEdge::similarity;
        else if (type == "hypernym") {
          s.hypernym_ids.push_back(std::move(target));
          continue;
        } else {
          throw ParseError(paths.synsets.string(), line, "unknown edge type '" + type + "'");
        }
        s.other_edges.emplace_back(kind, std::move(target));
      }
    }
    synsets.push_back(std::move(s));
  });

  std::vector<Fact> facts;
  {
    auto in = open_input(paths.facts);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = strip_cr(std::move(line));
      if (is_blank(line) || line.front() == '#') continue;
      auto fields = split_tabs(line);
      if (fields.size() != 3)
        throw ParseError(paths.facts.string(), line_no, "expected subject<TAB>relation<TAB>object");
      try {
        facts.push_back(Fact{ConceptRef::parse(fields[0]), fields[1], ConceptRef::parse(fields[2])});
      } catch (const std::invalid_argument& e) {
        throw ParseError(paths.facts.string(), line_no, e.what());
      }
      if (fields[1].empty()) throw ParseError(paths.facts.string(), line_no, "empty relation");
    }
  }

  std::vector<RelationPhraseEntry> phrases;
  {
    auto in = open_input(paths.relation_phrases);
    std::string line;
    std::size_t line_no = 0;
    std::set<std::vector<std::string>> seen;
    while (std::getline(in, line)) {
      ++line_no;
      line = strip_cr(std::move(line));
      if (is_blank(line) || line.front() == '#') continue;
      auto fields = split_tabs(line);
      if (fields.size() != 3 || (fields[2] != "0" && fields[2] != "1"))
        throw ParseError(paths.relation_phrases.string(), line_no,
                         "expected phrase<TAB>relation<TAB>0|1");
      RelationPhraseEntry entry{split_words(normalize_name(fields[0])), fields[1], fields[2] == "1"};
      if (entry.phrase.empty() || entry.relation.empty())
        throw ParseError(paths.relation_phrases.string(), line_no, "empty phrase or relation");
      if (!seen.insert(entry.phrase).second)
        throw ParseError(paths.relation_phrases.string(), line_no,
                         "duplicate phrase '" + normalize_name(fields[0]) + "'");
      phrases.push_back(std::move(entry));
    }
  }

  return from_records(std::move(classes), std::move(entities), std::move(synsets), std::move(facts),
                      std::move(phrases));
}

OntologyStore OntologyStore::from_records(std::vector<ClassNode> classes,
                                          std::vector<EntityRecord> entities,
                                          std::vector<Synset> synsets, std::vector<Fact> facts,
                                          std::vector<RelationPhraseEntry> phrases) {
  OntologyStore store;
  store.classes_ = std::move(classes);
  store.entities_ = std::move(entities);
  store.synsets_ = std::move(synsets);
  store.facts_ = std::move(facts);
  store.phrases_ = std::move(phrases);
  store.validate_and_index();
  return store;
}

void OntologyStore::validate_and_index() {
  // Classes.
  std::sort(classes_.begin(), classes_.end(), [](auto& a, auto& b) { return a.id < b.id; });
  std::unordered_set<std::string> labels;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    auto& c = classes_[i];
    if (c.id.empty()) throw DataError("class with empty id");
    if (!class_index_.emplace(c.id, i).second) throw DataError("duplicate class id '" + c.id + "'");
    if (!labels.insert(normalize_name(c.label)).second)
      throw DataError("duplicate class label '" + c.label + "'");
    sort_unique(c.parent_ids);
  }
  for (const auto& c : classes_)
    for (const auto& p : c.parent_ids)
      if (!class_index_.contains(p)) throw DanglingReferenceError(p, "parents of class '" + c.id + "'");
  {
    std::vector<std::string> ids;
    for (const auto& c : classes_) ids.push_back(c.id);
    check_acyclic(ids, [this](const std::string& id) -> const std::vector<std::string>& {
      return classes_[class_index_.at(id)].parent_ids;
    }, "class hierarchy");
  }

  // Entities.
  std::sort(entities_.begin(), entities_.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    auto& e = entities_[i];
    if (e.id.empty()) throw DataError("entity with empty id");
    if (!entity_index_.emplace(e.id, i).second) throw DataError("duplicate entity id '" + e.id + "'");
    if (normalize_name(e.main_name).empty()) throw DataError("entity '" + e.id + "' has an empty name");
    if (!class_index_.contains(e.class_id))
      throw DanglingReferenceError(e.class_id, "class of entity '" + e.id + "'");
    const auto main = normalize_name(e.main_name);
    std::erase_if(e.aliases, [&](const std::string& a) {
      return normalize_name(a).empty() || normalize_name(a) == main;
    });
    sort_unique(e.aliases);
    std::set<std::string> keys{main};
    for (const auto& a : e.aliases) keys.insert(normalize_name(a));
    for (const auto& k : keys) name_index_[k].push_back(i);
  }

  // Synsets. Declared hyponym edges are folded into the target's hypernyms
  // so that hyponyms are always the exact inverse of hypernyms.
  std::sort(synsets_.begin(), synsets_.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    if (synsets_[i].id.empty()) throw DataError("synset with empty id");
    if (!synset_index_.emplace(synsets_[i].id, i).second)
      throw DataError("duplicate synset id '" + synsets_[i].id + "'");
  }
  for (auto& s : synsets_) {
    for (const auto& h : s.hypernym_ids)
      if (!synset_index_.contains(h)) throw DanglingReferenceError(h, "hypernyms of synset '" + s.id + "'");
    for (const auto& [type, target] : s.other_edges)
      if (!synset_index_.contains(target))
        throw DanglingReferenceError(target, "edges of synset '" + s.id + "'");
  }
  for (auto& s : synsets_) {
    for (const auto& [type, target] : s.other_edges)
      if (type == SynsetEdge::hyponym) synsets_[synset_index_.at(target)].hypernym_ids.push_back(s.id);
    std::erase_if(s.other_edges, [](const auto& e) { return e.first == SynsetEdge::hyponym; });
  }
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    auto& s = synsets_[i];
    for (auto& f : s.forms) f = normalize_name(f);
    std::erase_if(s.forms, [](const std::string& f) { return f.empty(); });
    if (s.forms.empty()) throw DataError("synset '" + s.id + "' has no forms");
    sort_unique(s.forms);
    sort_unique(s.hypernym_ids);
    if (std::binary_search(s.hypernym_ids.begin(), s.hypernym_ids.end(), s.id))
      throw CycleError(s.id, "hypernym graph");
    std::sort(s.other_edges.begin(), s.other_edges.end());
    s.other_edges.erase(std::unique(s.other_edges.begin(), s.other_edges.end()), s.other_edges.end());
    for (const auto& f : s.forms) form_index_[f].push_back(i);
    for (const auto& h : s.hypernym_ids) hyponym_index_[h].push_back(s.id);
  }
  for (auto& [id, hypos] : hyponym_index_) sort_unique(hypos);
  {
    std::vector<std::string> ids;
    for (const auto& s : synsets_) ids.push_back(s.id);
    check_acyclic(ids, [this](const std::string& id) -> const std::vector<std::string>& {
      return synsets_[synset_index_.at(id)].hypernym_ids;
    }, "hypernym graph");
  }
  // Longest path to a root, memoized in topological order.
  std::function<int(const std::string&)> depth = [&](const std::string& id) -> int {
    if (auto it = root_depth_.find(id); it != root_depth_.end()) return it->second;
    int d = 0;
    for (const auto& h : synsets_[synset_index_.at(id)].hypernym_ids) d = std::max(d, depth(h) + 1);
    root_depth_[id] = d;
    return d;
  };
  for (const auto& s : synsets_) depth(s.id);

  // Facts.
  for (const auto& f : facts_) {
    for (const auto* ref : {&f.subject, &f.object})
      if (!contains(*ref)) throw DanglingReferenceError(ref->str(), "fact '" + f.str() + "'");
    if (f.relation.empty()) throw DataError("fact with empty relation");
  }
  std::sort(facts_.begin(), facts_.end());
  facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    facts_by_subject_[facts_[i].subject.str()].push_back(i);
    facts_by_object_[facts_[i].object.str()].push_back(i);
    facts_by_relation_[facts_[i].relation].push_back(i);
  }

  // Relation phrases.
  for (std::size_t i = 0; i < phrases_.size(); ++i) {
    auto& p = phrases_[i];
    for (auto& w : p.phrase) w = normalize_name(w);
    std::erase_if(p.phrase, [](const std::string& w) { return w.empty(); });
    if (p.phrase.empty() || p.relation.empty()) throw DataError("empty relation phrase entry");
    if (!phrase_index_.emplace(p.phrase, i).second)
      throw DataError("duplicate relation phrase '" + p.phrase.front() + "...'");
    max_phrase_length_ = std::max(max_phrase_length_, p.phrase.size());
  }
}

const ClassNode* OntologyStore::find_class(std::string_view id) const {
  auto it = class_index_.find(std::string(id));
  return it == class_index_.end() ? nullptr : &classes_[it->second];
}

const EntityRecord* OntologyStore::find_entity(std::string_view id) const {
  auto it = entity_index_.find(std::string(id));
  return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

const Synset* OntologyStore::find_synset(std::string_view id) const {
  auto it = synset_index_.find(std::string(id));
  return it == synset_index_.end() ? nullptr : &synsets_[it->second];
}

bool OntologyStore::contains(const ConceptRef& ref) const {
  switch (ref.kind) {
    case ConceptKind::entity: return find_entity(ref.id) != nullptr;
    case ConceptKind::synset: return find_synset(ref.id) != nullptr;
    case ConceptKind::class_: return find_class(ref.id) != nullptr;
  }
  return false;
}

std::vector<const EntityRecord*> OntologyStore::entities_by_name(std::string_view name) const {
  std::vector<const EntityRecord*> out;
  if (auto it = name_index_.find(normalize_name(name)); it != name_index_.end())
    for (auto i : it->second) out.push_back(&entities_[i]);
  return out;
}

std::vector<std::string> OntologyStore::super_classes(std::string_view class_id) const {
  const auto* start = find_class(class_id);
  if (!start) throw UnknownIdError("unknown class '" + std::string(class_id) + "'");
  std::vector<std::string> order;
  std::unordered_set<std::string> seen{start->id};
  std::deque<const ClassNode*> queue{start};
  while (!queue.empty()) {
    const auto* c = queue.front();
    queue.pop_front();
    for (const auto& p : c->parent_ids) {
      if (!seen.insert(p).second) continue;
      order.push_back(p);
      queue.push_back(find_class(p));
    }
  }
  return order;
}

bool OntologyStore::is_subclass_of(std::string_view class_id, std::string_view ancestor_id) const {
  if (class_id == ancestor_id) return find_class(class_id) != nullptr;
  auto supers = super_classes(class_id);
  return std::find(supers.begin(), supers.end(), ancestor_id) != supers.end();
}

std::vector<const Synset*> OntologyStore::synsets_for_form(std::string_view form) const {
  std::vector<const Synset*> out;
  if (auto it = form_index_.find(normalize_name(form)); it != form_index_.end())
    for (auto i : it->second) out.push_back(&synsets_[i]);
  return out;
}

std::vector<std::string> OntologyStore::hyponyms(std::string_view synset_id) const {
  if (!find_synset(synset_id)) throw UnknownIdError("unknown synset '" + std::string(synset_id) + "'");
  auto it = hyponym_index_.find(std::string(synset_id));
  return it == hyponym_index_.end() ? std::vector<std::string>{} : it->second;
}

std::map<std::string, int> OntologyStore::hypernym_closure(std::string_view synset_id) const {
  const auto* start = find_synset(synset_id);
  if (!start) throw UnknownIdError("unknown synset '" + std::string(synset_id) + "'");
  std::map<std::string, int> closure{{start->id, 0}};
  std::deque<const Synset*> queue{start};
  while (!queue.empty()) {
    const auto* s = queue.front();
    queue.pop_front();
    const int d = closure.at(s->id);
    for (const auto& h : s->hypernym_ids) {
      if (closure.emplace(h, d + 1).second) queue.push_back(find_synset(h));
    }
  }
  return closure;
}

int OntologyStore::root_depth(std::string_view synset_id) const {
  auto it = root_depth_.find(std::string(synset_id));
  if (it == root_depth_.end()) throw UnknownIdError("unknown synset '" + std::string(synset_id) + "'");
  return it->second;
}

std::string OntologyStore::msc_hypernym(std::span<const std::string> senses) const {
  if (senses.empty()) throw std::invalid_argument("msc_hypernym needs at least one sense");
  std::map<std::string, int> common = hypernym_closure(senses.front());
  for (const auto& s : senses.subspan(1)) {
    const auto closure = hypernym_closure(s);
    std::erase_if(common, [&](const auto& kv) { return !closure.contains(kv.first); });
  }
  if (common.empty()) {
    std::string list;
    for (const auto& s : senses) list += (list.empty() ? "" : ", ") + s;
    throw NoCommonHypernymError("no common hypernym for {" + list + "}");
  }
  // std::map iterates ids ascending, so strict > keeps the smallest id on ties.
  const std::string* best = nullptr;
  int best_depth = -1;
  for (const auto& [id, unused] : common) {
    const int d = root_depth(id);
    if (d > best_depth) {
      best = &id;
      best_depth = d;
    }
  }
  return *best;
}

std::vector<Fact> OntologyStore::facts_matching(const FactPattern& pattern) const {
  if (!pattern.subject && !pattern.relation && !pattern.object)
    throw std::invalid_argument("facts_matching needs at least one bound position");

  const std::vector<std::size_t>* candidates = nullptr;
  static const std::vector<std::size_t> kNone;
  auto narrow = [&](const auto& index, const std::string& key) {
    auto it = index.find(key);
    const auto* list = it == index.end() ? &kNone : &it->second;
    if (!candidates || list->size() < candidates->size()) candidates = list;
  };
  if (pattern.subject) narrow(facts_by_subject_, pattern.subject->str());
  if (pattern.object) narrow(facts_by_object_, pattern.object->str());
  if (pattern.relation) narrow(facts_by_relation_, *pattern.relation);

  std::vector<Fact> out;
  for (auto i : *candidates) {
    const auto& f = facts_[i];
    if (pattern.subject && f.subject != *pattern.subject) continue;
    if (pattern.relation && f.relation != *pattern.relation) continue;
    if (pattern.object && f.object != *pattern.object) continue;
    out.push_back(f);
  }
  return out;
}

bool OntologyStore::has_fact(const Fact& fact) const {
  return std::binary_search(facts_.begin(), facts_.end(), fact);
}

std::optional<RelationMatch> OntologyStore::map_relation_phrase(
    std::span<const std::string> tokens) const {
  const std::size_t longest = std::min(tokens.size(), max_phrase_length_);
  for (std::size_t len = longest; len > 0; --len) {
    std::vector<std::string> key;
    key.reserve(len);
    for (std::size_t i = 0; i < len; ++i) key.push_back(normalize_name(tokens[i]));
    if (auto it = phrase_index_.find(key); it != phrase_index_.end()) {
      const auto& entry = phrases_[it->second];
      return RelationMatch{entry.relation, entry.is_spatial, len};
    }
  }
  return std::nullopt;
}

}  // namespace semsearch
