#include "semsearch/annotation.hpp"

#include <algorithm>
#include <set>

#include "semsearch/error.hpp"

namespace semsearch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

/// Longest key in `table` that matches lemmas[pos, pos+len).
template <typename Map>
std::pair<std::size_t, const typename Map::mapped_type*> longest_match(
    const Map& table, std::span<const std::string> lemmas, std::size_t pos, std::size_t max_length) {
  const std::size_t longest = std::min(max_length, lemmas.size() - pos);
  std::vector<std::string> key;
  for (std::size_t len = longest; len > 0; --len) {
    key.assign(lemmas.begin() + static_cast<std::ptrdiff_t>(pos),
               lemmas.begin() + static_cast<std::ptrdiff_t>(pos + len));
    if (auto it = table.find(key); it != table.end()) return {len, &it->second};
  }
  return {0, nullptr};
}

}  // namespace

InterrogativeTable::InterrogativeTable()
    : mapping_{{"where", "Location"}, {"who", "Person"}, {"when", "TimeInterval"}} {}

InterrogativeTable::InterrogativeTable(std::map<std::string, std::string> mapping)
    : mapping_(std::move(mapping)) {}

std::optional<std::string> InterrogativeTable::map(std::string_view token) const {
  auto it = mapping_.find(normalize_name(token));
  if (it == mapping_.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

Gazetteer::Gazetteer(const OntologyStore& store, const Lexicon& lexicon) {
  auto add_name = [&](const std::string& raw, const std::string& entity_id) {
    auto key = lexicon.tokenize_and_filter(raw);
    if (key.empty()) return;
    auto& entry = names_[key];
    const auto name = normalize_name(raw);
    if (entry.name.empty() || name < entry.name) entry.name = name;
    if (std::find(entry.entity_ids.begin(), entry.entity_ids.end(), entity_id) == entry.entity_ids.end())
      entry.entity_ids.push_back(entity_id);
    max_length_ = std::max(max_length_, key.size());
  };
  for (const auto& e : store.entities()) {
    add_name(e.main_name, e.id);
    for (const auto& a : e.aliases) add_name(a, e.id);
  }
  for (auto& [key, entry] : names_) std::sort(entry.entity_ids.begin(), entry.entity_ids.end());

  for (const auto& c : store.classes()) {
    auto key = lexicon.tokenize_and_filter(c.label);
    if (key.empty()) continue;
    class_labels_.emplace(key, c.id);
    max_length_ = std::max(max_length_, key.size());
  }
  for (const auto& s : store.synsets()) {
    for (const auto& f : s.forms) {
      auto key = lexicon.tokenize_and_filter(f);
      if (key.empty()) continue;
      auto [it, inserted] = forms_.emplace(key, f);
      if (!inserted && f < it->second) it->second = f;
      max_length_ = std::max(max_length_, key.size());
    }
  }
}

std::optional<Gazetteer::EntityHit> Gazetteer::match_entity(std::span<const std::string> lemmas,
                                                            std::size_t pos) const {
  if (pos >= lemmas.size()) return std::nullopt;
  auto [name_len, name] = longest_match(names_, lemmas, pos, max_length_);
  auto [class_len, class_id] = longest_match(class_labels_, lemmas, pos, max_length_);
  if (name_len == 0 && class_len == 0) return std::nullopt;
  if (name_len >= class_len) return EntityHit{name_len, name, nullptr};
  return EntityHit{class_len, nullptr, class_id};
}

std::optional<Gazetteer::FormHit> Gazetteer::match_form(std::span<const std::string> lemmas,
                                                        std::size_t pos) const {
  if (pos >= lemmas.size()) return std::nullopt;
  auto [len, form] = longest_match(forms_, lemmas, pos, max_length_);
  if (len == 0) return std::nullopt;
  return FormHit{len, form};
}

std::vector<NEAnnotation> recognize_entities(std::span<const std::string> lemmas,
                                             const Gazetteer& gazetteer,
                                             const OntologyStore& store) {
  std::vector<NEAnnotation> out;
  std::size_t pos = 0;
  while (pos < lemmas.size()) {
    auto hit = gazetteer.match_entity(lemmas, pos);
    if (!hit) {
      ++pos;
      continue;
    }
    NEAnnotation ann;
    ann.span = {pos, pos + hit->length};
    if (hit->name) {
      if (hit->name->entity_ids.size() == 1) {
        const auto* e = store.find_entity(hit->name->entity_ids.front());
        ann.name = normalize_name(e->main_name);
        ann.class_id = e->class_id;
        ann.entity_id = e->id;
      } else {
        ann.name = hit->name->name;
      }
    } else {
      ann.class_id = *hit->class_id;
    }
    out.push_back(std::move(ann));
    pos += hit->length;
  }
  return out;
}

std::vector<GeneralizedTerm> expand_ne_features(const NEAnnotation& ann, const OntologyStore& store) {
  std::set<GeneralizedTerm> terms;
  std::vector<std::string> aliases;
  if (ann.entity_id) {
    if (const auto* e = store.find_entity(*ann.entity_id))
      for (const auto& a : e->aliases) aliases.push_back(normalize_name(a));
  }
  std::vector<std::string> supers;
  if (ann.class_id) supers = store.super_classes(*ann.class_id);

  const auto& n = ann.name;
  const auto& c = ann.class_id;
  using std::nullopt;
  if (n) terms.insert(ne_triple(n, nullopt, nullopt));
  if (c) terms.insert(ne_triple(nullopt, c, nullopt));
  if (n && c) terms.insert(ne_triple(n, c, nullopt));
  for (const auto& a : aliases) terms.insert(ne_triple(a, nullopt, nullopt));
  for (const auto& s : supers) terms.insert(ne_triple(nullopt, s, nullopt));
  if (n)
    for (const auto& s : supers) terms.insert(ne_triple(n, s, nullopt));
  if (c)
    for (const auto& a : aliases) terms.insert(ne_triple(a, c, nullopt));
  for (const auto& a : aliases)
    for (const auto& s : supers) terms.insert(ne_triple(a, s, nullopt));
  if (ann.entity_id) terms.insert(ne_triple(nullopt, nullopt, ann.entity_id));
  return {terms.begin(), terms.end()};
}

std::vector<GeneralizedTerm> expand_ww_features(const WWAnnotation& ann, const OntologyStore& store) {
  std::set<GeneralizedTerm> terms;
  auto synset = [&](const std::string& id) -> const Synset& {
    const auto* s = store.find_synset(id);
    if (!s) throw UnknownIdError("unknown synset '" + id + "'");
    return *s;
  };
  std::visit(overloaded{
                 [&](const WWResolved& r) {
                   const auto& s = synset(r.synset_id);
                   terms.insert(WWSense{s.id});
                   for (const auto& f : s.forms) terms.insert(WWForm{f});
                   for (const auto& h : s.hypernym_ids) {
                     terms.insert(WWSense{h});
                     for (const auto& fh : synset(h).forms) terms.insert(WWForm{fh});
                     for (const auto& f : s.forms) terms.insert(WWPair{f, h});
                   }
                 },
                 [&](const WWTied& t) {
                   const auto& m = synset(t.msc);
                   terms.insert(WWForm{ann.form});
                   terms.insert(WWPair{ann.form, m.id});
                   for (const auto& fm : m.forms) terms.insert(WWForm{fm});
                   terms.insert(WWSense{m.id});
                   for (const auto& h : m.hypernym_ids) {
                     for (const auto& fh : synset(h).forms) terms.insert(WWForm{fh});
                     terms.insert(WWSense{h});
                     terms.insert(WWPair{ann.form, h});
                   }
                 },
                 [&](const WWUnresolved&) { terms.insert(WWForm{ann.form}); },
             },
             ann.resolution);
  return {terms.begin(), terms.end()};
}

GeneralizedTerm most_specific_term(const NEAnnotation& ann) {
  if (ann.entity_id) return ne_triple(std::nullopt, std::nullopt, ann.entity_id);
  if (ann.name && ann.class_id) return ne_triple(ann.name, ann.class_id, std::nullopt);
  if (ann.name) return ne_triple(ann.name, std::nullopt, std::nullopt);
  return ne_triple(std::nullopt, ann.class_id, std::nullopt);
}

GeneralizedTerm most_specific_term(const WWAnnotation& ann) {
  return std::visit(overloaded{
                        [](const WWResolved& r) -> GeneralizedTerm { return WWSense{r.synset_id}; },
                        [&](const WWTied& t) -> GeneralizedTerm { return WWPair{ann.form, t.msc}; },
                        [&](const WWUnresolved&) -> GeneralizedTerm { return WWForm{ann.form}; },
                    },
                    ann.resolution);
}

Annotator::Annotator(const OntologyStore& store, const Lexicon& lexicon, const SenseGraph& graph,
                     AnnotationConfig config)
    : store_(store),
      lexicon_(lexicon),
      graph_(graph),
      config_(std::move(config)),
      gazetteer_(store, lexicon) {
  config_.wsd.validate();
}

Annotator::Analysis Annotator::analyze(std::string_view text) const {
  Analysis a;
  for (auto& t : lexicon_.tokenize(text))
    if (!t.is_stop) a.tokens.push_back(std::move(t));
  std::vector<std::string> lemmas;
  lemmas.reserve(a.tokens.size());
  for (const auto& t : a.tokens) lemmas.push_back(t.lemma);

  std::vector<bool> covered(lemmas.size(), false);
  if (config_.use_ne) {
    a.entities = recognize_entities(lemmas, gazetteer_, store_);
    for (const auto& e : a.entities)
      for (auto i = e.span.begin; i < e.span.end; ++i) covered[i] = true;
  }

  if (config_.use_ww) {
    std::size_t pos = 0;
    while (pos < lemmas.size()) {
      if (covered[pos]) {
        ++pos;
        continue;
      }
      std::size_t run_end = pos;
      while (run_end < lemmas.size() && !covered[run_end]) ++run_end;
      auto hit = gazetteer_.match_form(std::span<const std::string>(lemmas).first(run_end), pos);
      if (!hit) {
        ++pos;
        continue;
      }
      a.words.push_back(WWAnnotation{{pos, pos + hit->length}, *hit->form, WWUnresolved{}});
      for (auto i = pos; i < pos + hit->length; ++i) covered[i] = true;
      pos += hit->length;
    }

    for (auto& w : a.words) {
      std::vector<std::string> context;
      const auto sentence = a.tokens[w.span.begin].sentence;
      for (const auto& other : a.words) {
        if (&other == &w) continue;
        if (config_.wsd.context_window == 0) {
          if (a.tokens[other.span.begin].sentence != sentence) continue;
        } else {
          const auto radius = static_cast<std::size_t>(config_.wsd.context_window);
          const auto distance = other.span.begin > w.span.begin ? other.span.begin - w.span.begin
                                                                : w.span.begin - other.span.begin;
          if (distance > radius) continue;
        }
        context.push_back(other.form);
      }
      auto result = disambiguate(context, w.form, graph_, store_, config_.wsd);
      std::visit(overloaded{
                     [&](const Resolved& r) { w.resolution = WWResolved{r.synset_id}; },
                     [&](const Tied& t) {
                       if (t.msc) w.resolution = WWTied{*t.msc};
                       else w.resolution = WWUnresolved{};
                     },
                     [&](const Unresolved&) { w.resolution = WWUnresolved{}; },
                 },
                 result.outcome);
    }
  }

  for (std::size_t i = 0; i < covered.size(); ++i)
    if (!covered[i]) a.keyword_positions.push_back(i);
  return a;
}

AnnotatedDocument Annotator::annotate_document(std::string doc_id, std::string_view text) const {
  AnnotatedDocument doc;
  doc.doc_id = std::move(doc_id);
  const auto a = analyze(text);
  doc.source_length = a.tokens.size();

  auto add_occurrence = [&](const GeneralizedTerm& original, const std::vector<GeneralizedTerm>& implied) {
    doc.terms[original] += 1.0;
    for (const auto& t : implied)
      if (t != original) doc.terms[t] += config_.virtual_term_weight;
  };
  for (const auto& e : a.entities) add_occurrence(most_specific_term(e), expand_ne_features(e, store_));
  for (const auto& w : a.words) add_occurrence(most_specific_term(w), expand_ww_features(w, store_));
  for (auto i : a.keyword_positions) doc.terms[Keyword{a.tokens[i].lemma}] += 1.0;
  return doc;
}

QueryRepresentation Annotator::represent_query(std::string query_id, std::string_view text) const {
  QueryRepresentation q;
  q.query_id = std::move(query_id);

  if (config_.use_ne) {
    const auto all = lexicon_.tokenize(text);
    if (!all.empty()) {
      if (auto cls = config_.interrogatives.map(all.front().surface); cls && store_.find_class(*cls))
        q.terms.push_back(ne_triple(std::nullopt, *cls, std::nullopt));
    }
  }

  const auto a = analyze(text);
  std::vector<std::pair<std::size_t, GeneralizedTerm>> ordered;
  for (const auto& e : a.entities) ordered.emplace_back(e.span.begin, most_specific_term(e));
  for (const auto& w : a.words) ordered.emplace_back(w.span.begin, most_specific_term(w));
  for (auto i : a.keyword_positions) ordered.emplace_back(i, Keyword{a.tokens[i].lemma});
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [pos, term] : ordered) q.terms.push_back(std::move(term));
  return q;
}

}  // namespace semsearch
