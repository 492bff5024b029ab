#include "semsearch/rcsa.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace semsearch {

namespace {

constexpr std::string_view kLocationClass = "Location";
constexpr std::string_view kPartOf = "isPartOf";

bool is_located_entity(const ConceptRef& ref, const OntologyStore& store) {
  if (ref.kind != ConceptKind::entity) return false;
  const auto* e = store.find_entity(ref.id);
  return e && store.find_class(kLocationClass) && store.is_subclass_of(e->class_id, kLocationClass);
}

std::optional<RelationMatch> longest_phrase_at(std::span<const Token> tokens, std::size_t pos,
                                               const OntologyStore& store) {
  const auto n = std::min(tokens.size() - pos, store.max_phrase_length());
  std::vector<std::string> surfaces, lemmas;
  for (std::size_t i = pos; i < pos + n; ++i) {
    surfaces.push_back(tokens[i].surface);
    lemmas.push_back(tokens[i].lemma);
  }
  auto by_surface = store.map_relation_phrase(surfaces);
  auto by_lemma = store.map_relation_phrase(lemmas);
  if (by_lemma && (!by_surface || by_lemma->length > by_surface->length)) return by_lemma;
  return by_surface;
}

void add_unique(std::vector<GeneralizedTerm>& out, std::set<GeneralizedTerm>& seen, GeneralizedTerm t) {
  if (seen.insert(t).second) out.push_back(std::move(t));
}

}  // namespace

std::string_view to_string(C2Kind kind) {
  switch (kind) {
    case C2Kind::located_entity: return "located_entity";
    case C2Kind::ne_class: return "ne_class";
    case C2Kind::ww: return "ww";
  }
  return "?";
}

std::string LatentConcept::trace_json() const {
  nlohmann::ordered_json j;
  j["concept"] = ref.str();
  j["branch"] = std::string(1, branch);
  j["edge_fact"] = edge_fact.str();
  j["support_fact"] = support_fact.str();
  return j.dump();
}

std::vector<RelationMention> recognize_relation_phrases(std::span<const Token> tokens,
                                                        const OntologyStore& store) {
  std::vector<RelationMention> raw;
  for (std::size_t pos = 0; pos < tokens.size();) {
    auto hit = longest_phrase_at(tokens, pos, store);
    if (!hit) {
      ++pos;
      continue;
    }
    raw.push_back({{pos, pos + hit->length}, hit->relation, hit->is_spatial, std::nullopt});
    pos += hit->length;
  }

  std::vector<RelationMention> out;
  for (auto& m : raw) {
    if (m.is_spatial && !out.empty()) {
      auto& prev = out.back();
      if (!prev.is_spatial && prev.span.end <= m.span.begin &&
          m.span.begin - prev.span.end <= kVerbSpatialWindow) {
        m.verb_relation = prev.relation;
        m.span.begin = prev.span.begin;
        out.back() = std::move(m);
        continue;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ConceptMention> recognize_initial_concepts(std::span<const Token> tokens,
                                                       const Gazetteer& gazetteer,
                                                       const OntologyStore& store) {
  std::vector<std::string> lemmas;
  std::vector<std::size_t> origin;  // filtered position -> token position
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_stop) continue;
    lemmas.push_back(tokens[i].lemma);
    origin.push_back(i);
  }
  auto span_of = [&](std::size_t begin, std::size_t length) {
    return TokenSpan{origin[begin], origin[begin + length - 1] + 1};
  };

  std::vector<ConceptMention> out;
  for (std::size_t pos = 0; pos < lemmas.size();) {
    if (auto e = gazetteer.match_entity(lemmas, pos)) {
      const auto span = span_of(pos, e->length);
      if (e->name) {
        for (const auto& id : e->name->entity_ids) out.push_back({ConceptRef::entity(id), span});
      } else {
        out.push_back({ConceptRef::class_(*e->class_id), span});
      }
      pos += e->length;
      continue;
    }
    auto f = gazetteer.match_form(lemmas, pos);
    if (!f) {
      ++pos;
      continue;
    }
    bool blocked = false;
    for (std::size_t q = pos + 1; q < pos + f->length && !blocked; ++q)
      blocked = gazetteer.match_entity(lemmas, q).has_value();
    if (blocked) {
      ++pos;
      continue;
    }
    const auto span = span_of(pos, f->length);
    for (const auto* s : store.synsets_for_form(*f->form)) out.push_back({ConceptRef::synset(s->id), span});
    pos += f->length;
  }
  return out;
}

std::vector<QueryTriple> form_triples(std::span<const ConceptMention> concepts,
                                      std::span<const RelationMention> mentions,
                                      const OntologyStore& store) {
  std::vector<QueryTriple> out;
  for (const auto& m : mentions) {
    std::optional<std::size_t> left_end, right_begin;
    for (const auto& c : concepts) {
      if (c.span.end <= m.span.begin && (!left_end || c.span.end > *left_end)) left_end = c.span.end;
      if (c.span.begin >= m.span.end && (!right_begin || c.span.begin < *right_begin))
        right_begin = c.span.begin;
    }
    if (!left_end || !right_begin) continue;
    for (const auto& l : concepts) {
      if (l.span.end != *left_end || l.span.end > m.span.begin) continue;
      for (const auto& r : concepts) {
        if (r.span.begin != *right_begin || r.span.begin < m.span.end) continue;
        QueryTriple t;
        t.c1 = l.ref;
        t.c2 = r.ref;
        t.relation = m.relation;
        if (t.c1.kind == ConceptKind::class_ && t.c2.kind != ConceptKind::class_) std::swap(t.c1, t.c2);
        if (t.c2.kind == ConceptKind::class_) {
          t.c2_kind = C2Kind::ne_class;
        } else if (t.c2.kind == ConceptKind::synset) {
          t.c2_kind = C2Kind::ww;
        } else if (is_located_entity(t.c2, store)) {
          t.c2_kind = C2Kind::located_entity;
        } else {
          continue;
        }
        if (m.is_spatial) {
          t.r_spatial = m.relation;
          t.r_fact = m.verb_relation;
        }
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

std::vector<LatentConcept> derive_latent_concepts(const QueryTriple& triple, const OntologyStore& store) {
  std::map<ConceptRef, LatentConcept> found;
  auto keep = [&](LatentConcept lc) {
    if (lc.ref == triple.c1 || lc.ref == triple.c2) return;
    auto key = lc.ref;
    found.try_emplace(std::move(key), std::move(lc));
  };

  if (triple.c2_kind == C2Kind::located_entity && triple.r_spatial) {
    // Without a verb there is no query relation to follow from C1.
    if (!triple.r_fact) return {};
    for (const auto& edge : store.facts_matching({std::nullopt, *triple.r_spatial, triple.c2})) {
      if (edge.subject.kind != ConceptKind::entity) continue;
      Fact support{triple.c1, *triple.r_fact, edge.subject};
      if (store.has_fact(support)) keep({edge.subject, 'a', edge, support});
    }
  } else if (triple.c2_kind == C2Kind::located_entity) {
    for (const auto& edge : store.facts_matching({std::nullopt, std::string(kPartOf), triple.c2})) {
      Fact support{triple.c1, triple.relation, edge.subject};
      if (store.has_fact(support)) keep({edge.subject, 'b', edge, support});
    }
  } else if (triple.c2_kind == C2Kind::ne_class) {
    for (const auto& support : store.facts_matching({triple.c1, triple.relation, std::nullopt})) {
      if (support.object.kind != ConceptKind::entity) continue;
      const auto* e = store.find_entity(support.object.id);
      if (!e || !store.is_subclass_of(e->class_id, triple.c2.id)) continue;
      Fact edge{support.object, std::string(kInstanceOfEdge), ConceptRef::class_(e->class_id)};
      keep({support.object, 'c', edge, support});
    }
  } else {
    for (const auto& support : store.facts_matching({triple.c1, triple.relation, std::nullopt})) {
      if (support.object.kind != ConceptKind::synset || support.object.id == triple.c2.id) continue;
      const auto closure = store.hypernym_closure(support.object.id);
      if (!closure.contains(triple.c2.id)) continue;
      Fact edge{support.object, std::string(kHyponymOfEdge), triple.c2};
      keep({support.object, 'd', edge, support});
    }
  }

  std::vector<LatentConcept> out;
  for (auto& [_, lc] : found) out.push_back(std::move(lc));
  return out;
}

bool replay_provenance(const LatentConcept& latent, const QueryTriple& triple, const OntologyStore& store) {
  const auto& e = latent.edge_fact;
  const auto& s = latent.support_fact;
  if (!store.has_fact(s) || s.subject != triple.c1 || s.object != latent.ref) return false;
  if (e.subject != latent.ref) return false;
  switch (latent.branch) {
    case 'a':
      return triple.r_spatial && triple.r_fact && s.relation == *triple.r_fact &&
             e.relation == *triple.r_spatial && e.object == triple.c2 && store.has_fact(e);
    case 'b':
      return s.relation == triple.relation && e.relation == kPartOf && e.object == triple.c2 &&
             store.has_fact(e);
    case 'c': {
      const auto* ent = store.find_entity(latent.ref.id);
      return s.relation == triple.relation && e.relation == kInstanceOfEdge && ent &&
             e.object == ConceptRef::class_(ent->class_id) && store.is_subclass_of(ent->class_id, triple.c2.id);
    }
    case 'd':
      return s.relation == triple.relation && e.relation == kHyponymOfEdge && e.object == triple.c2 &&
             latent.ref.id != triple.c2.id && store.find_synset(latent.ref.id) &&
             store.hypernym_closure(latent.ref.id).contains(triple.c2.id);
    default:
      return false;
  }
}

std::vector<GeneralizedTerm> render_latent_concepts(std::span<const ConceptRef> concepts,
                                                    const OntologyStore& store) {
  std::vector<GeneralizedTerm> out;
  std::set<GeneralizedTerm> seen;
  for (const auto& c : concepts) {
    switch (c.kind) {
      case ConceptKind::entity:
        if (const auto* e = store.find_entity(c.id)) add_unique(out, seen, ne_triple(e->main_name, std::nullopt, std::nullopt));
        break;
      case ConceptKind::synset:
        if (const auto* s = store.find_synset(c.id))
          for (const auto& f : s->forms) add_unique(out, seen, WWForm{f});
        break;
      case ConceptKind::class_:
        add_unique(out, seen, ne_triple(std::nullopt, c.id, std::nullopt));
        break;
    }
  }
  return out;
}

std::vector<GeneralizedTerm> render_latent_keywords(std::span<const ConceptRef> concepts,
                                                    const OntologyStore& store,
                                                    const Lexicon& lexicon) {
  std::vector<GeneralizedTerm> out;
  std::set<GeneralizedTerm> seen;
  auto add_text = [&](const std::string& text) {
    for (auto& stem : lexicon.tokenize_and_filter(text)) add_unique(out, seen, Keyword{std::move(stem)});
  };
  for (const auto& c : concepts) {
    switch (c.kind) {
      case ConceptKind::entity:
        if (const auto* e = store.find_entity(c.id)) add_text(e->main_name);
        break;
      case ConceptKind::synset:
        if (const auto* s = store.find_synset(c.id))
          for (const auto& f : s->forms) add_text(f);
        break;
      case ConceptKind::class_:
        if (const auto* k = store.find_class(c.id)) add_text(k->label);
        break;
    }
  }
  return out;
}

std::vector<ConceptRef> csa_neighbors(std::span<const ConceptRef> concepts, const OntologyStore& store) {
  const std::set<ConceptRef> initial(concepts.begin(), concepts.end());
  std::set<ConceptRef> out;
  for (const auto& c : initial) {
    for (const auto& f : store.facts_matching({c, std::nullopt, std::nullopt})) out.insert(f.object);
    for (const auto& f : store.facts_matching({std::nullopt, std::nullopt, c})) out.insert(f.subject);
  }
  for (const auto& c : initial) out.erase(c);
  return {out.begin(), out.end()};
}

std::vector<GeneralizedTerm> csa_expand(std::span<const ConceptRef> concepts, const OntologyStore& store) {
  return render_latent_concepts(csa_neighbors(concepts, store), store);
}

std::vector<ConceptRef> RcsaAnalysis::initial_concepts() const {
  std::vector<ConceptRef> out;
  std::set<ConceptRef> seen;
  for (const auto& c : concepts)
    if (seen.insert(c.ref).second) out.push_back(c.ref);
  return out;
}

std::vector<ConceptRef> RcsaAnalysis::latent_concepts() const {
  std::vector<ConceptRef> out;
  for (const auto& l : latents) out.push_back(l.ref);
  return out;
}

RcsaAnalysis analyze_query_relations(std::string_view text, const Lexicon& lexicon,
                                     const Gazetteer& gazetteer, const OntologyStore& store) {
  RcsaAnalysis a;
  a.tokens = lexicon.tokenize(text);
  a.mentions = recognize_relation_phrases(a.tokens, store);
  a.concepts = recognize_initial_concepts(a.tokens, gazetteer, store);
  a.triples = form_triples(a.concepts, a.mentions, store);

  const auto initial = a.initial_concepts();
  const std::set<ConceptRef> excluded(initial.begin(), initial.end());
  std::set<ConceptRef> emitted;
  for (std::size_t t = 0; t < a.triples.size(); ++t) {
    for (auto& lc : derive_latent_concepts(a.triples[t], store)) {
      if (excluded.contains(lc.ref) || !emitted.insert(lc.ref).second) continue;
      a.latents.push_back(std::move(lc));
      a.triple_of.push_back(t);
    }
  }
  return a;
}

}  // namespace semsearch
