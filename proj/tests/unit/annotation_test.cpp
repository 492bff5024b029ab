#include <algorithm>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "oracles.hpp"
#include "semsearch/annotation.hpp"

namespace semsearch {
namespace {

using testing::fixture_engine;

const Annotator& annotator() { return fixture_engine("semantic").annotator(); }
const OntologyStore& store() { return annotator().store(); }

std::set<std::string> serialized(const std::vector<GeneralizedTerm>& terms) {
  std::set<std::string> out;
  for (const auto& t : terms) out.insert(t.serialize());
  return out;
}

std::vector<std::string> serialized_list(const std::vector<GeneralizedTerm>& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.serialize());
  return out;
}

std::vector<NEAnnotation> entities_in(std::string_view text) {
  const auto lemmas = annotator().lexicon().tokenize_and_filter(text);
  return recognize_entities(lemmas, annotator().gazetteer(), store());
}

TEST(GeneralizedTerm, CanonicalSerialization) {
  EXPECT_EQ(GeneralizedTerm(ne_triple("Barcelona", std::nullopt, std::nullopt)).serialize(), "ne:barcelona/*/*");
  EXPECT_EQ(GeneralizedTerm(ne_triple(std::nullopt, "FootballClub", "barca")).serialize(), "ne:*/FootballClub/barca");
  EXPECT_EQ(GeneralizedTerm(WWSense{"S_ACT"}).serialize(), "ws:S_ACT");
  EXPECT_EQ(GeneralizedTerm(WWForm{"tidal wave"}).serialize(), "wf:tidal wave");
  EXPECT_EQ(GeneralizedTerm(WWPair{"movement", "S_ACT"}).serialize(), "wp:movement/S_ACT");
  EXPECT_EQ(GeneralizedTerm(Keyword{"xyzzy"}).serialize(), "kw:xyzzy");
  EXPECT_THROW(ne_triple(std::nullopt, std::nullopt, std::nullopt), std::invalid_argument);
}

TEST(GeneralizedTerm, EscapingKeepsSerializationInjective) {
  const GeneralizedTerm a = ne_triple("a/b", std::nullopt, std::nullopt);
  const GeneralizedTerm b = ne_triple("a", "b", std::nullopt);
  const GeneralizedTerm star = ne_triple("*", std::nullopt, std::nullopt);
  const GeneralizedTerm wild = ne_triple(std::nullopt, "x", std::nullopt);
  EXPECT_NE(a.serialize(), b.serialize());
  EXPECT_NE(star.serialize(), GeneralizedTerm(ne_triple(std::nullopt, std::nullopt, "*")).serialize());
  EXPECT_NE(star.serialize(), wild.serialize());
}

TEST(GeneralizedTerm, SerializationIsInjectiveOverFixtureUniverse) {
  std::set<GeneralizedTerm> universe;
  for (const auto& e : store().entities()) {
    NEAnnotation ann{{0, 1}, normalize_name(e.main_name), e.class_id, e.id};
    for (auto& t : expand_ne_features(ann, store())) universe.insert(t);
  }
  for (const auto& s : store().synsets()) {
    for (auto& t : expand_ww_features({{0, 1}, s.forms.front(), WWResolved{s.id}}, store())) universe.insert(t);
    for (auto& t : expand_ww_features({{0, 1}, s.forms.front(), WWTied{s.id}}, store())) universe.insert(t);
  }
  std::set<std::string> keys;
  for (const auto& t : universe) keys.insert(t.serialize());
  EXPECT_EQ(keys.size(), universe.size());
}

TEST(RecognizeEntities, UniqueAliasResolvesFully) {
  const auto anns = entities_in("Barca played");
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_EQ(anns[0].name, "barcelona");
  EXPECT_EQ(anns[0].class_id, "FootballClub");
  EXPECT_EQ(anns[0].entity_id, "barca");
}

TEST(RecognizeEntities, SharedNameDegradesToNameOnly) {
  const auto anns = entities_in("Barcelona played");
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_EQ(anns[0].name, "barcelona");
  EXPECT_FALSE(anns[0].class_id);
  EXPECT_FALSE(anns[0].entity_id);
}

TEST(RecognizeEntities, ClassLabelYieldsClassOnly) {
  const auto anns = entities_in("football clubs");
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_FALSE(anns[0].name);
  EXPECT_EQ(anns[0].class_id, "FootballClub");
}

TEST(RecognizeEntities, LongestMatchWins) {
  const auto anns = entities_in("Paris Hilton visited the University of Paris");
  ASSERT_EQ(anns.size(), 2u);
  EXPECT_EQ(anns[0].entity_id, "paris_hilton");
  EXPECT_EQ(anns[1].entity_id, "uniparis");
  EXPECT_FALSE(anns[0].span.overlaps(anns[1].span));
}

TEST(ExpandNeFeatures, BarcelonaClub) {
  const auto* barca = store().find_entity("barca");
  ASSERT_NE(barca, nullptr);
  NEAnnotation ann{{0, 1}, "barcelona", "FootballClub", "barca"};
  const auto got = serialized(expand_ne_features(ann, store()));
  const std::set<std::string> listed{
      "ne:barcelona/*/*",           "ne:*/FootballClub/*",          "ne:barcelona/FootballClub/*",
      "ne:barca/*/*",               "ne:fc barcelona/*/*",          "ne:*/Organization/*",
      "ne:*/Thing/*",               "ne:barcelona/Organization/*",  "ne:barcelona/Thing/*",
      "ne:barca/FootballClub/*",    "ne:fc barcelona/FootballClub/*", "ne:barca/Organization/*",
      "ne:barca/Thing/*",           "ne:fc barcelona/Organization/*", "ne:fc barcelona/Thing/*",
      "ne:*/*/barca"};
  EXPECT_EQ(got, listed);
  EXPECT_EQ(got, oracle::ne_patterns(store(), *barca));
}

TEST(ExpandNeFeatures, PartialAnnotations) {
  EXPECT_EQ(serialized(expand_ne_features({{0, 1}, "paris", std::nullopt, std::nullopt}, store())),
            std::set<std::string>{"ne:paris/*/*"});
  EXPECT_EQ(serialized(expand_ne_features({{0, 1}, std::nullopt, "FootballClub", std::nullopt}, store())),
            (std::set<std::string>{"ne:*/FootballClub/*", "ne:*/Organization/*", "ne:*/Thing/*"}));
}

TEST(ExpandNeFeatures, FullRecognitionIsSupersetOfNameOnly) {
  for (const auto& e : store().entities()) {
    const auto name = normalize_name(e.main_name);
    const auto full = serialized(expand_ne_features({{0, 1}, name, e.class_id, e.id}, store()));
    const auto partial = serialized(expand_ne_features({{0, 1}, name, std::nullopt, std::nullopt}, store()));
    EXPECT_TRUE(std::ranges::includes(full, partial)) << e.id;
  }
}

TEST(ExpandWwFeatures, ResolvedBranch) {
  EXPECT_EQ(serialized(expand_ww_features({{0, 1}, "movement", WWResolved{"S_MOVE1"}}, store())),
            (std::set<std::string>{"ws:S_MOVE1", "wf:movement", "wf:motion", "ws:S_CHANGE", "wf:change",
                                   "wp:movement/S_CHANGE", "wp:motion/S_CHANGE"}));
}

TEST(ExpandWwFeatures, TiedBranch) {
  EXPECT_EQ(serialized(expand_ww_features({{0, 1}, "movement", WWTied{"S_ACT"}}, store())),
            (std::set<std::string>{"wf:movement", "wp:movement/S_ACT", "wf:act", "wf:deed", "ws:S_ACT",
                                   "wf:event", "ws:S_EVENT", "wp:movement/S_EVENT"}));
}

TEST(ExpandWwFeatures, RootSenseHasNoHypernymFeatures) {
  EXPECT_EQ(serialized(expand_ww_features({{0, 1}, "event", WWResolved{"S_EVENT"}}, store())),
            (std::set<std::string>{"ws:S_EVENT", "wf:event"}));
  EXPECT_EQ(serialized(expand_ww_features({{0, 1}, "zz", WWUnresolved{}}, store())),
            std::set<std::string>{"wf:zz"});
}

TEST(MostSpecificTerm, PicksTheMostSpecificAvailableTriple) {
  EXPECT_EQ(GeneralizedTerm(most_specific_term(NEAnnotation{{0, 1}, "barcelona", "FootballClub", "barca"})).serialize(),
            "ne:*/*/barca");
  EXPECT_EQ(GeneralizedTerm(most_specific_term(NEAnnotation{{0, 1}, "paris", "City", std::nullopt})).serialize(),
            "ne:paris/City/*");
  EXPECT_EQ(GeneralizedTerm(most_specific_term(NEAnnotation{{0, 1}, "paris", std::nullopt, std::nullopt})).serialize(),
            "ne:paris/*/*");
  EXPECT_EQ(GeneralizedTerm(most_specific_term(WWAnnotation{{0, 1}, "movement", WWTied{"S_ACT"}})).serialize(),
            "wp:movement/S_ACT");
  EXPECT_EQ(GeneralizedTerm(most_specific_term(WWAnnotation{{0, 1}, "movement", WWResolved{"S_MOVE2"}})).serialize(),
            "ws:S_MOVE2");
}

// The matching contract: what a query emits for a concept, a document
// mentioning the same concept already carries.
TEST(MostSpecificTerm, QueryTermIsAlwaysInDocumentExpansion) {
  for (const auto& e : store().entities()) {
    NEAnnotation ann{{0, 1}, normalize_name(e.main_name), e.class_id, e.id};
    const auto doc_side = serialized(expand_ne_features(ann, store()));
    EXPECT_TRUE(doc_side.contains(GeneralizedTerm(most_specific_term(ann)).serialize())) << e.id;
  }
  for (const auto& s : store().synsets())
    for (const auto& f : s.forms) {
      WWAnnotation resolved{{0, 1}, f, WWResolved{s.id}};
      WWAnnotation tied{{0, 1}, f, WWTied{s.id}};
      EXPECT_TRUE(serialized(expand_ww_features(resolved, store()))
                      .contains(GeneralizedTerm(most_specific_term(resolved)).serialize()));
      EXPECT_TRUE(serialized(expand_ww_features(tied, store()))
                      .contains(GeneralizedTerm(most_specific_term(tied)).serialize()));
    }
}

TEST(Interrogatives, DefaultTable) {
  InterrogativeTable table;
  EXPECT_EQ(table.map("where"), "Location");
  EXPECT_EQ(table.map("who"), "Person");
  EXPECT_EQ(table.map("when"), "TimeInterval");
  EXPECT_FALSE(table.map("whither"));
  EXPECT_FALSE(table.map("what"));
}

TEST(AnnotateDocument, ComposesEntityWordAndKeywordFeatures) {
  const auto doc = annotator().annotate_document("d", "Barca announced a movement of travel");
  std::set<std::string> keys;
  for (const auto& [t, w] : doc.terms) keys.insert(t.serialize());

  auto expected = oracle::ne_patterns(store(), *store().find_entity("barca"));
  expected.merge(oracle::ww_resolved(store(), "S_MOVE2"));
  expected.merge(oracle::ww_resolved(store(), "S_TRAVEL"));
  expected.insert("kw:announce");
  EXPECT_EQ(keys, expected);
  EXPECT_DOUBLE_EQ(doc.terms.at(GeneralizedTerm(Keyword{"announce"})), 1.0);
}

TEST(AnnotateDocument, CountsVirtualTermsPerTriggeringOccurrence) {
  const auto doc = annotator().annotate_document("d", "Barca beat Chelsea. Barca won.");
  EXPECT_DOUBLE_EQ(doc.terms.at(GeneralizedTerm(ne_triple(std::nullopt, "FootballClub", std::nullopt))), 3.0);
  EXPECT_DOUBLE_EQ(doc.terms.at(GeneralizedTerm(ne_triple(std::nullopt, std::nullopt, "barca"))), 2.0);
}

TEST(AnnotateDocument, EdgeCases) {
  EXPECT_TRUE(annotator().annotate_document("d", "the of and a").terms.empty());
  const auto doc = annotator().annotate_document("d", "xyzzy plugh");
  std::set<std::string> keys;
  for (const auto& [t, w] : doc.terms) keys.insert(t.serialize());
  EXPECT_EQ(keys, (std::set<std::string>{"kw:xyzzy", "kw:plugh"}));
}

TEST(AnnotateDocument, IsDeterministic) {
  for (const auto& d : testing::fixture_corpus())
    EXPECT_EQ(annotator().annotate_document(d.docno, d.text).terms, annotator().annotate_document(d.docno, d.text).terms);
}

TEST(RepresentQuery, InterrogativeBecomesClassTriple) {
  const auto q = annotator().represent_query("q", "Where was George Washington born?");
  EXPECT_EQ(serialized_list(q.terms),
            (std::vector<std::string>{"ne:*/Location/*", "ne:*/*/gwashington", "ws:S_BORN"}));
  EXPECT_TRUE(q.latent_terms.empty());
}

TEST(RepresentQuery, ClassQuery) {
  EXPECT_EQ(serialized_list(annotator().represent_query("q", "football clubs").terms),
            std::vector<std::string>{"ne:*/FootballClub/*"});
}

TEST(RepresentQuery, TiedWordFallsBackToMscPair) {
  EXPECT_EQ(serialized_list(annotator().represent_query("q", "movement").terms),
            std::vector<std::string>{"wp:movement/S_ACT"});
}

TEST(RepresentQuery, OneTriplePerEntityMention) {
  for (const auto& t : testing::fixture_topics()) {
    const auto analysis = annotator().analyze(t.query);
    const auto q = annotator().represent_query(t.qid, t.query);
    std::size_t ne_terms = 0;
    for (const auto& term : q.terms) ne_terms += std::holds_alternative<NETriple>(term.value);
    const auto raw = annotator().lexicon().tokenize(t.query);
    const bool interrogative = !raw.empty() && annotator().config().interrogatives.map(raw.front().surface);
    EXPECT_EQ(ne_terms, analysis.entities.size() + (interrogative ? 1 : 0)) << t.qid;
  }
}

TEST(Annotator, LexicalModeEmitsKeywordsOnly) {
  const auto& lexical = fixture_engine("lexical");
  for (const auto& d : testing::fixture_corpus())
    for (const auto& [t, w] : lexical.annotate(d.docno, d.text).terms)
      EXPECT_TRUE(std::holds_alternative<Keyword>(t.value)) << d.docno;
}

}  // namespace
}  // namespace semsearch
