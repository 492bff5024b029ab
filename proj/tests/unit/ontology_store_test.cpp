#include <algorithm>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "oracles.hpp"
#include "semsearch/error.hpp"
#include "semsearch/ontology_store.hpp"

namespace semsearch {
namespace {

using testing::fixture_engine;

const OntologyStore& store() { return fixture_engine("semantic").store(); }

std::vector<std::string> ids(const std::vector<const EntityRecord*>& v) {
  std::vector<std::string> out;
  for (const auto* e : v) out.push_back(e->id);
  return out;
}

TEST(OntologyStore, FixtureLoadsWithEveryReferenceResolved) {
  for (const auto& f : store().facts()) {
    EXPECT_TRUE(store().contains(f.subject)) << f.str();
    EXPECT_TRUE(store().contains(f.object)) << f.str();
  }
  for (const auto& e : store().entities()) EXPECT_NE(store().find_class(e.class_id), nullptr);
}

TEST(OntologyStore, EntitiesByName) {
  EXPECT_EQ(ids(store().entities_by_name("barca")), std::vector<std::string>{"barca"});
  EXPECT_EQ(ids(store().entities_by_name("Barcelona")), (std::vector<std::string>{"barca", "bcn_city"}));
  EXPECT_TRUE(store().entities_by_name("xyzzy").empty());
  EXPECT_EQ(ids(store().entities_by_name("  FC   barcelona ")), std::vector<std::string>{"barca"});
}

TEST(OntologyStore, EveryNameAndAliasFindsItsEntity) {
  for (const auto& e : store().entities()) {
    EXPECT_TRUE(std::ranges::count(ids(store().entities_by_name(e.main_name)), e.id)) << e.id;
    for (const auto& a : e.aliases) EXPECT_TRUE(std::ranges::count(ids(store().entities_by_name(a)), e.id)) << a;
  }
}

TEST(OntologyStore, SuperClasses) {
  EXPECT_EQ(store().super_classes("FootballClub"), (std::vector<std::string>{"Organization", "Thing"}));
  EXPECT_TRUE(store().super_classes("Thing").empty());
  EXPECT_EQ(store().super_classes("City"), (std::vector<std::string>{"Location", "Thing"}));
  EXPECT_THROW(store().super_classes("Nope"), UnknownIdError);
}

TEST(OntologyStore, SuperClassesMatchDepthFirstOracle) {
  for (const auto& c : store().classes()) {
    const auto got = store().super_classes(c.id);
    EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), oracle::class_ancestors(store(), c.id)) << c.id;
  }
}

TEST(OntologyStore, SynsetsForForm) {
  auto sids = [](const std::vector<const Synset*>& v) {
    std::vector<std::string> out;
    for (const auto* s : v) out.push_back(s->id);
    return out;
  };
  EXPECT_EQ(sids(store().synsets_for_form("movement")), (std::vector<std::string>{"S_MOVE1", "S_MOVE2"}));
  EXPECT_EQ(sids(store().synsets_for_form("motion")), std::vector<std::string>{"S_MOVE1"});
  EXPECT_TRUE(store().synsets_for_form("qwertyuiop").empty());
}

TEST(OntologyStore, HypernymClosure) {
  const std::map<std::string, int> chain{{"S_MOVE1", 0}, {"S_CHANGE", 1}, {"S_ACT", 2}, {"S_EVENT", 3}};
  EXPECT_EQ(store().hypernym_closure("S_MOVE1"), chain);
  EXPECT_EQ(store().hypernym_closure("S_EVENT"), (std::map<std::string, int>{{"S_EVENT", 0}}));
  EXPECT_THROW(store().hypernym_closure("S_NOPE"), UnknownIdError);
}

TEST(OntologyStore, HypernymClosureOnDiamond) {
  const auto diamond = OntologyStore::from_records(
      {}, {},
      {{"R", {"r"}, {}, {}}, {"P", {"p"}, {"R"}, {}}, {"Q", {"q"}, {"R"}, {}}, {"X", {"x"}, {"P", "Q"}, {}}}, {},
      {});
  const std::map<std::string, int> expected{{"X", 0}, {"P", 1}, {"Q", 1}, {"R", 2}};
  EXPECT_EQ(diamond.hypernym_closure("X"), expected);
  EXPECT_EQ(oracle::hypernym_ancestors(diamond, "X"), expected);
}

TEST(OntologyStore, HypernymClosureMatchesOracleOnEverySynset) {
  for (const auto& s : store().synsets())
    EXPECT_EQ(store().hypernym_closure(s.id), oracle::hypernym_ancestors(store(), s.id)) << s.id;
}

TEST(OntologyStore, MscHypernym) {
  const std::vector<std::string> one{"S_MOVE1"}, two{"S_MOVE1", "S_MOVE2"}, nested{"S_CHANGE", "S_MOVE1"};
  EXPECT_EQ(store().msc_hypernym(one), "S_MOVE1");
  EXPECT_EQ(store().msc_hypernym(two), "S_ACT");
  EXPECT_EQ(store().msc_hypernym(nested), "S_CHANGE");
  EXPECT_THROW(store().msc_hypernym(std::vector<std::string>{}), std::invalid_argument);
  EXPECT_THROW(store().msc_hypernym(std::vector<std::string>{"S_MOVE1", "S_BRSUIT"}), NoCommonHypernymError);
}

TEST(OntologyStore, MscOfSynsetAndAncestorIsTheAncestor) {
  for (const auto& s : store().synsets())
    for (const auto& [h, d] : store().hypernym_closure(s.id)) {
      const std::vector<std::string> pair{s.id, h};
      EXPECT_EQ(store().msc_hypernym(pair), h);
    }
}

TEST(OntologyStore, MscIsPermutationInvariantOnRandomDags) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    // Node i may only point at nodes < i, so the graph is acyclic; node 0 is
    // the single root every node reaches.
    const int n = 12;
    std::vector<Synset> synsets;
    for (int i = 0; i < n; ++i) {
      Synset s{"N" + std::to_string(100 + i), {"f" + std::to_string(i)}, {}, {}};
      if (i > 0) {
        std::set<std::string> parents{"N" + std::to_string(100 + static_cast<int>(rng() % i))};
        if (rng() % 2) parents.insert("N" + std::to_string(100 + static_cast<int>(rng() % i)));
        s.hypernym_ids.assign(parents.begin(), parents.end());
      }
      synsets.push_back(std::move(s));
    }
    const auto dag = OntologyStore::from_records({}, {}, synsets, {}, {});
    for (int q = 0; q < 20; ++q) {
      std::vector<std::string> pick;
      for (int k = 0; k < 3; ++k) pick.push_back("N" + std::to_string(100 + static_cast<int>(rng() % n)));
      const auto expected = oracle::msc(dag, pick);
      EXPECT_EQ(dag.msc_hypernym(pick), expected);
      std::ranges::reverse(pick);
      EXPECT_EQ(dag.msc_hypernym(pick), expected);
      for (const auto& id : pick) EXPECT_EQ(dag.root_depth(id), oracle::longest_root_path(dag, id));
    }
  }
}

TEST(OntologyStore, FactsMatching) {
  const auto tsunami = store().facts_matching(
      {ConceptRef::synset("S_TSUNAMI"), std::string("locatedIn"), std::nullopt});
  ASSERT_EQ(tsunami.size(), 1u);
  EXPECT_EQ(tsunami[0].object, ConceptRef::entity("indonesia"));

  const auto parts = store().facts_matching({std::nullopt, std::string("isPartOf"), ConceptRef::entity("seasia")});
  std::set<ConceptRef> subjects;
  for (const auto& f : parts) subjects.insert(f.subject);
  EXPECT_TRUE(subjects.contains(ConceptRef::entity("indonesia")));
  EXPECT_TRUE(subjects.contains(ConceptRef::entity("laos")));

  EXPECT_TRUE(store()
                  .facts_matching({ConceptRef::entity("laos"), std::string("hasCapital"),
                                   ConceptRef::entity("tokyo")})
                  .empty());
  EXPECT_THROW(store().facts_matching({}), std::invalid_argument);
}

TEST(OntologyStore, FullyBoundPatternReturnsAtMostOneFact) {
  for (const auto& f : store().facts()) {
    const auto hits = store().facts_matching({f.subject, f.relation, f.object});
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0], f);
  }
}

TEST(OntologyStore, MapRelationPhrase) {
  const std::vector<std::string> born{"was", "born", "in"}, west{"west", "of"}, purple{"purple"};
  const auto b = store().map_relation_phrase(born);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->relation, "bornIn");
  EXPECT_FALSE(b->is_spatial);
  const auto w = store().map_relation_phrase(west);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->relation, "westOf");
  EXPECT_TRUE(w->is_spatial);
  EXPECT_FALSE(store().map_relation_phrase(purple));
}

class BadFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir("badfiles");
    paths_ = testing::fixture_settings().ontology;
  }
  std::filesystem::path write(const std::string& name, const std::string& body) {
    std::ofstream(dir_ / name) << body;
    return dir_ / name;
  }
  std::filesystem::path dir_;
  OntologyPaths paths_;
};

TEST_F(BadFiles, ClassCycleIsReported) {
  paths_.classes = write("classes.jsonl",
                         "{\"id\":\"A\",\"label\":\"a\",\"parents\":[\"B\"]}\n"
                         "{\"id\":\"B\",\"label\":\"b\",\"parents\":[\"A\"]}\n");
  paths_.entities = write("entities.jsonl", "");
  paths_.facts = write("facts.tsv", "");
  EXPECT_THROW(OntologyStore::load(paths_), CycleError);
}

TEST_F(BadFiles, DanglingFactEntityIsReported) {
  std::ifstream in(paths_.facts);
  std::string facts((std::istreambuf_iterator<char>(in)), {});
  paths_.facts = write("facts.tsv", facts + "ent:nowhere\tisPartOf\tent:seasia\n");
  try {
    OntologyStore::load(paths_);
    FAIL() << "expected DanglingReferenceError";
  } catch (const DanglingReferenceError& e) {
    EXPECT_NE(e.id().find("nowhere"), std::string::npos);
  }
}

TEST_F(BadFiles, MalformedLineCarriesLineNumber) {
  paths_.relation_phrases = write("phrases.tsv", "in\tlocatedIn\t0\nbroken line\n");
  try {
    OntologyStore::load(paths_);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace semsearch
