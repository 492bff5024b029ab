#include "fixture.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <random>
#include <set>

#include <unistd.h>

#ifndef SEMSEARCH_FIXTURE_DIR
#error "SEMSEARCH_FIXTURE_DIR must point at data/fixture"
#endif

namespace semsearch::testing {

std::filesystem::path fixture_dir() { return SEMSEARCH_FIXTURE_DIR; }
std::filesystem::path fixture_config() { return fixture_dir() / "config.json"; }

const app::Settings& fixture_settings() {
  static const app::Settings settings = app::Settings::load(fixture_config());
  return settings;
}

const app::Engine& fixture_engine(std::string_view preset) {
  static std::map<std::string, std::unique_ptr<app::Engine>, std::less<>> engines;
  auto it = engines.find(preset);
  if (it == engines.end()) {
    const auto& s = fixture_settings();
    it = engines.emplace(std::string(preset), std::make_unique<app::Engine>(s, s.apply(app::preset(preset)))).first;
  }
  return *it->second;
}

const std::vector<app::CorpusDoc>& fixture_corpus() {
  static const auto docs = app::load_corpus(*fixture_settings().corpus);
  return docs;
}

const std::vector<app::Topic>& fixture_topics() {
  static const auto topics = app::load_topics(*fixture_settings().topics);
  return topics;
}

const Qrels& fixture_qrels() {
  static const auto qrels = parse_qrels(*fixture_settings().qrels);
  return qrels;
}

std::filesystem::path scratch_dir(std::string_view tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("semsearch_" + std::string(tag) + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

namespace {

RunResult search_all(const InvertedIndex& index, const std::map<std::string, QueryRepresentation>& queries,
                     double latent_weight) {
  SearchOptions options;
  options.k = index.doc_count();
  options.latent_term_weight = latent_weight;
  RunResult run;
  for (const auto& [qid, rep] : queries) {
    auto& ranking = run[qid];
    for (const auto& d : index.search(rep, options).docs) ranking.push_back(d.doc_id);
  }
  return run;
}

}  // namespace

PresetRun run_preset(std::string_view preset) {
  const auto& engine = fixture_engine(preset);
  PresetRun out;
  out.docs = engine.annotate_corpus(fixture_corpus());
  out.index = InvertedIndex::build(out.docs);
  for (const auto& t : fixture_topics()) out.queries[t.qid] = engine.plan_query(t.qid, t.query).representation;
  out.run = search_all(out.index, out.queries, engine.model().latent_term_weight);
  out.report = evaluate(out.run, fixture_qrels());
  return out;
}

double noise_baseline_map(int seeds, std::uint64_t first_seed) {
  const auto& engine = fixture_engine("csa");
  const auto& store = engine.store();
  const auto index = engine.build_index(fixture_corpus());

  std::set<ConceptRef> pool_set;
  for (const auto& f : store.facts()) {
    pool_set.insert(f.subject);
    pool_set.insert(f.object);
  }
  const std::vector<ConceptRef> pool(pool_set.begin(), pool_set.end());

  std::vector<app::QueryPlan> plans;
  for (const auto& t : fixture_topics()) plans.push_back(engine.plan_query(t.qid, t.query));

  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(first_seed + static_cast<std::uint64_t>(s));
    std::map<std::string, QueryRepresentation> queries;
    for (const auto& plan : plans) {
      const auto initial = plan.relations.initial_concepts();
      std::vector<ConceptRef> candidates;
      for (const auto& c : pool)
        if (std::find(initial.begin(), initial.end(), c) == initial.end()) candidates.push_back(c);
      std::shuffle(candidates.begin(), candidates.end(), rng);
      candidates.resize(std::min(candidates.size(), plan.latent_concepts.size()));

      auto rep = plan.representation;
      rep.latent_terms.clear();
      const std::vector<std::string> provenance(candidates.size(), "noise");
      engine.add_latent_concepts(rep, candidates, provenance);
      queries[rep.query_id] = std::move(rep);
    }
    total += evaluate(search_all(index, queries, engine.model().latent_term_weight), fixture_qrels()).map;
  }
  return total / seeds;
}

}  // namespace semsearch::testing
