#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "semsearch/error.hpp"
#include "semsearch/evaluation.hpp"

namespace semsearch::app {

namespace {

Settings require_settings(const GlobalOptions& g) {
  if (!g.config) throw std::invalid_argument("--config is required for this command");
  auto s = Settings::load(*g.config);
  if (g.seed) s.seed = *g.seed;
  return s;
}

std::optional<Settings> optional_settings(const GlobalOptions& g) {
  if (!g.config) return std::nullopt;
  return require_settings(g);
}

ModelConfig model_for(const GlobalOptions& g, const Settings& s) {
  auto m = s.apply(preset(g.preset));
  m.latent_keywords = g.latent_keywords;
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << data;
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void explain_matches(const InvertedIndex& index, const QueryPlan& plan, const SearchResult& result,
                     double latent_weight, std::ostream& out);

void explain(const Engine& engine, const InvertedIndex& index, const QueryPlan& plan,
             const SearchResult& result, double latent_weight, std::ostream& out) {
  for (const auto& t : plan.representation.terms) out << "# query term " << t.serialize() << '\n';
  for (const auto& l : plan.representation.latent_terms)
    out << "# latent term " << l.term.serialize() << ' ' << l.provenance << '\n';
  if (engine.model().expansion != Expansion::rcsa) return explain_matches(index, plan, result, latent_weight, out);
  for (const auto& l : plan.relations.latents) {
    const bool ok = engine.store().has_fact(l.support_fact);
    out << "# provenance " << l.trace_json() << (ok ? "" : " (support fact missing)") << '\n';
  }
  explain_matches(index, plan, result, latent_weight, out);
}

void explain_matches(const InvertedIndex& index, const QueryPlan& plan, const SearchResult& result,
                     double latent_weight, std::ostream& out) {
  const auto bag = query_term_bag(plan.representation, latent_weight);
  for (const auto& d : result.docs) {
    out << "# matched " << d.doc_id;
    for (const auto& t : index.matched_terms(bag, d.doc_id)) out << ' ' << t;
    out << '\n';
  }
}

}  // namespace

double relative_improvement(double map_a, double map_b) {
  if (map_b == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (map_a - map_b) / map_b;
}

void cmd_index(const GlobalOptions& g, const IndexOptions& o, std::ostream& out) {
  auto settings = require_settings(g);
  if (o.corpus) settings.corpus = *o.corpus;
  if (!settings.corpus) throw std::invalid_argument("no corpus given (--corpus or config 'corpus')");
  const Engine engine(settings, model_for(g, settings));
  const auto docs = load_corpus(*settings.corpus);
  const auto index = engine.build_index(docs);
  auto manifest = RunManifest::from(settings, g.preset);
  manifest.index = o.out.string();
  index.save(o.out, engine.index_header(manifest));
  out << "indexed " << index.doc_count() << " documents, " << index.vocabulary().size() << " terms into "
      << o.out.string() << '\n';
}

void cmd_search(const GlobalOptions& g, const SearchOptionsCli& o, std::ostream& out, std::ostream& err) {
  auto settings = require_settings(g);
  if (o.topics) settings.topics = *o.topics;
  if (o.query.has_value() == o.topics.has_value())
    throw std::invalid_argument("give exactly one of --query or --topics");
  const Engine engine(settings, model_for(g, settings));
  std::vector<std::string> header;
  const auto index = InvertedIndex::load(o.index, &header);
  engine.check_index_header(header);
  SearchOptions options;
  options.k = o.k.value_or(settings.k);
  options.latent_term_weight = engine.model().latent_term_weight;
  if (options.k == 0) throw std::invalid_argument("-k must be at least 1");

  if (o.query) {
    if (o.query->find_first_not_of(" \t\r\n") == std::string::npos) throw DataError("empty query");
    const auto plan = engine.plan_query("q", *o.query);
    const auto result = index.search(plan.representation, options);
    if (result.no_effective_terms) throw DataError("query has no term present in the index");
    if (g.explain) explain(engine, index, plan, result, options.latent_term_weight, out);
    for (std::size_t r = 0; r < result.docs.size(); ++r)
      out << (r + 1) << '\t' << result.docs[r].doc_id << '\t' << fmt(result.docs[r].score, "%.10f") << '\n';
    return;
  }

  auto manifest = RunManifest::from(settings, g.preset);
  manifest.index = o.index.string();
  std::vector<std::pair<std::string, SearchResult>> results;
  for (const auto& topic : load_topics(*o.topics)) {
    const auto plan = engine.plan_query(topic.qid, topic.query);
    auto result = index.search(plan.representation, options);
    if (result.no_effective_terms) err << "warning: query " << topic.qid << " has no indexed term\n";
    if (g.explain) {
      out << "# query " << topic.qid << ' ' << topic.query << '\n';
      explain(engine, index, plan, result, options.latent_term_weight, out);
    }
    results.emplace_back(topic.qid, std::move(result));
  }
  const auto run = format_run(results, g.preset, manifest.to_json());
  if (o.run_out) write_file(*o.run_out, run);
  else out << run;
}

void cmd_expand(const GlobalOptions& g, const ExpandOptions& o, std::ostream& out) {
  auto settings = require_settings(g);
  if (o.query.find_first_not_of(" \t\r\n") == std::string::npos) throw DataError("empty query");
  const Engine engine(settings, model_for(g, settings));
  if (engine.model().expansion == Expansion::none)
    throw std::invalid_argument("preset '" + g.preset + "' performs no expansion");
  const auto plan = engine.plan_query("q", o.query);
  if (g.explain) {
    for (const auto& c : plan.relations.concepts) out << "# concept " << c.ref.str() << '\n';
    for (const auto& m : plan.relations.mentions)
      out << "# relation " << m.relation << (m.is_spatial ? " spatial" : "")
          << (m.verb_relation ? " verb=" + *m.verb_relation : "") << '\n';
    for (const auto& t : plan.relations.triples)
      out << "# triple " << t.c1.str() << ' ' << t.relation << ' ' << t.c2.str() << ' ' << to_string(t.c2_kind)
          << '\n';
  }
  if (engine.model().expansion == Expansion::rcsa) {
    for (const auto& l : plan.relations.latents) out << l.trace_json() << '\n';
  } else {
    std::set<std::string> printed;
    for (const auto& l : plan.representation.latent_terms)
      if (printed.insert(l.provenance).second) out << l.provenance << '\n';
  }
}

void cmd_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out, std::ostream& err) {
  const auto settings = optional_settings(g);
  std::optional<std::filesystem::path> qrels_path = o.qrels;
  if (!qrels_path && settings) qrels_path = settings->qrels;
  if (!qrels_path) throw std::invalid_argument("no qrels given (--qrels or config 'qrels')");

  const auto report = evaluate(parse_run(o.run), parse_qrels(*qrels_path));
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  RunManifest manifest;
  if (settings) manifest = RunManifest::from(*settings, g.preset);
  manifest.qrels = qrels_path->string();
  const auto manifest_json = manifest.to_json();
  auto json_path = o.out_prefix;
  json_path += ".json";
  auto tsv_path = o.out_prefix;
  tsv_path += ".tsv";
  write_file(json_path, report_to_json(report, manifest_json));
  write_file(tsv_path, curves_to_tsv(report, manifest_json));
  for (const auto& [qid, ap] : report.per_query_ap) out << "ap\t" << qid << '\t' << fmt(ap) << '\n';
  out << "map\t" << fmt(report.map) << '\n';
}

void cmd_compare(const GlobalOptions& g, const CompareOptions& o, std::ostream& out) {
  const auto settings = optional_settings(g);
  const std::uint64_t seed = g.seed.value_or(settings ? settings->seed : 42);
  const auto a = report_from_json(o.report_a);
  const auto b = report_from_json(o.report_b);
  std::vector<double> ap_a, ap_b;
  for (const auto& [qid, ap] : a.per_query_ap) {
    auto it = b.per_query_ap.find(qid);
    if (it == b.per_query_ap.end()) throw DataError("query " + qid + " is missing from " + o.report_b.string());
    ap_a.push_back(ap);
    ap_b.push_back(it->second);
  }
  if (ap_b.size() != b.per_query_ap.size())
    throw DataError(o.report_b.string() + " covers queries that " + o.report_a.string() + " does not");

  const double p = randomization_test(ap_a, ap_b, o.permutations, seed);
  const double improvement = relative_improvement(a.map, b.map);
  out << "map_a\t" << fmt(a.map, "%.4f") << '\n';
  out << "map_b\t" << fmt(b.map, "%.4f") << '\n';
  out << "improvement\t" << (std::isnan(improvement) ? std::string("n/a") : fmt(100.0 * improvement, "%.1f%%"))
      << '\n';
  out << "p_value\t" << fmt(p, "%.6f") << '\n';

  if (o.out) {
    RunManifest manifest;
    if (settings) manifest = RunManifest::from(*settings, g.preset);
    manifest.seed = seed;
    nlohmann::ordered_json j;
    j["manifest"] = nlohmann::json::parse(manifest.to_json());
    j["report_a"] = o.report_a.string();
    j["report_b"] = o.report_b.string();
    j["map_a"] = a.map;
    j["map_b"] = b.map;
    j["improvement"] = std::isnan(improvement) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(improvement);
    j["permutations"] = o.permutations;
    j["p_value"] = p;
    write_file(*o.out, j.dump(2) + "\n");
  }
}

}  // namespace semsearch::app
