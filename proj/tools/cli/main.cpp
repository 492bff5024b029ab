#include <exception>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"
#include "semsearch/error.hpp"

int main(int argc, char** argv) {
  using namespace semsearch::app;

  CLI::App app{"Semantic document search over keyword, named-entity and lexicon-word terms"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::string config;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--preset", g.preset, "Model preset")
      ->check(CLI::IsMember(preset_names()))
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for the randomization test");
  app.add_flag("--explain", g.explain, "Print matched terms and latent-concept provenance");
  app.add_flag("--latent-keywords", g.latent_keywords, "Render latent concepts as keywords");

  IndexOptions index_opts;
  std::string corpus;
  auto* index_cmd = app.add_subcommand("index", "Annotate a corpus and persist its index");
  auto* corpus_opt = index_cmd->add_option("--corpus", corpus, "Corpus file (JSONL or TREC SGML)");
  index_cmd->add_option("--out", index_opts.out, "Index directory")->required();

  SearchOptionsCli search_opts;
  std::string query, topics, run_out;
  std::size_t k = 0;
  auto* search_cmd = app.add_subcommand("search", "Rank indexed documents for a query or a topics file");
  search_cmd->add_option("--index", search_opts.index, "Index directory")->required();
  auto* query_opt = search_cmd->add_option("--query", query, "Query text");
  auto* topics_opt = search_cmd->add_option("--topics", topics, "Topics JSONL ({\"qid\",\"query\"})");
  auto* run_opt = search_cmd->add_option("--run", run_out, "Write a TREC run file here");
  auto* k_opt = search_cmd->add_option("-k", k, "Number of results per query");
  query_opt->excludes(topics_opt);

  ExpandOptions expand_opts;
  auto* expand_cmd = app.add_subcommand("expand", "Print latent concepts and their provenance");
  expand_cmd->add_option("--query", expand_opts.query, "Query text")->required();

  EvalOptions eval_opts;
  std::string qrels;
  auto* eval_cmd = app.add_subcommand("eval", "Score a run file against qrels");
  eval_cmd->add_option("--run", eval_opts.run, "TREC run file")->required()->check(CLI::ExistingFile);
  auto* qrels_opt = eval_cmd->add_option("--qrels", qrels, "TREC qrels file");
  eval_cmd->add_option("--out", eval_opts.out_prefix, "Report prefix (.json and .tsv)")->required();

  CompareOptions compare_opts;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Randomization test between two eval reports");
  compare_cmd->add_option("--a", compare_opts.report_a, "Report of system A")->required();
  compare_cmd->add_option("--b", compare_opts.report_b, "Report of system B")->required();
  compare_cmd->add_option("--permutations", compare_opts.permutations, "Number of permutations")
      ->capture_default_str();
  auto* compare_out_opt = compare_cmd->add_option("--out", compare_out, "Write a JSON summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (!config.empty()) g.config = config;
  if (*seed_opt) g.seed = seed;

  try {
    if (*index_cmd) {
      if (*corpus_opt) index_opts.corpus = corpus;
      cmd_index(g, index_opts, std::cout);
    } else if (*search_cmd) {
      if (*query_opt) search_opts.query = query;
      if (*topics_opt) search_opts.topics = topics;
      if (*run_opt) search_opts.run_out = run_out;
      if (*k_opt) search_opts.k = k;
      cmd_search(g, search_opts, std::cout, std::cerr);
    } else if (*expand_cmd) {
      cmd_expand(g, expand_opts, std::cout);
    } else if (*eval_cmd) {
      if (*qrels_opt) eval_opts.qrels = qrels;
      cmd_eval(g, eval_opts, std::cout, std::cerr);
    } else if (*compare_cmd) {
      if (*compare_out_opt) compare_opts.out = compare_out;
      cmd_compare(g, compare_opts, std::cout);
    }
  } catch (const semsearch::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
