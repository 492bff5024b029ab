#pragma once

// Shared access to the bundled desk-scale fixture and to end-to-end runs of
// the seven model presets over it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "engine.hpp"
#include "semsearch/evaluation.hpp"

namespace semsearch::testing {

std::filesystem::path fixture_dir();
std::filesystem::path fixture_config();

/// Loaded once per process and never mutated.
const app::Settings& fixture_settings();
const app::Engine& fixture_engine(std::string_view preset);
const std::vector<app::CorpusDoc>& fixture_corpus();
const std::vector<app::Topic>& fixture_topics();
const Qrels& fixture_qrels();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(std::string_view tag);

struct PresetRun {
  std::vector<AnnotatedDocument> docs;
  InvertedIndex index;
  std::map<std::string, QueryRepresentation> queries;
  RunResult run;
  MetricReport report;
};

/// Indexes the fixture corpus and searches every topic with k = corpus size.
PresetRun run_preset(std::string_view preset);

/// MAP of the csa preset with each query's CSA concepts replaced by the same
/// number of concepts drawn uniformly from the fact store (initial concepts
/// excluded), averaged over `seeds` draws.
double noise_baseline_map(int seeds, std::uint64_t first_seed);

}  // namespace semsearch::testing
