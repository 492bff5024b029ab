#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "engine.hpp"

namespace semsearch::app {

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::string preset = "semantic";
  std::optional<std::uint64_t> seed;
  bool explain = false;
  bool latent_keywords = false;
};

struct IndexOptions {
  std::optional<std::filesystem::path> corpus;
  std::filesystem::path out;
};

struct SearchOptionsCli {
  std::filesystem::path index;
  std::optional<std::string> query;
  std::optional<std::filesystem::path> topics;
  std::optional<std::filesystem::path> run_out;
  std::optional<std::size_t> k;
};

struct ExpandOptions {
  std::string query;
};

struct EvalOptions {
  std::filesystem::path run;
  std::optional<std::filesystem::path> qrels;
  std::filesystem::path out_prefix;  // writes <prefix>.json and <prefix>.tsv
};

struct CompareOptions {
  std::filesystem::path report_a;
  std::filesystem::path report_b;
  std::size_t permutations = 100000;
  std::optional<std::filesystem::path> out;
};

/// Each command throws DataError for bad inputs and std::invalid_argument
/// for bad usage; main() maps those to exit codes 2 and 1.
void cmd_index(const GlobalOptions& g, const IndexOptions& o, std::ostream& out);
void cmd_search(const GlobalOptions& g, const SearchOptionsCli& o, std::ostream& out, std::ostream& err);
void cmd_expand(const GlobalOptions& g, const ExpandOptions& o, std::ostream& out);
void cmd_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out, std::ostream& err);
void cmd_compare(const GlobalOptions& g, const CompareOptions& o, std::ostream& out);

/// (a - b) / b; NaN when b is 0.
double relative_improvement(double map_a, double map_b);

}  // namespace semsearch::app
