#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace otr::cli {

enum class Subcommand { estimate, bootstrap, oracle, simulate };

// Everything a run needs, resolved from flags (and OTR_THREADS). Serialized
// verbatim into every output document.
struct RunConfig {
  Subcommand subcommand = Subcommand::estimate;

  // CSV input (estimate, bootstrap, oracle)
  std::filesystem::path input;
  std::string outcome = "y";
  std::string treatment = "a";
  std::vector<std::string> covariates;
  std::string anchor;  // first covariate when empty
  bool add_intercept = true;

  std::filesystem::path output;      // stdout when empty
  std::filesystem::path csv_output;  // simulate only; appended

  std::string kernel = "gaussian";
  std::string mode = "full";
  double alpha0 = 1.0;
  double gamma = 2.0;
  int max_iterations = 10000;
  double tolerance = 1e-10;

  int replicates_b = 500;
  double alpha = 0.05;
  std::string weights = "exp";
  bool warm_start = false;
  std::uint64_t seed = 0;

  bool observational = false;
  std::vector<std::string> propensity_covariates;  // all covariates when empty

  long max_n = 500;
  long max_p = 3;

  std::string setting = "s1";
  std::string base = "s1";
  long n = 300;
  int reps = 100;
  bool coverage = false;  // simulate: add bootstrap intervals
  long eval_size = 10000;
  long truth_draws = 1000000;
  std::vector<double> local_s;

  unsigned threads = 1;
};

struct ParseOutcome {
  std::optional<RunConfig> config;  // empty when parsing ended the run (help, errors)
  int exit_code = 0;
};

// Parses argv. Help and usage errors are reported on `out` / `err` and end
// the run with the returned exit code.
ParseOutcome parse_arguments(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Executes a resolved configuration. Returns 0 on success, 1 on invalid
// input, 2 on numerical failure; messages go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_arguments() followed by run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace otr::cli
