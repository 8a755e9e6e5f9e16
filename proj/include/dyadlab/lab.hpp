#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "dyadlab/audit.hpp"
#include "dyadlab/io.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/spectral.hpp"

namespace dyadlab {

// Parsed experiment configuration.  `raw` keeps the source key = value lines
// so every emitted CSV embeds the config verbatim in its header.
struct ExperimentConfig {
  GridSpec grid{1, 8};
  uint64_t seed = 2024;
  double tol = 1e-8;  // spectral tolerance
  int corpus_count = 20;
  double corpus_a2_max = 100.0;
  std::string sigma_spec = "random";  // constant:V | random | file:PATH
  std::string weight_spec;            // family:NAME[,param=V][,seed=N] | file:PATH
  std::string inequalities;           // comma-separated filter for the audit ids
  int cases = 20;                     // seeded repetitions in the verify suite
  bool svg = true;
  ConfigMap raw;
};

// Keys: d, L, seed, tol, corpus_count, corpus_a2_max, sigma, weight,
// inequalities, cases, svg.  Unknown keys are rejected.
ExperimentConfig config_from_map(const ConfigMap& cm);

SymbolSequence sigma_from_spec(const std::string& spec, const GridSpec& g, uint64_t seed);
Weight weight_from_spec(const std::string& spec, const GridSpec& g);

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_err = 0.0;
  double tol = 0.0;
};
// Exact-identity suite: Wilson set properties, orthonormality, disbalanced
// reconstruction, product formula, multiplication split, nine-term
// exactness, paraproduct adjoints, weighted Parseval.
std::vector<CheckResult> run_verify_suite(const ExperimentConfig& cfg);

struct SweepRow {
  std::string weight_id, family;
  uint64_t seed = 0;
  double a2 = 1.0;
  double sigma_norm = 0.0;
  std::array<double, 9> q{};  // norms in label order q_01_01 .. q_00_00
  double conjugated = 0.0;
  bool converged = true;
  std::string note;  // failure detail when not converged
};
extern const std::array<const char*, 9> kNineLabels;

SweepRow measure_nine_norms(const Weight& w, const SymbolSequence& sigma,
                            const NormOptions& opt);

struct FitLine {
  std::string label;
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};
// Least-squares slope of log(norm / sup|sigma|) against log characteristic
// over converged rows with characteristic >= 2.
std::vector<FitLine> fit_sweep(const std::vector<SweepRow>& rows);

// Dispatch for verify | audit | norms | sweep | generate.  Writes outputs
// under out_dir, logs progress lines to `log`.  Returns the process exit
// code: 0 success, 1 assertion failure, 2 usage error.  I/O and validation
// problems propagate as exceptions for the caller to map to exit code 2.
int run_command(const std::string& command, const ExperimentConfig& cfg,
                const std::string& out_dir, std::ostream& log);

}  // namespace dyadlab
