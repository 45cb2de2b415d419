#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mfc/control_opt.hpp"
#include "mfc/experiments.hpp"

namespace mfc {

enum class Scenario { simulate, meanfield, coupled, optimize, chaos, gamma, validate };

struct KernelChoice {
  std::string name = "zero";
  std::vector<double> params;
};

struct RunConfig {
  Scenario scenario = Scenario::simulate;
  std::uint64_t seed = 1;

  // [model]
  std::size_t d = 1;
  double sigma = 0.0;
  std::size_t N = 16;
  std::size_t m = 0;
  double p = 2.0;
  KernelChoice k11, k12, k21, k22;
  std::string initial = "point";
  std::vector<double> initial_mean, initial_var, initial_lower, initial_upper, initial_point;
  std::vector<double> leaders;  ///< m*d positions
  LeaderScheme leader_scheme = LeaderScheme::euler;

  // [grid]
  double T = 1.0;
  std::size_t n_steps = 50;

  // [control]
  std::string control_features = "constant";
  std::size_t bins = 8;
  double gain = 1.0;
  double M_h = 10.0;
  std::vector<double> h;  ///< flattened bins; empty means zero

  // [cost]
  std::string lagrangian = "zero";
  std::vector<double> lagrangian_params;
  std::string psi = "zero";
  std::vector<double> psi_params;

  // [experiment]
  std::vector<std::size_t> N_list{8, 16, 32};
  std::size_t N_ref = 256;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double tol = 1e-8;
  std::size_t max_iter = 50;
  std::size_t budget = 40;
  double step0 = 0.5;
  bool truncate = false;
  double truncation_cap = 1e6;
  std::size_t validation_samples = 1000;

  // [io]
  std::filesystem::path output_dir = "mfc_out";

  /// Resolved key/value pairs (defaults included), for manifests.
  std::map<std::string, std::string> resolved;

  LeaderFollowerModel model() const;
  ControlSpec control() const;
  CostSpec cost() const;
  SimConfig sim() const;
};

struct ParseResult {
  RunConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

/// INI-style text: `key = value` lines under `[section]` headers, `#` or `;`
/// comments. Every problem is collected; the parser never throws on content.
ParseResult parse_config_text(const std::string& text);
ParseResult parse_config(const std::filesystem::path& path);

/// All keys accepted in each section.
const std::map<std::string, std::vector<std::string>>& config_schema();

std::string scenario_name(Scenario s);

/// Edit distance, used for key suggestions.
std::size_t levenshtein(const std::string& a, const std::string& b);

struct RunOptions {
  std::size_t threads = 0;  ///< 0 keeps the current setting
  bool progress = false;
  std::filesystem::path output_dir;  ///< overrides the config when set
};

/// Exit codes: 0 success, 2 validation failure, 3 non-convergence, 4 I/O.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitIo = 4;

int run(const RunConfig& config, const RunOptions& opts = {});

}  // namespace mfc
