#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsw/measures.hpp"
#include "gsw/mswe.hpp"
#include "gsw/ot.hpp"
#include "gsw/twosample.hpp"

namespace gsw {

struct ExperimentConfig {
  std::string kind;  // convergence_curve, bound_curve, limit_distribution, level_curve, mswe_error
  DistributionSpec spec;
  std::optional<DistributionSpec> spec_b;  // level_curve alternative; defaults to spec
  std::vector<double> sigmas{1.0};
  std::vector<std::size_t> n_grid;
  std::size_t trials = 10;
  std::size_t ref_n = 0;  // 0: kind-specific default, see reference_size()
  std::size_t k = 16;     // noise replicas on the sample
  std::size_t ref_k = 1;  // noise replicas on the reference
  std::size_t mc = 1'000'000;
  std::string metric = "wasserstein";  // convergence_curve: wasserstein (GW_p) or mmd (d_2)
  std::string reference = "sample";    // sample, or quadrature (1-D uniform_cube only)
  OTConfig ot{2.0, ExactLp{}};
  // level_curve
  TestConfig test;
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.3};
  std::size_t m = 0;  // second sample size; 0: same as n
  // mswe_error
  ParamFamily family;
  std::vector<double> true_theta{-1.0, 1.0};
  ObjectiveConfig objective;
  OptimizerConfig optimizer;

  std::uint64_t seed = 0;
  unsigned threads = 1;
  nlohmann::json source;  // the config as given, for hashing

  void validate() const;
  /// ref_n if set; otherwise 1000 for limit_distribution, max(1e4, 10 max n)
  /// for d <= 2, and min(1000 max n, 1e5) above.
  std::size_t reference_size() const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig read_experiment_config(const std::string& path);
OTConfig parse_ot_config(const nlohmann::json& j);

struct CurveRow {
  double sigma = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;  // completed trials
};

struct SlopeRow {
  double sigma = 0.0;
  double slope = 0.0;
  double slope_std_error = 0.0;
};

struct CurveTable {
  std::vector<CurveRow> rows;
  std::vector<SlopeRow> slopes;  // fitted over the largest half of the n grid
  std::vector<std::string> failures;

  const CurveRow* find(double sigma, std::size_t n) const;
};

CurveTable convergence_curve(const ExperimentConfig& cfg);
CurveTable bound_curve(const ExperimentConfig& cfg);

struct LimitSample {
  std::size_t n = 0;
  std::size_t trial = 0;
  double value = 0.0;  // sqrt(n) d_2(mu_n, mu_ref)
};

struct LimitDistribution {
  double sigma = 0.0;
  std::vector<LimitSample> samples;
  std::vector<std::pair<std::size_t, double>> medians;
  double relative_range = 0.0;  // (max median - min median) / min median
  double growth = 0.0;          // median(last n) / median(first n) - 1
};

LimitDistribution limit_distribution(const ExperimentConfig& cfg);

void write_curve_csv(std::ostream& out, const CurveTable& table);

struct Manifest {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> files;  // name, sha256
  std::vector<std::string> failures;
  nlohmann::json to_json() const;
};

/// Runs the experiment, writes CSV/SVG outputs and manifest.json into out_dir.
Manifest run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

std::string sha256_hex(const std::string& bytes);

}  // namespace gsw
