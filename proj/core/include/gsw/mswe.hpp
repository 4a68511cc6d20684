#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gsw/measures.hpp"
#include "gsw/ot.hpp"
#include "gsw/rng.hpp"

namespace gsw {

enum class FamilyKind {
  two_mode_means,       // N(a1,1)/2 + N(a2,1)/2, theta = (a1, a2)
  gaussian_mean_scale,  // N(a, s^2), theta = (a, s)
};

/// One-dimensional parametric model family with a boxed parameter set.
struct ParamFamily {
  FamilyKind kind = FamilyKind::two_mode_means;

  static constexpr double mean_bound = 10.0;
  static constexpr double scale_min = 1e-3;
  static constexpr double scale_max = 10.0;

  std::size_t dim() const { return 2; }
  bool feasible(const std::vector<double>& theta) const;
  void check(const std::vector<double>& theta) const;  // throws infeasible_theta
  std::vector<double> lower() const;
  std::vector<double> upper() const;
  std::vector<double> project(std::vector<double> theta) const;
  /// Orders two_mode_means as a1 <= a2; identity for other families.
  std::vector<double> canonical(std::vector<double> theta) const;
  DistributionSpec distribution(const std::vector<double>& theta) const;
  /// Inverse of distribution(): canonical theta of a spec in this family.
  /// Throws invalid_spec when the spec is not a member.
  std::vector<double> parameters(const DistributionSpec& spec) const;
};

FamilyKind parse_family(const std::string& name);
std::string family_name(FamilyKind kind);

/// Model sample used by the objective. Mixture components share base normals
/// and the rows are sorted, so the sample is a continuous function of theta and
/// label-swapped parameters give the same point set (for even n).
EmpiricalMeasure model_sample(const ParamFamily& family, const std::vector<double>& theta, std::size_t n,
                              SeedSpec seed);

struct ObjectiveConfig {
  double p = 2.0;
  double sigma = 0.5;
  std::size_t k = 16;
  std::size_t model_n = 0;  // 0: data size
};

/// theta -> GW_p(data, model_sample(theta)) with fixed random streams: the
/// model draw uses seed.child(0), both augmentations use seed.child(1).
class Objective {
 public:
  Objective(EmpiricalMeasure data, ParamFamily family, ObjectiveConfig cfg, SeedSpec seed);

  double operator()(const std::vector<double>& theta) const;
  const ParamFamily& family() const { return family_; }
  const ObjectiveConfig& config() const { return cfg_; }

 private:
  EmpiricalMeasure data_;
  ParamFamily family_;
  ObjectiveConfig cfg_;
  SeedSpec seed_;
  SortedLine data_line_;
};

double objective(const std::vector<double>& theta, const EmpiricalMeasure& data, const ParamFamily& family,
                 const ObjectiveConfig& cfg, SeedSpec seed);

struct OptimizerConfig {
  std::size_t restarts = 5;
  std::size_t grid_points = 9;  // per coordinate
  std::size_t max_iterations = 200;
  double step_tol = 1e-6;
  double objective_tol = 1e-10;
  double initial_step = 0.5;
};

struct TraceEntry {
  std::size_t restart = 0;
  std::size_t iteration = 0;
  std::vector<double> theta;
  double objective = 0.0;
};

struct FitResult {
  std::vector<double> theta_hat;
  double objective_value = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;
};

FitResult fit(const EmpiricalMeasure& data, const ParamFamily& family, const ObjectiveConfig& cfg,
              const OptimizerConfig& opt, SeedSpec seed);

struct ErrorRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::size_t coord = 0;
  double scaled_error = 0.0;  // sqrt(n) (theta_hat - theta*)
  double theta_hat = 0.0;
  bool failed = false;
};

struct ObjectiveGapRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  double at_truth = 0.0;
  double at_fit = 0.0;
  double gap() const { return at_truth - at_fit; }
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
  std::vector<ObjectiveGapRow> gaps;
};

/// Per (n, trial): draw fresh data from the true model, fit, record scaled
/// errors after canonical ordering. Trials run in parallel.
ErrorTable error_experiment(const ParamFamily& family, const std::vector<double>& true_theta,
                            const ObjectiveConfig& cfg, const OptimizerConfig& opt,
                            const std::vector<std::size_t>& n_grid, std::size_t trials, SeedSpec seed,
                            unsigned threads = 1);

}  // namespace gsw
