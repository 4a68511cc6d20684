// gsw: command line front end for the smooth Wasserstein library.
//
// Exit status: 0 on success, 2 for usage or configuration errors, 1 for any
// other library error.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gsw/error.hpp"
#include "gsw/experiments.hpp"
#include "gsw/measures.hpp"
#include "gsw/mmd.hpp"
#include "gsw/mswe.hpp"
#include "gsw/ot.hpp"
#include "gsw/specialfn.hpp"
#include "gsw/twosample.hpp"

namespace {

using nlohmann::json;

// Shortest representation that round-trips.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw gsw::Error(gsw::ErrorKind::config, "bad coordinate '" + item + "' in '" + text + "'");
    }
  }
  if (out.empty()) throw gsw::Error(gsw::ErrorKind::config, "empty point");
  return out;
}

struct OtOptions {
  std::string method = "exact_lp";
  double epsilon = 0.0;
  std::size_t max_entries = 1'000'000;

  void add(CLI::App* cmd) {
    cmd->add_option("--method", method, "exact_lp, quantile or sinkhorn")
        ->check(CLI::IsMember({"exact_lp", "quantile", "sinkhorn"}));
    cmd->add_option("--epsilon", epsilon, "Sinkhorn regularization (0: 0.01 x median cost)");
    cmd->add_option("--max-entries", max_entries, "exact_lp cost-matrix size limit");
  }

  gsw::OTConfig config(double p) const {
    return gsw::parse_ot_config({{"p", p}, {"method", method}, {"epsilon", epsilon}, {"max_entries", max_entries}});
  }
};

void write_plan(const std::string& path, const gsw::TransportPlan& plan) {
  std::ofstream out(path);
  if (!out) throw gsw::Error(gsw::ErrorKind::config, "cannot write " + path);
  out << "i,j,mass\n";
  for (Eigen::Index i = 0; i < plan.plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.plan.cols(); ++j) {
      if (plan.plan(i, j) > 0.0) out << i << ',' << j << ',' << fmt(plan.plan(i, j)) << '\n';
    }
  }
}

void print_manifest(const gsw::Manifest& m, const std::filesystem::path& dir) {
  for (const auto& [name, hash] : m.files) std::cout << (dir / name).string() << '\n';
  std::cout << (dir / "manifest.json").string() << '\n';
  for (const auto& f : m.failures) std::cerr << "failed cell: " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-smoothed Wasserstein distances, MMD and tests"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (0: all cores)");
  app.fallthrough();

  // kernel-eval
  auto* kernel_cmd = app.add_subcommand("kernel-eval", "evaluate the smoothing kernel at a pair of points");
  std::string kx, ky;
  double sigma = 1.0;
  kernel_cmd->add_option("--x", kx, "comma-separated coordinates")->required();
  kernel_cmd->add_option("--y", ky, "comma-separated coordinates")->required();
  kernel_cmd->add_option("--sigma", sigma)->required();

  // distance
  auto* dist_cmd = app.add_subcommand("distance", "smooth Wasserstein distance between two samples");
  std::string input_a, input_b, plan_path;
  double p = 2.0;
  std::size_t k = 16;
  OtOptions ot;
  dist_cmd->add_option("--input-a", input_a)->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("--input-b", input_b)->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("--p", p)->capture_default_str();
  dist_cmd->add_option("--sigma", sigma, "smoothing (0: plain W_p)")->capture_default_str();
  dist_cmd->add_option("--k", k, "noise replicas per point")->capture_default_str();
  dist_cmd->add_option("--seed", seed);
  dist_cmd->add_option("--plan", plan_path, "write the transport plan as CSV (i,j,mass)");
  ot.add(dist_cmd);

  // mmd
  auto* mmd_cmd = app.add_subcommand("mmd", "d_2 smooth Sobolev IPM between two samples");
  std::string estimator = "v";
  bool squared = false;
  mmd_cmd->add_option("--input-a", input_a)->required()->check(CLI::ExistingFile);
  mmd_cmd->add_option("--input-b", input_b)->required()->check(CLI::ExistingFile);
  mmd_cmd->add_option("--sigma", sigma)->required();
  mmd_cmd->add_option("--estimator", estimator, "v or u")->check(CLI::IsMember({"v", "u"}));
  mmd_cmd->add_flag("--squared", squared, "print d_2^2 instead of d_2");

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "upper bound on E GW_2(mu_n, mu) over an n grid (CSV)");
  std::string spec_path;
  std::vector<std::size_t> n_grid;
  std::size_t mc = 1'000'000;
  bound_cmd->add_option("--spec", spec_path, "distribution spec JSON")->required()->check(CLI::ExistingFile);
  bound_cmd->add_option("--sigma", sigma)->required();
  bound_cmd->add_option("--n", n_grid, "sample sizes")->required()->delimiter(',');
  bound_cmd->add_option("--mc", mc, "Monte Carlo draws for the kernel expectations")->capture_default_str();
  bound_cmd->add_option("--seed", seed);

  // two-sample
  auto* test_cmd = app.add_subcommand("two-sample", "bootstrap two-sample test (JSON result)");
  gsw::TestConfig tc;
  std::string mode = "transport";
  test_cmd->add_option("--input-a", input_a)->required()->check(CLI::ExistingFile);
  test_cmd->add_option("--input-b", input_b)->required()->check(CLI::ExistingFile);
  test_cmd->add_option("--p", tc.p, "1 or 2")->capture_default_str();
  test_cmd->add_option("--sigma", tc.sigma)->capture_default_str();
  test_cmd->add_option("--alpha", tc.alpha)->capture_default_str();
  test_cmd->add_option("--B", tc.replicates, "bootstrap replicates")->capture_default_str();
  test_cmd->add_option("--k", tc.k, "noise replicas per point")->capture_default_str();
  test_cmd->add_option("--mode", mode, "transport or mmd")->check(CLI::IsMember({"transport", "mmd"}));
  test_cmd->add_option("--seed", seed);
  ot.add(test_cmd);

  // level-curve
  auto* level_cmd = app.add_subcommand("level-curve", "rejection rate against alpha over repeated samples");
  std::string spec_b_path, out_dir;
  std::size_t n = 256, m = 0, reps = 200;
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.3};
  level_cmd->add_option("--spec-a", spec_path, "distribution spec JSON")->required()->check(CLI::ExistingFile);
  level_cmd->add_option("--spec-b", spec_b_path, "alternative (default: spec-a)")->check(CLI::ExistingFile);
  level_cmd->add_option("--n", n)->capture_default_str();
  level_cmd->add_option("--m", m, "second sample size (default: n)");
  level_cmd->add_option("--reps", reps, "repetitions")->capture_default_str();
  level_cmd->add_option("--alphas", alphas)->delimiter(',');
  level_cmd->add_option("--p", tc.p)->capture_default_str();
  level_cmd->add_option("--sigma", tc.sigma)->capture_default_str();
  level_cmd->add_option("--B", tc.replicates)->capture_default_str();
  level_cmd->add_option("--k", tc.k)->capture_default_str();
  level_cmd->add_option("--mode", mode, "transport or mmd")->check(CLI::IsMember({"transport", "mmd"}));
  level_cmd->add_option("--seed", seed);
  level_cmd->add_option("--out", out_dir, "also write level_curve.csv/.svg and a manifest here");
  ot.add(level_cmd);

  // mswe
  auto* mswe_cmd = app.add_subcommand("mswe", "minimum smooth Wasserstein estimation error study");
  std::string family = "two_mode_means";
  std::vector<double> true_theta;
  gsw::ObjectiveConfig oc;
  std::size_t trials = 40;
  mswe_cmd->add_option("--spec", spec_path, "data distribution; must belong to the family")
      ->check(CLI::ExistingFile);
  mswe_cmd->add_option("--true-theta", true_theta, "alternative to --spec")->delimiter(',')->expected(2);
  mswe_cmd->add_option("--family", family, "two_mode_means or gaussian_mean_scale")->capture_default_str();
  mswe_cmd->add_option("--p", oc.p)->capture_default_str();
  mswe_cmd->add_option("--sigma", oc.sigma)->capture_default_str();
  mswe_cmd->add_option("--k", oc.k)->capture_default_str();
  mswe_cmd->add_option("--n-grid", n_grid)->required()->delimiter(',');
  mswe_cmd->add_option("--trials", trials)->capture_default_str();
  mswe_cmd->add_option("--seed", seed);
  mswe_cmd->add_option("--out", out_dir, "output directory (default: mswe_out)");

  // experiment run
  auto* exp_cmd = app.add_subcommand("experiment", "config-driven experiments");
  exp_cmd->require_subcommand(1);
  auto* run_cmd = exp_cmd->add_subcommand("run", "run one experiment config");
  std::string config_path;
  run_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const gsw::SeedSpec root{seed, 0};
    if (*kernel_cmd) {
      const auto x = parse_point(kx);
      const auto y = parse_point(ky);
      if (x.size() != y.size()) throw gsw::Error(gsw::ErrorKind::dimension_mismatch, "x and y differ in length");
      std::cout << fmt(gsw::kernel(x, y, gsw::KernelParams(sigma))) << '\n';
    } else if (*dist_cmd) {
      const auto a = gsw::read_csv_file(input_a);
      const auto b = gsw::read_csv_file(input_b);
      const auto cfg = ot.config(p);
      if (plan_path.empty()) {
        std::cout << fmt(gsw::smooth_wasserstein(a, b, sigma, cfg, k, root)) << '\n';
      } else {
        // Same augmentation as smooth_wasserstein with common noise.
        const auto aa = sigma > 0.0 ? gsw::augment(a, sigma, k, root) : a;
        const auto bb = sigma > 0.0 ? gsw::augment(b, sigma, k, root) : b;
        const auto plan = gsw::wasserstein_discrete(aa, bb, cfg);
        write_plan(plan_path, plan);
        std::cout << fmt(plan.distance()) << '\n';
      }
    } else if (*mmd_cmd) {
      const auto r = gsw::d2_squared(gsw::read_csv_file(input_a), gsw::read_csv_file(input_b),
                                     gsw::KernelParams(sigma),
                                     estimator == "u" ? gsw::Estimator::u_statistic : gsw::Estimator::v_statistic,
                                     threads);
      std::cout << fmt(squared ? r.d2_squared : r.d2) << '\n';
    } else if (*bound_cmd) {
      json spec;
      std::ifstream(spec_path) >> spec;
      const auto cfg = gsw::parse_experiment_config(
          {{"kind", "bound_curve"}, {"spec", spec}, {"sigmas", {sigma}}, {"n_grid", n_grid}, {"mc", mc},
           {"seed", seed}, {"threads", threads}});
      std::cout << "n,bound\n";
      for (const auto& row : gsw::bound_curve(cfg).rows) std::cout << row.n << ',' << fmt(row.mean) << '\n';
    } else if (*test_cmd) {
      tc.mode = mode == "mmd" ? gsw::TestMode::mmd : gsw::TestMode::transport;
      tc.ot = ot.config(tc.p);
      tc.threads = threads;
      const auto r = gsw::test(gsw::read_csv_file(input_a), gsw::read_csv_file(input_b), tc, root);
      const json out{{"statistic", r.statistic}, {"critical_value", r.critical_value}, {"reject", r.reject},
                     {"alpha", tc.alpha},        {"p", tc.p},                        {"sigma", tc.sigma},
                     {"replicates", tc.replicates}, {"mode", mode}};
      std::cout << out.dump(2) << '\n';
    } else if (*level_cmd) {
      json spec_a, spec_b;
      std::ifstream(spec_path) >> spec_a;
      if (!spec_b_path.empty()) std::ifstream(spec_b_path) >> spec_b;
      json test{{"p", tc.p}, {"sigma", tc.sigma}, {"replicates", tc.replicates}, {"k", tc.k}, {"mode", mode},
                {"ot", {{"method", ot.method}, {"epsilon", ot.epsilon}, {"max_entries", ot.max_entries}}}};
      json j{{"kind", "level_curve"}, {"spec", spec_a}, {"n_grid", {n}}, {"m", m}, {"trials", reps},
             {"alphas", alphas}, {"test", test}, {"seed", seed}, {"threads", threads}};
      if (!spec_b.is_null()) j["spec_b"] = spec_b;
      const auto cfg = gsw::parse_experiment_config(j);
      if (!out_dir.empty()) {
        print_manifest(gsw::run(cfg, out_dir), out_dir);
      } else {
        const auto rates = gsw::rejection_curve(cfg.spec, cfg.spec_b.value_or(cfg.spec), n, m == 0 ? n : m,
                                                cfg.test, cfg.alphas, cfg.trials, root);
        std::cout << "alpha,rejection_rate\n";
        for (const auto& r : rates) std::cout << fmt(r.alpha) << ',' << fmt(r.rate) << '\n';
      }
    } else if (*mswe_cmd) {
      const gsw::ParamFamily fam{gsw::parse_family(family)};
      if (!spec_path.empty()) {
        if (!true_theta.empty()) throw gsw::Error(gsw::ErrorKind::config, "give --spec or --true-theta, not both");
        true_theta = fam.parameters(gsw::read_spec_file(spec_path));
      }
      if (true_theta.empty()) throw gsw::Error(gsw::ErrorKind::config, "--spec or --true-theta is required");
      json j{{"kind", "mswe_error"}, {"family", family}, {"true_theta", true_theta}, {"n_grid", n_grid},
             {"trials", trials}, {"seed", seed}, {"threads", threads},
             {"fit", {{"p", oc.p}, {"sigma", oc.sigma}, {"k", oc.k}}}};
      if (out_dir.empty()) out_dir = "mswe_out";
      print_manifest(gsw::run(gsw::parse_experiment_config(j), out_dir), out_dir);
    } else if (*run_cmd) {
      const auto m_out = gsw::run(gsw::read_experiment_config(config_path), out_dir);
      print_manifest(m_out, out_dir);
    }
  } catch (const gsw::Error& e) {
    std::cerr << "gsw: " << e.what() << '\n';
    return e.kind() == gsw::ErrorKind::config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "gsw: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
