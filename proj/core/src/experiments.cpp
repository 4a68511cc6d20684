#include "gsw/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "gsw/error.hpp"
#include "gsw/mmd.hpp"
#include "gsw/parallel.hpp"
#include "gsw/stats.hpp"
#include "gsw/svg.hpp"

namespace gsw {
namespace {

using nlohmann::json;

constexpr const char* kUsage =
    "experiment kind must be one of: convergence_curve, bound_curve, limit_distribution, level_curve, mswe_error";

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t max_n(const std::vector<std::size_t>& grid) { return *std::max_element(grid.begin(), grid.end()); }

std::vector<SlopeRow> fit_slopes(const std::vector<CurveRow>& rows, const std::vector<double>& sigmas) {
  std::vector<SlopeRow> out;
  for (double sigma : sigmas) {
    std::vector<CurveRow> cells;
    for (const auto& r : rows) {
      if (r.sigma == sigma && r.trials > 0 && r.mean > 0.0) cells.push_back(r);
    }
    // Largest half of the grid, at least two points.
    const std::size_t keep = std::max<std::size_t>(2, (cells.size() + 1) / 2);
    if (cells.size() < 2) continue;
    std::vector<double> x, y, se;
    for (std::size_t i = cells.size() - std::min(keep, cells.size()); i < cells.size(); ++i) {
      x.push_back(static_cast<double>(cells[i].n));
      y.push_back(cells[i].mean);
      se.push_back(cells[i].std_error);
    }
    const SlopeFit f = loglog_slope(x, y, se);
    out.push_back({sigma, f.slope, f.slope_std_error});
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

svg::Plot curve_plot(const CurveTable& t, const std::string& title, const std::string& y_label) {
  svg::Plot plot{.title = title, .x_label = "n", .y_label = y_label, .log_x = true, .log_y = true};
  std::vector<double> sigmas;
  for (const auto& r : t.rows) {
    if (std::find(sigmas.begin(), sigmas.end(), r.sigma) == sigmas.end()) sigmas.push_back(r.sigma);
  }
  for (double s : sigmas) {
    svg::Series series;
    std::ostringstream label;
    label << "sigma=" << s;
    series.label = label.str();
    for (const auto& r : t.rows) {
      if (r.sigma != s) continue;
      series.x.push_back(static_cast<double>(r.n));
      series.y.push_back(r.mean);
      series.err.push_back(r.std_error);
    }
    plot.series.push_back(std::move(series));
  }
  return plot;
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kinds{"convergence_curve", "bound_curve", "limit_distribution",
                                              "level_curve", "mswe_error"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw Error(ErrorKind::config, "unknown experiment kind '" + kind + "'. " + kUsage);
  }
  spec.validate();
  if (spec_b) spec_b->validate();
  if (n_grid.empty()) throw Error(ErrorKind::config, "n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw Error(ErrorKind::config, "n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw Error(ErrorKind::config, "n_grid must be strictly increasing");
  }
  if (trials < 2 && kind != "level_curve") throw Error(ErrorKind::config, "trials must be >= 2");
  if (sigmas.empty()) throw Error(ErrorKind::config, "sigmas must not be empty");
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorKind::config, "sigmas must be finite and >= 0");
  }
  if (k < 1 || ref_k < 1) throw Error(ErrorKind::config, "k and ref_k must be >= 1");
  if (metric != "wasserstein" && metric != "mmd") throw Error(ErrorKind::config, "metric must be wasserstein or mmd");
  if (reference != "sample" && reference != "quadrature") {
    throw Error(ErrorKind::config, "reference must be sample or quadrature");
  }
  if (metric == "mmd") {
    for (double s : sigmas) {
      if (!(s > 0.0)) throw Error(ErrorKind::config, "mmd metric needs sigma > 0");
    }
  }
  if (kind == "convergence_curve" && reference == "sample" && reference_size() < 10 * max_n(n_grid)) {
    throw Error(ErrorKind::config, "convergence_curve needs ref_n >= 10 * max(n_grid)");
  }
  if (kind == "bound_curve" || kind == "limit_distribution") {
    for (double s : sigmas) {
      if (!(s > 0.0)) throw Error(ErrorKind::config, kind + " needs sigma > 0");
    }
  }
  if (kind == "level_curve") {
    test.validate();
    if (trials < 1) throw Error(ErrorKind::config, "level_curve needs at least one repetition");
  }
  if (kind == "mswe_error") {
    family.check(true_theta);
    if (spec.dim != 1) throw Error(ErrorKind::config, "mswe_error is one-dimensional");
  }
}

std::size_t ExperimentConfig::reference_size() const {
  if (ref_n > 0) return ref_n;
  if (kind == "limit_distribution") return 1000;
  if (spec.dim <= 2) return std::max<std::size_t>(10'000, 10 * max_n(n_grid));
  return std::min<std::size_t>(1000 * max_n(n_grid), 100'000);
}

OTConfig parse_ot_config(const json& j) {
  OTConfig cfg;
  cfg.p = j.value("p", 2.0);
  const std::string method = j.value("method", "exact_lp");
  if (method == "exact_lp") {
    ExactLp lp;
    lp.max_entries = j.value("max_entries", lp.max_entries);
    cfg.method = lp;
  } else if (method == "quantile") {
    cfg.method = QuantileMethod{};
  } else if (method == "sinkhorn") {
    Sinkhorn s;
    s.epsilon = j.value("epsilon", s.epsilon);
    s.max_iter = j.value("max_iter", s.max_iter);
    s.tol = j.value("tol", s.tol);
    cfg.method = s;
  } else {
    throw Error(ErrorKind::config, "unknown ot method '" + method + "' (exact_lp, quantile, sinkhorn)");
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(const json& j) {
  ExperimentConfig cfg;
  try {
    cfg.source = j;
    cfg.kind = j.at("kind").get<std::string>();
    if (j.contains("spec")) cfg.spec = j.at("spec").get<DistributionSpec>();
    if (j.contains("spec_b")) cfg.spec_b = j.at("spec_b").get<DistributionSpec>();
    if (j.contains("sigma")) cfg.sigmas = {j.at("sigma").get<double>()};
    cfg.sigmas = j.value("sigmas", cfg.sigmas);
    if (j.contains("n")) cfg.n_grid = {j.at("n").get<std::size_t>()};
    cfg.n_grid = j.value("n_grid", cfg.n_grid);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.ref_n = j.value("ref_n", cfg.ref_n);
    cfg.k = j.value("k", cfg.k);
    cfg.ref_k = j.value("ref_k", cfg.ref_k);
    cfg.mc = j.value("mc", cfg.mc);
    cfg.metric = j.value("metric", cfg.metric);
    cfg.reference = j.value("reference", cfg.reference);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("ot")) cfg.ot = parse_ot_config(j.at("ot"));
    if (j.contains("test")) {
      const json& t = j.at("test");
      cfg.test.p = t.value("p", cfg.test.p);
      cfg.test.sigma = t.value("sigma", cfg.test.sigma);
      cfg.test.alpha = t.value("alpha", cfg.test.alpha);
      cfg.test.replicates = t.value("replicates", cfg.test.replicates);
      cfg.test.k = t.value("k", cfg.test.k);
      const auto mode = t.value("mode", std::string("transport"));
      if (mode != "transport" && mode != "mmd") {
        throw Error(ErrorKind::config, "test mode must be transport or mmd, got '" + mode + "'");
      }
      cfg.test.mode = mode == "mmd" ? TestMode::mmd : TestMode::transport;
      if (t.contains("ot")) cfg.test.ot = parse_ot_config(t.at("ot"));
    }
    cfg.test.threads = cfg.threads;
    cfg.alphas = j.value("alphas", cfg.alphas);
    cfg.m = j.value("m", cfg.m);
    if (j.contains("family")) cfg.family.kind = parse_family(j.at("family").get<std::string>());
    cfg.true_theta = j.value("true_theta", cfg.true_theta);
    if (j.contains("fit")) {
      const json& f = j.at("fit");
      cfg.objective.p = f.value("p", cfg.objective.p);
      cfg.objective.sigma = f.value("sigma", cfg.objective.sigma);
      cfg.objective.k = f.value("k", cfg.objective.k);
      cfg.objective.model_n = f.value("model_n", cfg.objective.model_n);
      cfg.optimizer.restarts = f.value("restarts", cfg.optimizer.restarts);
      cfg.optimizer.grid_points = f.value("grid_points", cfg.optimizer.grid_points);
      cfg.optimizer.max_iterations = f.value("max_iterations", cfg.optimizer.max_iterations);
      cfg.optimizer.step_tol = f.value("step_tol", cfg.optimizer.step_tol);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("bad experiment config: ") + e.what());
  }
  if (cfg.kind == "mswe_error" && !j.contains("spec")) cfg.spec = cfg.family.distribution(cfg.true_theta);
  if (cfg.kind == "level_curve" && !j.contains("sigma") && !j.contains("sigmas")) cfg.sigmas = {cfg.test.sigma};
  cfg.validate();
  return cfg;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

const CurveRow* CurveTable::find(double sigma, std::size_t n) const {
  for (const auto& r : rows) {
    if (r.sigma == sigma && r.n == n) return &r;
  }
  return nullptr;
}

CurveTable convergence_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  const SeedSpec root{cfg.seed, 0};
  const EmpiricalMeasure reference = cfg.reference == "quadrature"
                                         ? quadrature_measure(cfg.spec)
                                         : sample(cfg.spec, cfg.reference_size(), root.child(0));
  const std::size_t ns = cfg.n_grid.size();
  const std::size_t cells = cfg.sigmas.size() * ns * cfg.trials;
  std::vector<std::optional<ReferenceEmbedding>> embeddings(cfg.sigmas.size());
  if (cfg.metric == "mmd") {
    for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
      embeddings[si].emplace(reference, KernelParams(cfg.sigmas[si]), 1);
    }
  }
  std::vector<double> values(cells, kNaN);
  std::vector<std::string> errors(cells);

  parallel_for(cells, cfg.threads, [&](std::size_t c) {
    const std::size_t si = c / (ns * cfg.trials);
    const std::size_t ni = (c / cfg.trials) % ns;
    const std::size_t trial = c % cfg.trials;
    const double sigma = cfg.sigmas[si];
    // Samples and noise are shared across sigma (common random numbers).
    const EmpiricalMeasure x = sample(cfg.spec, cfg.n_grid[ni], root.child(1).child(ni).child(trial));
    const SeedSpec noise = root.child(2).child(ni).child(trial);
    try {
      if (cfg.metric == "mmd") {
        values[c] = embeddings[si]->d2_squared(x).d2;
      } else if (sigma == 0.0) {
        values[c] = transport_distance(x, reference, cfg.ot);
      } else {
        values[c] = transport_distance(augment(x, sigma, cfg.k, noise.child(0)),
                                       augment(reference, sigma, cfg.ref_k, noise.child(1)), cfg.ot);
      }
    } catch (const Error& e) {
      errors[c] = e.what();
    }
  });

  CurveTable table;
  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
    for (std::size_t ni = 0; ni < ns; ++ni) {
      const auto first = values.begin() + static_cast<std::ptrdiff_t>((si * ns + ni) * cfg.trials);
      const std::vector<double> cell(first, first + static_cast<std::ptrdiff_t>(cfg.trials));
      const Summary s = summarize(cell);
      table.rows.push_back({cfg.sigmas[si], cfg.n_grid[ni], s.mean, s.std_error, s.count});
    }
  }
  for (std::size_t c = 0; c < cells; ++c) {
    if (!errors[c].empty()) table.failures.push_back("cell " + std::to_string(c) + ": " + errors[c]);
  }
  table.slopes = fit_slopes(table.rows, cfg.sigmas);
  return table;
}

CurveTable bound_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  const DistributionSpec centered = cfg.spec.centered();
  const double m2 = centered.central_second_moment();
  CurveTable table;
  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
    const double sigma = cfg.sigmas[si];
    const KernelExpectations e = kernel_expectations(centered, KernelParams(sigma), cfg.mc, SeedSpec{cfg.seed, 0}.child(si));
    const double gap = std::max(e.gap(), 0.0);
    for (std::size_t n : cfg.n_grid) {
      const double d = std::sqrt(gap / static_cast<double>(n));
      const double bound = gw_upper_bound(d, m2, 2.0, sigma);
      const double se = gap > 0.0 ? bound * e.gap_std_error / (2.0 * gap) : 0.0;
      table.rows.push_back({sigma, n, bound, se, cfg.mc});
    }
  }
  table.slopes = fit_slopes(table.rows, cfg.sigmas);
  return table;
}

LimitDistribution limit_distribution(const ExperimentConfig& cfg) {
  cfg.validate();
  const SeedSpec root{cfg.seed, 0};
  const double sigma = cfg.sigmas.front();
  const ReferenceEmbedding ref(sample(cfg.spec, cfg.reference_size(), root.child(0)), KernelParams(sigma), 1);
  const std::size_t ns = cfg.n_grid.size();
  std::vector<double> values(ns * cfg.trials, kNaN);
  parallel_for(values.size(), cfg.threads, [&](std::size_t c) {
    const std::size_t ni = c / cfg.trials;
    const std::size_t n = cfg.n_grid[ni];
    const EmpiricalMeasure x = sample(cfg.spec, n, root.child(1).child(ni).child(c % cfg.trials));
    values[c] = std::sqrt(static_cast<double>(n)) * ref.d2_squared(x).d2;
  });

  LimitDistribution out;
  out.sigma = sigma;
  for (std::size_t c = 0; c < values.size(); ++c) {
    out.samples.push_back({cfg.n_grid[c / cfg.trials], c % cfg.trials, values[c]});
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t ni = 0; ni < ns; ++ni) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(ni * cfg.trials);
    const double med = median({first, first + static_cast<std::ptrdiff_t>(cfg.trials)});
    out.medians.emplace_back(cfg.n_grid[ni], med);
    lo = std::min(lo, med);
    hi = std::max(hi, med);
  }
  out.relative_range = (hi - lo) / lo;
  out.growth = out.medians.back().second / out.medians.front().second - 1.0;
  return out;
}

void write_curve_csv(std::ostream& out, const CurveTable& table) {
  out << std::setprecision(17);
  out << "sigma,n,mean,std_error,trials\n";
  for (const auto& r : table.rows) {
    out << r.sigma << ',' << r.n << ',' << r.mean << ',' << r.std_error << ',' << r.trials << '\n';
  }
  for (const auto& s : table.slopes) {
    out << "# slope sigma=" << s.sigma << " value=" << s.slope << " std_error=" << s.slope_std_error << '\n';
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::config, "sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

json Manifest::to_json() const {
  json files_json = json::array();
  for (const auto& [name, hash] : files) files_json.push_back({{"file", name}, {"sha256", hash}});
  return {{"kind", kind},
          {"config_hash", config_hash},
          {"seed", seed},
          {"runtime_seconds", runtime_seconds},
          {"files", files_json},
          {"failures", failures}};
}

Manifest run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);
  Manifest manifest;
  manifest.kind = cfg.kind;
  manifest.seed = cfg.seed;
  manifest.config_hash = sha256_hex(cfg.source.dump());
  std::vector<std::string> written;

  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::config, "cannot write " + (out_dir / name).string());
    f << content;
    written.push_back(name);
  };

  if (cfg.kind == "convergence_curve" || cfg.kind == "bound_curve") {
    const bool conv = cfg.kind == "convergence_curve";
    const CurveTable t = conv ? convergence_curve(cfg) : bound_curve(cfg);
    std::ostringstream csv;
    write_curve_csv(csv, t);
    write(cfg.kind + ".csv", csv.str());
    write(cfg.kind + ".svg",
          curve_plot(t, conv ? "Empirical convergence" : "Upper bound", conv ? "E W_p" : "bound").render());
    manifest.failures = t.failures;
    if (conv && !t.failures.empty() && t.failures.size() == cfg.sigmas.size() * cfg.n_grid.size() * cfg.trials) {
      throw Error(ErrorKind::solver_failure, "every convergence cell failed: " + t.failures.front());
    }
  } else if (cfg.kind == "limit_distribution") {
    const LimitDistribution ld = limit_distribution(cfg);
    std::ostringstream csv;
    csv << std::setprecision(17) << "n,trial,value\n";
    for (const auto& s : ld.samples) csv << s.n << ',' << s.trial << ',' << s.value << '\n';
    write("limit_samples.csv", csv.str());
    std::ostringstream med;
    med << std::setprecision(17) << "n,median\n";
    for (const auto& [n, m] : ld.medians) med << n << ',' << m << '\n';
    med << "# relative_range=" << ld.relative_range << " growth=" << ld.growth << '\n';
    write("limit_medians.csv", med.str());

    svg::Plot plot{.title = "Limit distribution (KDE)", .x_label = "sqrt(n) d_2", .y_label = "density"};
    double hi = 0.0;
    for (const auto& s : ld.samples) hi = std::max(hi, s.value);
    std::vector<double> grid(200);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 1.1 * hi * static_cast<double>(i) / 199.0;
    for (std::size_t n : cfg.n_grid) {
      std::vector<double> v;
      for (const auto& s : ld.samples) {
        if (s.n == n) v.push_back(s.value);
      }
      plot.series.push_back({"n=" + std::to_string(n), grid, kde(v, grid), {}, svg::Style::line});
    }
    write("limit_kde.svg", plot.render());
  } else if (cfg.kind == "level_curve") {
    const std::size_t n = cfg.n_grid.front();
    const auto rates = rejection_curve(cfg.spec, cfg.spec_b.value_or(cfg.spec), n, cfg.m == 0 ? n : cfg.m, cfg.test,
                                       cfg.alphas, cfg.trials, SeedSpec{cfg.seed, 0});
    std::ostringstream csv;
    csv << std::setprecision(17) << "alpha,rejection_rate\n";
    svg::Series curve{"rejection rate", {}, {}, {}, svg::Style::line};
    for (const auto& r : rates) {
      csv << r.alpha << ',' << r.rate << '\n';
      curve.x.push_back(r.alpha);
      curve.y.push_back(r.rate);
    }
    write("level_curve.csv", csv.str());
    svg::Plot plot{.title = "Rejection rate", .x_label = "alpha", .y_label = "rate"};
    plot.series.push_back(std::move(curve));
    plot.series.push_back({"diagonal", {0.0, 1.0}, {0.0, 1.0}, {}, svg::Style::line});
    write("level_curve.svg", plot.render());
  } else if (cfg.kind == "mswe_error") {
    ObjectiveConfig oc = cfg.objective;
    const ErrorTable t = error_experiment(cfg.family, cfg.true_theta, oc, cfg.optimizer, cfg.n_grid, cfg.trials,
                                          SeedSpec{cfg.seed, 0}, cfg.threads);
    std::ostringstream csv;
    csv << std::setprecision(17) << "n,trial,coord,scaled_error,failed\n";
    for (const auto& r : t.rows) {
      csv << r.n << ',' << r.trial << ',' << r.coord << ',' << r.scaled_error << ',' << (r.failed ? 1 : 0) << '\n';
      if (r.failed && r.coord == 0) {
        manifest.failures.push_back("n=" + std::to_string(r.n) + " trial=" + std::to_string(r.trial));
      }
    }
    write("mswe_errors.csv", csv.str());
    std::ostringstream gaps;
    gaps << std::setprecision(17) << "n,trial,objective_at_truth,objective_at_fit,gap\n";
    for (const auto& g : t.gaps) {
      gaps << g.n << ',' << g.trial << ',' << g.at_truth << ',' << g.at_fit << ',' << g.gap() << '\n';
    }
    write("mswe_objective_gaps.csv", gaps.str());
    svg::Plot plot{.title = "Scaled M-SWE errors", .x_label = "sqrt(n) error, coord 0",
                   .y_label = "sqrt(n) error, coord 1"};
    for (std::size_t n : cfg.n_grid) {
      svg::Series s{"n=" + std::to_string(n), {}, {}, {}, svg::Style::scatter};
      for (std::size_t i = 0; i + 1 < t.rows.size(); i += 2) {
        if (t.rows[i].n == n && !t.rows[i].failed) {
          s.x.push_back(t.rows[i].scaled_error);
          s.y.push_back(t.rows[i + 1].scaled_error);
        }
      }
      plot.series.push_back(std::move(s));
    }
    write("mswe_scatter.svg", plot.render());
  }

  for (const auto& name : written) manifest.files.emplace_back(name, sha256_hex(read_file(out_dir / name)));
  manifest.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream m(out_dir / "manifest.json");
  m << manifest.to_json().dump(2) << '\n';
  return manifest;
}

}  // namespace gsw
