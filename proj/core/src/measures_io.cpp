#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsw/error.hpp"
#include "linalg.hpp"
#include "gsw/measures.hpp"

namespace gsw {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_spec,
                "csv line " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
  }
}

}  // namespace

// Weights are renormalized on read so hand-written files with rounded weights
// (0.333, ...) load; a missing w column means uniform weights.
EmpiricalMeasure read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::invalid_spec, "csv is empty");
  const auto header = split_csv_line(line);
  if (header.empty()) throw Error(ErrorKind::invalid_spec, "csv header is empty");
  const bool has_weight = header.back() == "w";
  const std::size_t d = has_weight ? header.size() - 1 : header.size();
  if (d == 0) throw Error(ErrorKind::invalid_spec, "csv has no coordinate columns");
  for (std::size_t k = 0; k < d; ++k) {
    if (header[k] != "x" + std::to_string(k + 1)) {
      throw Error(ErrorKind::invalid_spec, "csv header must be x1,...,xd,w; got '" + header[k] + "'");
    }
  }

  std::vector<double> coords;
  std::vector<double> weights;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::dimension_mismatch,
                  "csv line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " columns, expected " + std::to_string(header.size()));
    }
    for (std::size_t k = 0; k < d; ++k) coords.push_back(parse_number(cells[k], line_no));
    weights.push_back(has_weight ? parse_number(cells[d], line_no) : 1.0);
  }
  const auto n = static_cast<Eigen::Index>(weights.size());
  if (n == 0) throw Error(ErrorKind::invalid_spec, "csv has no data rows");

  PointMatrix pts = Eigen::Map<PointMatrix>(coords.data(), n, static_cast<Eigen::Index>(d));
  Vector w = Eigen::Map<Vector>(weights.data(), n);
  if ((w.array() < 0.0).any() || !(detail::total(w) > 0.0)) {
    throw Error(ErrorKind::invalid_spec, "csv weights must be nonnegative with positive total");
  }
  w /= detail::total(w);
  return EmpiricalMeasure(std::move(pts), std::move(w));
}

EmpiricalMeasure read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const EmpiricalMeasure& m) {
  const auto d = m.dim();
  for (std::size_t k = 0; k < d; ++k) out << 'x' << k + 1 << ',';
  out << "w\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double x : m.point(i)) out << x << ',';
    out << m.weights()(static_cast<Eigen::Index>(i)) << '\n';
  }
}

void to_json(nlohmann::json& j, const DistributionSpec& spec) {
  j = nlohmann::json{{"dim", spec.dim}};
  if (const auto* u = std::get_if<UniformCube>(&spec.kind)) {
    j["kind"] = "uniform_cube";
    j["half_width"] = u->half_width;
    if (!u->center.empty()) j["center"] = u->center;
  } else if (const auto* g = std::get_if<Gaussian>(&spec.kind)) {
    j["kind"] = "gaussian";
    j["mean"] = g->mean.empty() ? std::vector<double>(spec.dim, 0.0) : g->mean;
    j["scale"] = g->scale;
  } else {
    const auto& mix = std::get<GaussianMixture>(spec.kind);
    j["kind"] = "gaussian_mixture";
    j["means"] = mix.means;
    j["scales"] = mix.scales;
    j["mixture_weights"] = mix.weights;
  }
}

void from_json(const nlohmann::json& j, DistributionSpec& spec) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    spec.dim = j.value("dim", std::size_t{1});
    if (kind == "uniform_cube") {
      UniformCube u{j.value("half_width", 1.0), {}};
      if (j.contains("center")) {
        const auto& center = j.at("center");
        u.center = center.is_number() ? std::vector<double>(spec.dim, center.get<double>())
                                      : center.get<std::vector<double>>();
      }
      spec.kind = std::move(u);
    } else if (kind == "gaussian") {
      Gaussian g;
      if (j.contains("mean")) {
        const auto& mean = j.at("mean");
        g.mean = mean.is_number() ? std::vector<double>(spec.dim, mean.get<double>())
                                  : mean.get<std::vector<double>>();
      }
      g.scale = j.value("scale", 1.0);
      spec.kind = std::move(g);
    } else if (kind == "gaussian_mixture") {
      GaussianMixture g;
      for (const auto& m : j.at("means")) {
        g.means.push_back(m.is_number() ? std::vector<double>{m.get<double>()}
                                        : m.get<std::vector<double>>());
      }
      const std::size_t c = g.means.size();
      g.scales = j.contains("scales") ? j.at("scales").get<std::vector<double>>()
                                      : std::vector<double>(c, 1.0);
      // "weights" is accepted as a short alias.
      const char* wkey = j.contains("mixture_weights") ? "mixture_weights" : "weights";
      g.weights = j.contains(wkey) ? j.at(wkey).get<std::vector<double>>()
                                   : std::vector<double>(c, 1.0 / static_cast<double>(c));
      spec.kind = std::move(g);
    } else {
      throw Error(ErrorKind::invalid_spec, "unknown distribution kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_spec, std::string("distribution spec: ") + e.what());
  }
  spec.validate();
}

DistributionSpec read_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, path + ": " + e.what());
  }
  return j.get<DistributionSpec>();
}

}  // namespace gsw
