#include "nlcq/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nlcq/errors.hpp"
#include "nlcq/mesh.hpp"

namespace nlcq {

using json = nlohmann::json;

// ---------------------------------------------------------------- config

IncidentWave WaveSpec::build() const {
  if (kind == "spatially_constant") return IncidentWave::spatially_constant(amplitude, width, offset);
  if (kind == "plane_wave") return IncidentWave::plane_wave(amplitude, width, offset, direction);
  if (kind == "modulated_gaussian") return IncidentWave::modulated_gaussian(amplitude, omega, sigma, offset, direction);
  throw ConfigError("unknown wave kind '" + kind + "'");
}

void RunConfig::validate() const {
  if (backend != "modal" && backend != "bem3d") throw ConfigError("backend must be 'modal' or 'bem3d'");
  (void)MultistepScheme::from_name(scheme);
  (void)MultistepScheme::from_name(reference_scheme);
  if (!(final_time > 0.0) || !std::isfinite(final_time)) throw ConfigError("final_time must be positive");
  if (steps.empty()) throw ConfigError("steps must list at least one N");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] < 1) throw ConfigError("step counts must be positive");
    if (i > 0 && steps[i] <= steps[i - 1]) throw ConfigError("step counts must be strictly increasing");
  }
  if (reference_steps < 1) throw ConfigError("reference.steps must be positive");
  for (int n : steps) {
    if (reference_steps % n != 0) {
      throw ConfigError("reference N = " + std::to_string(reference_steps) + " is not a multiple of N = " +
                        std::to_string(n));
    }
  }
  // Reference step at most a quarter (scalar runs) or half (surface meshes)
  // of the smallest step.
  const int factor = backend == "modal" ? 4 : 2;
  if (reference_steps < factor * steps.back()) {
    throw ConfigError("reference step must be at most 1/" + std::to_string(factor) + " of the smallest step");
  }
  if (g_linear_coeff < 0.0 || g_quadratic_coeff < 0.0) throw ConfigError("impedance coefficients must be non-negative");
  const auto grid = default_validation_grid();
  const auto report = validate_impedance(impedance(), grid);
  if (!report.passed()) throw ConfigError("impedance rejected: " + report.failures());
  const IncidentWave w = wave.build();
  if (backend == "modal" && !w.is_spatially_constant()) {
    throw ConfigError("the modal backend needs a spatially constant wave");
  }
  newton.validate();
  if (degree != 0 && degree != 1) throw ConfigError("spaces.degree must be 0 or 1");
  if (quadrature_order < 3) throw ConfigError("quadrature_order must be at least 3");
  if (backend == "bem3d") {
    if (mesh.kind == "icosphere") {
      if (mesh.subdivisions < 0) throw ConfigError("mesh.subdivisions must be non-negative");
    } else if (mesh.kind == "cube") {
      if (mesh.divisions < 1) throw ConfigError("mesh.divisions must be positive");
    } else if (mesh.kind == "file") {
      if (mesh.path.empty()) throw ConfigError("mesh.path is required for mesh.kind = file");
    } else {
      throw ConfigError("mesh.kind must be icosphere, cube or file");
    }
  }
}

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing '" + where + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return require(j, key, where).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("invalid '" + where + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, where);
}

Eigen::Vector3d get_vector(const json& j, const char* key, const std::string& where) {
  const auto v = get<std::vector<double>>(j, key, where);
  if (v.size() != 3) throw ConfigError("'" + where + key + "' must have three components");
  return {v[0], v[1], v[2]};
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.name = get_or<std::string>(j, "name", c.name, "");
  c.backend = get_or<std::string>(j, "backend", c.backend, "");
  c.problem = problem_from_name(get_or<std::string>(j, "problem", "exterior", ""));
  c.scheme = get_or<std::string>(j, "scheme", c.scheme, "");
  c.final_time = get<double>(j, "final_time", "");
  c.steps = get<std::vector<int>>(j, "steps", "");
  const json& ref = require(j, "reference", "");
  c.reference_scheme = get_or<std::string>(ref, "scheme", c.reference_scheme, "reference.");
  c.reference_steps = get<int>(ref, "steps", "reference.");
  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    c.mesh.kind = get_or<std::string>(m, "kind", c.mesh.kind, "mesh.");
    c.mesh.subdivisions = get_or<int>(m, "subdivisions", c.mesh.subdivisions, "mesh.");
    c.mesh.divisions = get_or<int>(m, "divisions", c.mesh.divisions, "mesh.");
    c.mesh.path = get_or<std::string>(m, "path", "", "mesh.");
  }
  if (j.contains("spaces")) c.degree = get_or<int>(j.at("spaces"), "degree", c.degree, "spaces.");
  c.quadrature_order = get_or<int>(j, "quadrature_order", c.quadrature_order, "");

  const json& w = require(j, "wave", "");
  c.wave.kind = get<std::string>(w, "kind", "wave.");
  c.wave.amplitude = get<double>(w, "amplitude", "wave.");
  c.wave.offset = get<double>(w, "offset", "wave.");
  if (c.wave.kind == "spatially_constant" || c.wave.kind == "plane_wave") {
    c.wave.width = get<double>(w, "width", "wave.");
  }
  if (c.wave.kind == "plane_wave" || c.wave.kind == "modulated_gaussian") {
    c.wave.direction = get_vector(w, "direction", "wave.");
  }
  if (c.wave.kind == "modulated_gaussian") {
    c.wave.omega = get<double>(w, "omega", "wave.");
    c.wave.sigma = get<double>(w, "sigma", "wave.");
  }

  const json& imp = require(j, "impedance", "");
  c.g_linear_coeff = get<double>(imp, "g_linear_coeff", "impedance.");
  c.g_quadratic_coeff = get<double>(imp, "g_quadratic_coeff", "impedance.");

  if (j.contains("newton")) {
    const json& n = j.at("newton");
    c.newton.tol_increment = get_or<double>(n, "tol_increment", c.newton.tol_increment, "newton.");
    c.newton.max_iters = get_or<int>(n, "max_iters", c.newton.max_iters, "newton.");
  }
  c.output = get_or<std::string>(j, "output", ".", "");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["backend"] = c.backend;
  j["problem"] = problem_name(c.problem);
  j["scheme"] = c.scheme;
  j["final_time"] = c.final_time;
  j["steps"] = c.steps;
  j["reference"] = {{"scheme", c.reference_scheme}, {"steps", c.reference_steps}};
  if (c.backend == "bem3d") {
    json m = {{"kind", c.mesh.kind}};
    if (c.mesh.kind == "icosphere") m["subdivisions"] = c.mesh.subdivisions;
    if (c.mesh.kind == "cube") m["divisions"] = c.mesh.divisions;
    if (c.mesh.kind == "file") m["path"] = c.mesh.path.string();
    j["mesh"] = m;
    j["spaces"] = {{"degree", c.degree}};
    j["quadrature_order"] = c.quadrature_order;
  }
  json w = {{"kind", c.wave.kind}, {"amplitude", c.wave.amplitude}, {"offset", c.wave.offset}};
  if (c.wave.kind == "spatially_constant" || c.wave.kind == "plane_wave") w["width"] = c.wave.width;
  if (c.wave.kind != "spatially_constant") {
    w["direction"] = {c.wave.direction[0], c.wave.direction[1], c.wave.direction[2]};
  }
  if (c.wave.kind == "modulated_gaussian") {
    w["omega"] = c.wave.omega;
    w["sigma"] = c.wave.sigma;
  }
  j["wave"] = w;
  j["impedance"] = {{"g_linear_coeff", c.g_linear_coeff}, {"g_quadratic_coeff", c.g_quadratic_coeff}};
  j["newton"] = {{"tol_increment", c.newton.tol_increment}, {"max_iters", c.newton.max_iters}};
  j["output"] = c.output.string();
  return j.dump(2);
}

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  if (config.backend == "modal") return std::make_unique<ModalBackend>();
  if (config.backend != "bem3d") throw ConfigError("unknown backend '" + config.backend + "'");
  if (config.mesh.kind == "icosphere") {
    return std::make_unique<BemBackend>(icosphere(config.mesh.subdivisions), config.degree, config.quadrature_order);
  }
  if (config.mesh.kind == "cube") {
    return std::make_unique<BemBackend>(unit_cube(config.mesh.divisions), config.degree, config.quadrature_order);
  }
  if (config.mesh.kind == "file") {
    return std::make_unique<BemBackend>(load_mesh(config.mesh.path), config.degree, config.quadrature_order);
  }
  throw ConfigError("unknown mesh kind '" + config.mesh.kind + "'");
}

// ---------------------------------------------------------------- rates

namespace {

double combined(const RateRow& row) { return std::hypot(row.err_phi, row.err_psi); }

}  // namespace

double RateTable::fitted_order() const {
  if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t first = rows.size() > 4 ? rows.size() - 4 : 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double count = 0.0;
  for (std::size_t i = first; i < rows.size(); ++i) {
    const double x = std::log(rows[i].dt);
    const double y = std::log(combined(rows[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1.0;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

bool RateTable::monotone() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(combined(rows[i]) < combined(rows[i - 1]))) return false;
  }
  return true;
}

void fill_orders(RateTable& table) {
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (i == 0) {
      table.rows[i].order = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    table.rows[i].order = std::log(combined(a) / combined(b)) / std::log(a.dt / b.dt);
  }
}

// ---------------------------------------------------------------- studies

StudyResult convergence_study(const RunConfig& config, std::ostream* log) {
  config.validate();
  const auto backend = make_backend(config);
  return convergence_study(config, *backend, log);
}

StudyResult convergence_study(const RunConfig& config, const Backend& backend, std::ostream* log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const IncidentWave wave = config.wave.build();
  const Impedance imp = config.impedance();
  const MultistepScheme ref_scheme = MultistepScheme::from_name(config.reference_scheme);
  const MultistepScheme scheme = MultistepScheme::from_name(config.scheme);

  StudyResult study;
  study.name = config.name;
  const TimeGrid ref_grid(config.final_time, config.reference_steps);
  if (log != nullptr) *log << "# run " << config.name << " reference " << ref_scheme.name() << " N=" << ref_grid.steps() << '\n';
  study.reference = solve_marching(backend, ref_scheme, ref_grid, wave, imp, config.newton, config.problem, log);
  study.runs.push_back({ref_grid.steps(), study.reference.median_iterations(), 0});
  for (const auto& d : study.reference.diagnostics) study.runs.back().max_iterations = std::max(study.runs.back().max_iterations, d.iterations);
  const TraceSequence ref_int = integrated_traces(study.reference.traces, ref_scheme, ref_grid);

  for (int n_steps : config.steps) {
    const TimeGrid grid(config.final_time, n_steps);
    if (log != nullptr) *log << "# run " << config.name << ' ' << scheme.name() << " N=" << n_steps << '\n';
    const MarchResult run = solve_marching(backend, scheme, grid, wave, imp, config.newton, config.problem, log);
    RunSummary summary{n_steps, run.median_iterations(), 0};
    for (const auto& d : run.diagnostics) summary.max_iterations = std::max(summary.max_iterations, d.iterations);
    study.runs.push_back(summary);

    const TraceSequence run_int = integrated_traces(run.traces, scheme, grid);
    const int ratio = config.reference_steps / n_steps;
    RateRow proxy{grid.step(), 0.0, 0.0, 0.0};
    RateRow coeff{grid.step(), 0.0, 0.0, 0.0};
    for (int k = 0; k <= n_steps; ++k) {
      const auto& a = run_int[static_cast<std::size_t>(k)];
      const auto& b = ref_int[static_cast<std::size_t>(k * ratio)];
      const Eigen::VectorXd dphi = a.phi - b.phi;
      const Eigen::VectorXd dpsi = a.psi - b.psi;
      proxy.err_phi = std::max(proxy.err_phi, backend.norm_x(dphi));
      proxy.err_psi = std::max(proxy.err_psi, backend.norm_y(dpsi));
      coeff.err_phi = std::max(coeff.err_phi, dphi.norm());
      coeff.err_psi = std::max(coeff.err_psi, dpsi.norm());
    }
    study.rates.rows.push_back(proxy);
    study.coefficient_rates.rows.push_back(coeff);
  }
  fill_orders(study.rates);
  fill_orders(study.coefficient_rates);
  study.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return study;
}

// ---------------------------------------------------------------- coercivity

double coercivity_form(const MatrixConvolution& weights, double dt, const TraceSequence& seq) {
  if (weights.dim_x() != 1 || weights.dim_y() != 1) throw DimensionMismatch("coercivity form needs scalar weights");
  if (static_cast<int>(seq.size()) > weights.weight_count()) throw DimensionMismatch("sequence longer than the weights");
  const double rho2 = std::exp(-2.0 * dt);
  double total = 0.0;
  double scale = 1.0;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd by = Eigen::VectorXd::Zero(1);
    for (std::size_t j = 0; j <= n; ++j) weights.apply_add(static_cast<int>(j), seq[n - j], bx, by);
    total += scale * (bx[0] * seq[n].phi[0] + by[0] * seq[n].psi[0]);
    scale *= rho2;
  }
  return dt * total;
}

double coercivity_probe(double dt, int steps, int trials, std::uint64_t seed, const MultistepScheme& scheme) {
  if (!(dt > 0.0)) throw ConfigError("probe step must be positive");
  if (steps < 0 || trials < 1) throw ConfigError("probe needs N >= 0 and at least one trial");
  const TimeGrid grid(dt * std::max(steps, 1), std::max(steps, 1));
  const ModalBackend modal;
  const auto system = modal.discretize(scheme, grid, Problem::exterior);
  const auto& weights = static_cast<const MatrixConvolution&>(*system);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double minimum = std::numeric_limits<double>::infinity();
  TraceSequence seq(static_cast<std::size_t>(steps + 1));
  for (int t = 0; t < trials; ++t) {
    for (auto& xi : seq) {
      const double a = normal(rng);
      const double b = normal(rng);
      xi = {Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, b)};
    }
    minimum = std::min(minimum, coercivity_form(weights, dt, seq));
  }
  return minimum;
}

// ---------------------------------------------------------------- experiments

std::vector<std::string> experiment_names() { return {"ex61", "ex62", "ex63", "ex64"}; }

RunConfig experiment_config(const std::string& name, const std::string& scheme) {
  RunConfig c;
  c.name = name;
  c.scheme = scheme;
  c.reference_scheme = "bdf2";
  if (name == "ex61") {
    c.backend = "modal";
    c.problem = Problem::exterior;
    c.final_time = 3.0;
    c.steps = {64, 128, 256, 512};
    c.reference_steps = 4096;
    c.wave.kind = "spatially_constant";
    c.wave.amplitude = -2.0;
    c.wave.width = 10.0;
    c.wave.offset = std::numbers::pi / 2.0;
    c.g_linear_coeff = 0.5;
    c.g_quadratic_coeff = 1.0;
  } else if (name == "ex62") {
    c.backend = "bem3d";
    c.problem = Problem::exterior;
    c.final_time = 4.0;
    c.steps = {16, 32, 64};
    c.reference_steps = 128;
    c.mesh.kind = "cube";
    c.mesh.divisions = 6;
    c.degree = 0;
    c.quadrature_order = 3;
    c.wave.kind = "plane_wave";
    c.wave.amplitude = 1.0;
    c.wave.width = 8.0;
    c.wave.offset = -2.5;
    c.wave.direction = {1.0, -1.0, 0.0};
    c.g_linear_coeff = 0.5;
    c.g_quadratic_coeff = 1.0;
  } else if (name == "ex63") {
    c.backend = "bem3d";
    c.problem = Problem::exterior;
    c.final_time = 4.0;
    c.steps = {16, 32, 64};
    c.reference_steps = 128;
    c.mesh.kind = "file";
    c.degree = 0;
    c.quadrature_order = 3;
    c.wave.kind = "modulated_gaussian";
    c.wave.amplitude = -1.0;
    c.wave.omega = std::numbers::pi / 2.0;
    c.wave.sigma = 0.5;
    c.wave.offset = 2.5;
    c.wave.direction = std::sqrt(4.0 / 5.0) * Eigen::Vector3d(1.0, 0.5, 0.0);
    c.g_linear_coeff = 1.0;
    c.g_quadratic_coeff = 1.0;
  } else if (name == "ex64") {
    c.backend = "modal";
    c.problem = Problem::interior;
    c.final_time = 4.0;
    c.steps = {64, 128, 256, 512};
    c.reference_steps = 4096;
    c.wave.kind = "modulated_gaussian";
    c.wave.amplitude = 1.0;
    c.wave.omega = 4.0 * std::numbers::pi;
    c.wave.sigma = 0.5;
    c.wave.offset = 2.0;
    c.wave.direction = Eigen::Vector3d::Zero();
    c.g_linear_coeff = 0.25;
    c.g_quadratic_coeff = 1.0;
  } else {
    throw ConfigError("unknown experiment '" + name + "' (expected ex61, ex62, ex63 or ex64)");
  }
  (void)MultistepScheme::from_name(scheme);
  return c;
}

std::vector<StudyResult> run_experiment(const std::string& name, const ExperimentOptions& options) {
  std::vector<RunConfig> configs;
  if (name == "ex61") {
    for (const char* scheme : {"bdf1", "bdf2"}) {
      RunConfig c = experiment_config(name, scheme);
      c.name = name + "_" + scheme;
      configs.push_back(c);
    }
  } else {
    configs.push_back(experiment_config(name));
  }
  for (auto& c : configs) {
    c.output = options.output;
    if (c.mesh.kind == "file") {
      if (!options.mesh) {
        throw ConfigError(name + " needs a surface mesh of the scatterer: pass --mesh <file.off|file.msh>");
      }
      c.mesh.path = *options.mesh;
    }
  }
  configs.front().validate();
  const auto backend = make_backend(configs.front());
  std::vector<StudyResult> results;
  std::filesystem::create_directories(options.output);
  for (const auto& c : configs) {
    results.push_back(convergence_study(c, *backend, options.log));
    write_study(options.output, results.back(), *backend, c);
  }
  return results;
}

// ---------------------------------------------------------------- output

void write_rates_csv(std::ostream& out, const RateTable& table) {
  out << "dt,err_phi,err_psi,order\n";
  out << std::setprecision(17);
  for (const auto& row : table.rows) {
    out << row.dt << ',' << row.err_phi << ',' << row.err_psi << ',';
    if (std::isnan(row.order)) {
      out << "nan";
    } else {
      out << row.order;
    }
    out << '\n';
  }
}

void write_traces_csv(std::ostream& out, const Backend& backend, const TimeGrid& grid, const TraceSequence& traces) {
  out << "t,phi,psi\n";
  out << std::setprecision(17);
  for (std::size_t n = 0; n < traces.size(); ++n) {
    out << grid.time(static_cast<int>(n)) << ',' << backend.mean_x(traces[n].phi) << ','
        << backend.mean_y(traces[n].psi) << '\n';
  }
}

void write_diagnostics(std::ostream& out, const MarchResult& result) {
  out << "# n, t_n, newton_iters, final_increment\n";
  for (const auto& d : result.diagnostics) {
    out << d.step << ", " << d.time << ", " << d.iterations << ", " << d.increment << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_study(const std::filesystem::path& directory, const StudyResult& study, const Backend& backend,
                 const RunConfig& config) {
  std::filesystem::create_directories(directory);
  {
    auto out = open_output(directory / (study.name + "_rates.csv"));
    write_rates_csv(out, study.rates);
  }
  {
    auto out = open_output(directory / (study.name + "_rates_coeff.csv"));
    write_rates_csv(out, study.coefficient_rates);
  }
  {
    auto out = open_output(directory / (study.name + "_traces.csv"));
    write_traces_csv(out, backend, TimeGrid(config.final_time, config.reference_steps), study.reference.traces);
  }
}

}  // namespace nlcq
