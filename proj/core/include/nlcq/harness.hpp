#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlcq/backends.hpp"
#include "nlcq/cq.hpp"
#include "nlcq/impedance.hpp"
#include "nlcq/incident_wave.hpp"
#include "nlcq/march.hpp"

namespace nlcq {

struct MeshSpec {
  std::string kind = "icosphere";  // icosphere | cube | file
  int subdivisions = 2;
  int divisions = 4;
  std::filesystem::path path;
};

struct WaveSpec {
  std::string kind;  // spatially_constant | plane_wave | modulated_gaussian
  double amplitude = 0.0;
  double width = 0.0;  // A of the Gaussian exp(-A z^2)
  double sigma = 0.0;
  double omega = 0.0;
  double offset = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();

  IncidentWave build() const;
};

struct RunConfig {
  std::string name = "run";
  std::string backend = "modal";  // modal | bem3d
  Problem problem = Problem::exterior;
  std::string scheme = "bdf2";
  double final_time = 0.0;
  std::vector<int> steps;
  std::string reference_scheme = "bdf2";
  int reference_steps = 0;
  MeshSpec mesh;
  int degree = 0;
  int quadrature_order = 3;
  WaveSpec wave;
  double g_linear_coeff = 0.0;
  double g_quadratic_coeff = 0.0;
  NewtonConfig newton;
  std::filesystem::path output = ".";

  Impedance impedance() const { return Impedance::power_law(g_linear_coeff, g_quadratic_coeff); }
  /// Throws ConfigError describing the first violated rule.
  void validate() const;
};

/// Parses a JSON run description. Wave and impedance have no defaults.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& config);

/// Backend described by the config (meshes are generated or loaded here).
std::unique_ptr<Backend> make_backend(const RunConfig& config);

struct RateRow {
  double dt = 0.0;
  double err_phi = 0.0;
  double err_psi = 0.0;
  double order = 0.0;  // NaN in the first row
};

struct RateTable {
  std::vector<RateRow> rows;

  /// Least-squares slope of log(error) against log(dt) over the last three
  /// refinements, error = sqrt(err_phi^2 + err_psi^2).
  double fitted_order() const;
  /// Errors strictly decrease with dt.
  bool monotone() const;
};

/// Observed orders log(e_{i-1} / e_i) / log(dt_{i-1} / dt_i) of the combined error.
void fill_orders(RateTable& table);

struct RunSummary {
  int steps = 0;
  double median_iterations = 0.0;
  int max_iterations = 0;
};

struct StudyResult {
  std::string name;
  /// Mass-weighted norms.
  RateTable rates;
  /// Plain Euclidean coefficient norms.
  RateTable coefficient_rates;
  std::vector<RunSummary> runs;
  MarchResult reference;
  double seconds = 0.0;
};

/// Runs every N of the config plus the reference and measures the maximum
/// over common time points of the integrated-trace errors.
StudyResult convergence_study(const RunConfig& config, std::ostream* log = nullptr);
/// Same, reusing an existing backend.
StudyResult convergence_study(const RunConfig& config, const Backend& backend, std::ostream* log = nullptr);

/// Delta t sum_n rho^{2n} Re <[B_imp(d^dt) Xi]^n, Xi^n>, rho = e^{-dt}, for a
/// scalar trace sequence (modal weights).
double coercivity_form(const MatrixConvolution& weights, double dt, const TraceSequence& seq);

/// Minimum of coercivity_form over `trials` sequences of N+1 standard normal
/// pairs (N steps of size dt).
double coercivity_probe(double dt, int steps, int trials, std::uint64_t seed,
                        const MultistepScheme& scheme = MultistepScheme::bdf2());

/// Bundled parameter sets: ex61, ex62, ex63, ex64. The scheme defaults to BDF2.
RunConfig experiment_config(const std::string& name, const std::string& scheme = "bdf2");
std::vector<std::string> experiment_names();

struct ExperimentOptions {
  std::optional<std::filesystem::path> mesh;
  std::filesystem::path output = ".";
  std::ostream* log = nullptr;
};

/// Runs the experiment's convergence studies (ex61: BDF1 and BDF2) and writes
/// their CSV files into options.output.
std::vector<StudyResult> run_experiment(const std::string& name, const ExperimentOptions& options);

void write_rates_csv(std::ostream& out, const RateTable& table);
/// t, mean phi, mean psi for every step.
void write_traces_csv(std::ostream& out, const Backend& backend, const TimeGrid& grid, const TraceSequence& traces);
void write_diagnostics(std::ostream& out, const MarchResult& result);

/// Writes <name>_rates.csv, <name>_rates_coeff.csv and <name>_traces.csv (reference run).
void write_study(const std::filesystem::path& directory, const StudyResult& study, const Backend& backend,
                 const RunConfig& config);

}  // namespace nlcq
