#include <cmath>
#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <string>

#include "nlcq/errors.hpp"
#include "nlcq/harness.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitNewton = 2;
constexpr int kExitConfig = 3;
constexpr int kExitOther = 1;

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw nlcq::ConfigError("cannot write " + path.string());
  return out;
}

// Log goes to the file and, if verbose, is echoed to stderr as well.
class TeeBuf final : public std::streambuf {
 public:
  TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

 protected:
  int overflow(int c) override {
    if (c == traits_type::eof()) return traits_type::not_eof(c);
    const auto ch = traits_type::to_char_type(c);
    if (a_ != nullptr && a_->sputc(ch) == traits_type::eof()) return traits_type::eof();
    if (b_ != nullptr && b_->sputc(ch) == traits_type::eof()) return traits_type::eof();
    return c;
  }
  int sync() override {
    if (a_ != nullptr) a_->pubsync();
    if (b_ != nullptr) b_->pubsync();
    return 0;
  }

 private:
  std::streambuf* a_;
  std::streambuf* b_;
};

void print_rates(const nlcq::StudyResult& study) {
  std::cout << study.name << "  (" << std::fixed << std::setprecision(1) << study.seconds << " s)\n";
  std::cout << std::scientific << std::setprecision(4);
  for (const auto& row : study.rates.rows) {
    std::cout << "  dt=" << row.dt << "  err_phi=" << row.err_phi << "  err_psi=" << row.err_psi;
    if (!std::isnan(row.order)) std::cout << "  order=" << std::fixed << std::setprecision(3) << row.order << std::scientific << std::setprecision(4);
    std::cout << '\n';
  }
  std::cout << std::fixed << std::setprecision(3) << "  fitted order " << study.rates.fitted_order()
            << (study.rates.monotone() ? "" : "  (errors not monotone)") << '\n';
  std::cout.unsetf(std::ios::floatfield);
}

int run_solve(const fs::path& config_path, int steps_override, bool verbose) {
  nlcq::RunConfig config = nlcq::load_config(config_path);
  if (steps_override > 0) config.steps = {steps_override};
  // solve never runs the reference; keep its checks from rejecting the step count
  if (!config.steps.empty()) config.reference_steps = 4 * config.steps.back();
  config.validate();
  const int steps = config.steps.back();

  fs::create_directories(config.output);
  std::ofstream log_file = open_output(config.output / (config.name + "_diagnostics.log"));
  TeeBuf tee(log_file.rdbuf(), verbose ? std::cerr.rdbuf() : nullptr);
  std::ostream log(&tee);

  const auto backend = nlcq::make_backend(config);
  const nlcq::TimeGrid grid(config.final_time, steps);
  const auto scheme = nlcq::MultistepScheme::from_name(config.scheme);
  const auto result = nlcq::solve_marching(*backend, scheme, grid, config.wave.build(), config.impedance(),
                                           config.newton, config.problem, &log);
  std::ofstream traces = open_output(config.output / (config.name + "_traces.csv"));
  nlcq::write_traces_csv(traces, *backend, grid, result.traces);
  std::cout << config.name << ": " << steps << " steps, median Newton iterations " << result.median_iterations()
            << ", output in " << config.output.string() << '\n';
  return 0;
}

int run_study(const fs::path& config_path, bool verbose) {
  const nlcq::RunConfig config = nlcq::load_config(config_path);
  config.validate();
  fs::create_directories(config.output);
  std::ofstream log_file = open_output(config.output / (config.name + "_diagnostics.log"));
  TeeBuf tee(log_file.rdbuf(), verbose ? std::cerr.rdbuf() : nullptr);
  std::ostream log(&tee);

  const auto backend = nlcq::make_backend(config);
  const auto study = nlcq::convergence_study(config, *backend, &log);
  nlcq::write_study(config.output, study, *backend, config);
  print_rates(study);
  return 0;
}

int run_experiment(const std::string& name, const std::string& scheme, const std::string& mesh, const fs::path& out,
                   bool print_config, bool verbose) {
  if (print_config) {
    nlcq::RunConfig config = nlcq::experiment_config(name, scheme);
    if (!mesh.empty()) {
      config.mesh.kind = "file";
      config.mesh.path = mesh;
    }
    std::cout << nlcq::to_json(config) << '\n';
    return 0;
  }
  fs::create_directories(out);
  std::ofstream log_file = open_output(out / (name + "_diagnostics.log"));
  TeeBuf tee(log_file.rdbuf(), verbose ? std::cerr.rdbuf() : nullptr);
  std::ostream log(&tee);

  nlcq::ExperimentOptions options;
  if (!mesh.empty()) options.mesh = fs::path(mesh);
  options.output = out;
  options.log = &log;
  for (const auto& study : nlcq::run_experiment(name, options)) print_rates(study);
  return 0;
}

int run_probe(double dt, int steps, int trials, std::uint64_t seed, const std::string& scheme) {
  const double value = nlcq::coercivity_probe(dt, steps, trials, seed, nlcq::MultistepScheme::from_name(scheme));
  std::cout << std::setprecision(std::numeric_limits<double>::max_digits10) << value << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear impedance scattering with convolution quadrature"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Echo the per-step diagnostics to stderr");

  auto* solve = app.add_subcommand("solve", "Time-march one configuration and write its traces");
  std::string solve_config;
  int solve_steps = 0;
  solve->add_option("config", solve_config, "JSON run description")->required()->check(CLI::ExistingFile);
  solve->add_option("--steps", solve_steps, "Step count (default: largest N of the config)")->check(CLI::PositiveNumber);

  auto* study = app.add_subcommand("study", "Convergence study against a fine reference");
  std::string study_config;
  study->add_option("config", study_config, "JSON run description")->required()->check(CLI::ExistingFile);

  auto* experiment = app.add_subcommand("experiment", "Run a bundled experiment");
  std::string exp_name;
  std::string exp_mesh;
  std::string exp_scheme = "bdf2";
  std::string exp_out = ".";
  bool exp_print = false;
  experiment->add_option("name", exp_name, "Experiment name")->required()->check(CLI::IsMember(nlcq::experiment_names()));
  experiment->add_option("--mesh", exp_mesh, "Surface mesh file (.off or .msh)");
  experiment->add_option("--scheme", exp_scheme, "bdf1 or bdf2 (ex61 always runs both)")->check(CLI::IsMember({"bdf1", "bdf2"}));
  experiment->add_option("--out", exp_out, "Output directory");
  experiment->add_flag("--print-config", exp_print, "Print the bundled JSON configuration and exit");

  auto* probe = app.add_subcommand("probe-coercivity", "Minimum of the weighted quadratic form over random sequences");
  double dt = 1.0 / 16.0;
  int steps = 64;
  int trials = 500;
  std::uint64_t seed = 1;
  std::string probe_scheme = "bdf2";
  probe->add_option("--dt", dt, "Step size")->check(CLI::PositiveNumber);
  probe->add_option("--n", steps, "Number of steps")->check(CLI::NonNegativeNumber);
  probe->add_option("--trials", trials, "Random sequences")->check(CLI::PositiveNumber);
  probe->add_option("--seed", seed, "RNG seed");
  probe->add_option("--scheme", probe_scheme, "bdf1 or bdf2")->check(CLI::IsMember({"bdf1", "bdf2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return run_solve(solve_config, solve_steps, verbose);
    if (*study) return run_study(study_config, verbose);
    if (*experiment) return run_experiment(exp_name, exp_scheme, exp_mesh, exp_out, exp_print, verbose);
    if (*probe) return run_probe(dt, steps, trials, seed, probe_scheme);
  } catch (const nlcq::NewtonFailure& e) {
    std::cerr << "newton failure: " << e.what() << '\n';
    return kExitNewton;
  } catch (const nlcq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
