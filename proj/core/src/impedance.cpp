#include "nlcq/impedance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlcq/errors.hpp"

namespace nlcq {

Impedance Impedance::power_law(double linear_coeff, double quadratic_coeff) {
  if (!(linear_coeff >= 0.0) || !(quadratic_coeff >= 0.0) || !std::isfinite(linear_coeff) ||
      !std::isfinite(quadratic_coeff)) {
    throw ConfigError("impedance coefficients must be finite and non-negative");
  }
  Impedance imp;
  std::ostringstream name;
  name << linear_coeff << "*mu + " << quadratic_coeff << "*|mu|*mu";
  imp.name_ = name.str();
  imp.linear_ = linear_coeff;
  imp.quadratic_ = quadratic_coeff;
  imp.g_ = [a = linear_coeff, b = quadratic_coeff](double mu) { return a * mu + b * std::abs(mu) * mu; };
  imp.dg_ = [a = linear_coeff, b = quadratic_coeff](double mu) { return a + 2.0 * b * std::abs(mu); };
  imp.beta_ = linear_coeff;
  imp.growth_ = quadratic_coeff > 0.0 ? 2.0 : 1.0;
  imp.builtin_ = true;
  return imp;
}

Impedance Impedance::custom(std::string name, Function g, Function g_prime, double beta,
                            double growth_exponent) {
  if (!g || !g_prime) throw ConfigError("custom impedance needs both g and g'");
  Impedance imp;
  imp.name_ = std::move(name);
  imp.g_ = std::move(g);
  imp.dg_ = std::move(g_prime);
  imp.beta_ = beta;
  imp.growth_ = growth_exponent;
  return imp;
}

double g_eval(const Impedance& imp, double mu) { return imp.value(mu); }
double g_prime(const Impedance& imp, double mu) { return imp.derivative(mu); }

bool ImpedanceReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ImpedanceReport::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!out.empty()) out += "; ";
    out += c.condition + ": " + c.detail;
  }
  return out;
}

const ImpedanceCheck* ImpedanceReport::find(const std::string& condition) const {
  auto it = std::find_if(checks.begin(), checks.end(),
                         [&](const auto& c) { return c.condition == condition; });
  return it == checks.end() ? nullptr : &*it;
}

namespace {

std::string at(double mu) {
  std::ostringstream os;
  os << "violated at mu = " << mu;
  return os.str();
}

}  // namespace

ImpedanceReport validate_impedance(const Impedance& imp, std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("impedance validation grid is empty");
  ImpedanceReport report;

  ImpedanceCheck zero{"g(0) = 0", true, {}};
  if (std::abs(imp.value(0.0)) > 1e-14) {
    zero.passed = false;
    zero.detail = "g(0) = " + std::to_string(imp.value(0.0));
  }
  report.checks.push_back(zero);

  ImpedanceCheck sign{"g(mu) mu >= 0", true, {}};
  ImpedanceCheck slope{"g'(mu) >= 0", true, {}};
  ImpedanceCheck consistent{"g' matches central difference", true, {}};
  for (double mu : grid) {
    if (sign.passed && imp.value(mu) * mu < 0.0) {
      sign.passed = false;
      sign.detail = at(mu);
    }
    const double d = imp.derivative(mu);
    if (slope.passed && d < 0.0) {
      slope.passed = false;
      slope.detail = at(mu);
    }
    const double h = 1e-7 * std::max(1.0, std::abs(mu));
    const double fd = (imp.value(mu + h) - imp.value(mu - h)) / (2.0 * h);
    if (consistent.passed && std::abs(fd - d) > 1e-6 * std::max(1.0, std::abs(d))) {
      consistent.passed = false;
      consistent.detail = at(mu);
    }
  }
  report.checks.push_back(sign);
  report.checks.push_back(slope);
  report.checks.push_back(consistent);

  // Without a positive beta this reduces to plain monotonicity.
  ImpedanceCheck monotone{"strict monotonicity", true, {}};
  const double beta = std::max(imp.beta(), 0.0);
  for (std::size_t i = 0; i < grid.size() && monotone.passed; ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double lam = grid[i];
      const double mu = grid[j];
      const double lhs = (imp.value(lam) - imp.value(mu)) * (lam - mu);
      const double rhs = beta * (lam - mu) * (lam - mu);
      if (lhs < rhs - 1e-12 * std::max(1.0, std::abs(rhs))) {
        monotone.passed = false;
        std::ostringstream os;
        os << "violated for (lambda, mu) = (" << lam << ", " << mu << ") with beta = " << beta;
        monotone.detail = os.str();
        break;
      }
    }
  }
  report.checks.push_back(monotone);
  return report;
}

std::vector<double> default_validation_grid() {
  std::vector<double> grid(201);
  for (int i = 0; i <= 200; ++i) grid[static_cast<std::size_t>(i)] = -10.0 + 0.1 * i;
  grid[100] = 0.0;
  return grid;
}

}  // namespace nlcq
