#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nlcq {

/// Boundary nonlinearity g in d_n u = g(du/dt).
///
/// The built-in family is g(mu) = a mu + b |mu| mu with a, b >= 0; it is
/// strictly monotone with constant beta = a. Other functions may be supplied
/// together with their derivative and must pass validate_impedance.
class Impedance {
 public:
  using Function = std::function<double(double)>;

  static Impedance power_law(double linear_coeff, double quadratic_coeff);
  static Impedance custom(std::string name, Function g, Function g_prime, double beta,
                          double growth_exponent = 1.0);

  double operator()(double mu) const { return g_(mu); }
  double value(double mu) const { return g_(mu); }
  double derivative(double mu) const { return dg_(mu); }

  double beta() const noexcept { return beta_; }
  double growth_exponent() const noexcept { return growth_; }
  bool is_builtin() const noexcept { return builtin_; }
  bool is_linear() const noexcept { return builtin_ && quadratic_ == 0.0; }
  double linear_coeff() const noexcept { return linear_; }
  double quadratic_coeff() const noexcept { return quadratic_; }
  const std::string& name() const noexcept { return name_; }

 private:
  Impedance() = default;
  std::string name_;
  Function g_;
  Function dg_;
  double linear_ = 0.0;
  double quadratic_ = 0.0;
  double beta_ = 0.0;
  double growth_ = 1.0;
  bool builtin_ = false;
};

double g_eval(const Impedance& imp, double mu);
double g_prime(const Impedance& imp, double mu);

struct ImpedanceCheck {
  std::string condition;
  bool passed = true;
  std::string detail;
};

struct ImpedanceReport {
  std::vector<ImpedanceCheck> checks;

  bool passed() const;
  /// Empty when everything passed.
  std::string failures() const;
  const ImpedanceCheck* find(const std::string& condition) const;
};

/// Checks g(0) = 0, g(mu) mu >= 0, g' >= 0, the derivative against a central
/// difference of g, and (when beta > 0) strict monotonicity pairwise on the grid.
ImpedanceReport validate_impedance(const Impedance& imp, std::span<const double> grid);

/// 201 points on [-10, 10].
std::vector<double> default_validation_grid();

}  // namespace nlcq
