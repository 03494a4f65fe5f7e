#include "nlcq/errors.hpp"

#include <sstream>

namespace nlcq {

namespace {

std::string describe(std::complex<double> s) {
  std::ostringstream os;
  os << "(" << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "i)";
  return os.str();
}

}  // namespace

FrequencyDomainError::FrequencyDomainError(std::complex<double> s)
    : std::domain_error("frequency s = " + describe(s) + " is not in Re s > 0"), s_(s) {}

KernelEvaluationError::KernelEvaluationError(std::complex<double> s, const std::string& what)
    : std::runtime_error("kernel evaluation failed at s = " + describe(s) + ": " + what), s_(s) {}

NewtonFailure::NewtonFailure(int step, int iterations, double increment)
    : std::runtime_error("Newton iteration did not converge at step " + std::to_string(step) +
                         " after " + std::to_string(iterations) +
                         " iterations (last increment " + std::to_string(increment) + ")"),
      step_(step),
      iterations_(iterations),
      increment_(increment) {}

}  // namespace nlcq
