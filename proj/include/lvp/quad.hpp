#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lvp::quad {

using Fn = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double abserr = 0.0;
};

/// Thrown when an adaptive rule cannot reach its tolerance. Carries the
/// best value and the error the rule did achieve.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, Result achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  [[nodiscard]] Result achieved() const { return achieved_; }

 private:
  Result achieved_;
};

// Adaptive Gauss-Kronrod with endpoint-singularity extrapolation on [a, b].
Result qags(const Fn& f, double a, double b, double epsabs, double epsrel,
            std::size_t limit = 2000);
// Semi-infinite [a, inf).
Result qagiu(const Fn& f, double a, double epsabs, double epsrel,
             std::size_t limit = 2000);
// int_a^b f(u) cos(omega u) du
Result qawo_cos(const Fn& f, double a, double b, double omega, double epsabs,
                double epsrel, std::size_t limit = 2000);
// int_a^inf f(u) cos(omega u) du, f decaying
Result qawf_cos(const Fn& f, double a, double omega, double epsabs,
                std::size_t limit = 2000);

// Breakpoints split [a, b] into pieces integrated separately with qags.
Result qags_pieces(const Fn& f, const std::vector<double>& breaks,
                   double epsabs, double epsrel);

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights on [0, 1] for the weight r^(a) (1 - r)^(b), a, b > -1.
Rule gauss_jacobi01(int n, double a, double b);
// Plain Gauss-Legendre on [lo, hi].
Rule gauss_legendre(int n, double lo, double hi);

}  // namespace lvp::quad
