#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace treespde {

// Gauss-Legendre nodes and weights on [0,1], computed by Newton iteration on
// the Legendre polynomial with the classical Chebyshev initial guesses.
class GaussLegendre {
public:
  explicit GaussLegendre(int n) {
    if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
    nodes_.resize(n);
    weights_.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        // Recurrence for P_n(x) and P_n'(x).
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      // Map the root from [-1,1] to [0,1]; node order ascending in x.
      nodes_[n - 1 - i] = 0.5 * (x + 1.0);
      weights_[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace treespde
