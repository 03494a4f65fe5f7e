#include "nlcq/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "nlcq/errors.hpp"

namespace nlcq {

GaussRule gauss_legendre(int points) {
  if (points < 1) throw ConfigError("Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
    rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  return rule;
}

TriangleRule triangle_rule(int order) {
  if (order < 0) throw ConfigError("triangle rule order must be non-negative");
  // u carries one extra power from the Duffy Jacobian.
  return collapsed_gauss((order + 3) / 2);
}

TriangleRule collapsed_gauss(int points) {
  const auto g = gauss_legendre(points);
  TriangleRule rule;
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) {
      const double u = g.nodes[static_cast<std::size_t>(i)];
      const double v = g.nodes[static_cast<std::size_t>(j)];
      rule.barycentric.emplace_back(1.0 - u, u * (1.0 - v), u * v);
      rule.weights.push_back(2.0 * u * g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)]);
    }
  }
  return rule;
}

namespace {

// Reference triangle {0 <= x2 <= x1 <= 1}, parametrised as
// A + x1 (B - A) + x2 (C - B).
Eigen::Vector3d barycentric(double x1, double x2) { return {1.0 - x1, x1 - x2, x2}; }

}  // namespace

std::vector<PairNode> sauter_schwab_rule(PairKind kind, int points) {
  if (kind == PairKind::regular) throw ConfigError("Sauter-Schwab rules only cover touching pairs");
  const auto g = gauss_legendre(points);
  std::vector<PairNode> nodes;
  auto push = [&](double w, double x1, double x2, double y1, double y2) {
    // reference measure is 1/4; normalise to one
    nodes.push_back({barycentric(x1, x2), barycentric(y1, y2), 4.0 * w});
  };
  const auto n = static_cast<std::size_t>(points);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t d = 0; d < n; ++d) {
          const double xi = g.nodes[a];
          const double e1 = g.nodes[b];
          const double e2 = g.nodes[c];
          const double e3 = g.nodes[d];
          const double w4 = g.weights[a] * g.weights[b] * g.weights[c] * g.weights[d];
          const double xi3 = xi * xi * xi;
          switch (kind) {
            case PairKind::identical: {
              const double w = w4 * xi3 * e1 * e1 * e2;
              push(w, xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1));
              push(w, xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2));
              push(w, xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2));
              push(w, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3));
              push(w, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2));
              push(w, xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3));
              break;
            }
            case PairKind::edge: {
              const double w0 = w4 * xi3 * e1 * e1;
              const double w = w0 * e2;
              push(w0, xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2));
              push(w, xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3));
              push(w, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3);
              push(w, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1);
              push(w, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2);
              break;
            }
            case PairKind::vertex: {
              const double w = w4 * xi3 * e2;
              push(w, xi, xi * e1, xi * e2, xi * e2 * e3);
              push(w, xi * e2, xi * e2 * e3, xi, xi * e1);
              break;
            }
            case PairKind::regular:
              break;
          }
        }
      }
    }
  }
  return nodes;
}

}  // namespace nlcq
