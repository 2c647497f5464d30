#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cokrig {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

// Applies a fixed rule on [a, b].
double integrate_fixed(const std::function<double(double)>& f, double a, double b, const GaussLegendreRule& rule);

struct IntegrationOptions {
  std::size_t initial_nodes = 64;
  std::size_t max_nodes = 4096;
  double tolerance = 1e-9;  // absolute change between successive doublings
};

// Gauss-Legendre on [a, b], doubling the node count until two successive
// estimates agree; throws NumericError when max_nodes is exhausted.
double integrate_doubling(const std::function<double(double)>& f, double a, double b,
                          const IntegrationOptions& options = {});

}  // namespace cokrig
