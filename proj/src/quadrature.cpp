#include "cokrig/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>

#include "cokrig/errors.hpp"

namespace cokrig {

GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("a quadrature rule needs at least one node");
  // Boost returns the nonnegative zeros in increasing order.
  const auto order = static_cast<int>(n);
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);
  GaussLegendreRule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  auto weight = [order](double x) {
    const double dp = boost::math::legendre_p_prime<double>(order, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  if (n % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(weight(0.0));
  }
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return rule;
}

namespace {

const GaussLegendreRule& cached_rule(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

}  // namespace

double integrate_fixed(const std::function<double(double)>& f, double a, double b, const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * s;
}

double integrate_doubling(const std::function<double(double)>& f, double a, double b,
                          const IntegrationOptions& options) {
  std::size_t n = options.initial_nodes;
  double prev = integrate_fixed(f, a, b, cached_rule(n));
  while (n < options.max_nodes) {
    n *= 2;
    const double next = integrate_fixed(f, a, b, cached_rule(n));
    if (std::abs(next - prev) < options.tolerance) return next;
    prev = next;
  }
  std::ostringstream msg;
  msg << "Gauss-Legendre quadrature on [" << a << ", " << b << "] did not settle within " << options.max_nodes
      << " nodes";
  throw NumericError(msg.str());
}

}  // namespace cokrig
