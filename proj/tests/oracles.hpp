#pragma once

// Brute-force references computed from the textbook matrix formulas with no
// shortcuts from the library.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline std::vector<double> random_gaps(std::mt19937_64& rng, std::size_t intervals, double min_share = 0.02) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> g(intervals);
  double total = 0.0;
  for (double& x : g) {
    x = min_share + u(rng);
    total += x;
  }
  for (double& x : g) x /= total;
  return g;
}

inline std::vector<double> points_from_gaps(const std::vector<double>& gaps, double start = 0.0) {
  std::vector<double> x{start};
  for (double d : gaps) x.push_back(x.back() + d);
  return x;
}

inline Eigen::MatrixXd exp_corr(const std::vector<double>& x, double theta) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = std::exp(-theta * std::abs(x[i] - x[j]));
  return p;
}

inline Eigen::VectorXd exp_corr_vec(const std::vector<double>& x, double theta, double x0) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = std::exp(-theta * std::abs(x[i] - x0));
  return v;
}

inline Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& m) { return m.fullPivLu().inverse(); }

// sigma11 (1 - r'P^{-1}r) and the ordinary extra term (1 - 1'P^{-1}r)^2 / 1'P^{-1}1.
inline double mspe_simple(const std::vector<double>& x, double theta, double sigma11, double x0) {
  const Eigen::MatrixXd p = exp_corr(x, theta);
  const Eigen::VectorXd r = exp_corr_vec(x, theta, x0);
  return sigma11 * (1.0 - r.dot(p.fullPivLu().solve(r)));
}

inline double mspe_ordinary(const std::vector<double>& x, double theta, double sigma11, double x0) {
  const Eigen::MatrixXd p = exp_corr(x, theta);
  const Eigen::VectorXd r = exp_corr_vec(x, theta, x0);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(r.size());
  const auto lu = p.fullPivLu();
  const double q = 1.0 - one.dot(lu.solve(r));
  return sigma11 * (1.0 - r.dot(lu.solve(r)) + q * q / one.dot(lu.solve(one)));
}

// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Simpson in each interval with Richardson extrapolation of two panel counts.
inline double piecewise_integral(const std::vector<double>& x, const std::function<double(double)>& f, int panels = 400) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double coarse = simpson(f, x[i], x[i + 1], panels);
    const double fine = simpson(f, x[i], x[i + 1], 2 * panels);
    total += fine + (fine - coarse) / 15.0;
  }
  return total;
}

}  // namespace oracle
