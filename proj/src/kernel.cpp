#include "cokrig/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

void check_theta(double theta) {
  if (!(std::isfinite(theta) && theta > 0.0)) {
    std::ostringstream msg;
    msg << "theta must be positive and finite, got " << theta;
    throw DomainError(msg.str());
  }
}

// 1 - exp(-x) for x >= 0 without cancellation.
double one_minus_exp_neg(double x) { return -std::expm1(-x); }

std::vector<double> gaps_of(std::span<const double> points) {
  std::vector<double> gaps;
  gaps.reserve(points.size() > 0 ? points.size() - 1 : 0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = points[i] - points[i - 1];
    if (!(d > 0.0)) throw DomainError("design points must be strictly increasing");
    gaps.push_back(d);
  }
  return gaps;
}

void check_gap_conditioning(std::span<const double> gaps, double theta) {
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (theta * gaps[i] < kMinThetaGap) {
      std::ostringstream msg;
      msg << "gap " << i << " too small for theta (theta*d = " << theta * gaps[i]
          << " < " << kMinThetaGap << ")";
      throw ConditioningError(msg.str());
    }
  }
}

}  // namespace

Design::Design(std::vector<double> gaps, double x_start)
    : Design(x_start, x_start + std::accumulate(gaps.begin(), gaps.end(), 0.0), gaps) {}

Design::Design(double x_start, double x_end, std::vector<double> gaps)
    : x_start_(x_start), x_end_(x_end), gaps_(std::move(gaps)) {
  if (gaps_.empty()) throw DomainError("a design needs at least two points");
  if (!std::isfinite(x_start_)) throw DomainError("design start must be finite");
  for (double d : gaps_) {
    if (!(std::isfinite(d) && d > 0.0))
      throw DomainError("design gaps must be strictly positive and finite");
  }
  if (!(x_end_ > x_start_)) throw DomainError("design interval must have positive length");
  points_.resize(gaps_.size() + 1);
  points_[0] = x_start_;
  for (std::size_t i = 0; i < gaps_.size(); ++i) points_[i + 1] = points_[i] + gaps_[i];
  points_.back() = x_end_;
}

Design Design::on_interval(double x_start, double x_end, std::vector<double> gaps) {
  if (!(x_end > x_start)) throw DomainError("design interval must have positive length");
  const double total = std::accumulate(gaps.begin(), gaps.end(), 0.0);
  const double length = x_end - x_start;
  if (!(std::abs(total - length) <= 1e-12 * std::max(1.0, length))) {
    std::ostringstream msg;
    msg << "gaps sum to " << total << " but the interval has length " << length;
    throw DomainError(msg.str());
  }
  for (double& d : gaps) d *= length / total;
  return Design(x_start, x_end, std::move(gaps));
}

Design Design::from_points(std::span<const double> points) {
  if (points.size() < 2) throw DomainError("a design needs at least two points");
  return Design(points.front(), points.back(), gaps_of(points));
}

double Design::max_gap() const { return *std::max_element(gaps_.begin(), gaps_.end()); }

bool Design::is_normalized(double tol) const {
  return std::abs(x_start_) <= tol && std::abs(x_end_ - 1.0) <= tol;
}

Design Design::normalized() const {
  if (x_start_ == 0.0 && x_end_ == 1.0) return *this;
  std::vector<double> unit(gaps_.size());
  const double len = length();
  std::transform(gaps_.begin(), gaps_.end(), unit.begin(), [len](double d) { return d / len; });
  return Design(0.0, 1.0, std::move(unit));
}

IntervalLocation locate(const Design& design, double x0) {
  const double slack = 1e-12 * std::max(1.0, design.length());
  if (!std::isfinite(x0) || x0 < design.x_start() - slack || x0 > design.x_end() + slack) {
    std::ostringstream msg;
    msg << "x0 = " << x0 << " outside the design interval [" << design.x_start() << ", "
        << design.x_end() << "]";
    throw ExtrapolationError(msg.str());
  }
  const auto& pts = design.points();
  // Last interval whose left end is <= x0.
  auto it = std::upper_bound(pts.begin(), pts.end(), x0);
  std::size_t idx = it == pts.begin() ? 0 : static_cast<std::size_t>(it - pts.begin()) - 1;
  idx = std::min(idx, design.intervals() - 1);
  const double offset = std::clamp(x0 - pts[idx], 0.0, design.gap(idx));
  return {idx, offset};
}

ExponentialKernel::ExponentialKernel(double theta, double sigma11) : theta_(theta), sigma11_(sigma11) {
  check_theta(theta);
  if (!(std::isfinite(sigma11) && sigma11 > 0.0))
    throw DomainError("sigma11 must be positive and finite");
}

double ExponentialKernel::covariance(double h) const { return sigma11_ * std::exp(-theta_ * std::abs(h)); }

Eigen::MatrixXd corr_matrix(std::span<const double> points, double theta) {
  check_theta(theta);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      p(i, j) = p(j, i) = std::exp(-theta * std::abs(points[i] - points[j]));
    }
  }
  return p;
}

Eigen::MatrixXd corr_matrix(const Design& design, double theta) { return corr_matrix(design.points(), theta); }

Eigen::MatrixXd LdlFactor::reconstruct() const {
  return unit_lower * diagonal.asDiagonal() * unit_lower.transpose();
}

LdlFactor ldl_factor(const Design& design, double theta) {
  check_theta(theta);
  const auto n = static_cast<Eigen::Index>(design.size());
  const auto& x = design.points();
  LdlFactor f{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) f.unit_lower(i, j) = std::exp(-theta * (x[i] - x[j]));
  }
  f.diagonal(0) = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) f.diagonal(i) = one_minus_exp_neg(2.0 * theta * design.gap(i - 1));
  return f;
}

Eigen::MatrixXd TridiagonalPrecision::dense() const {
  const auto n = diagonal.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diagonal(i);
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off_diagonal(i);
  }
  return m;
}

Eigen::VectorXd TridiagonalPrecision::multiply(const Eigen::VectorXd& v) const {
  const auto n = diagonal.size();
  Eigen::VectorXd out = diagonal.cwiseProduct(v);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out(i) += off_diagonal(i) * v(i + 1);
    out(i + 1) += off_diagonal(i) * v(i);
  }
  return out;
}

double TridiagonalPrecision::bilinear(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return u.dot(multiply(v));
}

// P = L D L' with L^{-1} unit lower bidiagonal (subdiagonal -e^{-theta d_i}),
// so P^{-1} = L^{-T} D^{-1} L^{-1} is tridiagonal.
TridiagonalPrecision tridiagonal_precision(std::span<const double> points, double theta) {
  check_theta(theta);
  const std::size_t n = points.size();
  if (n == 0) throw DomainError("empty point set");
  const std::vector<double> gaps = gaps_of(points);
  check_gap_conditioning(gaps, theta);

  TridiagonalPrecision q{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                         Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n > 0 ? n - 1 : 0))};
  q.diagonal(0) = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double r = std::exp(-theta * gaps[i]);
    const double denom = one_minus_exp_neg(2.0 * theta * gaps[i]);
    const auto k = static_cast<Eigen::Index>(i);
    q.diagonal(k) += r * r / denom;
    q.diagonal(k + 1) += 1.0 / denom;
    q.off_diagonal(k) = -r / denom;
  }
  // Corners end up as 1/(1-r^2); interior entries 1/(1-r_{i-1}^2) + r_i^2/(1-r_i^2).
  return q;
}

TridiagonalPrecision tridiagonal_precision(const Design& design, double theta) {
  return tridiagonal_precision(design.points(), theta);
}

Eigen::MatrixXd precision_matrix(std::span<const double> points, double theta) {
  return tridiagonal_precision(points, theta).dense();
}

Eigen::MatrixXd precision_matrix(const Design& design, double theta) {
  return tridiagonal_precision(design, theta).dense();
}

double log_det_corr(const Design& design, double theta) {
  check_theta(theta);
  check_gap_conditioning(design.gaps(), theta);
  double s = 0.0;
  for (double d : design.gaps()) s += std::log(one_minus_exp_neg(2.0 * theta * d));
  return s;
}

double ones_quadratic_form(const Design& design, double theta) {
  check_theta(theta);
  double f = 1.0;
  for (double d : design.gaps()) f += std::tanh(0.5 * theta * d);
  return f;
}

double simple_variance_factor(double theta, double gap, double offset) {
  const double num = one_minus_exp_neg(2.0 * theta * offset) * one_minus_exp_neg(2.0 * theta * (gap - offset));
  return num / one_minus_exp_neg(2.0 * theta * gap);
}

// 1 + e^{-theta d} - e^{-theta a} - e^{-theta (d-a)} factors as
// (1 - e^{-theta a})(1 - e^{-theta (d-a)}).
double ones_cross_deficit(double theta, double gap, double offset) {
  const double num = one_minus_exp_neg(theta * offset) * one_minus_exp_neg(theta * (gap - offset));
  return num / (1.0 + std::exp(-theta * gap));
}

QuadForms quad_forms_at(const Design& design, double theta, double x0) {
  check_theta(theta);
  const auto [i, a] = locate(design, x0);
  const double d = design.gap(i);
  check_gap_conditioning(std::span<const double>(&d, 1), theta);
  const double s_quad =
      (std::exp(-2.0 * theta * a) - 2.0 * std::exp(-2.0 * theta * d) + std::exp(-2.0 * theta * (d - a))) /
      one_minus_exp_neg(2.0 * theta * d);
  const double ones_cross = (std::exp(-theta * a) + std::exp(-theta * (d - a))) / (1.0 + std::exp(-theta * d));
  return {s_quad, ones_cross};
}

Eigen::VectorXd corr_vector(const Design& design, double theta, double x0) {
  check_theta(theta);
  locate(design, x0);
  const auto& x = design.points();
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = std::exp(-theta * std::abs(x[i] - x0));
  return v;
}

}  // namespace cokrig
