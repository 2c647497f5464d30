#pragma once

// Exponential (Ornstein-Uhlenbeck) correlation algebra on one-dimensional
// sampling designs.  The correlation matrix P has entries exp(-theta|xi-xj|);
// its inverse is tridiagonal and every quadratic form used by the design
// criteria has a closed form in the gaps d_i = x_{i+1} - x_i.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cokrig {

// Smallest admissible theta * d_i.  Below this 1 - exp(-2 theta d) loses all
// significant digits and the precision matrix is garbage.
inline constexpr double kMinThetaGap = 1e-10;

// Ordered sampling design stored as a start point plus strictly positive gaps.
// Points are derived; x_end is x_start + sum(gaps) with the last point pinned
// to x_end so accumulated rounding never leaks into the interval length.
class Design {
 public:
  // Gaps are used as given; x_end = x_start + sum(gaps).
  explicit Design(std::vector<double> gaps, double x_start = 0.0);

  // Gaps must sum to x_end - x_start within 1e-12 relative; they are then
  // rescaled to match exactly.
  static Design on_interval(double x_start, double x_end, std::vector<double> gaps);

  // Strictly increasing points, at least two.
  static Design from_points(std::span<const double> points);

  std::size_t size() const { return gaps_.size() + 1; }
  std::size_t intervals() const { return gaps_.size(); }
  double x_start() const { return x_start_; }
  double x_end() const { return x_end_; }
  double length() const { return x_end_ - x_start_; }
  std::span<const double> gaps() const { return gaps_; }
  double gap(std::size_t i) const { return gaps_[i]; }
  double max_gap() const;
  const std::vector<double>& points() const { return points_; }
  double point(std::size_t i) const { return points_[i]; }

  // True when the design lives on [0, 1].
  bool is_normalized(double tol = 1e-12) const;

  // Same relative layout mapped onto [0, 1].
  Design normalized() const;

  friend bool operator==(const Design&, const Design&) = default;

 private:
  Design(double x_start, double x_end, std::vector<double> gaps);

  double x_start_ = 0.0;
  double x_end_ = 1.0;
  std::vector<double> gaps_;
  std::vector<double> points_;
};

// Position of a target point inside the design.
struct IntervalLocation {
  std::size_t index;  // interval [x_index, x_index+1]
  double offset;      // a = x0 - x_index, in [0, d_index]
};

// Throws ExtrapolationError when x0 lies outside [x_start, x_end].
IntervalLocation locate(const Design& design, double x0);

// Parameters of the primary variable's covariance sigma11 * exp(-theta |h|).
class ExponentialKernel {
 public:
  ExponentialKernel(double theta, double sigma11 = 1.0);

  double theta() const { return theta_; }
  double sigma11() const { return sigma11_; }
  double covariance(double h) const;

  // Kernel for the same process viewed on the unit interval after dividing
  // lengths by `length`.
  ExponentialKernel rescaled(double length) const { return {theta_ * length, sigma11_}; }

 private:
  double theta_;
  double sigma11_;
};

Eigen::MatrixXd corr_matrix(std::span<const double> points, double theta);
Eigen::MatrixXd corr_matrix(const Design& design, double theta);

struct LdlFactor {
  Eigen::MatrixXd unit_lower;  // L(i,j) = exp(-theta (x_i - x_j)), i >= j
  Eigen::VectorXd diagonal;    // 1, 1 - exp(-2 theta d_1), ...

  Eigen::MatrixXd reconstruct() const;
};

LdlFactor ldl_factor(const Design& design, double theta);

// Symmetric tridiagonal inverse of the correlation matrix.
struct TridiagonalPrecision {
  Eigen::VectorXd diagonal;
  Eigen::VectorXd off_diagonal;  // entry (i, i+1) and (i+1, i)

  std::size_t size() const { return static_cast<std::size_t>(diagonal.size()); }
  Eigen::MatrixXd dense() const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
  double bilinear(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
};

// Throws ConditioningError when theta * d_i < kMinThetaGap for some gap.
TridiagonalPrecision tridiagonal_precision(std::span<const double> points, double theta);
TridiagonalPrecision tridiagonal_precision(const Design& design, double theta);

Eigen::MatrixXd precision_matrix(std::span<const double> points, double theta);
Eigen::MatrixXd precision_matrix(const Design& design, double theta);

// log det P = sum_i log(1 - exp(-2 theta d_i)).
double log_det_corr(const Design& design, double theta);

// F(xi) = 1' P^{-1} 1 = 1 + sum_i tanh(theta d_i / 2).
double ones_quadratic_form(const Design& design, double theta);

struct QuadForms {
  double s_quad;      // sigma_P0' P^{-1} sigma_P0
  double ones_cross;  // 1' P^{-1} sigma_P0
};

// Closed forms of the two quadratic forms in the correlation vector
// sigma_P0 = (exp(-theta |x_i - x0|))_i.
QuadForms quad_forms_at(const Design& design, double theta, double x0);

// 1 - s_quad, evaluated as a product so it stays accurate near sampled points:
// (1 - e^{-2 theta a})(1 - e^{-2 theta (d - a)}) / (1 - e^{-2 theta d}).
double simple_variance_factor(double theta, double gap, double offset);

// 1 - ones_cross = 1 - (e^{-theta a} + e^{-theta (d - a)}) / (1 + e^{-theta d}).
double ones_cross_deficit(double theta, double gap, double offset);

// Correlation vector sigma_P0 for target x0.
Eigen::VectorXd corr_vector(const Design& design, double theta, double x0);

}  // namespace cokrig
