#include "cokrig/predict.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

void check_length(const Eigen::VectorXd& v, std::size_t n, const char* name) {
  if (static_cast<std::size_t>(v.size()) != n) {
    std::ostringstream msg;
    msg << name << " has " << v.size() << " entries but the design has " << n << " points";
    throw DomainError(msg.str());
  }
}

// Cholesky with a relative pivot floor; a failed or collapsing pivot means the
// covariance is numerically singular.
Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw ConditioningError("covariance matrix is not positive definite");
  const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
  const double scale = sigma.diagonal().maxCoeff();
  if (pivots.minCoeff() < 1e-14 * scale) {
    std::ostringstream msg;
    msg << "covariance matrix is numerically singular (pivot ratio " << pivots.minCoeff() / scale << ")";
    throw ConditioningError(msg.str());
  }
  return llt;
}

PredictionResult dense_simple(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& sigma0, double sigma00,
                              const Eigen::VectorXd& z) {
  const auto llt = factor(sigma);
  PredictionResult r;
  r.weights = llt.solve(sigma0);
  r.value = r.weights.dot(z);
  r.mspe = std::max(0.0, sigma00 - sigma0.dot(r.weights));
  return r;
}

PredictionResult dense_ordinary(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& f, const Eigen::VectorXd& f0,
                                const Eigen::VectorXd& sigma0, double sigma00, const Eigen::VectorXd& z) {
  const auto llt = factor(sigma);
  const Eigen::VectorXd s_inv_sigma0 = llt.solve(sigma0);
  const Eigen::MatrixXd s_inv_f = llt.solve(f);
  const Eigen::MatrixXd gls = f.transpose() * s_inv_f;
  Eigen::LLT<Eigen::MatrixXd> gls_llt(gls);
  if (gls_llt.info() != Eigen::Success) throw ConditioningError("drift normal matrix F' S^-1 F is singular");
  const Eigen::VectorXd resid = f0 - f.transpose() * s_inv_sigma0;
  const Eigen::VectorXd mult = gls_llt.solve(resid);
  PredictionResult r;
  r.weights = s_inv_sigma0 + s_inv_f * mult;
  r.value = r.weights.dot(z);
  r.mspe = std::max(0.0, sigma00 - sigma0.dot(s_inv_sigma0) + resid.dot(mult));
  return r;
}

Eigen::MatrixXd primary_matrix(double sigma11, const Correlogram& c, const Design& design) {
  const auto n = static_cast<Eigen::Index>(design.size());
  const auto& x = design.points();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = sigma11 * c(x[i] - x[j]);
  }
  return m;
}

Eigen::VectorXd primary_vector(double sigma11, const Correlogram& c, const Design& design, double x0) {
  locate(design, x0);
  const auto& x = design.points();
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = sigma11 * c(x[i] - x0);
  return v;
}

struct NeighbourWeights {
  std::size_t left;
  double w_left;
  double w_right;
};

// P^{-1} sigma_P0 for the exponential kernel: only the two points bracketing
// x0 get weight, sinh(theta (d - a)) / sinh(theta d) and sinh(theta a) / sinh(theta d).
NeighbourWeights neighbour_weights(const Design& design, double theta, double x0) {
  const auto [i, a] = locate(design, x0);
  const double d = design.gap(i);
  if (theta * d < kMinThetaGap) throw ConditioningError("gap too small for theta");
  const double denom = -std::expm1(-2.0 * theta * d);
  const double wl = std::exp(-theta * a) * -std::expm1(-2.0 * theta * (d - a)) / denom;
  const double wr = std::exp(-theta * (d - a)) * -std::expm1(-2.0 * theta * a) / denom;
  return {i, wl, wr};
}

}  // namespace

const char* to_string(Model model) { return model == Model::simple ? "simple" : "ordinary"; }

PredictionResult simple_cokrige(const BivariateCovarianceSpec& spec, const Design& design,
                                const ObservationVector& obs, double x0) {
  const std::size_t n = design.size();
  check_length(obs.z1, n, "z1");
  check_length(obs.z2, n, "z2");
  const Eigen::MatrixXd sigma = build_joint_covariance(spec, design);
  const CrossCovariance cross = build_cross_vector(spec, design, x0);
  Eigen::VectorXd z(2 * n);
  z << obs.z1, obs.z2;
  return dense_simple(sigma, cross.sigma0, cross.sigma00, z);
}

PredictionResult ordinary_cokrige(const BivariateCovarianceSpec& spec, const Design& design,
                                  const ObservationVector& obs, double x0) {
  const auto n = static_cast<Eigen::Index>(design.size());
  check_length(obs.z1, design.size(), "z1");
  check_length(obs.z2, design.size(), "z2");
  const Eigen::MatrixXd sigma = build_joint_covariance(spec, design);
  const CrossCovariance cross = build_cross_vector(spec, design, x0);
  Eigen::VectorXd z(2 * n);
  z << obs.z1, obs.z2;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2 * n, 2);
  f.block(0, 0, n, 1).setOnes();
  f.block(n, 1, n, 1).setOnes();
  const Eigen::Vector2d f0(1.0, 0.0);
  return dense_ordinary(sigma, f, f0, cross.sigma0, cross.sigma00, z);
}

PredictionResult simple_krige(const ExponentialKernel& kernel, const Design& design, const Eigen::VectorXd& z1,
                              double x0) {
  check_length(z1, design.size(), "z1");
  const auto nb = neighbour_weights(design, kernel.theta(), x0);
  const auto i = static_cast<Eigen::Index>(nb.left);
  PredictionResult r;
  r.weights = Eigen::VectorXd::Zero(z1.size());
  r.weights(i) = nb.w_left;
  r.weights(i + 1) = nb.w_right;
  r.value = nb.w_left * z1(i) + nb.w_right * z1(i + 1);
  r.mspe = mspe_closed_form(kernel, design, x0, Model::simple);
  return r;
}

PredictionResult ordinary_krige(const ExponentialKernel& kernel, const Design& design, const Eigen::VectorXd& z1,
                                double x0) {
  check_length(z1, design.size(), "z1");
  const double theta = kernel.theta();
  const auto nb = neighbour_weights(design, theta, x0);
  const auto i = static_cast<Eigen::Index>(nb.left);
  const auto loc = locate(design, x0);
  const double f = ones_quadratic_form(design, theta);
  const double deficit = ones_cross_deficit(theta, design.gap(loc.index), loc.offset);
  const auto q = tridiagonal_precision(design, theta);
  PredictionResult r;
  r.weights = q.multiply(Eigen::VectorXd::Ones(z1.size())) * (deficit / f);
  r.weights(i) += nb.w_left;
  r.weights(i + 1) += nb.w_right;
  r.value = r.weights.dot(z1);
  r.mspe = mspe_closed_form(kernel, design, x0, Model::ordinary);
  return r;
}

PredictionResult simple_krige(double sigma11, const Correlogram& c, const Design& design, const Eigen::VectorXd& z1,
                              double x0) {
  check_length(z1, design.size(), "z1");
  if (!(sigma11 > 0.0)) throw DomainError("sigma11 must be positive");
  return dense_simple(primary_matrix(sigma11, c, design), primary_vector(sigma11, c, design, x0), sigma11, z1);
}

PredictionResult ordinary_krige(double sigma11, const Correlogram& c, const Design& design,
                                const Eigen::VectorXd& z1, double x0) {
  check_length(z1, design.size(), "z1");
  if (!(sigma11 > 0.0)) throw DomainError("sigma11 must be positive");
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(z1.size(), 1);
  const Eigen::VectorXd f0 = Eigen::VectorXd::Ones(1);
  return dense_ordinary(primary_matrix(sigma11, c, design), ones, f0, primary_vector(sigma11, c, design, x0),
                        sigma11, z1);
}

double mspe_closed_form(const ExponentialKernel& kernel, const Design& design, double x0, Model model) {
  const double theta = kernel.theta();
  const auto [i, a] = locate(design, x0);
  const double d = design.gap(i);
  if (theta * d < kMinThetaGap) throw ConditioningError("gap too small for theta");
  double m = simple_variance_factor(theta, d, a);
  if (model == Model::ordinary) {
    const double deficit = ones_cross_deficit(theta, d, a);
    m += deficit * deficit / ones_quadratic_form(design, theta);
  }
  return kernel.sigma11() * m;
}

}  // namespace cokrig
