#pragma once

// Kriging and collocated cokriging predictors of Z1(x0).

#include <Eigen/Dense>

#include "cokrig/covariance.hpp"
#include "cokrig/kernel.hpp"

namespace cokrig {

struct ObservationVector {
  Eigen::VectorXd z1;
  Eigen::VectorXd z2;
};

struct PredictionResult {
  double value = 0.0;
  Eigen::VectorXd weights;  // 2n for cokriging (z1 block then z2 block), n for kriging
  double mspe = 0.0;
};

enum class Model { simple, ordinary };

const char* to_string(Model model);

// Dense generalized-least-squares predictors over the joint 2n x 2n covariance.
// Ordinary cokriging uses drift F = [[1, 0], [0, 1]] blocks and f0 = (1, 0).
PredictionResult simple_cokrige(const BivariateCovarianceSpec& spec, const Design& design,
                                const ObservationVector& obs, double x0);
PredictionResult ordinary_cokrige(const BivariateCovarianceSpec& spec, const Design& design,
                                  const ObservationVector& obs, double x0);

// Exponential kernel: closed-form weights on the two neighbours of x0.
PredictionResult simple_krige(const ExponentialKernel& kernel, const Design& design, const Eigen::VectorXd& z1,
                              double x0);
PredictionResult ordinary_krige(const ExponentialKernel& kernel, const Design& design, const Eigen::VectorXd& z1,
                                double x0);

// General stationary primary covariance sigma11 * c(h), dense solve.
PredictionResult simple_krige(double sigma11, const Correlogram& c, const Design& design, const Eigen::VectorXd& z1,
                              double x0);
PredictionResult ordinary_krige(double sigma11, const Correlogram& c, const Design& design,
                                const Eigen::VectorXd& z1, double x0);

// Prediction variance from the gap containing x0 alone (plus F for ordinary).
double mspe_closed_form(const ExponentialKernel& kernel, const Design& design, double x0, Model model);

}  // namespace cokrig
