#pragma once

// Maximum likelihood for the generalized Markov model with an exponential
// primary correlogram and identity cR:
//   C11 = sigma11 P(theta), C12 = rho C11, C22 = rho^2 C11 + (sigma22 - rho^2 sigma11) I.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "cokrig/kernel.hpp"
#include "cokrig/predict.hpp"

namespace cokrig {

struct MarkovParameters {
  double theta;
  double sigma11;
  double sigma22;
  double rho;
};

// Gaussian log-likelihood of one collocated replicate, evaluated in O(n)
// through the tridiagonal precision and the sigma22 - rho^2 sigma11 Schur
// complement.  Throws DomainError for invalid parameters.
double markov_loglik(const MarkovParameters& p, const Design& design, const ObservationVector& obs);

struct MleOptions {
  bool standardize = false;  // center and scale z1, z2 with pooled moments first
  std::vector<double> start_thetas{2.0, 10.0, 30.0, 80.0};
  double tolerance = 1e-9;  // simplex diameter in (log theta, log s11, log s22, atanh rho)
  int max_iterations = 20000;
  bool standard_errors = true;
};

struct MleFit {
  double theta_hat = 0.0;
  double sigma11_hat = 0.0;
  double sigma22_hat = 0.0;
  double rho_hat = 0.0;
  double loglik = 0.0;  // summed over replicates
  bool converged = false;
  int iterations = 0;
  // Inverse observed information in (theta, sigma11, sigma22, rho); NaN when the
  // numerical Hessian is not positive definite or errors were not requested.
  std::array<double, 4> standard_errors{};
  std::vector<double> start_logliks;
  bool standardized = false;
  std::array<double, 2> means{};
  std::array<double, 2> scales{1.0, 1.0};
};

// Replicates share the design and are pooled as independent draws.
MleFit fit_mle(const std::vector<ObservationVector>& replicates, const Design& design, const MleOptions& options = {});
MleFit fit_mle(const ObservationVector& obs, const Design& design, const MleOptions& options = {});

// Exact draw from the model: Z1 by the AR(1) recursion of the exponential
// kernel, then Z2 = rho Z1 + independent noise.
ObservationVector simulate_markov(const MarkovParameters& p, const Design& design, std::mt19937_64& rng);

}  // namespace cokrig
