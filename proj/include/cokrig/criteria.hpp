#pragma once

// Design criteria for the exponential primary kernel: the supremum (SMSPE)
// and the integral (IMSPE) of the prediction variance over the design
// interval, their averages over a prior on theta, and grid/quadrature oracles.
//
// Closed forms are returned split into a design-independent base and a design
// dependent excess.  At large theta the excess is many orders of magnitude
// below the base, and optimizers must compare excesses to see any signal.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cokrig/kernel.hpp"
#include "cokrig/predict.hpp"

namespace cokrig {

enum class Criterion { smspe, imspe, risk_smspe, risk_imspe };

const char* to_string(Criterion criterion);

class ThetaPrior {
 public:
  enum class Kind { uniform, tabulated };

  static ThetaPrior uniform(double theta1, double theta2, double e_sigma11 = 1.0);
  // Piecewise-linear density through (theta, density) nodes, strictly
  // increasing in theta; must integrate to 1 within 1e-6.
  static ThetaPrior tabulated(std::vector<std::pair<double, double>> nodes, double e_sigma11 = 1.0);

  Kind kind() const { return kind_; }
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  double e_sigma11() const { return e_sigma11_; }
  const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }
  double density(double theta) const;

  // Prior on theta * length, for designs mapped onto [0, 1].
  ThetaPrior rescaled(double length) const;
  ThetaPrior with_e_sigma11(double e_sigma11) const;

 private:
  ThetaPrior() = default;

  Kind kind_ = Kind::uniform;
  double theta1_ = 0.0;
  double theta2_ = 0.0;
  double e_sigma11_ = 1.0;
  std::vector<std::pair<double, double>> nodes_;
};

// Mean of a tabulated piecewise-linear density; used to collapse a sigma11
// prior to the only statistic the risks depend on.
double tabulated_mean(const std::vector<std::pair<double, double>>& nodes);

struct IntervalContribution {
  std::size_t index;
  double value;
};

struct CriterionReport {
  Criterion criterion = Criterion::smspe;
  Model model = Model::simple;
  double base = 0.0;    // same for every design with the same n
  double excess = 0.0;  // design-dependent part
  double value = 0.0;   // base + excess
  // imspe: integral over each interval (sums to value); smspe: supremum on
  // each interval (max is value).  Empty for risks.
  std::vector<IntervalContribution> per_interval;
};

// Designs not on [0, 1] are evaluated in normalized coordinates with theta
// scaled by the interval length.
CriterionReport smspe(const ExponentialKernel& kernel, const Design& design, Model model);
CriterionReport imspe(const ExponentialKernel& kernel, const Design& design, Model model);

struct GridMaximum {
  double value;
  double argmax;
};

// Largest MSPE over a uniform grid on every interval with the midpoints added.
GridMaximum smspe_numeric(const ExponentialKernel& kernel, const Design& design, Model model,
                          int grid_points_per_interval = 64);

// Adaptive Gauss-Kronrod integral of the MSPE over the normalized interval.
double imspe_numeric(const ExponentialKernel& kernel, const Design& design, Model model, double tol = 1e-10);

enum class RiskMethod { automatic, quadrature };

// Prior expectation of smspe (R1 simple, R3 ordinary) or imspe (R2, R4).
// Uniform priors on the simple model use closed forms unless quadrature is
// forced.
CriterionReport risk_smspe(const ThetaPrior& prior, const Design& design, Model model,
                           RiskMethod method = RiskMethod::automatic);
CriterionReport risk_imspe(const ThetaPrior& prior, const Design& design, Model model,
                           RiskMethod method = RiskMethod::automatic);

double relative_efficiency(double criterion_value_star, double criterion_value_candidate);

// Per-gap building blocks, exposed for tests.
double w_sup(double theta, double d);
double u_sup(double theta, double d);
double phi_term(double theta, double d);
double g_term(double theta, double d);

}  // namespace cokrig
