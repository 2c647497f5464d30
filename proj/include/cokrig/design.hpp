#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "cokrig/criteria.hpp"
#include "cokrig/kernel.hpp"

namespace cokrig {

Design equispaced(std::size_t n, double x_start = 0.0, double x_end = 1.0);

struct Rescaled {
  Design design;  // on [0, 1]
  double theta;   // theta * (x_n - x_1)
};

Rescaled rescale(const Design& design, double theta);
// Inverse of rescale for a target interval [x_start, x_end].
Rescaled unrescale(const Design& unit_design, double theta_scaled, double x_start, double x_end);

// A criterion with its parameters: a kernel for smspe/imspe, a prior for the
// risks.
struct DesignCriterion {
  Criterion kind = Criterion::imspe;
  Model model = Model::simple;
  std::variant<ExponentialKernel, ThetaPrior> parameters = ExponentialKernel(1.0);

  // Throws DomainError when the parameter type does not match the kind.
  void check() const;
};

CriterionReport evaluate(const DesignCriterion& criterion, const Design& design);

struct OptimizationProblem {
  std::size_t n = 2;
  DesignCriterion criterion;
  double tolerance = 1e-10;  // simplex diameter in log-ratio coordinates
  int max_iters = 20000;     // per Nelder-Mead run
  int starts = 8;            // the equispaced start counts as one
  bool include_equispaced_start = true;
  std::uint64_t seed = 20240917;
  unsigned threads = 1;
};

struct OptimizationResult {
  Design design = equispaced(2);
  double value = 0.0;
  int iterations = 0;  // summed over every start and restart
  bool converged = false;
  double gap_deviation = 0.0;  // max |d_i - 1/(n-1)|
  int evaluations = 0;
};

// Minimizes the criterion over gaps on the unit simplex.  Gaps are
// d_i = e^{u_i} / sum_j e^{u_j} with u_{n-1} pinned to 0; each start runs
// Nelder-Mead and restarts from its best point until no further improvement.
OptimizationResult optimize(const OptimizationProblem& problem);

double gap_deviation(const Design& design);

// Exhaustive search over gaps that are positive multiples of grid_step.
// Requires n <= 4 and at most 1e7 grid designs (ResourceError otherwise).
// Ties go to the design with the smallest gap_deviation.
Design brute_force_min(const DesignCriterion& criterion, std::size_t n, double grid_step);

// Moves eps from gap from_idx to gap to_idx; requires d[to_idx] >= d[from_idx]
// and 0 < eps < d[from_idx].
Design majorization_perturb(const Design& design, std::size_t from_idx, std::size_t to_idx, double eps);

}  // namespace cokrig
