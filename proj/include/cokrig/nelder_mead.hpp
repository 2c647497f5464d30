#pragma once

#include <functional>
#include <vector>

namespace cokrig {

struct NelderMeadOptions {
  double initial_step = 0.5;
  double tolerance = 1e-10;  // simplex diameter (max distance to the best vertex)
  int max_iterations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Unconstrained downhill simplex with the standard reflection, expansion,
// contraction and shrink coefficients (1, 2, 1/2, 1/2).  Non-finite
// objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace cokrig
