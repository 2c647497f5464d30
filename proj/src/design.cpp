#include "cokrig/design.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include "cokrig/errors.hpp"
#include "cokrig/nelder_mead.hpp"

namespace cokrig {

namespace {

std::vector<double> softmax_gaps(const std::vector<double>& u) {
  std::vector<double> d(u.size() + 1);
  const double top = std::max(0.0, u.empty() ? 0.0 : *std::max_element(u.begin(), u.end()));
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = std::exp((i < u.size() ? u[i] : 0.0) - top);
    total += d[i];
  }
  for (double& x : d) x /= total;
  return d;
}

std::vector<double> log_ratios(std::span<const double> gaps) {
  std::vector<double> u(gaps.size() - 1);
  const double last = std::log(gaps.back());
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) u[i] = std::log(gaps[i]) - last;
  return u;
}

// Objective seen by the optimizer: the design-dependent excess, with
// degenerate or ill-conditioned designs mapped to +inf.
double excess_at(const DesignCriterion& criterion, std::vector<double> gaps) {
  try {
    return evaluate(criterion, Design::on_interval(0.0, 1.0, std::move(gaps))).excess;
  } catch (const ConditioningError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct StartOutcome {
  std::vector<double> gaps;
  double excess = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

StartOutcome run_start(const OptimizationProblem& problem, std::vector<double> u) {
  auto f = [&](const std::vector<double>& v) { return excess_at(problem.criterion, softmax_gaps(v)); };
  NelderMeadOptions opts;
  opts.tolerance = problem.tolerance;
  opts.max_iterations = problem.max_iters;
  StartOutcome out;
  NelderMeadResult best = nelder_mead(f, std::move(u), opts);
  out.iterations += best.iterations;
  out.evaluations += best.evaluations;
  for (int restart = 0; restart < 25; ++restart) {
    NelderMeadResult again = nelder_mead(f, best.x, opts);
    out.iterations += again.iterations;
    out.evaluations += again.evaluations;
    if (!(again.value < best.value)) {
      best.converged = best.converged && again.converged;
      break;
    }
    best = std::move(again);
  }
  out.gaps = softmax_gaps(best.x);
  out.excess = best.value;
  out.converged = best.converged;
  return out;
}

std::vector<std::vector<double>> start_points(const OptimizationProblem& problem) {
  const std::size_t intervals = problem.n - 1;
  std::vector<std::vector<double>> starts;
  if (problem.include_equispaced_start) starts.emplace_back(intervals - 1, 0.0);
  std::mt19937_64 rng(problem.seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  while (static_cast<int>(starts.size()) < problem.starts) {
    // Uniform draw on the simplex (flat Dirichlet).
    std::vector<double> gaps(intervals);
    for (double& g : gaps) g = std::max(gamma(rng), 1e-6);
    starts.push_back(log_ratios(gaps));
  }
  return starts;
}

}  // namespace

Design equispaced(std::size_t n, double x_start, double x_end) {
  if (n < 2) throw DomainError("an equispaced design needs n >= 2");
  if (!(x_end > x_start)) throw DomainError("design interval must have positive length");
  const std::size_t m = n - 1;
  return Design::on_interval(x_start, x_end, std::vector<double>(m, (x_end - x_start) / static_cast<double>(m)));
}

Rescaled rescale(const Design& design, double theta) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  return {design.normalized(), theta * design.length()};
}

Rescaled unrescale(const Design& unit_design, double theta_scaled, double x_start, double x_end) {
  if (!(x_end > x_start)) throw DomainError("target interval must have positive length");
  if (!(theta_scaled > 0.0)) throw DomainError("theta must be positive");
  const double len = x_end - x_start;
  std::vector<double> gaps(unit_design.gaps().begin(), unit_design.gaps().end());
  for (double& g : gaps) g *= len / unit_design.length();
  return {Design::on_interval(x_start, x_end, std::move(gaps)), theta_scaled / len};
}

void DesignCriterion::check() const {
  const bool risk = kind == Criterion::risk_smspe || kind == Criterion::risk_imspe;
  if (risk && !std::holds_alternative<ThetaPrior>(parameters))
    throw DomainError(std::string(to_string(kind)) + " needs a theta prior");
  if (!risk && !std::holds_alternative<ExponentialKernel>(parameters))
    throw DomainError(std::string(to_string(kind)) + " needs a kernel");
}

CriterionReport evaluate(const DesignCriterion& criterion, const Design& design) {
  criterion.check();
  switch (criterion.kind) {
    case Criterion::smspe: return smspe(std::get<ExponentialKernel>(criterion.parameters), design, criterion.model);
    case Criterion::imspe: return imspe(std::get<ExponentialKernel>(criterion.parameters), design, criterion.model);
    case Criterion::risk_smspe:
      return risk_smspe(std::get<ThetaPrior>(criterion.parameters), design, criterion.model);
    case Criterion::risk_imspe:
      return risk_imspe(std::get<ThetaPrior>(criterion.parameters), design, criterion.model);
  }
  throw DomainError("unknown criterion");
}

double gap_deviation(const Design& design) {
  const double target = 1.0 / static_cast<double>(design.intervals());
  double dev = 0.0;
  for (double d : design.gaps()) dev = std::max(dev, std::abs(d / design.length() - target));
  return dev;
}

OptimizationResult optimize(const OptimizationProblem& problem) {
  if (problem.n < 2) throw DomainError("design size n must be >= 2");
  if (!(problem.tolerance > 0.0)) throw DomainError("optimizer tolerance must be positive");
  if (problem.starts < 1) throw DomainError("at least one start is required");
  problem.criterion.check();

  OptimizationResult result;
  if (problem.n == 2) {
    result.design = equispaced(2);
    result.value = evaluate(problem.criterion, result.design).value;
    result.converged = true;
    return result;
  }

  const auto starts = start_points(problem);
  std::vector<StartOutcome> outcomes(starts.size());
  const unsigned threads = std::max(1u, problem.threads);
  if (threads == 1) {
    for (std::size_t k = 0; k < starts.size(); ++k) outcomes[k] = run_start(problem, starts[k]);
  } else {
    for (std::size_t first = 0; first < starts.size(); first += threads) {
      std::vector<std::future<StartOutcome>> batch;
      for (std::size_t k = first; k < std::min(starts.size(), first + threads); ++k)
        batch.push_back(std::async(std::launch::async, run_start, std::cref(problem), starts[k]));
      for (std::size_t k = 0; k < batch.size(); ++k) outcomes[first + k] = batch[k].get();
    }
  }

  const StartOutcome* best = &outcomes.front();
  for (const auto& o : outcomes) {
    result.iterations += o.iterations;
    result.evaluations += o.evaluations;
    if (o.excess < best->excess || (o.excess == best->excess && o.gaps < best->gaps)) best = &o;
  }
  result.design = Design::on_interval(0.0, 1.0, best->gaps);
  result.value = evaluate(problem.criterion, result.design).value;
  result.converged = best->converged;
  result.gap_deviation = gap_deviation(result.design);
  return result;
}

Design brute_force_min(const DesignCriterion& criterion, std::size_t n, double grid_step) {
  criterion.check();
  if (n < 2 || n > 4) throw DomainError("brute_force_min supports 2 <= n <= 4");
  if (!(grid_step > 0.0 && grid_step <= 1.0)) throw DomainError("grid step must lie in (0, 1]");
  const double steps = std::round(1.0 / grid_step);
  if (std::abs(steps * grid_step - 1.0) > 1e-9) throw DomainError("grid step must divide 1");
  if (n == 2) return equispaced(2);
  const auto m = static_cast<long long>(steps);
  // Compositions of m into n-1 positive parts.
  const double count = n == 3 ? static_cast<double>(m - 1) : 0.5 * static_cast<double>(m - 1) * (m - 2);
  if (count > 1e7) {
    std::ostringstream msg;
    msg << "grid of " << count << " designs exceeds the 1e7 cap";
    throw ResourceError(msg.str());
  }
  std::vector<double> best_gaps;
  double best = std::numeric_limits<double>::infinity();
  double best_spread = std::numeric_limits<double>::infinity();
  const double target = 1.0 / static_cast<double>(n - 1);
  // smspe depends on d_max alone, so grid ties are common; the most balanced
  // tied design wins.
  auto consider = [&](std::vector<double> gaps) {
    const double v = excess_at(criterion, gaps);
    double spread = 0.0;
    for (double g : gaps) spread = std::max(spread, std::abs(g - target));
    const double tie = 1e-13 * std::max(1.0, std::abs(best));
    if (v < best - tie || (std::abs(v - best) <= tie && spread < best_spread)) {
      best = std::min(best, v);
      best_spread = spread;
      best_gaps = std::move(gaps);
    }
  };
  if (n == 3) {
    for (long long a = 1; a < m; ++a) consider({a / steps, (m - a) / steps});
  } else {
    for (long long a = 1; a < m - 1; ++a)
      for (long long b = 1; a + b < m; ++b) consider({a / steps, b / steps, (m - a - b) / steps});
  }
  if (best_gaps.empty()) throw ConditioningError("every grid design is ill-conditioned");
  return Design::on_interval(0.0, 1.0, best_gaps);
}

Design majorization_perturb(const Design& design, std::size_t from_idx, std::size_t to_idx, double eps) {
  if (from_idx >= design.intervals() || to_idx >= design.intervals() || from_idx == to_idx)
    throw DomainError("perturbation indices must be distinct gap indices");
  if (design.gap(to_idx) < design.gap(from_idx))
    throw DomainError("mass must move from a smaller gap to a larger one");
  if (!(eps > 0.0 && eps < design.gap(from_idx))) throw DomainError("eps must lie in (0, d[from_idx])");
  std::vector<double> gaps(design.gaps().begin(), design.gaps().end());
  gaps[from_idx] -= eps;
  gaps[to_idx] += eps;
  return Design::on_interval(design.x_start(), design.x_end(), std::move(gaps));
}

}  // namespace cokrig
