#include "cokrig/mle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cokrig/errors.hpp"
#include "cokrig/nelder_mead.hpp"

namespace cokrig {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

MarkovParameters from_unconstrained(const std::vector<double>& u) {
  return {std::exp(u[0]), std::exp(u[1]), std::exp(u[2]), std::tanh(u[3])};
}

std::vector<double> to_unconstrained(const MarkovParameters& p) {
  return {std::log(p.theta), std::log(p.sigma11), std::log(p.sigma22), std::atanh(p.rho)};
}

double pooled_loglik(const MarkovParameters& p, const Design& design, const std::vector<ObservationVector>& reps) {
  double total = 0.0;
  for (const auto& r : reps) total += markov_loglik(p, design, r);
  return total;
}

// Negative log-likelihood with the validity region enforced as +inf.
double objective(const std::vector<double>& u, const Design& design, const std::vector<ObservationVector>& reps) {
  const MarkovParameters p = from_unconstrained(u);
  if (!(p.sigma22 - p.rho * p.rho * p.sigma11 > 0.0) || !(std::abs(p.rho) < 1.0))
    return std::numeric_limits<double>::infinity();
  try {
    return -pooled_loglik(p, design, reps);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::array<double, 4> hessian_errors(const MarkovParameters& p, const Design& design,
                                     const std::vector<ObservationVector>& reps) {
  const std::array<double, 4> x{p.theta, p.sigma11, p.sigma22, p.rho};
  std::array<double, 4> h{};
  for (int i = 0; i < 4; ++i) h[i] = 1e-4 * std::max(std::abs(x[i]), 1e-2);
  auto nll = [&](std::array<double, 4> v) {
    const MarkovParameters q{v[0], v[1], v[2], v[3]};
    if (!(q.theta > 0.0 && q.sigma11 > 0.0 && std::abs(q.rho) < 1.0 && q.sigma22 - q.rho * q.rho * q.sigma11 > 0.0))
      return std::numeric_limits<double>::quiet_NaN();
    return -pooled_loglik(q, design, reps);
  };
  Eigen::Matrix4d hess;
  const double f0 = nll(x);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      auto shifted = [&](double si, double sj) {
        auto v = x;
        v[i] += si * h[i];
        v[j] += sj * h[j];
        return nll(v);
      };
      double val;
      if (i == j) {
        val = (shifted(1, 0) - 2.0 * f0 + shifted(-1, 0)) / (h[i] * h[i]);
      } else {
        val = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h[i] * h[j]);
      }
      hess(i, j) = hess(j, i) = val;
    }
  }
  std::array<double, 4> se;
  se.fill(std::numeric_limits<double>::quiet_NaN());
  Eigen::LLT<Eigen::Matrix4d> llt(hess);
  if (!hess.allFinite() || llt.info() != Eigen::Success) return se;
  const Eigen::Matrix4d cov = llt.solve(Eigen::Matrix4d::Identity());
  for (int i = 0; i < 4; ++i) se[i] = std::sqrt(cov(i, i));
  return se;
}

}  // namespace

double markov_loglik(const MarkovParameters& p, const Design& design, const ObservationVector& obs) {
  const auto n = static_cast<Eigen::Index>(design.size());
  if (obs.z1.size() != n || obs.z2.size() != n) throw DomainError("observation length does not match the design");
  if (!(p.sigma11 > 0.0 && p.sigma22 > 0.0)) throw DomainError("variances must be positive");
  const double tau = p.sigma22 - p.rho * p.rho * p.sigma11;
  if (!(tau > 0.0) || !(std::abs(p.rho) < 1.0)) throw DomainError("sigma22 - rho^2 sigma11 must be positive");
  const TridiagonalPrecision q = tridiagonal_precision(design, p.theta);
  const double log_det = static_cast<double>(n) * (std::log(p.sigma11) + std::log(tau)) + log_det_corr(design, p.theta);
  const Eigen::VectorXd resid = obs.z2 - p.rho * obs.z1;
  const double quad = q.bilinear(obs.z1, obs.z1) / p.sigma11 + resid.squaredNorm() / tau;
  return -static_cast<double>(n) * kLog2Pi - 0.5 * log_det - 0.5 * quad;
}

MleFit fit_mle(const std::vector<ObservationVector>& replicates_in, const Design& design, const MleOptions& options) {
  if (replicates_in.empty()) throw DomainError("no observations to fit");
  if (design.size() < 4) throw DomainError("likelihood fitting needs at least 4 sites");
  std::vector<ObservationVector> reps = replicates_in;
  const auto n = static_cast<Eigen::Index>(design.size());
  for (const auto& r : reps) {
    if (r.z1.size() != n || r.z2.size() != n) throw DomainError("observation length does not match the design");
    if (!r.z1.allFinite() || !r.z2.allFinite()) throw DomainError("observations must be finite");
  }

  MleFit fit;
  const double count = static_cast<double>(reps.size() * design.size());
  auto moments = [&](auto get) {
    double mean = 0.0;
    for (const auto& r : reps) mean += get(r).sum();
    mean /= count;
    double var = 0.0;
    for (const auto& r : reps) var += (get(r).array() - mean).square().sum();
    return std::pair{mean, var / (count - 1.0)};
  };
  if (options.standardize) {
    const auto [m1, v1] = moments([](const ObservationVector& r) -> const Eigen::VectorXd& { return r.z1; });
    const auto [m2, v2] = moments([](const ObservationVector& r) -> const Eigen::VectorXd& { return r.z2; });
    if (!(v1 > 0.0 && v2 > 0.0)) throw DomainError("cannot standardize constant data");
    for (auto& r : reps) {
      r.z1 = (r.z1.array() - m1) / std::sqrt(v1);
      r.z2 = (r.z2.array() - m2) / std::sqrt(v2);
    }
    fit.standardized = true;
    fit.means = {m1, m2};
    fit.scales = {std::sqrt(v1), std::sqrt(v2)};
  }

  // Starting variances and slope from raw second moments about zero.
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (const auto& r : reps) {
    s11 += r.z1.squaredNorm();
    s22 += r.z2.squaredNorm();
    s12 += r.z1.dot(r.z2);
  }
  s11 = std::max(s11 / count, 1e-8);
  s22 = std::max(s22 / count, 1e-8);
  double rho0 = std::clamp(s12 / count / s11, -0.95, 0.95);
  if (rho0 * rho0 * s11 >= 0.9 * s22) rho0 = std::copysign(std::sqrt(0.9 * s22 / s11), rho0);
  rho0 = std::clamp(rho0, -0.95, 0.95);

  auto f = [&](const std::vector<double>& u) { return objective(u, design, reps); };
  NelderMeadOptions nm;
  nm.tolerance = options.tolerance;
  nm.max_iterations = options.max_iterations;
  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (double theta0 : options.start_thetas) {
    const std::vector<double> start = to_unconstrained({theta0, s11, s22, rho0});
    const double start_value = f(start);
    fit.start_logliks.push_back(-start_value);
    NelderMeadResult run = nelder_mead(f, start, nm);
    fit.iterations += run.iterations;
    for (int restart = 0; restart < 20; ++restart) {
      NelderMeadResult again = nelder_mead(f, run.x, nm);
      fit.iterations += again.iterations;
      if (!(again.value < run.value)) {
        run.converged = run.converged && again.converged;
        break;
      }
      run = std::move(again);
    }
    if (run.value < best.value) best = std::move(run);
  }
  if (!std::isfinite(best.value)) throw NumericError("likelihood is not finite at any start");

  const MarkovParameters p = from_unconstrained(best.x);
  fit.theta_hat = p.theta;
  fit.sigma11_hat = p.sigma11;
  fit.sigma22_hat = p.sigma22;
  fit.rho_hat = p.rho;
  fit.loglik = -best.value;
  fit.converged = best.converged;
  if (options.standard_errors) {
    fit.standard_errors = hessian_errors(p, design, reps);
  } else {
    fit.standard_errors.fill(std::numeric_limits<double>::quiet_NaN());
  }
  return fit;
}

MleFit fit_mle(const ObservationVector& obs, const Design& design, const MleOptions& options) {
  return fit_mle(std::vector<ObservationVector>{obs}, design, options);
}

ObservationVector simulate_markov(const MarkovParameters& p, const Design& design, std::mt19937_64& rng) {
  const double tau = p.sigma22 - p.rho * p.rho * p.sigma11;
  if (!(p.theta > 0.0 && p.sigma11 > 0.0 && tau > 0.0)) throw DomainError("invalid generator parameters");
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(design.size());
  ObservationVector obs{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  obs.z1(0) = std::sqrt(p.sigma11) * normal(rng);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double d = design.gap(static_cast<std::size_t>(i - 1));
    const double r = std::exp(-p.theta * d);
    obs.z1(i) = r * obs.z1(i - 1) + std::sqrt(p.sigma11 * -std::expm1(-2.0 * p.theta * d)) * normal(rng);
  }
  for (Eigen::Index i = 0; i < n; ++i) obs.z2(i) = p.rho * obs.z1(i) + std::sqrt(tau) * normal(rng);
  return obs;
}

}  // namespace cokrig
