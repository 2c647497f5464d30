#include "cokrig/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cokrig/errors.hpp"
#include "cokrig/quadrature.hpp"

namespace cokrig {

namespace {

struct Normalized {
  ExponentialKernel kernel;
  Design design;
};

Normalized normalize(const ExponentialKernel& kernel, const Design& design) {
  if (design.is_normalized()) return {kernel, design};
  return {kernel.rescaled(design.length()), design.normalized()};
}

void check_conditioning(const Design& design, double theta) {
  for (std::size_t i = 0; i < design.intervals(); ++i) {
    if (theta * design.gap(i) < kMinThetaGap) {
      std::ostringstream msg;
      msg << "gap " << i << " too small for theta (theta*d = " << theta * design.gap(i) << ")";
      throw ConditioningError(msg.str());
    }
  }
}

// 2x / (1 + x) with x = e^{-theta d}; 1 - psi is W_sup.
double psi(double theta, double d) {
  const double x = std::exp(-theta * d);
  return 2.0 * x / (1.0 + x);
}

double gamma_term(double theta, double d) {
  const double x = std::exp(-theta * d);
  return x * (6.0 + 2.0 * theta * d + 6.0 * x) / (theta * (1.0 + x) * (1.0 + x));
}

double sech_half(double theta, double d) {
  const double y = 0.5 * theta * d;
  const double e = std::exp(-y);
  return 2.0 * e / (1.0 + e * e);
}

// log(1 - e^{-y}) for y > 0.
double log1m_exp_neg(double y) { return y > M_LN2 ? std::log1p(-std::exp(-y)) : std::log(-std::expm1(-y)); }

struct Sums {
  double psi = 0.0;    // sum psi(d_i)
  double phi = 0.0;    // sum phi(d_i)
  double gamma = 0.0;  // sum gamma(d_i)
  double d_max = 0.0;
};

Sums gap_sums(const Design& design, double theta) {
  Sums s;
  for (double d : design.gaps()) {
    s.psi += psi(theta, d);
    s.phi += phi_term(theta, d);
    s.gamma += gamma_term(theta, d);
    s.d_max = std::max(s.d_max, d);
  }
  return s;
}

// Base and excess of the normalized criteria at one theta, per unit sigma11.
struct Split {
  double base;
  double excess;
};

Split smspe_split(const Design& design, double theta, Model model) {
  const double n = static_cast<double>(design.size());
  const Sums s = gap_sums(design, theta);
  if (model == Model::simple) return {1.0, -psi(theta, s.d_max)};
  const double f = n - s.psi;
  const double sh = sech_half(theta, s.d_max);
  return {1.0 + 1.0 / n, -psi(theta, s.d_max) + (sh * sh - 2.0 * sh) / f + s.psi / (n * f)};
}

Split imspe_split(const Design& design, double theta, Model model) {
  const double n = static_cast<double>(design.size());
  const Sums s = gap_sums(design, theta);
  const double base = 1.0 - (n - 1.0) / theta;
  if (model == Model::simple) return {base, 2.0 * s.phi};
  const double a = 1.0 - 3.0 * (n - 1.0) / theta;
  const double f = n - s.psi;
  return {base + a / n, 2.0 * s.phi + (n * s.gamma + a * s.psi) / (n * f)};
}

double interval_mspe(double theta, double d, double a, double f, Model model) {
  double m = simple_variance_factor(theta, d, a);
  if (model == Model::ordinary) {
    const double deficit = ones_cross_deficit(theta, d, a);
    m += deficit * deficit / f;
  }
  return m;
}

void check_prior_support(double theta1, double theta2) {
  if (!(std::isfinite(theta1) && std::isfinite(theta2) && theta1 > 0.0 && theta2 > theta1)) {
    std::ostringstream msg;
    msg << "theta prior support must satisfy 0 < theta1 < theta2 < inf, got (" << theta1 << ", " << theta2 << ")";
    throw DomainError(msg.str());
  }
}

// Integral of h(theta) * density over the prior support.
double prior_expectation(const ThetaPrior& prior, const std::function<double(double)>& h) {
  IntegrationOptions opts;
  if (prior.kind() == ThetaPrior::Kind::uniform) {
    const double width = prior.theta2() - prior.theta1();
    return integrate_doubling(h, prior.theta1(), prior.theta2(), opts) / width;
  }
  const auto& nodes = prior.nodes();
  opts.tolerance /= static_cast<double>(nodes.size());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double t0 = nodes[k].first, t1 = nodes[k + 1].first;
    const double p0 = nodes[k].second, p1 = nodes[k + 1].second;
    if (p0 == 0.0 && p1 == 0.0) continue;
    auto weighted = [&](double t) { return h(t) * (p0 + (p1 - p0) * (t - t0) / (t1 - t0)); };
    total += integrate_doubling(weighted, t0, t1, opts);
  }
  return total;
}

struct PreparedRisk {
  ThetaPrior prior;
  Design design;
};

PreparedRisk prepare(const ThetaPrior& prior, const Design& design) {
  if (design.is_normalized()) return {prior, design};
  return {prior.rescaled(design.length()), design.normalized()};
}

CriterionReport risk_report(Criterion criterion, Model model, const ThetaPrior& prior, Split split) {
  CriterionReport r;
  r.criterion = criterion;
  r.model = model;
  r.base = prior.e_sigma11() * split.base;
  r.excess = prior.e_sigma11() * split.excess;
  r.value = r.base + r.excess;
  return r;
}

double prior_mean_inverse(const ThetaPrior& prior) {
  if (prior.kind() == ThetaPrior::Kind::uniform)
    return std::log(prior.theta2() / prior.theta1()) / (prior.theta2() - prior.theta1());
  return prior_expectation(prior, [](double t) { return 1.0 / t; });
}

}  // namespace

const char* to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::smspe: return "smspe";
    case Criterion::imspe: return "imspe";
    case Criterion::risk_smspe: return "risk_smspe";
    case Criterion::risk_imspe: return "risk_imspe";
  }
  return "unknown";
}

ThetaPrior ThetaPrior::uniform(double theta1, double theta2, double e_sigma11) {
  check_prior_support(theta1, theta2);
  if (!(e_sigma11 > 0.0 && std::isfinite(e_sigma11))) throw DomainError("E[sigma11] must be positive");
  ThetaPrior p;
  p.kind_ = Kind::uniform;
  p.theta1_ = theta1;
  p.theta2_ = theta2;
  p.e_sigma11_ = e_sigma11;
  return p;
}

ThetaPrior ThetaPrior::tabulated(std::vector<std::pair<double, double>> nodes, double e_sigma11) {
  if (nodes.size() < 2) throw DomainError("a tabulated prior needs at least two nodes");
  if (!(e_sigma11 > 0.0 && std::isfinite(e_sigma11))) throw DomainError("E[sigma11] must be positive");
  check_prior_support(nodes.front().first, nodes.back().first);
  double mass = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!(nodes[k].second >= 0.0 && std::isfinite(nodes[k].second)))
      throw DomainError("tabulated prior densities must be nonnegative and finite");
    if (k > 0) {
      if (!(nodes[k].first > nodes[k - 1].first)) throw DomainError("tabulated prior nodes must increase in theta");
      mass += 0.5 * (nodes[k].second + nodes[k - 1].second) * (nodes[k].first - nodes[k - 1].first);
    }
  }
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "tabulated prior integrates to " << mass << ", not 1";
    throw DomainError(msg.str());
  }
  ThetaPrior p;
  p.kind_ = Kind::tabulated;
  p.theta1_ = nodes.front().first;
  p.theta2_ = nodes.back().first;
  p.e_sigma11_ = e_sigma11;
  p.nodes_ = std::move(nodes);
  return p;
}

double ThetaPrior::density(double theta) const {
  if (theta < theta1_ || theta > theta2_) return 0.0;
  if (kind_ == Kind::uniform) return 1.0 / (theta2_ - theta1_);
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), theta,
                             [](double t, const std::pair<double, double>& node) { return t < node.first; });
  if (it == nodes_.end()) return nodes_.back().second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return lo.second + (hi.second - lo.second) * (theta - lo.first) / (hi.first - lo.first);
}

ThetaPrior ThetaPrior::rescaled(double length) const {
  if (!(length > 0.0)) throw DomainError("rescaling length must be positive");
  if (kind_ == Kind::uniform) return uniform(theta1_ * length, theta2_ * length, e_sigma11_);
  ThetaPrior p = *this;
  for (auto& [t, dens] : p.nodes_) {
    t *= length;
    dens /= length;
  }
  p.theta1_ *= length;
  p.theta2_ *= length;
  return p;
}

ThetaPrior ThetaPrior::with_e_sigma11(double e_sigma11) const {
  if (!(e_sigma11 > 0.0 && std::isfinite(e_sigma11))) throw DomainError("E[sigma11] must be positive");
  ThetaPrior p = *this;
  p.e_sigma11_ = e_sigma11;
  return p;
}

double tabulated_mean(const std::vector<std::pair<double, double>>& nodes) {
  if (nodes.size() < 2) throw DomainError("a tabulated density needs at least two nodes");
  // Exact for piecewise-linear densities.
  double mass = 0.0, first = 0.0;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const auto [a, pa] = nodes[k - 1];
    const auto [b, pb] = nodes[k];
    if (!(b > a)) throw DomainError("tabulated nodes must increase");
    mass += 0.5 * (pa + pb) * (b - a);
    first += (b - a) * (pa * (2.0 * a + b) + pb * (a + 2.0 * b)) / 6.0;
  }
  if (!(mass > 0.0)) throw DomainError("tabulated density has no mass");
  return first / mass;
}

double w_sup(double theta, double d) { return -std::expm1(-theta * d) / (1.0 + std::exp(-theta * d)); }

double u_sup(double theta, double d) {
  const double y = 0.5 * theta * d;
  // 1 - sech y = 2 sinh^2(y/2) / cosh y keeps digits for small y.
  const double one_minus_sech = y < 1.0 ? 2.0 * std::pow(std::sinh(0.5 * y), 2) / std::cosh(y)
                                        : 1.0 - sech_half(theta, d);
  return one_minus_sech * one_minus_sech;
}

double phi_term(double theta, double d) { return d / std::expm1(2.0 * theta * d); }

double g_term(double theta, double d) {
  const double x = std::exp(-theta * d);
  return d + (-3.0 * std::tanh(0.5 * theta * d) + 2.0 * theta * d * x / ((1.0 + x) * (1.0 + x))) / theta;
}

CriterionReport smspe(const ExponentialKernel& kernel, const Design& design, Model model) {
  const auto [k, xi] = normalize(kernel, design);
  const double theta = k.theta();
  const double sigma = k.sigma11();
  check_conditioning(xi, theta);
  const Split split = smspe_split(xi, theta, model);
  const double f = ones_quadratic_form(xi, theta);
  CriterionReport r;
  r.criterion = Criterion::smspe;
  r.model = model;
  r.base = sigma * split.base;
  r.excess = sigma * split.excess;
  r.value = 0.0;
  for (std::size_t i = 0; i < xi.intervals(); ++i) {
    const double d = xi.gap(i);
    double c = w_sup(theta, d);
    if (model == Model::ordinary) c += u_sup(theta, d) / f;
    r.per_interval.push_back({i, sigma * c});
    r.value = std::max(r.value, sigma * c);
  }
  return r;
}

CriterionReport imspe(const ExponentialKernel& kernel, const Design& design, Model model) {
  const auto [k, xi] = normalize(kernel, design);
  const double theta = k.theta();
  const double sigma = k.sigma11();
  check_conditioning(xi, theta);
  const Split split = imspe_split(xi, theta, model);
  const double f = ones_quadratic_form(xi, theta);
  CriterionReport r;
  r.criterion = Criterion::imspe;
  r.model = model;
  r.base = sigma * split.base;
  r.excess = sigma * split.excess;
  r.value = 0.0;
  for (std::size_t i = 0; i < xi.intervals(); ++i) {
    const double d = xi.gap(i);
    double c = d - 1.0 / theta + 2.0 * phi_term(theta, d);
    if (model == Model::ordinary) c += g_term(theta, d) / f;
    r.per_interval.push_back({i, sigma * c});
    r.value += sigma * c;
  }
  return r;
}

GridMaximum smspe_numeric(const ExponentialKernel& kernel, const Design& design, Model model,
                          int grid_points_per_interval) {
  if (grid_points_per_interval < 64) throw DomainError("smspe_numeric needs at least 64 grid points per interval");
  const double theta = kernel.theta();
  check_conditioning(design, theta);
  const double f = ones_quadratic_form(design, theta);
  GridMaximum best{-1.0, design.x_start()};
  for (std::size_t i = 0; i < design.intervals(); ++i) {
    const double d = design.gap(i);
    auto consider = [&](double a) {
      const double m = kernel.sigma11() * interval_mspe(theta, d, a, f, model);
      if (m > best.value) best = {m, design.point(i) + a};
    };
    for (int j = 0; j < grid_points_per_interval; ++j) consider(d * j / (grid_points_per_interval - 1));
    consider(0.5 * d);
  }
  return best;
}

double imspe_numeric(const ExponentialKernel& kernel, const Design& design, Model model, double tol) {
  const auto [k, xi] = normalize(kernel, design);
  const double theta = k.theta();
  check_conditioning(xi, theta);
  const double f = ones_quadratic_form(xi, theta);
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i < xi.intervals(); ++i) {
    const double d = xi.gap(i);
    auto integrand = [&](double a) { return interval_mspe(theta, d, a, f, model); };
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, d, 20, 1e-14, &err);
    error += err;
  }
  if (!(error <= std::max(tol, 1e-8)) || !std::isfinite(total)) {
    std::ostringstream msg;
    msg << "adaptive quadrature error estimate " << error << " exceeds tolerance " << std::max(tol, 1e-8);
    throw NumericError(msg.str());
  }
  return k.sigma11() * total;
}

CriterionReport risk_smspe(const ThetaPrior& prior_in, const Design& design_in, Model model, RiskMethod method) {
  const auto [prior, design] = prepare(prior_in, design_in);
  check_conditioning(design, prior.theta1());
  const double n = static_cast<double>(design.size());
  if (model == Model::simple && prior.kind() == ThetaPrior::Kind::uniform && method == RiskMethod::automatic) {
    const double d = design.max_gap();
    const double t1 = prior.theta1(), t2 = prior.theta2();
    const double excess =
        2.0 / ((t2 - t1) * d) * (std::log1p(std::exp(-t2 * d)) - std::log1p(std::exp(-t1 * d)));
    return risk_report(Criterion::risk_smspe, model, prior, {1.0, excess});
  }
  const double base = model == Model::simple ? 1.0 : 1.0 + 1.0 / n;
  const double excess = prior_expectation(prior, [&](double t) { return smspe_split(design, t, model).excess; });
  return risk_report(Criterion::risk_smspe, model, prior, {base, excess});
}

CriterionReport risk_imspe(const ThetaPrior& prior_in, const Design& design_in, Model model, RiskMethod method) {
  const auto [prior, design] = prepare(prior_in, design_in);
  check_conditioning(design, prior.theta1());
  const double n = static_cast<double>(design.size());
  const double inv_theta = prior_mean_inverse(prior);
  const double base_simple = 1.0 - (n - 1.0) * inv_theta;
  if (model == Model::simple && prior.kind() == ThetaPrior::Kind::uniform && method == RiskMethod::automatic) {
    const double t1 = prior.theta1(), t2 = prior.theta2();
    double s = 0.0;
    for (double d : design.gaps()) s += log1m_exp_neg(2.0 * t2 * d) - log1m_exp_neg(2.0 * t1 * d);
    return risk_report(Criterion::risk_imspe, model, prior, {base_simple, s / (t2 - t1)});
  }
  const double base =
      model == Model::simple ? base_simple : base_simple + (1.0 - 3.0 * (n - 1.0) * inv_theta) / n;
  const double excess = prior_expectation(prior, [&](double t) { return imspe_split(design, t, model).excess; });
  return risk_report(Criterion::risk_imspe, model, prior, {base, excess});
}

double relative_efficiency(double criterion_value_star, double criterion_value_candidate) {
  if (!(criterion_value_star > 0.0 && criterion_value_candidate > 0.0)) {
    std::ostringstream msg;
    msg << "relative efficiency needs positive criterion values, got " << criterion_value_star << " and "
        << criterion_value_candidate;
    throw DomainError(msg.str());
  }
  return criterion_value_star / criterion_value_candidate;
}

}  // namespace cokrig
