#include "cokrig/covariance.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double log_of_base(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "correlogram base lambda must lie in (0, 1), got " << lambda;
    throw DomainError(msg.str());
  }
  return std::log(lambda);
}

// lambda^h written through the stored logarithm.
double power(double log_base, double h) { return std::exp(log_base * h); }

constexpr std::array<std::pair<double, double>, 3> kNs2Pairing{{{0.2, 0.5}, {0.5, 0.75}, {0.8, 0.9}}};

struct Terms {
  double c11, c12, c22;
};

Terms terms(const BivariateCovarianceSpec& spec, double h) {
  return std::visit(
      overloaded{
          [h](const GeneralizedMarkov& s) {
            const double c11 = s.sigma11 * s.c11(h);
            return Terms{c11, s.rho * c11, s.rho * s.rho * c11 + (s.sigma22 - s.rho * s.rho * s.sigma11) * s.cr(h)};
          },
          [h](const Proportional& s) {
            const double q = s.base(h);
            return Terms{s.sigma11 * q, s.sigma12 * q, s.sigma22 * q};
          },
          [h](const NS1& s) {
            const double lb = std::log(s.lambda);
            const double p1 = power(lb, h);
            const double p2 = power(lb, 2.0 * h);
            return Terms{s.sigma11 * p1, std::sqrt(s.sigma11 * s.sigma22) * s.lambdac * p1,
                         s.sigma22 * s.lambdac * s.lambdac * p1 + s.sigma22 * (1.0 - s.lambdac * s.lambdac) * p2};
          },
          [h](const Matern& s) {
            const double lb = std::log(s.lambda);
            double q = 0.0;
            switch (s.order) {
              case MaternOrder::half: q = power(lb, h); break;
              case MaternOrder::three_halves: q = (1.0 - h * lb) * power(lb, h); break;
              case MaternOrder::infinite: q = power(lb, h * h); break;
            }
            return Terms{s.sigma11 * q, std::sqrt(s.sigma11 * s.sigma22) * s.lambdac * q, s.sigma22 * q};
          },
          [h](const NS2& s) {
            const double lb = std::log(s.lambda);
            const double p = power(lb, h);
            return Terms{s.sigma11 * p, std::sqrt(s.sigma11 * s.sigma22) * s.lambdac * power(lb, s.alpha * h),
                         s.sigma22 * p};
          },
          [h](const NS3& s) {
            const double lb = std::log(s.lambda);
            const double p = power(lb, h);
            return Terms{s.sigma11 * p, std::sqrt(s.sigma11 * s.sigma22) * s.lambdac * (1.0 - h * lb) * p,
                         s.sigma22 * (1.0 - h * lb + h * h * lb * lb / 3.0) * p};
          },
      },
      spec);
}

void check_positive(std::vector<std::string>& out, const char* name, double v) {
  if (!(std::isfinite(v) && v > 0.0)) {
    std::ostringstream msg;
    msg << name << " must be positive, got " << v;
    out.push_back(msg.str());
  }
}

void check_base(std::vector<std::string>& out, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "lambda must lie in (0, 1), got " << lambda;
    out.push_back(msg.str());
  }
}

void check_lambdac(std::vector<std::string>& out, double lambdac) {
  if (!(std::abs(lambdac) < 1.0)) {
    std::ostringstream msg;
    msg << "|lambdac| must be < 1, got " << lambdac;
    out.push_back(msg.str());
  }
}

}  // namespace

Correlogram Correlogram::exponential_rate(double theta) {
  if (!(std::isfinite(theta) && theta > 0.0)) throw DomainError("exponential rate must be positive");
  return {Kind::exponential, -theta};
}

Correlogram Correlogram::exponential_base(double lambda) { return {Kind::exponential, log_of_base(lambda)}; }

Correlogram Correlogram::squared_exponential(double lambda) {
  return {Kind::squared_exponential, log_of_base(lambda)};
}

Correlogram Correlogram::matern15(double lambda) { return {Kind::matern15, log_of_base(lambda)}; }

Correlogram Correlogram::nugget() { return {Kind::nugget, 0.0}; }

double Correlogram::lambda() const { return std::exp(log_base_); }

double Correlogram::operator()(double h) const {
  h = std::abs(h);
  switch (kind_) {
    case Kind::exponential: return power(log_base_, h);
    case Kind::squared_exponential: return power(log_base_, h * h);
    case Kind::matern15: return (1.0 - h * log_base_) * power(log_base_, h);
    case Kind::nugget: return h == 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string to_string(Correlogram::Kind kind) {
  switch (kind) {
    case Correlogram::Kind::exponential: return "exponential";
    case Correlogram::Kind::squared_exponential: return "squared_exponential";
    case Correlogram::Kind::matern15: return "matern15";
    case Correlogram::Kind::nugget: return "nugget";
  }
  return "unknown";
}

NS2 NS2::paired(double sigma11, double sigma22, double lambda, double lambdac) {
  for (auto [lc, alpha] : kNs2Pairing) {
    if (std::abs(lc - lambdac) < 1e-12) return NS2{sigma11, sigma22, lambda, lambdac, alpha};
  }
  std::ostringstream msg;
  msg << "no published NS2 alpha for lambdac = " << lambdac << " (expected 0.2, 0.5 or 0.8)";
  throw DomainError(msg.str());
}

bool NS2::has_published_pairing() const {
  for (auto [lc, a] : kNs2Pairing) {
    if (std::abs(lc - lambdac) < 1e-12 && std::abs(a - alpha) < 1e-12) return true;
  }
  return false;
}

std::string family_name(const BivariateCovarianceSpec& spec) {
  return std::visit(overloaded{
                        [](const GeneralizedMarkov&) -> std::string { return "generalized_markov"; },
                        [](const Proportional&) -> std::string { return "proportional"; },
                        [](const NS1&) -> std::string { return "ns1"; },
                        [](const Matern& m) -> std::string {
                          switch (m.order) {
                            case MaternOrder::half: return "mat05";
                            case MaternOrder::three_halves: return "mat15";
                            case MaternOrder::infinite: return "matinf";
                          }
                          return "matern";
                        },
                        [](const NS2&) -> std::string { return "ns2"; },
                        [](const NS3&) -> std::string { return "ns3"; },
                    },
                    spec);
}

double eval_pair(const BivariateCovarianceSpec& spec, int i, int j, double h) {
  if ((i != 1 && i != 2) || (j != 1 && j != 2)) {
    std::ostringstream msg;
    msg << "covariance index (" << i << ", " << j << ") must be in {1, 2}";
    throw DomainError(msg.str());
  }
  if (!(h >= 0.0)) throw DomainError("lag must be nonnegative");
  const Terms t = terms(spec, h);
  if (i == 1 && j == 1) return t.c11;
  if (i == 2 && j == 2) return t.c22;
  return t.c12;
}

ValidityReport validate(const BivariateCovarianceSpec& spec) {
  ValidityReport r;
  auto& v = r.violations;
  std::visit(overloaded{
                 [&](const GeneralizedMarkov& s) {
                   check_positive(v, "sigma11", s.sigma11);
                   check_positive(v, "sigma22", s.sigma22);
                   if (!(std::abs(s.rho) < 1.0)) v.push_back("|rho| must be < 1");
                   const double margin = s.sigma22 - s.rho * s.rho * s.sigma11;
                   if (!(margin > 0.0)) {
                     std::ostringstream msg;
                     msg << "sigma22 - rho^2 sigma11 must be > 0, got " << margin;
                     v.push_back(msg.str());
                   }
                   if (!s.c11.continuous()) r.warnings.push_back("c11 is a nugget correlogram (non-continuous)");
                   if (!s.cr.continuous()) {
                     r.warnings.push_back(
                         "cR is the nugget/identity correlogram (non-continuous); the spectral validity "
                         "argument assumes a continuous cR");
                   }
                 },
                 [&](const Proportional& s) {
                   check_positive(v, "sigma11", s.sigma11);
                   check_positive(v, "sigma22", s.sigma22);
                   if (std::abs(s.sigma12 - s.sigma21) > 1e-12 * std::max(1.0, std::abs(s.sigma12)))
                     v.push_back("sigma12 must equal sigma21");
                   const double det = s.sigma11 * s.sigma22 - s.sigma12 * s.sigma21;
                   if (!(det > 0.0)) {
                     std::ostringstream msg;
                     msg << "sigma matrix must be positive definite, det = " << det;
                     v.push_back(msg.str());
                   }
                   if (!s.base.continuous()) r.warnings.push_back("base correlogram is a nugget (non-continuous)");
                 },
                 [&](const NS1& s) {
                   check_positive(v, "sigma11", s.sigma11);
                   check_positive(v, "sigma22", s.sigma22);
                   check_base(v, s.lambda);
                   check_lambdac(v, s.lambdac);
                 },
                 [&](const Matern& s) {
                   check_positive(v, "sigma11", s.sigma11);
                   check_positive(v, "sigma22", s.sigma22);
                   check_base(v, s.lambda);
                   check_lambdac(v, s.lambdac);
                 },
                 [&](const NS2& s) {
                   check_positive(v, "sigma11", s.sigma11);
                   check_positive(v, "sigma22", s.sigma22);
                   check_base(v, s.lambda);
                   check_lambdac(v, s.lambdac);
                   check_positive(v, "alpha", s.alpha);
                   // In one dimension the spectral ratio f12^2/(f11 f22) is linear in
                   // omega^2, so checking omega = 0 and omega -> inf is enough.
                   if (s.alpha > 0.0 && std::abs(s.lambdac) > std::min(s.alpha, 1.0 / s.alpha)) {
                     std::ostringstream msg;
                     msg << "NS2 needs |lambdac| <= min(alpha, 1/alpha) = " << std::min(s.alpha, 1.0 / s.alpha)
                         << ", got " << s.lambdac;
                     v.push_back(msg.str());
                   }
                   if (!s.has_published_pairing()) {
                     r.warnings.push_back(
                         "NS2 (lambdac, alpha) is not one of the published pairs (0.2,0.5), (0.5,0.75), "
                         "(0.8,0.9); validity is not established");
                   }
                 },
                 [&](const NS3& s) {
                   check_positive(v, "sigma11", s.sigma11);
                   check_positive(v, "sigma22", s.sigma22);
                   check_base(v, s.lambda);
                   check_lambdac(v, s.lambdac);
                   // Bivariate Matern with smoothness 1/2, 5/2 and cross 3/2 on a line.
                   if (std::abs(s.lambdac) > kNs3LambdacBound) {
                     std::ostringstream msg;
                     msg << "NS3 needs |lambdac| <= sqrt(2/3), got " << s.lambdac;
                     v.push_back(msg.str());
                   }
                 },
             },
             spec);
  return r;
}

void require_valid(const BivariateCovarianceSpec& spec) {
  const ValidityReport r = validate(spec);
  if (r.ok()) return;
  std::ostringstream msg;
  msg << "invalid " << family_name(spec) << " covariance:";
  for (const auto& s : r.violations) msg << ' ' << s << ';';
  throw ValidationError(msg.str());
}

Eigen::MatrixXd build_joint_covariance(const BivariateCovarianceSpec& spec, const Design& design) {
  require_valid(spec);
  const auto n = static_cast<Eigen::Index>(design.size());
  const auto& x = design.points();
  Eigen::MatrixXd m(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l <= k; ++l) {
      const Terms t = terms(spec, std::abs(x[k] - x[l]));
      m(k, l) = m(l, k) = t.c11;
      m(n + k, n + l) = m(n + l, n + k) = t.c22;
      m(k, n + l) = m(n + l, k) = t.c12;
      m(l, n + k) = m(n + k, l) = t.c12;
    }
  }
  return m;
}

Eigen::MatrixXd build_primary_covariance(const BivariateCovarianceSpec& spec, const Design& design) {
  require_valid(spec);
  const auto n = static_cast<Eigen::Index>(design.size());
  const auto& x = design.points();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l <= k; ++l) m(k, l) = m(l, k) = terms(spec, std::abs(x[k] - x[l])).c11;
  }
  return m;
}

CrossCovariance build_cross_vector(const BivariateCovarianceSpec& spec, const Design& design, double x0) {
  require_valid(spec);
  locate(design, x0);
  const auto n = static_cast<Eigen::Index>(design.size());
  const auto& x = design.points();
  CrossCovariance out{Eigen::VectorXd(2 * n), terms(spec, 0.0).c11};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Terms t = terms(spec, std::abs(x[i] - x0));
    out.sigma0(i) = t.c11;
    out.sigma0(n + i) = t.c12;
  }
  return out;
}

Reduction reduction_applies(const BivariateCovarianceSpec& spec) {
  return std::visit(overloaded{
                        [](const GeneralizedMarkov& s) { return Reduction{true, s.rho}; },
                        [](const Proportional& s) { return Reduction{true, s.sigma12 / s.sigma11}; },
                        [](const NS1& s) { return Reduction{true, s.lambdac * std::sqrt(s.sigma22 / s.sigma11)}; },
                        [](const Matern& s) {
                          return Reduction{true, s.lambdac * std::sqrt(s.sigma22 / s.sigma11)};
                        },
                        [](const NS2&) { return Reduction{false, std::nullopt}; },
                        [](const NS3&) { return Reduction{false, std::nullopt}; },
                    },
                    spec);
}

std::optional<ExponentialKernel> exponential_primary(const BivariateCovarianceSpec& spec) {
  if (!reduction_applies(spec).reduces) return std::nullopt;
  return std::visit(
      overloaded{
          [](const GeneralizedMarkov& s) -> std::optional<ExponentialKernel> {
            if (s.c11.kind() != Correlogram::Kind::exponential) return std::nullopt;
            return ExponentialKernel(s.c11.rate(), s.sigma11);
          },
          [](const Proportional& s) -> std::optional<ExponentialKernel> {
            if (s.base.kind() != Correlogram::Kind::exponential) return std::nullopt;
            return ExponentialKernel(s.base.rate(), s.sigma11);
          },
          [](const NS1& s) -> std::optional<ExponentialKernel> {
            return ExponentialKernel(-std::log(s.lambda), s.sigma11);
          },
          [](const Matern& s) -> std::optional<ExponentialKernel> {
            if (s.order != MaternOrder::half) return std::nullopt;
            return ExponentialKernel(-std::log(s.lambda), s.sigma11);
          },
          [](const auto&) -> std::optional<ExponentialKernel> { return std::nullopt; },
      },
      spec);
}

}  // namespace cokrig
