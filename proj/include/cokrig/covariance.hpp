#pragma once

// Bivariate covariance families for collocated cokriging.  Every family is
// isotropic: C12(h) = C21(h).  Matrices are built dense and entry by entry.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cokrig/kernel.hpp"

namespace cokrig {

// Correlation function with value 1 at lag zero.  Parametrised by the base
// lambda in (0, 1) through its logarithm, so an exponential rate theta maps
// to log_base = -theta without underflow.
class Correlogram {
 public:
  enum class Kind { exponential, squared_exponential, matern15, nugget };

  static Correlogram exponential_rate(double theta);
  static Correlogram exponential_base(double lambda);
  static Correlogram squared_exponential(double lambda);
  static Correlogram matern15(double lambda);
  static Correlogram nugget();

  Kind kind() const { return kind_; }
  double lambda() const;
  double log_base() const { return log_base_; }
  // Exponential decay rate -log(lambda); meaningful for exponential kinds.
  double rate() const { return -log_base_; }
  bool continuous() const { return kind_ != Kind::nugget; }

  double operator()(double h) const;

 private:
  Correlogram(Kind kind, double log_base) : kind_(kind), log_base_(log_base) {}

  Kind kind_;
  double log_base_;
};

std::string to_string(Correlogram::Kind kind);

// C11 = sigma11 c11, C12 = rho C11, C22 = rho^2 C11 + (sigma22 - rho^2 sigma11) cR.
struct GeneralizedMarkov {
  double sigma11;
  double sigma22;
  double rho;
  Correlogram c11;
  Correlogram cr;
};

// Cij = sigma_ij Q.
struct Proportional {
  double sigma11;
  double sigma12;
  double sigma21;
  double sigma22;
  Correlogram base;
};

struct NS1 {
  double sigma11;
  double sigma22;
  double lambda;
  double lambdac;
};

enum class MaternOrder { half, three_halves, infinite };

// Proportional members Mat(0.5), Mat(1.5), Mat(inf) with sigma12 = sqrt(s11 s22) lambdac.
struct Matern {
  MaternOrder order;
  double sigma11;
  double sigma22;
  double lambda;
  double lambdac;
};

// Cross covariance decays as lambda^(alpha h) instead of lambda^h.  Valid iff
// |lambdac| <= min(alpha, 1/alpha).
struct NS2 {
  double sigma11;
  double sigma22;
  double lambda;
  double lambdac;
  double alpha;

  // alpha from the published (lambdac, alpha) pairing {(0.2,0.5), (0.5,0.75),
  // (0.8,0.9)}; throws DomainError for any other lambdac.
  static NS2 paired(double sigma11, double sigma22, double lambda, double lambdac);
  bool has_published_pairing() const;
};

// NS3 is positive definite on the line iff |lambdac| <= sqrt(2/3).
inline constexpr double kNs3LambdacBound = 0.816496580927726;

struct NS3 {
  double sigma11;
  double sigma22;
  double lambda;
  double lambdac;
};

using BivariateCovarianceSpec = std::variant<GeneralizedMarkov, Proportional, NS1, Matern, NS2, NS3>;

std::string family_name(const BivariateCovarianceSpec& spec);

// C_ij(h) for i, j in {1, 2}; throws DomainError for other indices or h < 0.
double eval_pair(const BivariateCovarianceSpec& spec, int i, int j, double h);

struct ValidityReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

ValidityReport validate(const BivariateCovarianceSpec& spec);

// Throws ValidationError listing every violation.
void require_valid(const BivariateCovarianceSpec& spec);

// [[C11, C12], [C21, C22]] over the design points.
Eigen::MatrixXd build_joint_covariance(const BivariateCovarianceSpec& spec, const Design& design);

// C11 block only.
Eigen::MatrixXd build_primary_covariance(const BivariateCovarianceSpec& spec, const Design& design);

struct CrossCovariance {
  Eigen::VectorXd sigma0;  // (sigma10', sigma20')'
  double sigma00;          // C11(0)
};

CrossCovariance build_cross_vector(const BivariateCovarianceSpec& spec, const Design& design, double x0);

struct Reduction {
  bool reduces;
  std::optional<double> c;  // C12 = c C11 when reduces
};

// Whether the family makes C12 a scalar multiple of C11, so collocated
// cokriging of Z1 collapses to kriging.
Reduction reduction_applies(const BivariateCovarianceSpec& spec);

// The primary covariance as an exponential kernel when the family reduces and
// C11 is exponential; empty otherwise.
std::optional<ExponentialKernel> exponential_primary(const BivariateCovarianceSpec& spec);

}  // namespace cokrig
