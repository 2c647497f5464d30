#pragma once

// key = value text for bivariate covariance specifications.
//
//   # comment
//   family = generalized_markov
//   sigma11 = 0.85
//   sigma22 = 0.94
//   rho = 0.25
//   c11 = exponential
//   c11_theta = 17.12
//   cr = nugget
//
// Families: generalized_markov (sigma11, sigma22, rho, c11, cr),
// proportional (sigma11, sigma12, sigma21, sigma22, base), and
// ns1 | mat05 | mat15 | matinf | ns3 (sigma11, sigma22, lambda, lambdac),
// ns2 (the same plus alpha, defaulting to the published pairing).
// Correlogram keys <name> in {exponential, squared_exponential, matern15,
// nugget} take <name>_theta (exponential only) or <name>_lambda.

#include <istream>
#include <map>
#include <string>

#include "cokrig/covariance.hpp"

namespace cokrig {

struct ConfigEntry {
  std::string value;
  std::size_t line;
};

using Config = std::map<std::string, ConfigEntry>;

// Throws ParseError ("source:line: ...") for malformed or repeated keys.
Config parse_config(std::istream& in, const std::string& source);

BivariateCovarianceSpec covariance_from_config(const Config& config, const std::string& source);
BivariateCovarianceSpec read_covariance_spec(std::istream& in, const std::string& source);

std::string format_covariance_spec(const BivariateCovarianceSpec& spec);

}  // namespace cokrig
