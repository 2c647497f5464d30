#include "cokrig/spec_io.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <vector>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ':' << line << ": " << what;
  throw ParseError(msg.str());
}

class Reader {
 public:
  Reader(const Config& config, std::string source) : config_(config), source_(std::move(source)) {}

  double number(const std::string& key) {
    const auto& e = entry(key);
    double v = 0.0;
    const char* end = e.value.data() + e.value.size();
    auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail(source_, e.line, "invalid number for '" + key + "'");
    return v;
  }

  std::string word(const std::string& key) { return entry(key).value; }

  bool has(const std::string& key) const { return config_.count(key) > 0; }

  Correlogram correlogram(const std::string& key) {
    const std::string kind = word(key);
    const std::string theta_key = key + "_theta", lambda_key = key + "_lambda";
    const std::size_t line = entry(key).line;
    try {
      if (kind == "nugget") return Correlogram::nugget();
      if (kind == "exponential") {
        if (has(theta_key) == has(lambda_key)) fail(source_, line, "give exactly one of " + theta_key + ", " + lambda_key);
        return has(theta_key) ? Correlogram::exponential_rate(number(theta_key))
                              : Correlogram::exponential_base(number(lambda_key));
      }
      if (kind == "squared_exponential") return Correlogram::squared_exponential(number(lambda_key));
      if (kind == "matern15") return Correlogram::matern15(number(lambda_key));
    } catch (const DomainError& e) {
      fail(source_, line, e.what());
    }
    fail(source_, line, "unknown correlogram '" + kind + "'");
  }

  // Every key must have been consumed.
  void finish() const {
    for (const auto& [key, e] : config_) {
      if (!used_.count(key)) fail(source_, e.line, "unknown key '" + key + "'");
    }
  }

  std::size_t line_of(const std::string& key) const {
    auto it = config_.find(key);
    return it == config_.end() ? 0 : it->second.line;
  }

 private:
  const ConfigEntry& entry(const std::string& key) {
    auto it = config_.find(key);
    if (it == config_.end()) fail(source_, 0, "missing key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  const Config& config_;
  std::string source_;
  std::set<std::string> used_;
};

std::string correlogram_text(const std::string& key, const Correlogram& c) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << key << " = " << to_string(c.kind()) << '\n';
  if (c.kind() == Correlogram::Kind::exponential) {
    out << key << "_theta = " << c.rate() << '\n';
  } else if (c.kind() != Correlogram::Kind::nugget) {
    out << key << "_lambda = " << c.lambda() << '\n';
  }
  return out.str();
}

}  // namespace

Config parse_config(std::istream& in, const std::string& source) {
  Config config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(source, line_no, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) fail(source, line_no, "expected 'key = value'");
    if (config.count(key)) fail(source, line_no, "duplicate key '" + key + "'");
    config.emplace(key, ConfigEntry{value, line_no});
  }
  return config;
}

BivariateCovarianceSpec covariance_from_config(const Config& config, const std::string& source) {
  Reader r(config, source);
  const std::string family = r.word("family");
  BivariateCovarianceSpec spec = NS1{1.0, 1.0, 0.5, 0.0};
  if (family == "generalized_markov") {
    spec = GeneralizedMarkov{r.number("sigma11"), r.number("sigma22"), r.number("rho"), r.correlogram("c11"),
                             r.correlogram("cr")};
  } else if (family == "proportional") {
    const double s12 = r.number("sigma12");
    const double s21 = r.has("sigma21") ? r.number("sigma21") : s12;
    spec = Proportional{r.number("sigma11"), s12, s21, r.number("sigma22"), r.correlogram("base")};
  } else if (family == "ns1" || family == "ns3" || family == "mat05" || family == "mat15" || family == "matinf" ||
             family == "ns2") {
    const double s11 = r.number("sigma11"), s22 = r.number("sigma22");
    const double lambda = r.number("lambda"), lambdac = r.number("lambdac");
    if (family == "ns1") spec = NS1{s11, s22, lambda, lambdac};
    if (family == "ns3") spec = NS3{s11, s22, lambda, lambdac};
    if (family == "mat05") spec = Matern{MaternOrder::half, s11, s22, lambda, lambdac};
    if (family == "mat15") spec = Matern{MaternOrder::three_halves, s11, s22, lambda, lambdac};
    if (family == "matinf") spec = Matern{MaternOrder::infinite, s11, s22, lambda, lambdac};
    if (family == "ns2") {
      if (r.has("alpha")) {
        spec = NS2{s11, s22, lambda, lambdac, r.number("alpha")};
      } else {
        try {
          spec = NS2::paired(s11, s22, lambda, lambdac);
        } catch (const DomainError& e) {
          fail(source, r.line_of("lambdac"), e.what());
        }
      }
    }
  } else {
    fail(source, r.line_of("family"), "unknown family '" + family + "'");
  }
  r.finish();
  return spec;
}

BivariateCovarianceSpec read_covariance_spec(std::istream& in, const std::string& source) {
  return covariance_from_config(parse_config(in, source), source);
}

std::string format_covariance_spec(const BivariateCovarianceSpec& spec) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "family = " << family_name(spec) << '\n';
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        out << "sigma11 = " << s.sigma11 << '\n';
        if constexpr (std::is_same_v<T, GeneralizedMarkov>) {
          out << "sigma22 = " << s.sigma22 << "\nrho = " << s.rho << '\n';
          out << correlogram_text("c11", s.c11) << correlogram_text("cr", s.cr);
        } else if constexpr (std::is_same_v<T, Proportional>) {
          out << "sigma12 = " << s.sigma12 << "\nsigma21 = " << s.sigma21 << "\nsigma22 = " << s.sigma22 << '\n';
          out << correlogram_text("base", s.base);
        } else {
          out << "sigma22 = " << s.sigma22 << "\nlambda = " << s.lambda << "\nlambdac = " << s.lambdac << '\n';
          if constexpr (std::is_same_v<T, NS2>) out << "alpha = " << s.alpha << '\n';
        }
      },
      spec);
  return out.str();
}

}  // namespace cokrig
