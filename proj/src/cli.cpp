#include "cokrig/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cokrig/covariance.hpp"
#include "cokrig/criteria.hpp"
#include "cokrig/design.hpp"
#include "cokrig/errors.hpp"
#include "cokrig/mle.hpp"
#include "cokrig/spec_io.hpp"
#include "cokrig/stations.hpp"

namespace cokrig::cli {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return in;
}

Model parse_model(const std::string& s) { return s == "ordinary" ? Model::ordinary : Model::simple; }

// Options shared by the commands that need a design and a primary kernel.
struct DesignArgs {
  std::string design_path;
  std::size_t n = 0;

  void add(CLI::App* cmd) {
    auto* d = cmd->add_option("--design", design_path, "design file: one gap per line, summing to 1");
    auto* k = cmd->add_option("--n", n, "use the equispaced design with n points")->check(CLI::Range(2, 100000));
    d->excludes(k);
  }

  Design load(std::ostream& err) const {
    if (!design_path.empty()) {
      auto in = open_input(design_path);
      DesignFile file = read_design_file(in, design_path);
      for (const auto& w : file.warnings) err << "warning: " << w << '\n';
      return Design::on_interval(0.0, 1.0, std::move(file.gaps));
    }
    if (n == 0) throw DomainError("give --design or --n");
    return equispaced(n);
  }
};

struct KernelArgs {
  double theta = kUnset;
  double sigma11 = 1.0;
  std::string config;

  void add(CLI::App* cmd) {
    auto* t = cmd->add_option("--theta", theta, "exponential decay rate of the primary variable");
    cmd->add_option("--sigma11", sigma11, "variance of the primary variable")->capture_default_str();
    auto* c = cmd->add_option("--config", config, "covariance specification (key = value)");
    t->excludes(c);
  }

  ExponentialKernel load() const {
    if (!config.empty()) {
      auto in = open_input(config);
      const BivariateCovarianceSpec spec = read_covariance_spec(in, config);
      require_valid(spec);
      auto kernel = exponential_primary(spec);
      if (!kernel) {
        throw ValidationError(config + ": family " + family_name(spec) +
                              " does not reduce to kriging with an exponential primary covariance");
      }
      return *kernel;
    }
    if (std::isnan(theta)) throw DomainError("give --theta or --config");
    return ExponentialKernel(theta, sigma11);
  }
};

struct PriorArgs {
  double theta1 = kUnset;
  double theta2 = kUnset;
  double e_sigma11 = 1.0;
  std::string table;

  void add(CLI::App* cmd) {
    auto* a = cmd->add_option("--theta1", theta1, "lower end of the uniform theta prior");
    auto* b = cmd->add_option("--theta2", theta2, "upper end of the uniform theta prior");
    cmd->add_option("--e-sigma11", e_sigma11, "prior mean of sigma11")->capture_default_str();
    auto* t = cmd->add_option("--prior-table", table, "tabulated theta density, CSV theta,density");
    t->excludes(a)->excludes(b);
  }

  bool given() const { return !table.empty() || !std::isnan(theta1) || !std::isnan(theta2); }

  ThetaPrior load() const {
    if (!table.empty()) {
      auto in = open_input(table);
      std::vector<std::pair<double, double>> nodes;
      std::string line;
      std::size_t line_no = 0;
      bool header = false;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
          if (line.rfind("theta,density", 0) != 0) throw ParseError(table + ":" + std::to_string(line_no) + ": expected header 'theta,density'");
          header = true;
          continue;
        }
        std::istringstream row(line);
        double t = 0.0, p = 0.0;
        char comma = 0;
        if (!(row >> t >> comma >> p) || comma != ',')
          throw ParseError(table + ":" + std::to_string(line_no) + ": expected 'theta,density'");
        nodes.emplace_back(t, p);
      }
      return ThetaPrior::tabulated(std::move(nodes), e_sigma11);
    }
    if (std::isnan(theta1) || std::isnan(theta2)) throw DomainError("give --theta1 and --theta2 (or --prior-table)");
    return ThetaPrior::uniform(theta1, theta2, e_sigma11);
  }
};

void add_model(CLI::App* cmd, std::string& model) {
  cmd->add_option("--model", model, "simple or ordinary")
      ->check(CLI::IsMember({"simple", "ordinary"}))
      ->capture_default_str();
}

unsigned env_threads() {
  if (const char* env = std::getenv("COKRIG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

Criterion criterion_from(const std::string& name) {
  if (name == "smspe") return Criterion::smspe;
  if (name == "imspe") return Criterion::imspe;
  if (name == "risk_smspe") return Criterion::risk_smspe;
  return Criterion::risk_imspe;
}

const char* risk_label(Criterion c, Model m) {
  if (c == Criterion::risk_smspe) return m == Model::simple ? "R1" : "R3";
  return m == Model::simple ? "R2" : "R4";
}

void print_gaps(std::ostream& out, const Design& d) {
  for (double g : d.gaps()) out << g << '\n';
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prediction variance criteria and sampling design for collocated cokriging", "cokrig"};
  app.require_subcommand(1);
  out << std::setprecision(12);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "SMSPE or IMSPE of a design at a known kernel");
  std::string eval_criterion = "imspe", eval_model = "simple";
  bool eval_breakdown = false;
  DesignArgs eval_design;
  KernelArgs eval_kernel;
  evaluate_cmd->add_option("--criterion", eval_criterion)->check(CLI::IsMember({"smspe", "imspe"}))->capture_default_str();
  add_model(evaluate_cmd, eval_model);
  eval_design.add(evaluate_cmd);
  eval_kernel.add(evaluate_cmd);
  evaluate_cmd->add_flag("--per-interval", eval_breakdown, "print each interval's contribution");

  // optimize
  auto* optimize_cmd = app.add_subcommand("optimize", "search the gap simplex for the best design");
  std::string opt_criterion = "imspe", opt_model = "simple", opt_output;
  std::size_t opt_n = 0;
  KernelArgs opt_kernel;
  PriorArgs opt_prior;
  OptimizationProblem opt_problem;
  optimize_cmd->add_option("--criterion", opt_criterion)
      ->check(CLI::IsMember({"smspe", "imspe", "risk_smspe", "risk_imspe"}))
      ->capture_default_str();
  add_model(optimize_cmd, opt_model);
  optimize_cmd->add_option("--n", opt_n, "number of design points")->required()->check(CLI::Range(2, 200));
  opt_kernel.add(optimize_cmd);
  opt_prior.add(optimize_cmd);
  optimize_cmd->add_option("--tolerance", opt_problem.tolerance)->capture_default_str();
  optimize_cmd->add_option("--max-iters", opt_problem.max_iters)->capture_default_str();
  optimize_cmd->add_option("--starts", opt_problem.starts)->check(CLI::Range(1, 1000))->capture_default_str();
  optimize_cmd->add_option("--seed", opt_problem.seed)->capture_default_str();
  optimize_cmd->add_option("--output", opt_output, "write the optimal gaps to this design file");

  // efficiency
  auto* efficiency_cmd = app.add_subcommand("efficiency", "criterion ratio of the equispaced design to a candidate");
  std::string eff_criterion = "smspe", eff_model = "simple";
  DesignArgs eff_design;
  KernelArgs eff_kernel;
  PriorArgs eff_prior;
  efficiency_cmd->add_option("--criterion", eff_criterion)
      ->check(CLI::IsMember({"smspe", "imspe", "risk_smspe", "risk_imspe"}))
      ->capture_default_str();
  add_model(efficiency_cmd, eff_model);
  eff_design.add(efficiency_cmd);
  eff_kernel.add(efficiency_cmd);
  eff_prior.add(efficiency_cmd);

  // risk
  auto* risk_cmd = app.add_subcommand("risk", "prior expectation of SMSPE or IMSPE (R1-R4)");
  std::string risk_criterion = "imspe", risk_model = "simple";
  bool risk_quadrature = false;
  DesignArgs risk_design;
  PriorArgs risk_prior;
  risk_cmd->add_option("--criterion", risk_criterion)->check(CLI::IsMember({"smspe", "imspe"}))->capture_default_str();
  add_model(risk_cmd, risk_model);
  risk_design.add(risk_cmd);
  risk_prior.add(risk_cmd);
  risk_cmd->add_flag("--quadrature", risk_quadrature, "integrate over theta even when a closed form exists");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "maximum likelihood for the generalized Markov model with identity cR");
  std::string fit_obs, fit_stations, fit_design;
  bool fit_raw = false;
  fit_cmd->add_option("--observations", fit_obs, "CSV station_id,z1,z2")->required();
  auto* fs = fit_cmd->add_option("--stations", fit_stations, "stations CSV defining the design");
  auto* fd = fit_cmd->add_option("--design", fit_design, "design file; observations are taken in file order");
  fs->excludes(fd);
  fit_cmd->add_flag("--no-standardize", fit_raw, "fit the raw data instead of centered and scaled data");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "stations CSV to a design file");
  std::string ingest_stations_path, ingest_output;
  ingest_cmd->add_option("--stations", ingest_stations_path, "CSV id,lat,lon,order")->required();
  ingest_cmd->add_option("--output", ingest_output, "design file to write (stdout when omitted)");

  // profile
  auto* profile_cmd = app.add_subcommand("profile", "MSPE along the design interval as CSV x0,mspe");
  std::string prof_model = "simple", prof_output;
  int prof_points = 64;
  DesignArgs prof_design;
  KernelArgs prof_kernel;
  add_model(profile_cmd, prof_model);
  prof_design.add(profile_cmd);
  prof_kernel.add(profile_cmd);
  profile_cmd->add_option("--points-per-interval", prof_points)->check(CLI::Range(2, 1000000))->capture_default_str();
  profile_cmd->add_option("--output", prof_output, "CSV file to write (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*evaluate_cmd) {
      const Design design = eval_design.load(err);
      const ExponentialKernel kernel = eval_kernel.load();
      const Model model = parse_model(eval_model);
      const CriterionReport r = eval_criterion == "smspe" ? smspe(kernel, design, model) : imspe(kernel, design, model);
      out << "criterion " << eval_criterion << "\nmodel " << eval_model << "\nn " << design.size() << "\nvalue "
          << r.value << '\n';
      if (eval_breakdown) {
        for (const auto& c : r.per_interval) out << "interval " << c.index << ' ' << c.value << '\n';
      }
    } else if (*optimize_cmd) {
      opt_problem.n = opt_n;
      opt_problem.threads = env_threads();
      opt_problem.criterion.kind = criterion_from(opt_criterion);
      opt_problem.criterion.model = parse_model(opt_model);
      const bool risk = opt_problem.criterion.kind == Criterion::risk_smspe ||
                        opt_problem.criterion.kind == Criterion::risk_imspe;
      if (risk) {
        opt_problem.criterion.parameters = opt_prior.load();
      } else {
        opt_problem.criterion.parameters = opt_kernel.load();
      }
      const OptimizationResult r = optimize(opt_problem);
      out << "value " << r.value << "\ngap_deviation " << r.gap_deviation << "\nconverged "
          << (r.converged ? "true" : "false") << "\niterations " << r.iterations << "\ngaps\n";
      print_gaps(out, r.design);
      if (!opt_output.empty()) {
        std::ofstream file(opt_output);
        if (!file) throw ParseError(opt_output + ": cannot write file");
        write_design_file(file, r.design);
      }
    } else if (*efficiency_cmd) {
      const Design candidate = eff_design.load(err);
      DesignCriterion c;
      c.kind = criterion_from(eff_criterion);
      c.model = parse_model(eff_model);
      if (c.kind == Criterion::risk_smspe || c.kind == Criterion::risk_imspe) {
        c.parameters = eff_prior.load();
      } else {
        c.parameters = eff_kernel.load();
      }
      const double star = evaluate(c, equispaced(candidate.size())).value;
      const double cand = evaluate(c, candidate).value;
      out << "star " << star << "\ncandidate " << cand << "\nefficiency " << relative_efficiency(star, cand) << '\n';
    } else if (*risk_cmd) {
      const Design design = risk_design.load(err);
      const ThetaPrior prior = risk_prior.load();
      const Model model = parse_model(risk_model);
      const RiskMethod method = risk_quadrature ? RiskMethod::quadrature : RiskMethod::automatic;
      const Criterion kind = risk_criterion == "smspe" ? Criterion::risk_smspe : Criterion::risk_imspe;
      const CriterionReport r = kind == Criterion::risk_smspe ? risk_smspe(prior, design, model, method)
                                                              : risk_imspe(prior, design, model, method);
      out << "risk " << risk_label(kind, model) << "\nn " << design.size() << "\nvalue " << r.value << '\n';
    } else if (*fit_cmd) {
      auto obs_in = open_input(fit_obs);
      std::vector<ObservationRecord> records = read_observations_csv(obs_in, fit_obs);
      std::optional<Design> design;
      if (!fit_stations.empty()) {
        auto st_in = open_input(fit_stations);
        IngestReport report = ingest_stations(read_stations_csv(st_in, fit_stations));
        records = align_observations(report.stations, records);
        design = report.design;
      } else if (!fit_design.empty()) {
        auto d_in = open_input(fit_design);
        DesignFile file = read_design_file(d_in, fit_design);
        for (const auto& w : file.warnings) err << "warning: " << w << '\n';
        design = Design::on_interval(0.0, 1.0, std::move(file.gaps));
        if (records.size() != design->size()) throw ParseError(fit_obs + ": observation count does not match the design");
      } else {
        throw DomainError("give --stations or --design");
      }
      ObservationVector obs{Eigen::VectorXd(static_cast<Eigen::Index>(records.size())),
                            Eigen::VectorXd(static_cast<Eigen::Index>(records.size()))};
      for (std::size_t i = 0; i < records.size(); ++i) {
        obs.z1(static_cast<Eigen::Index>(i)) = records[i].z1;
        obs.z2(static_cast<Eigen::Index>(i)) = records[i].z2;
      }
      MleOptions opts;
      opts.standardize = !fit_raw;
      const MleFit fit = fit_mle(obs, *design, opts);
      out << "theta " << fit.theta_hat << "\nsigma11 " << fit.sigma11_hat << "\nsigma22 " << fit.sigma22_hat
          << "\nrho " << fit.rho_hat << "\nloglik " << fit.loglik << "\nconverged " << (fit.converged ? "true" : "false")
          << "\nstandardized " << (fit.standardized ? "true" : "false") << '\n';
      const char* names[] = {"theta", "sigma11", "sigma22", "rho"};
      for (int i = 0; i < 4; ++i) out << "se_" << names[i] << ' ' << fit.standard_errors[i] << '\n';
    } else if (*ingest_cmd) {
      auto in = open_input(ingest_stations_path);
      const IngestReport report = ingest_stations(read_stations_csv(in, ingest_stations_path));
      err << "stations " << report.stations.size() << ", total hop length " << report.total_km << " km\n";
      if (ingest_output.empty()) {
        write_design_file(out, report.design);
      } else {
        std::ofstream file(ingest_output);
        if (!file) throw ParseError(ingest_output + ": cannot write file");
        write_design_file(file, report.design);
      }
    } else if (*profile_cmd) {
      const Design design = prof_design.load(err);
      const ExponentialKernel kernel = prof_kernel.load();
      const Model model = parse_model(prof_model);
      std::ofstream file;
      if (!prof_output.empty()) {
        file.open(prof_output);
        if (!file) throw ParseError(prof_output + ": cannot write file");
      }
      std::ostream& csv = prof_output.empty() ? out : file;
      csv << std::setprecision(12) << "x0,mspe\n";
      for (std::size_t i = 0; i < design.intervals(); ++i) {
        const double x = design.point(i), d = design.gap(i);
        std::vector<double> offsets;
        for (int j = 0; j < prof_points; ++j) offsets.push_back(d * j / (prof_points - 1));
        offsets.push_back(0.5 * d);
        std::sort(offsets.begin(), offsets.end());
        offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
        // Interior endpoints start the next interval.
        if (i + 1 < design.intervals()) offsets.pop_back();
        for (double a : offsets) csv << x + a << ',' << mspe_closed_form(kernel, design, x + a, model) << '\n';
      }
    }
  } catch (const ConditioningError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace cokrig::cli
