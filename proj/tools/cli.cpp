#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "stablemix/data.hpp"
#include "stablemix/diagnostics.hpp"
#include "stablemix/error.hpp"
#include "stablemix/mixture.hpp"
#include "stablemix/risk.hpp"

namespace stablemix::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double read_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    fail(ErrorCode::data, "unexpected string '" + s + "' where a number was expected");
  }
  if (!j.is_number()) fail(ErrorCode::data, "expected a number in the fit document");
  return j.get<double>();
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::degenerate_law: return kUsage;
    case ErrorCode::data: return kData;
    case ErrorCode::identifiability: return kIdentifiability;
    case ErrorCode::non_convergence: return kNonConvergence;
    case ErrorCode::out_of_range:
    case ErrorCode::capacity: return kCapacity;
  }
  return kUsage;
}

int report_error(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  json e;
  e["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  err << e.dump() << "\n";
  return code;
}

void emit(const json& doc, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(output);
  if (!f) fail(ErrorCode::data, "cannot write " + output);
  f << doc.dump(2) << "\n";
}

json lrt_json(const LrtResult& r) {
  return {{"statistic", number(r.statistic)}, {"df", r.df}, {"p_value", number(r.p_value)}};
}

// Validator for a real in an interval; open ends excluded.
CLI::Validator bounded(double lo, double hi, bool lo_open, bool hi_open) {
  std::ostringstream os;
  os << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
  const std::string desc = os.str();
  return CLI::Validator(
      [=](std::string& s) -> std::string {
        double v = 0.0;
        try {
          std::size_t used = 0;
          v = std::stod(s, &used);
          if (used != s.size()) return "'" + s + "' is not a number";
        } catch (...) {
          return "'" + s + "' is not a number";
        }
        const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
        return ok ? std::string{} : "value " + s + " outside " + desc;
      },
      desc);
}

const double kBig = std::numeric_limits<double>::max();

struct Options {
  std::string model;
  std::string input;
  std::string output;
  std::string fit;
  std::size_t starts = 20;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> sim_seed;
  std::size_t max_evals = 0;
  double sigma_start = 0.5;
  bool fix_b_zero = false;

  std::optional<double> alpha, mu, sigma;
  double b = 0.0;
  double gamma = 0.0;
  double rho = 0.5;
  double delta = 1.0;
  double beta = 1.0;
  std::optional<std::size_t> sim_m, sim_n;
  std::size_t sim_r = 1;
  std::size_t replicates = 1;

  std::optional<double> risk_m, risk_n, threshold;
  double level = 0.95;
};

// ---------------------------------------------------------------------------

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  FitOptions fo;
  fo.starts = o.starts;
  fo.seed = o.seed;
  fo.max_evaluations = o.max_evals;
  fo.ma1_sigma_start_factor = o.sigma_start;
  fo.ma1_fix_b_zero = o.fix_b_zero;

  json doc;
  doc["command"] = "fit";
  doc["input"] = o.input;
  FitResult fit;
  if (o.model == "re") {
    const auto data = read_grouped_csv(o.input);
    fit = fit_random_effects(data, fo);
    doc["n_groups"] = data.groups.size();
  } else {
    const auto data = read_series_csv(o.input);
    fit = fit_ma1(data, fo);
    doc["n_series"] = data.series.size();
    doc["options"] = {{"starts", fo.starts},
                      {"seed", fo.seed},
                      {"sigma_start_factor", fo.ma1_sigma_start_factor},
                      {"fix_b_zero", fo.ma1_fix_b_zero}};
  }
  const auto body = fit_to_json(fit);
  for (const auto& [k, v] : body.items()) doc[k] = v;
  emit(doc, o.output, out);
  if (!fit.converged)
    return report_error(err, kNonConvergence, to_string(ErrorCode::non_convergence),
                        "optimizer did not converge; estimates are the best point found");
  return kOk;
}

void write_rows(const Eigen::MatrixXd& draws, const std::string& model, std::ostream& os) {
  if (model == "re") {
    GroupedSample g;
    for (Eigen::Index r = 0; r < draws.rows(); ++r) {
      Group grp{"g" + std::to_string(r + 1), {}};
      for (Eigen::Index t = 0; t < draws.cols(); ++t) grp.values.push_back(draws(r, t));
      g.groups.push_back(std::move(grp));
    }
    write_grouped_csv(os, g);
    return;
  }
  SeriesSample s;
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    Series ser{"s" + std::to_string(r + 1), {}};
    for (Eigen::Index t = 0; t < draws.cols(); ++t) ser.values.push_back(draws(r, t));
    s.series.push_back(std::move(ser));
  }
  write_series_csv(os, s);
}

int cmd_simulate(const Options& o, std::ostream& out) {
  if (!o.sim_seed) fail(ErrorCode::invalid_argument, "simulate requires --seed");
  if (!o.alpha) fail(ErrorCode::invalid_argument, "simulate requires --alpha");
  const double alpha = *o.alpha;
  const double mu = o.mu.value_or(0.0);
  const double sigma = o.sigma.value_or(1.0);
  auto need_n = [&]() {
    if (!o.sim_n) fail(ErrorCode::invalid_argument, "--model " + o.model + " requires --n");
    return *o.sim_n;
  };

  Eigen::MatrixXd draws;
  if (o.model == "hierarchical") {
    if (o.gamma != 0.0) fail(ErrorCode::invalid_argument, "--gamma is not supported for hierarchical");
    if (!o.sim_m) fail(ErrorCode::invalid_argument, "--model hierarchical requires --m");
    HierarchicalSpec h;
    h.mu = mu;
    h.sigma = sigma;
    h.alpha = alpha;
    h.beta = o.beta;
    h.shape.assign(*o.sim_m, std::vector<std::size_t>(need_n(), o.sim_r));
    draws = simulate(h, o.replicates, *o.sim_seed);
  } else {
    std::optional<MixtureSpec> spec;
    const std::size_t n = need_n();
    if (o.model == "re") {
      spec = build_random_effects(RandomEffectsSpec{mu, sigma, alpha, {n}});
    } else if (o.model == "ma1") {
      spec = build_hidden_ma(HiddenMaSpec{std::vector<double>(n, mu), sigma, alpha, {1.0, o.b}});
    } else if (o.model == "ar1") {
      spec = build_hidden_ar(HiddenArSpec{std::vector<double>(n, mu), sigma, alpha, o.rho});
    } else {
      SpatialMaSpec sp;
      sp.n = n;
      sp.delta = o.delta;
      sp.mu = {mu};
      sp.sigma = sigma;
      sp.alpha = alpha;
      spec = build_spatial_ma(sp);
    }
    draws = o.gamma != 0.0 ? gev_simulate(gev_translate(*spec, o.gamma), o.replicates, *o.sim_seed)
                           : simulate(*spec, o.replicates, *o.sim_seed);
  }

  if (o.output.empty()) {
    write_rows(draws, o.model, out);
  } else {
    std::ofstream f(o.output);
    if (!f) fail(ErrorCode::data, "cannot write " + o.output);
    write_rows(draws, o.model, f);
  }
  return kOk;
}

FitResult load_fit(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::data, "cannot read fit document " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorCode::data, "malformed fit document " + path + ": " + e.what());
  }
  return fit_from_json(doc);
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  const auto fit = load_fit(o.fit);
  const auto data = read_grouped_csv(o.input);
  const auto report = diagnostic_report(fit, data);

  json doc;
  doc["command"] = "diagnose";
  doc["fit"] = o.fit;
  doc["input"] = o.input;
  doc["implied_correlation"] = number(report.implied_correlation);
  doc["empirical_correlation"] = number(report.empirical_correlation);
  if (report.qq) {
    const auto& q = *report.qq;
    json qq;
    qq["theoretical"] = json::array();
    qq["empirical"] = json::array();
    for (double v : q.theoretical) qq["theoretical"].push_back(number(v));
    for (double v : q.empirical) qq["empirical"].push_back(number(v));
    qq["reference_line"] = {{"intercept", q.reference_intercept}, {"slope", q.reference_slope}};
    qq["least_squares_line"] = {{"intercept", number(q.ls_intercept)}, {"slope", number(q.ls_slope)}};
    doc["qq"] = qq;
  } else {
    doc["qq"] = nullptr;
  }
  const auto& c = report.conditional;
  json cond;
  cond["separate"] = fit_to_json(c.separate);
  cond["common_sigma"] = fit_to_json(c.common_sigma);
  cond["pooled"] = fit_to_json(c.pooled);
  cond["lrt_separate_vs_common"] = c.separate_vs_common ? lrt_json(*c.separate_vs_common) : json(nullptr);
  cond["lrt_common_vs_pooled"] = lrt_json(c.common_vs_pooled);
  cond["flags"] = c.flags;
  doc["conditional_models"] = cond;
  doc["sigma_checks"] = {
      {"sigma_hat", number(report.sigma_hat)},
      {"sigma_common", number(report.sigma_common)},
      {"sigma_relative_difference", number(report.sigma_relative_difference)},
      {"sigma_star", number(report.sigma_star)},
      {"sigma_pooled", number(report.sigma_pooled)},
      {"sigma_star_relative_difference", number(report.sigma_star_relative_difference)}};
  doc["notes"] = report.notes;

  if (!o.output.empty()) {
    const fs::path base(o.output);
    const auto stem = base.stem().string();
    const auto gumbel_path = base.parent_path() / (stem + "_gumbel.csv");
    const auto qq_path = base.parent_path() / (stem + "_qq.csv");
    std::ofstream g(gumbel_path);
    if (!g) fail(ErrorCode::data, "cannot write " + gumbel_path.string());
    g << "group,x,y\n";
    for (const auto& plot : report.gumbel_plots)
      for (const auto& p : plot.points)
        g << plot.key << ',' << format_double(p.x) << ',' << format_double(p.y) << '\n';
    json files;
    files["gumbel"] = gumbel_path.filename().string();
    if (report.qq) {
      std::ofstream q(qq_path);
      if (!q) fail(ErrorCode::data, "cannot write " + qq_path.string());
      q << "theoretical,empirical\n";
      for (std::size_t i = 0; i < report.qq->theoretical.size(); ++i)
        q << format_double(report.qq->theoretical[i]) << ',' << format_double(report.qq->empirical[i])
          << '\n';
      files["qq"] = qq_path.filename().string();
    }
    doc["plot_files"] = files;
  }
  emit(doc, o.output, out);
  return kOk;
}

int cmd_risk(const Options& o, std::ostream& out) {
  RiskQuery q;
  q.m = *o.risk_m;
  q.n = *o.risk_n;
  q.threshold = *o.threshold;
  std::optional<FitResult> fit;
  if (!o.fit.empty()) {
    if (o.mu || o.sigma || o.alpha)
      fail(ErrorCode::invalid_argument, "give either --fit or --mu/--sigma/--alpha, not both");
    fit = load_fit(o.fit);
    if (fit->model != "random_effects")
      fail(ErrorCode::invalid_argument, "risk needs a random-effects fit document");
    q.mu = fit->estimate("mu");
    q.sigma = fit->estimate("sigma");
    q.alpha = fit->estimate("alpha");
  } else {
    if (!o.mu || !o.sigma || !o.alpha)
      fail(ErrorCode::invalid_argument, "risk requires --mu, --sigma and --alpha (or --fit)");
    q.mu = *o.mu;
    q.sigma = *o.sigma;
    q.alpha = *o.alpha;
  }
  const auto r = risk_return_period(q);

  json doc;
  doc["command"] = "risk";
  doc["query"] = {{"m", q.m},         {"n", q.n},         {"threshold", q.threshold},
                  {"mu", q.mu},       {"sigma", q.sigma}, {"alpha", q.alpha}};
  doc["cdf"] = number(r.cdf);
  doc["return_period"] = number(r.return_period);
  doc["infinite_return_period"] = r.infinite;
  if (fit) {
    doc["fit"] = o.fit;
    if (fit->covariance && !r.infinite) {
      const auto ci = return_period_interval(q, *fit, o.level);
      doc["interval"] = {{"level", o.level},
                         {"lower", number(ci.lower)},
                         {"upper", number(ci.upper)},
                         {"std_error", number(ci.std_error)}};
    } else {
      doc["interval"] = nullptr;
      doc["interval_note"] = "no covariance in the fit document or infinite return period";
    }
  }
  emit(doc, o.output, out);
  return kOk;
}

}  // namespace

// ---------------------------------------------------------------------------

json fit_to_json(const FitResult& fit) {
  json doc;
  doc["model"] = fit.model;
  doc["n_observations"] = fit.n_observations;
  doc["loglik"] = number(fit.loglik);
  doc["initial_loglik"] = number(fit.initial_loglik);
  doc["converged"] = fit.converged;
  doc["n_starts_used"] = fit.n_starts_used;
  doc["best_start"] = fit.best_start;
  doc["evaluations"] = fit.evaluations;
  json params = json::array();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const double se = fit.std_errors.empty() ? std::numeric_limits<double>::quiet_NaN() : fit.std_errors[i];
    params.push_back({{"name", fit.names[i]}, {"estimate", number(fit.estimates[i])}, {"std_error", number(se)}});
  }
  doc["parameters"] = params;
  if (fit.covariance) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < fit.covariance->rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < fit.covariance->cols(); ++j) row.push_back(number((*fit.covariance)(i, j)));
      rows.push_back(row);
    }
    doc["covariance"] = rows;
  } else {
    doc["covariance"] = nullptr;
  }
  json derived = json::array();
  for (const auto& d : fit.derived)
    derived.push_back({{"name", d.name}, {"estimate", number(d.value)}, {"std_error", number(d.std_error)}});
  doc["derived"] = derived;
  doc["warnings"] = fit.warnings;
  return doc;
}

FitResult fit_from_json(const json& doc) {
  try {
    FitResult fit;
    fit.model = doc.at("model").get<std::string>();
    fit.loglik = read_number(doc.at("loglik"));
    fit.converged = doc.at("converged").get<bool>();
    bool have_se = true;
    for (const auto& p : doc.at("parameters")) {
      fit.names.push_back(p.at("name").get<std::string>());
      fit.estimates.push_back(read_number(p.at("estimate")));
      const double se = read_number(p.at("std_error"));
      have_se = have_se && !std::isnan(se);
      fit.std_errors.push_back(se);
    }
    if (!have_se) fit.std_errors.clear();
    const auto& cov = doc.at("covariance");
    if (!cov.is_null()) {
      const auto k = static_cast<Eigen::Index>(fit.names.size());
      if (cov.size() != fit.names.size()) fail(ErrorCode::data, "covariance has the wrong size");
      Eigen::MatrixXd c(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        if (cov[i].size() != fit.names.size()) fail(ErrorCode::data, "covariance has the wrong size");
        for (Eigen::Index j = 0; j < k; ++j) c(i, j) = read_number(cov[i][j]);
      }
      fit.covariance = c;
    }
    return fit;
  } catch (const json::exception& e) {
    fail(ErrorCode::data, std::string("fit document is missing fields: ") + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positive-stable mixtures of extreme value distributions", "stablemix"};
  app.require_subcommand(1);
  Options o;

  const auto alpha_check = bounded(0.0, 1.0, true, false);
  const auto positive = bounded(0.0, kBig, true, false);
  const auto nonnegative = bounded(0.0, kBig, false, false);
  const auto finite = bounded(-kBig, kBig, false, false);
  const auto at_least_one = bounded(1.0, kBig, false, false);

  auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit of a random-effects or MA(1) model");
  fit->add_option("--model", o.model, "re or ma1")->required()->check(CLI::IsMember({"re", "ma1"}));
  fit->add_option("--input", o.input, "CSV data file")->required();
  fit->add_option("--output", o.output, "Result document (default: stdout)");
  fit->add_option("--starts", o.starts, "Multi-start count (ma1)")->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
  fit->add_option("--seed", o.seed, "Seed for random starts");
  fit->add_option("--max-evals", o.max_evals, "Simplex evaluation cap per start (0: automatic)");
  fit->add_option("--sigma-start", o.sigma_start, "MA(1) default start sigma as a multiple of the PWM scale")
      ->check(positive);
  fit->add_flag("--fix-b-zero", o.fix_b_zero, "Fit the MA(1) model with b = 0");

  auto* sim = app.add_subcommand("simulate", "Exact simulation from a model family");
  sim->add_option("--model", o.model, "re, ma1, ar1, spatial or hierarchical")
      ->required()
      ->check(CLI::IsMember({"re", "ma1", "ar1", "spatial", "hierarchical"}));
  sim->add_option("--alpha", o.alpha, "Stable index in (0, 1]")->check(alpha_check);
  sim->add_option("--mu", o.mu, "Location")->check(finite);
  sim->add_option("--sigma", o.sigma, "Scale")->check(positive);
  sim->add_option("--b", o.b, "MA(1) coefficient")->check(nonnegative);
  sim->add_option("--gamma", o.gamma, "GEV shape (0: Gumbel)")->check(finite);
  sim->add_option("--rho", o.rho, "AR(1) coefficient")->check(bounded(0.0, 1.0, true, true));
  sim->add_option("--delta", o.delta, "Spatial weight")->check(positive);
  sim->add_option("--beta", o.beta, "Outer stable index (hierarchical)")->check(alpha_check);
  sim->add_option("--m", o.sim_m, "Outer groups (hierarchical)")->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  sim->add_option("--n", o.sim_n, "Group size, series length, grid side or subgroups")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  sim->add_option("--r", o.sim_r, "Observations per subgroup (hierarchical)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  sim->add_option("--replicates", o.replicates, "Independent replicates (groups or series)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  sim->add_option("--seed", o.sim_seed, "Unsigned 64-bit seed (required)");
  sim->add_option("--output", o.output, "CSV output (default: stdout)");

  auto* diag = app.add_subcommand("diagnose", "Diagnostics for a random-effects fit");
  diag->add_option("--fit", o.fit, "Fit document")->required();
  diag->add_option("--input", o.input, "Grouped CSV data")->required();
  diag->add_option("--output", o.output, "Report document; plot CSVs are written next to it");

  auto* risk = app.add_subcommand("risk", "Return period of a threshold");
  risk->add_option("--m", o.risk_m, "Number of groups")->required()->check(at_least_one);
  risk->add_option("--n", o.risk_n, "Blocks per group")->required()->check(at_least_one);
  risk->add_option("--threshold", o.threshold, "Threshold in data units")->required()->check(finite);
  risk->add_option("--mu", o.mu, "Location")->check(finite);
  risk->add_option("--sigma", o.sigma, "Scale")->check(positive);
  risk->add_option("--alpha", o.alpha, "Stable index in (0, 1]")->check(alpha_check);
  risk->add_option("--fit", o.fit, "Random-effects fit document (adds a delta-method interval)");
  risk->add_option("--level", o.level, "Interval level")->check(bounded(0.0, 1.0, true, true));
  risk->add_option("--output", o.output, "Result document (default: stdout)");

  std::vector<std::string> argv_storage{"stablemix"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, kUsage, "usage", e.what());
  }

  try {
    if (*fit) return cmd_fit(o, out, err);
    if (*sim) return cmd_simulate(o, out);
    if (*diag) return cmd_diagnose(o, out);
    return cmd_risk(o, out);
  } catch (const Error& e) {
    return report_error(err, exit_code(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return report_error(err, kUsage, "internal", e.what());
  }
}

}  // namespace stablemix::cli
