#include "fwdaffine/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "fwdaffine/config.hpp"
#include "fwdaffine/errors.hpp"
#include "fwdaffine/parallel.hpp"

namespace fwdaffine {

namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// NaN is not representable in JSON; report it as null.
ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void report_error(std::ostream& err, const char* kind, const std::string& message) {
  err << ojson{{"error", kind}, {"message", message}}.dump() << '\n';
}

struct Invocation {
  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 0;
};

RunConfig load(const Invocation& inv) {
  nlohmann::json doc = read_json_file(inv.config_path);
  for (const std::string& o : inv.overrides) {
    require(o.rfind("--", 0) == 0 && o.find('=') != std::string::npos,
            "unrecognised argument '" + o + "', overrides look like --pricing.K=2");
    const std::size_t eq = o.find('=');
    apply_override(doc, o.substr(2, eq - 2), o.substr(eq + 1));
  }
  return parse_config(doc);
}

int cmd_price(const RunConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  const PriceResult r = price_option(cfg.pricing, cfg.basis, cfg.curve);
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["price"] = r.price;
  j["integrand_tail"] = r.integrand_tail;
  j["parity_gap"] = number_or_null(r.parity_gap);
  j["n_evals"] = r.n_evals;
  j["instability_warning"] = r.instability_warning;
  j["wall_time_s"] = seconds_since(start);
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_mgf(const RunConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  const TransformEvaluator phi(cfg.pricing.model, cfg.basis, cfg.curve, cfg.pricing.theta, cfg.pricing.T0,
                               cfg.pricing.wishart_steps);
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["nu"] = cfg.mgf.nu;
  ojson values = ojson::array();
  for (double lam : cfg.mgf.lambdas) {
    const cplx v = phi(cplx(cfg.mgf.nu, lam));
    values.push_back({{"lambda", lam}, {"re", v.real()}, {"im", v.imag()}});
  }
  j["values"] = values;
  j["wall_time_s"] = seconds_since(start);
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_table(const RunConfig& cfg, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const ConvergenceTable t = convergence_table(cfg.pricing, cfg.basis, cfg.curve, cfg.table.n_values,
                                               cfg.table.sweep, cfg.table.values);
  std::ofstream file(out_path);
  require(static_cast<bool>(file), "table: cannot write '" + out_path + "'");
  write_table_csv(file, t);
  file.close();
  out << out_path << '\n';
  if (!t.complete()) {
    for (const std::string& e : t.errors) report_error(err, "numerical", "table cell failed: " + e);
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_mc_compare(const RunConfig& cfg, std::ostream& out) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = cfg.model_type;
  j["mc_paths"] = cfg.mc.n_paths;
  j["mc_steps"] = cfg.mc.n_steps;
  j["mc_seed"] = cfg.mc.seed;
  if (const auto* jump = std::get_if<JumpModelParams>(&cfg.pricing.model)) {
    PricingRequest req = cfg.pricing;
    req.compute_parity = false;
    auto start = Clock::now();
    const PriceResult affine = price_option(req, cfg.basis, cfg.curve);
    const double affine_time = seconds_since(start);
    start = Clock::now();
    const McJumpResult mc = mc_price_jump(*jump, req, cfg.basis, cfg.curve, cfg.mc);
    const double mc_time = seconds_since(start);
    const double z = mc.price.std_error > 0.0 ? (mc.price.mean - affine.price) / mc.price.std_error : 0.0;
    j["affine_price"] = affine.price;
    j["mc_price"] = mc.price.mean;
    j["mc_std_error"] = mc.price.std_error;
    j["z_score"] = z;
    j["forward"] = cfg.curve.forward_price(req.T0 + req.theta);
    j["mc_forward_mean"] = mc.forward.mean;
    j["mc_forward_std_error"] = mc.forward.std_error;
    j["coarse_steps_warning"] = mc.coarse_steps;
    j["affine_wall_time_s"] = affine_time;
    j["mc_wall_time_s"] = mc_time;
  } else {
    const auto& w = std::get<WishartModelParams>(cfg.pricing.model);
    auto start = Clock::now();
    const TransformEvaluator phi(cfg.pricing.model, cfg.basis, cfg.curve, cfg.pricing.theta, cfg.pricing.T0,
                                 cfg.pricing.wishart_steps);
    std::vector<cplx> affine;
    for (double lam : cfg.mgf.lambdas) affine.push_back(phi(cplx(cfg.mgf.nu, lam)));
    const double affine_time = seconds_since(start);
    start = Clock::now();
    const McMgfResult mc = mc_mgf_wishart(w, cfg.mgf.nu, cfg.mgf.lambdas, cfg.pricing.theta,
                                          Eigen::MatrixXd::Zero(w.rank, w.rank), cfg.pricing.T0, cfg.basis,
                                          cfg.curve, cfg.mc);
    const double mc_time = seconds_since(start);
    ojson rows = ojson::array();
    for (std::size_t l = 0; l < affine.size(); ++l) {
      const McComplexEstimate& e = mc.values[l];
      const auto z = [](double x, double mean, double se) { return se > 0.0 ? (mean - x) / se : 0.0; };
      rows.push_back({{"lambda", cfg.mgf.lambdas[l]},
                      {"affine_re", affine[l].real()},
                      {"affine_im", affine[l].imag()},
                      {"mc_re", e.mean.real()},
                      {"mc_im", e.mean.imag()},
                      {"mc_std_error_re", e.std_error_re},
                      {"mc_std_error_im", e.std_error_im},
                      {"z_re", z(affine[l].real(), e.mean.real(), e.std_error_re)},
                      {"z_im", z(affine[l].imag(), e.mean.imag(), e.std_error_im)}});
    }
    j["nu"] = cfg.mgf.nu;
    j["mgf"] = rows;
    j["psd_clip_fraction"] = mc.clip_fraction;
    j["affine_wall_time_s"] = affine_time;
    j["mc_wall_time_s"] = mc_time;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forward option pricing under function-valued affine stochastic volatility"};
  app.require_subcommand(1);
  Invocation inv;
  std::string out_path = "table.csv";
  std::string sweep;
  std::vector<double> values;
  std::vector<int> n_values;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("config", inv.config_path, "JSON run configuration")->required();
    sub->add_option("--threads", inv.threads, "worker thread cap (falls back to PRICER_THREADS)");
    sub->allow_extras();
  };
  CLI::App* price = app.add_subcommand("price", "price one option");
  CLI::App* mgf = app.add_subcommand("mgf", "evaluate the moment generating function");
  CLI::App* table = app.add_subcommand("table", "relative price differences across truncation ranks");
  CLI::App* compare = app.add_subcommand("mc-compare", "affine versus Monte Carlo");
  for (CLI::App* sub : {price, mgf, table, compare}) common(sub);
  table->add_option("--out", out_path, "CSV output path");
  table->add_option("--sweep", sweep, "theta or beta")->check(CLI::IsMember({"theta", "beta"}));
  table->add_option("--values", values, "sweep values")->delimiter(',');
  table->add_option("--N", n_values, "truncation ranks; the largest is the baseline")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  }
  CLI::App* chosen = app.get_subcommands().front();
  inv.overrides = chosen->remaining();

  if (inv.threads <= 0) {
    if (const char* env = std::getenv("PRICER_THREADS")) inv.threads = std::atoi(env);
  }
  set_thread_count(inv.threads);

  try {
    RunConfig cfg = load(inv);
    if (chosen == price) return cmd_price(cfg, out);
    if (chosen == mgf) return cmd_mgf(cfg, out);
    if (chosen == compare) return cmd_mc_compare(cfg, out);
    if (!sweep.empty()) {
      cfg.table.sweep = sweep == "theta" ? SweepKind::theta : SweepKind::beta;
      require(!values.empty() || cfg.table.sweep == SweepKind::theta, "table: --values required for a beta sweep");
    }
    if (!values.empty()) cfg.table.values = values;
    if (!n_values.empty()) cfg.table.n_values = n_values;
    require(!cfg.table.values.empty(), "table: sweep values required");
    return cmd_table(cfg, out_path, out, err);
  } catch (const ValidationError& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", e.what());
    return kExitNumerical;
  }
}

}  // namespace fwdaffine
