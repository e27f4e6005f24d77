#include "fwdaffine/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fwdaffine/errors.hpp"

namespace fwdaffine {

namespace {

using nlohmann::json;

void check_keys(const json& block, const std::string& name, const std::set<std::string>& allowed) {
  require(block.is_object(), "config: block '" + name + "' must be an object");
  for (const auto& [key, _] : block.items()) {
    require(allowed.count(key) > 0, "config: unknown key '" + name + "." + key + "'");
  }
}

template <class T>
T get_or(const json& block, const std::string& block_name, const std::string& key, T fallback) {
  if (!block.contains(key)) return fallback;
  try {
    return block.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: '" + block_name + "." + key + "' has the wrong type");
  }
}

double number(const json& block, const std::string& block_name, const std::string& key, double fallback) {
  if (!block.contains(key)) return fallback;
  require(block.at(key).is_number(), "config: '" + block_name + "." + key + "' must be a number");
  return block.at(key).get<double>();
}

long integer(const json& block, const std::string& block_name, const std::string& key, long fallback) {
  if (!block.contains(key)) return fallback;
  require(block.at(key).is_number_integer(), "config: '" + block_name + "." + key + "' must be an integer");
  return block.at(key).get<long>();
}

std::vector<double> coefficients(const json& block, const std::string& block_name, const std::string& key,
                                 std::vector<double> fallback, int N) {
  if (!block.contains(key)) return fallback;
  const auto v = get_or<std::vector<double>>(block, block_name, key, {});
  require(static_cast<int>(v.size()) == N, "config: '" + block_name + "." + key + "' must have length basis.N");
  return v;
}

const json& block_or_empty(const json& doc, const std::string& name) {
  static const json empty = json::object();
  return doc.contains(name) ? doc.at(name) : empty;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  require(doc.is_object(), "config: top level must be an object");
  check_keys(doc, "config", {"model", "curve", "basis", "pricing", "mc", "table", "mgf"});
  RunConfig cfg;

  const json& basis = block_or_empty(doc, "basis");
  check_keys(basis, "basis", {"alpha", "N", "quad_order", "panel_length"});
  const long N = integer(basis, "basis", "N", 10);
  require(N >= 1 && N <= 16, "config: basis.N must be in [1, 16]");
  cfg.basis = BasisSystem(number(basis, "basis", "alpha", 0.1), static_cast<int>(N),
                          static_cast<int>(integer(basis, "basis", "quad_order", 32)),
                          number(basis, "basis", "panel_length", 1.0));

  const json& curve = block_or_empty(doc, "curve");
  check_keys(curve, "curve", {"beta0", "beta1", "beta2", "tau"});
  cfg.curve = NelsonSiegelCurve(number(curve, "curve", "beta0", 0.05), number(curve, "curve", "beta1", -0.02),
                                number(curve, "curve", "beta2", 0.01), number(curve, "curve", "tau", 2.0));

  require(doc.contains("model"), "config: missing block 'model'");
  const json& model = doc.at("model");
  require(model.is_object() && model.contains("type"), "config: 'model.type' is required");
  cfg.model_type = get_or<std::string>(model, "model", "type", "");
  const int n = static_cast<int>(N);
  if (cfg.model_type == "levy" || cfg.model_type == "bns") {
    check_keys(model, "model", {"type", "beta", "d", "a", "y0", "h0", "drift"});
    const double beta = number(model, "model", "beta", 1.0);
    JumpModelParams m = cfg.model_type == "levy" ? JumpModelParams::levy(n, beta) : JumpModelParams::bns(n, beta);
    m.d = coefficients(model, "model", "d", m.d, n);
    m.a = coefficients(model, "model", "a", m.a, n);
    m.y0 = coefficients(model, "model", "y0", model.contains("d") ? m.d : m.y0, n);
    m.h0 = CurveFunction::constant(number(model, "model", "h0", 1.0));
    const std::string drift = get_or<std::string>(model, "model", "drift", "martingale");
    require(drift == "martingale" || drift == "published", "config: model.drift must be 'martingale' or 'published'");
    m.drift = drift == "published" ? DriftConvention::published : DriftConvention::martingale;
    if (cfg.model_type == "levy") require(m.is_levy(), "config: levy model requires a = 0");
    m.validate();
    cfg.pricing.model = m;
  } else if (cfg.model_type == "wishart") {
    check_keys(model, "model", {"type", "dof", "q", "a", "d", "y0", "h0", "drift_correction", "steps"});
    require(n <= kMaxWishartRank, "config: wishart rank too large");
    WishartModelParams m = WishartModelParams::defaults(n);
    m.dof = static_cast<int>(integer(model, "model", "dof", n));
    m.q = coefficients(model, "model", "q", m.q, n);
    m.a = coefficients(model, "model", "a", m.a, n);
    m.d = coefficients(model, "model", "d", m.d, n);
    m.y0 = coefficients(model, "model", "y0", m.y0, n);
    m.h0 = CurveFunction::constant(number(model, "model", "h0", 1.0));
    m.drift_correction = get_or<bool>(model, "model", "drift_correction", true);
    m.validate();
    cfg.pricing.model = m;
    cfg.pricing.wishart_steps = static_cast<int>(integer(model, "model", "steps", 0));
  } else {
    throw ValidationError("config: model.type must be 'levy', 'bns' or 'wishart'");
  }

  const json& pricing = block_or_empty(doc, "pricing");
  check_keys(pricing, "pricing",
             {"T0", "theta", "K", "kind", "nu", "lambda_max", "lambda_nodes", "lambda_panels", "parity"});
  PricingRequest& req = cfg.pricing;
  req.T0 = number(pricing, "pricing", "T0", 1.0);
  req.theta = number(pricing, "pricing", "theta", 1.0);
  req.K = number(pricing, "pricing", "K", 1.0);
  const std::string kind = get_or<std::string>(pricing, "pricing", "kind", "call");
  require(kind == "call" || kind == "put", "config: pricing.kind must be 'call' or 'put'");
  req.kind = kind == "call" ? OptionKind::call : OptionKind::put;
  if (pricing.contains("nu")) req.nu = number(pricing, "pricing", "nu", 0.0);
  req.lambda_max = number(pricing, "pricing", "lambda_max", 200.0);
  req.lambda_nodes = static_cast<int>(integer(pricing, "pricing", "lambda_nodes", 2048));
  req.lambda_panels = static_cast<int>(integer(pricing, "pricing", "lambda_panels", 32));
  req.compute_parity = get_or<bool>(pricing, "pricing", "parity", true);
  req.validate();

  const json& mc = block_or_empty(doc, "mc");
  check_keys(mc, "mc", {"paths", "steps", "seed", "antithetic", "clip_psd"});
  cfg.mc.n_paths = integer(mc, "mc", "paths", 100000);
  cfg.mc.n_steps = static_cast<int>(integer(mc, "mc", "steps", 64));
  require(!mc.contains("seed") || mc.at("seed").is_number_unsigned(), "config: mc.seed must be a nonnegative integer");
  cfg.mc.seed = mc.contains("seed") ? mc.at("seed").get<std::uint64_t>() : 42;
  cfg.mc.antithetic = get_or<bool>(mc, "mc", "antithetic", true);
  cfg.mc.clip_psd = get_or<bool>(mc, "mc", "clip_psd", true);
  cfg.mc.validate();

  const json& table = block_or_empty(doc, "table");
  check_keys(table, "table", {"sweep", "values", "N"});
  const std::string sweep = get_or<std::string>(table, "table", "sweep", "theta");
  require(sweep == "theta" || sweep == "beta", "config: table.sweep must be 'theta' or 'beta'");
  cfg.table.sweep = sweep == "theta" ? SweepKind::theta : SweepKind::beta;
  if (cfg.table.sweep == SweepKind::beta) cfg.table.values = {0.5, 1, 2, 5};
  cfg.table.values = get_or<std::vector<double>>(table, "table", "values", cfg.table.values);
  cfg.table.n_values = get_or<std::vector<int>>(table, "table", "N", cfg.table.n_values);

  const json& mgf = block_or_empty(doc, "mgf");
  check_keys(mgf, "mgf", {"nu", "lambdas"});
  cfg.mgf.nu = number(mgf, "mgf", "nu", 1.0);
  cfg.mgf.lambdas = get_or<std::vector<double>>(mgf, "mgf", "lambdas", cfg.mgf.lambdas);
  return cfg;
}

void apply_override(json& doc, const std::string& dotted_key, const std::string& value) {
  require(!dotted_key.empty() && dotted_key.find('.') != std::string::npos,
          "override '" + dotted_key + "' must use a dotted path such as pricing.K");
  json* node = &doc;
  std::stringstream ss(dotted_key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    require(!part.empty(), "override '" + dotted_key + "' has an empty path segment");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    require(next.is_object(), "override '" + dotted_key + "' descends into a non-object");
    node = &next;
  }
  json parsed = json::parse(value, nullptr, false);
  (*node)[parts.back()] = parsed.is_discarded() ? json(value) : parsed;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "config: cannot open '" + path + "'");
  json doc = json::parse(in, nullptr, false, false);
  require(!doc.is_discarded(), "config: '" + path + "' is not valid JSON");
  return doc;
}

}  // namespace fwdaffine
