#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "fwdaffine/basis.hpp"
#include "fwdaffine/curve.hpp"
#include "fwdaffine/montecarlo.hpp"
#include "fwdaffine/pricer.hpp"

namespace fwdaffine {

struct TableSettings {
  SweepKind sweep = SweepKind::theta;
  std::vector<double> values{1, 3, 5, 10, 20};
  std::vector<int> n_values{2, 3, 5, 8, 10};
};

struct MgfSettings {
  double nu = 1.0;
  std::vector<double> lambdas{0, 1, 2, 5};
};

struct RunConfig {
  std::string model_type;  // levy | bns | wishart
  NelsonSiegelCurve curve;
  BasisSystem basis;
  PricingRequest pricing;
  McConfig mc;
  TableSettings table;
  MgfSettings mgf;
};

// Strict: unknown blocks or keys, wrong types and violated invariants raise ValidationError.
RunConfig parse_config(const nlohmann::json& doc);

// Sets doc[a][b]... = value for a dotted key. The value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);

nlohmann::json read_json_file(const std::string& path);

}  // namespace fwdaffine
