#pragma once

#include "corrdet/atoms.hpp"
#include "corrdet/correlator_design.hpp"
#include "corrdet/exponents.hpp"
#include "corrdet/joint_design.hpp"
#include "corrdet/noise_model.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace corrdet {

using Json = nlohmann::ordered_json;

/// Floats in CSV and JSON output: 12 significant digits.
std::string format_number(double x);

/// {"type": "gaussian", "var_z": 2.0}, {"type": "laplacian", "q": ...},
/// {"type": "binary", "z0": ...}, {"type": "uniform", "z0": ...},
/// {"type": "mixture_binary_laplace", "delta": ..., "z0": ..., "q": ...}.
/// Throws ConfigError on anything else.
NoiseModel model_from_json(const Json& j);
Json to_json(const NoiseModel& model);

/// {"p_w": 1, "p_s": 16, "var_n": 1}; missing fields take the defaults.
PowerBudget budget_from_json(const Json& j);

/// {"s": [...], "weight": [...]}; weights default to equiprobable.
SignalAtoms signal_from_json(const Json& j);
/// {"w": [...], "s": [...], "weight": [...]}.
JointAtoms joint_from_json(const Json& j);

/// Reads a JSON document; ConfigError on I/O or parse failure.
Json read_json_file(const std::string& path);

/// Value of a required key, or ConfigError naming it.
const Json& require(const Json& j, const std::string& key);

/// Header plus rows; every number through format_number.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_joint_csv(std::ostream& os, const JointAtoms& joint);

Json to_json(const ExponentResult& r);
Json to_json(const JointAtoms& joint);
Json to_json(const DetectorDesign& d);
Json to_json(const QuantizerDesign& q);
Json to_json(const JointDesignResult& r);

}  // namespace corrdet
