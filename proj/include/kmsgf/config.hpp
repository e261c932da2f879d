#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmsgf/greens.hpp"

namespace kmsgf {

/** Parse/validation failure carrying the dotted path of the offending field
 *  (e.g. "model.measure.atoms[2].mu"). */
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& message);
};

struct RunParams {
  std::uint64_t seed = 12345;
  std::size_t samples = 100000;
  double tolerance = 1e-10;
  int cumulant_order = 4;
  int audit_families = 8;
  int audit_family_size = 6;
};

/** One model plus one run, as described by a "kmsgf-config/1" document.
 *  Exactly one of mu (pure quasi-free model) and measure (mixture /
 *  generalized-free model) is present. */
struct ModelConfig {
  ThermalCircle circle;
  Dispersion::Kind kind = Dispersion::Kind::nonrelativistic;
  std::optional<double> mu;
  std::optional<SpectralMeasure> measure;
  std::optional<int> mean_index;  // into test_functions; pure model only
  std::vector<TestFunction> test_functions;
  std::vector<TimeProfile> profiles;
  std::vector<SharpPoint> points;
  std::vector<Argument> arguments;
  RunParams run;
  nlohmann::json raw;  // echoed into reports

  bool has_measure() const { return measure.has_value(); }
  Dispersion dispersion() const;       // pure model only
  QuasiFreeSpec quasifree_spec() const;  // pure model only
};

ModelConfig parse_config_json(const nlohmann::json& j);
ModelConfig parse_config_file(const std::string& path);

} // namespace kmsgf
