#pragma once

#include <string>

#include <json.hpp>

#include "kmsgf/config.hpp"
#include "kmsgf/sampler.hpp"
#include "kmsgf/verify.hpp"

namespace kmsgf {

/** Report scaffolding shared by all CLI commands.  Keys come out of
 *  nlohmann's sorted object order, so a report is byte-identical across runs
 *  except for the timestamp value. */
nlohmann::json report_skeleton(const std::string& command, const ModelConfig& cfg);

nlohmann::json complex_json(cd z);
nlohmann::json matrix_json(const Eigen::MatrixXcd& M);
nlohmann::json to_json(const GramReport& rep);
nlohmann::json to_json(const InvarianceReport& rep);
nlohmann::json to_json(const BoundednessReport& rep);
nlohmann::json to_json(const GrowthReport& rep);
nlohmann::json to_json(const Estimate& est);

/** Two-space indented dump with trailing newline; path "-" writes stdout. */
void write_report(const nlohmann::json& rep, const std::string& path);

} // namespace kmsgf
