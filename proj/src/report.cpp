#include "kmsgf/report.hpp"

#include <ctime>
#include <fstream>
#include <iostream>

#include "kmsgf/version.hpp"

namespace kmsgf {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace

json report_skeleton(const std::string& command, const ModelConfig& cfg) {
  json rep;
  rep["schema"] = report_schema;
  rep["artifact_version"] = version;
  rep["command"] = command;
  rep["timestamp"] = utc_timestamp();
  rep["config"] = cfg.raw;
  rep["tolerances"] = {{"run_tolerance", cfg.run.tolerance}};
  rep["results"] = json::object();
  rep["pass"] = true;
  return rep;
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Eigen::MatrixXcd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(complex_json(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const GramReport& rep) {
  json j;
  j["verdict"] = rep.verdict == GramReport::Verdict::psd ? "psd" : "indefinite";
  j["tolerance"] = rep.tolerance;
  j["asymmetry"] = rep.asymmetry;
  j["lambda_min"] = rep.lambda_min;
  j["lambda_max"] = rep.lambda_max;
  json evs = json::array();
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
    evs.push_back(rep.eigenvalues(i));
  j["eigenvalues"] = evs;
  if (rep.verdict == GramReport::Verdict::indefinite) {
    json w = json::array();
    for (Eigen::Index i = 0; i < rep.witness.size(); ++i)
      w.push_back(complex_json(rep.witness(i)));
    j["witness"] = w;
  }
  return j;
}

json to_json(const InvarianceReport& rep) {
  return json{{"shift_deviation", rep.shift_deviation},
              {"reflection_deviation", rep.reflection_deviation},
              {"periodicity_deviation", rep.periodicity_deviation},
              {"tolerance", rep.tolerance},
              {"pass", rep.pass}};
}

json to_json(const BoundednessReport& rep) {
  return json{{"sup_ratio", rep.sup_ratio},
              {"bound", rep.bound},
              {"pairs", rep.pairs},
              {"pass", rep.pass}};
}

json to_json(const GrowthReport& rep) {
  return json{{"C", rep.C},           {"R", rep.R},
              {"gamma", rep.gamma},   {"max_residual", rep.max_residual},
              {"n_max", rep.n_max},   {"bound_holds", rep.bound_holds}};
}

json to_json(const Estimate& est) {
  return json{{"value", complex_json(est.value)}, {"std_error", est.std_error}};
}

void write_report(const json& rep, const std::string& path) {
  if (path == "-") {
    std::cout << rep.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report path " + path);
  out << rep.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing report to " + path);
}

} // namespace kmsgf
