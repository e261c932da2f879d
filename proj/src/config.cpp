#include "kmsgf/config.hpp"

#include <cmath>
#include <fstream>

#include "kmsgf/version.hpp"

namespace kmsgf {

using nlohmann::json;

ConfigError::ConfigError(std::string field_, const std::string& message)
    : std::runtime_error("config error at " + field_ + ": " + message),
      field(std::move(field_)) {}

Dispersion ModelConfig::dispersion() const {
  if (!mu) throw std::logic_error("ModelConfig::dispersion: model has a measure, not a mu");
  return Dispersion(kind, *mu);
}

QuasiFreeSpec ModelConfig::quasifree_spec() const {
  QuasiFreeSpec spec{dispersion(), circle, std::nullopt};
  if (mean_index)
    spec.mean = test_functions[static_cast<std::size_t>(*mean_index)];
  return spec;
}

namespace {

std::string idx(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json& require_key(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double number_field(const json& j, const char* key, const std::string& path) {
  return as_number(require_key(j, key, path), path + "." + key);
}

int as_index(const json& j, const std::string& path, std::size_t limit,
             const char* what) {
  if (!j.is_number_integer())
    throw ConfigError(path, std::string("expected an integer ") + what + " index");
  const auto v = j.get<long long>();
  if (v < 0 || static_cast<std::size_t>(v) >= limit)
    throw ConfigError(path, std::string(what) + " index out of range");
  return static_cast<int>(v);
}

std::array<double, 3> parse_vector(const json& j, int dim, const std::string& path) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
    throw ConfigError(path, "expected an array of length dim");
  for (int a = 0; a < dim; ++a) out[static_cast<std::size_t>(a)] = as_number(j[static_cast<std::size_t>(a)], idx(path, static_cast<std::size_t>(a)));
  return out;
}

cd parse_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(path, "expected [re, im]");
  return cd{as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

TestFunction parse_test_function(const json& j, const std::string& path) {
  const json& type = require_key(j, "type", path);
  if (type == "packet") {
    const int dim = static_cast<int>(number_field(j, "dim", path));
    const double width = number_field(j, "width", path);
    const auto center = parse_vector(require_key(j, "center", path), dim, path + ".center");
    const int n_nodes = j.contains("n_nodes")
                            ? static_cast<int>(as_number(j["n_nodes"], path + ".n_nodes"))
                            : default_nodes_per_axis;
    const double cutoff = j.contains("cutoff")
                              ? as_number(j["cutoff"], path + ".cutoff")
                              : default_cutoff(dim, center, width);
    try {
      return gaussian_packet(dim, center, width, n_nodes, cutoff);
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (type == "nodes") {
    TestFunction f;
    f.dim = static_cast<int>(number_field(j, "dim", path));
    if (j.contains("real_in_position")) {
      const json& r = j["real_in_position"];
      if (!r.is_boolean()) throw ConfigError(path + ".real_in_position", "expected a boolean");
      f.real_in_position = r.get<bool>();
    }
    const json& nodes = require_key(j, "nodes", path);
    if (!nodes.is_array() || nodes.empty())
      throw ConfigError(path + ".nodes", "expected a nonempty array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string npath = idx(path + ".nodes", i);
      TestFunction::Node node;
      node.k = parse_vector(require_key(nodes[i], "k", npath), f.dim, npath + ".k");
      node.w = number_field(nodes[i], "w", npath);
      node.v = parse_complex(require_key(nodes[i], "v", npath), npath + ".v");
      f.nodes.push_back(node);
    }
    try {
      validate(f);
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
    return f;
  }
  throw ConfigError(path + ".type", "unknown test function type (packet | nodes)");
}

TimeProfile parse_profile(const json& j, const ThermalCircle& circle,
                          const std::string& path) {
  const json& type = require_key(j, "type", path);
  if (type == "delta_comb") {
    const json& atoms = require_key(j, "atoms", path);
    if (!atoms.is_array() || atoms.empty())
      throw ConfigError(path + ".atoms", "expected a nonempty array");
    std::vector<DeltaComb::Atom> list;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string apath = idx(path + ".atoms", i);
      list.push_back({number_field(atoms[i], "tau", apath),
                      number_field(atoms[i], "weight", apath)});
    }
    try {
      return make_delta_comb(std::move(list), circle);
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (type == "matsubara") {
    const int n_max = static_cast<int>(number_field(j, "n_max", path));
    const json& coeffs = require_key(j, "coeffs", path);
    if (!coeffs.is_array())
      throw ConfigError(path + ".coeffs", "expected an array of [re, im] pairs");
    std::vector<cd> cs;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      cs.push_back(parse_complex(coeffs[i], idx(path + ".coeffs", i)));
    try {
      return make_series(n_max, std::move(cs));
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw ConfigError(path + ".type", "unknown profile type (delta_comb | matsubara)");
}

SpectralMeasure parse_measure(const json& j, const std::string& path) {
  const double floor = number_field(j, "support_floor", path);
  const json& atoms = require_key(j, "atoms", path);
  if (!atoms.is_array() || atoms.empty())
    throw ConfigError(path + ".atoms", "expected a nonempty array");
  bool normalized = true;
  if (j.contains("normalized")) {
    const json& n = j["normalized"];
    if (!n.is_boolean()) throw ConfigError(path + ".normalized", "expected a boolean");
    normalized = n.get<bool>();
  }
  std::vector<SpectralMeasure::Atom> list;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string apath = idx(path + ".atoms", i);
    SpectralMeasure::Atom atom{number_field(atoms[i], "mu", apath),
                               number_field(atoms[i], "weight", apath)};
    if (atom.mu < floor) throw ConfigError(apath + ".mu", "below measure support_floor");
    list.push_back(atom);
  }
  try {
    return SpectralMeasure::make(floor, std::move(list), normalized);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

} // namespace

ModelConfig parse_config_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  const json& schema = require_key(j, "schema", "<root>");
  if (schema != config_schema)
    throw ConfigError("schema", std::string("expected \"") + config_schema + "\"");

  ModelConfig cfg;
  cfg.raw = j;

  const json& model = require_key(j, "model", "<root>");
  const double beta = number_field(model, "beta", "model");
  if (!(beta > 0.0)) throw ConfigError("model.beta", "must be > 0");
  cfg.circle = ThermalCircle(beta);

  const json& disp = require_key(model, "dispersion", "model");
  if (disp == "nonrelativistic") {
    cfg.kind = Dispersion::Kind::nonrelativistic;
  } else if (disp == "relativistic") {
    cfg.kind = Dispersion::Kind::relativistic;
  } else {
    throw ConfigError("model.dispersion",
                      "expected \"nonrelativistic\" or \"relativistic\"");
  }

  const bool has_mu = model.contains("mu");
  const bool has_measure = model.contains("measure");
  if (has_mu == has_measure)
    throw ConfigError("model", "exactly one of mu and measure is required");
  if (has_mu) {
    const double mu = as_number(model["mu"], "model.mu");
    if (!(mu > 0.0)) throw ConfigError("model.mu", "must be > 0");
    cfg.mu = mu;
  } else {
    cfg.measure = parse_measure(model["measure"], "model.measure");
  }

  if (j.contains("test_functions")) {
    const json& tfs = j["test_functions"];
    if (!tfs.is_array()) throw ConfigError("test_functions", "expected an array");
    for (std::size_t i = 0; i < tfs.size(); ++i)
      cfg.test_functions.push_back(parse_test_function(tfs[i], idx("test_functions", i)));
  }

  if (model.contains("mean")) {
    if (!has_mu)
      throw ConfigError("model.mean", "mean is only supported on the pure (mu) model");
    cfg.mean_index = as_index(model["mean"], "model.mean", cfg.test_functions.size(),
                              "test function");
  }

  if (j.contains("profiles")) {
    const json& ps = j["profiles"];
    if (!ps.is_array()) throw ConfigError("profiles", "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i)
      cfg.profiles.push_back(parse_profile(ps[i], cfg.circle, idx("profiles", i)));
  }

  if (j.contains("points")) {
    const json& pts = j["points"];
    if (!pts.is_array()) throw ConfigError("points", "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string path = idx("points", i);
      const double tau = number_field(pts[i], "tau", path);
      const int f = as_index(require_key(pts[i], "f", path), path + ".f",
                             cfg.test_functions.size(), "test function");
      cfg.points.push_back({tau, cfg.test_functions[static_cast<std::size_t>(f)]});
    }
  }

  if (j.contains("arguments")) {
    const json& args = j["arguments"];
    if (!args.is_array()) throw ConfigError("arguments", "expected an array");
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string path = idx("arguments", i);
      const int p = as_index(require_key(args[i], "profile", path), path + ".profile",
                             cfg.profiles.size(), "profile");
      const int f = as_index(require_key(args[i], "f", path), path + ".f",
                             cfg.test_functions.size(), "test function");
      cfg.arguments.push_back({cfg.profiles[static_cast<std::size_t>(p)],
                               cfg.test_functions[static_cast<std::size_t>(f)]});
    }
  }

  if (j.contains("run")) {
    const json& run = j["run"];
    if (!run.is_object()) throw ConfigError("run", "expected an object");
    if (run.contains("seed")) {
      if (!run["seed"].is_number_integer() || run["seed"].get<long long>() < 0)
        throw ConfigError("run.seed", "expected a nonnegative integer");
      cfg.run.seed = run["seed"].get<std::uint64_t>();
    }
    if (run.contains("samples")) {
      if (!run["samples"].is_number_integer() || run["samples"].get<long long>() < 0)
        throw ConfigError("run.samples", "expected a nonnegative integer");
      cfg.run.samples = run["samples"].get<std::size_t>();
    }
    if (run.contains("tolerance")) {
      const double tol = as_number(run["tolerance"], "run.tolerance");
      if (!(tol > 0.0)) throw ConfigError("run.tolerance", "must be > 0");
      cfg.run.tolerance = tol;
    }
    if (run.contains("cumulant_order")) {
      const double v = as_number(run["cumulant_order"], "run.cumulant_order");
      if (v < 1 || v > 12) throw ConfigError("run.cumulant_order", "must be in 1..12");
      cfg.run.cumulant_order = static_cast<int>(v);
    }
    if (run.contains("audit_families")) {
      const double v = as_number(run["audit_families"], "run.audit_families");
      if (v < 1 || v > 1000) throw ConfigError("run.audit_families", "must be in 1..1000");
      cfg.run.audit_families = static_cast<int>(v);
    }
    if (run.contains("audit_family_size")) {
      const double v = as_number(run["audit_family_size"], "run.audit_family_size");
      if (v < 1 || v > 8) throw ConfigError("run.audit_family_size", "must be in 1..8");
      cfg.run.audit_family_size = static_cast<int>(v);
    }
  }

  return cfg;
}

ModelConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<json>", e.what());
  }
  return parse_config_json(j);
}

} // namespace kmsgf
