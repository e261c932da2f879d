#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef KMSGF_CLI_PATH
#error "KMSGF_CLI_PATH must point at the CLI binary"
#endif
#ifndef KMSGF_CONFIG_DIR
#error "KMSGF_CONFIG_DIR must point at the shipped configs"
#endif

namespace {

using nlohmann::json;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_stdout.tmp";
  const std::string err_path = "cli_stderr.tmp";
  const std::string cmd = std::string(KMSGF_CLI_PATH) + " " + args + " > " + out_path +
                          " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string config(const char* name) {
  return std::string(KMSGF_CONFIG_DIR) + "/" + name;
}

std::string strip_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("\"timestamp\"") == std::string::npos) out << line << '\n';
  return out.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help exit cleanly") {
  CHECK(run_cli("--version").code == 0);
  const auto help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("cumulant") != std::string::npos);
}

TEST_CASE("missing subcommand or config is a usage error") {
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("cumulant").code == 1);
  CHECK(run_cli("no-such-command --config x.json").code == 1);
}

TEST_CASE("config errors exit 1 and name the offending field") {
  const auto missing = run_cli("green-eval --config /definitely/not/there.json");
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error:") != std::string::npos);

  std::ofstream bad("cli_bad.tmp.json");
  bad << "{\"schema\":\"kmsgf-config/1\",\"model\":{\"dispersion\":\"nonrelativistic\",\"mu\":1.0}}";
  bad.close();
  const auto r = run_cli("green-eval --config cli_bad.tmp.json");
  CHECK(r.code == 1);
  CHECK(r.err.find("model.beta") != std::string::npos);
  std::remove("cli_bad.tmp.json");

  std::ofstream worse("cli_bad2.tmp.json");
  worse << "{\"schema\":\"kmsgf-config/1\",\"model\":{\"beta\":2.0,"
           "\"dispersion\":\"warp\",\"mu\":1.0}}";
  worse.close();
  const auto r2 = run_cli("green-eval --config cli_bad2.tmp.json");
  CHECK(r2.code == 1);
  CHECK(r2.err.find("model.dispersion") != std::string::npos);
  std::remove("cli_bad2.tmp.json");
}

TEST_CASE("cumulant on the two atom config reports the frozen value") {
  const auto r = run_cli("cumulant --config " + config("two_atom.json"));
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["schema"] == "kmsgf-report/1");
  CHECK(rep["command"] == "cumulant");
  CHECK(rep["pass"] == true);
  const double k4 = rep["results"]["fourth_cumulant"].get<double>();
  CHECK(std::fabs(k4 - 0.05701637237855332444) < 1e-10);
  CHECK(rep["results"]["verdict"] == "non_quasi_free");
  CHECK(rep["results"]["order"] == 4);
}

TEST_CASE("reports are byte identical modulo timestamp") {
  const auto a = run_cli("cumulant --config " + config("two_atom.json"));
  const auto b = run_cli("cumulant --config " + config("two_atom.json"));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(strip_timestamp(a.out) == strip_timestamp(b.out));
}

TEST_CASE("seed override changes sampling but not analytics") {
  const auto a = run_cli("sample-validate --config " + config("two_atom.json") +
                         " --samples 5000 --seed 1");
  const auto b = run_cli("sample-validate --config " + config("two_atom.json") +
                         " --samples 5000 --seed 2");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const json ra = json::parse(a.out);
  const json rb = json::parse(b.out);
  CHECK(ra["run"]["seed"] == 1);
  CHECK(rb["run"]["seed"] == 2);
  CHECK(ra["results"]["checks"][0]["analytic"] == rb["results"]["checks"][0]["analytic"]);
  CHECK(ra["results"]["checks"][0]["estimate"] != rb["results"]["checks"][0]["estimate"]);
}

TEST_CASE("green-eval covers both models") {
  const auto free_run = run_cli("green-eval --config " + config("free_bose.json"));
  REQUIRE(free_run.code == 0);
  const json fr = json::parse(free_run.out);
  const double g = fr["results"]["arguments"][0]["quasifree"][0].get<double>();
  CHECK(g > 0.0);
  CHECK(g <= 1.0);
  CHECK(fr["results"].contains("multitime"));

  const auto mix_run = run_cli("green-eval --config " + config("two_atom.json"));
  REQUIRE(mix_run.code == 0);
  const json mr = json::parse(mix_run.out);
  const double mix = mr["results"]["arguments"][0]["mixture"][0].get<double>();
  CHECK(std::fabs(mix - 0.55698682196599562495) < 1e-12);
  const double gf = mr["results"]["arguments"][0]["generalized_free"][0].get<double>();
  CHECK(mix > gf);
}

TEST_CASE("audits pass on the shipped configs") {
  for (const char* cfg : {"free_bose.json", "two_atom.json"}) {
    const auto pos = run_cli("audit-positivity --config " + config(cfg));
    REQUIRE(pos.code == 0);
    const json pr = json::parse(pos.out);
    CHECK(pr["pass"] == true);
    for (const auto& audit : pr["results"]["audits"]) CHECK(audit["verdict"] == "psd");

    const auto inv = run_cli("audit-invariance --config " + config(cfg));
    REQUIRE(inv.code == 0);
    CHECK(json::parse(inv.out)["pass"] == true);
  }
}

TEST_CASE("schwinger table has the expected orders and flavors") {
  const auto r = run_cli("schwinger --config " + config("free_bose.json"));
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  const auto& table = rep["results"]["table"];
  bool has_green = false, has_truncated = false;
  for (const auto& row : table) {
    if (row["flavor"] == "green") has_green = true;
    if (row["flavor"] == "truncated") has_truncated = true;
  }
  CHECK(has_green);
  CHECK(has_truncated);
}

TEST_CASE("sample-validate passes within tolerance on the shipped configs") {
  const auto r = run_cli("sample-validate --config " + config("two_atom.json") +
                         " --samples 20000");
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["pass"] == true);
  for (const auto& check : rep["results"]["checks"])
    CHECK(check["z"].get<double>() <= 4.0);
}

TEST_CASE("writing the report to a file") {
  const std::string out = "cli_report.tmp.json";
  const auto r = run_cli("kernel-eval --config " + config("free_bose.json") + " --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const json rep = json::parse(slurp(out));
  CHECK(rep["results"].contains("argument_kernel"));
  CHECK(rep["results"].contains("sharp_kernel"));
  std::remove(out.c_str());
}

TEST_CASE("full-report aggregates all sections and passes") {
  const auto r = run_cli("full-report --config " + config("two_atom.json") +
                         " --samples 20000");
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["pass"] == true);
  for (const char* key : {"kernel", "green", "schwinger", "cumulant", "invariance",
                          "positivity", "sampling"})
    CHECK(rep["results"].contains(key));
}

} // TEST_SUITE
