#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "specflow/runspec.hpp"

using namespace specflow;
using nlohmann::json;

namespace {

json base_spec() {
  return json{
      {"backend", {{"kind", "block"}, {"blocks", {{1, 1.0}}}}},
      {"path",
       {{"family", "scalar_linear"}, {"params", {{"start", -1.0}, {"end", 1.0}}}}},
      {"methods", {"winding", "analytic", "crossing"}},
  };
}

}  // namespace

TEST_CASE("well-formed spec parses and runs with agreeing methods") {
  json j = base_spec();
  j["methods"] = {"winding", "analytic", "crossing", "integral_chi", "heat", "resolvent_power"};
  j["method_params"] = {{"chi", {{"kind", "chi_e"}}}, {"p", 2.0}};
  auto spec = parse_run_spec(j);
  auto outcome = execute_run_spec(spec);
  CHECK(outcome.exit_code == 0);
  for (const auto& [name, r] : outcome.report.methods())
    CHECK(std::abs(r.value - 1.0) < 1e-6);
  CHECK(outcome.document.at("values").size() == 6);
  CHECK(outcome.document.at("version") == kReportVersion);
  CHECK(outcome.document.contains("discrepancies"));
  CHECK(outcome.document.contains("corrections"));

  auto csv = report_to_csv(outcome.document);
  CHECK(csv.find("method,value,error_estimate") == 0);
  CHECK(csv.find("winding,") != std::string::npos);
}

TEST_CASE("validation errors carry the offending key path") {
  auto expect_error = [](json j, const std::string& needle) {
    try {
      parse_run_spec(j);
      FAIL("expected ValidationError for ", needle);
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  json unknown_top = base_spec();
  unknown_top["surprise"] = 1;
  expect_error(unknown_top, "spec.surprise");

  json bad_weight = base_spec();
  bad_weight["backend"]["blocks"] = {{1, -2.0}};
  expect_error(bad_weight, "backend.blocks[0][1]");

  json unknown_family = base_spec();
  unknown_family["path"]["family"] = "moebius";
  expect_error(unknown_family, "path.family");

  json bad_method = base_spec();
  bad_method["methods"] = {"winding", "telepathy"};
  expect_error(bad_method, "methods[1]");

  json no_methods = base_spec();
  no_methods["methods"] = json::array();
  expect_error(no_methods, "methods");

  json bad_samples = base_spec();
  bad_samples["path"] = {{"samples",
                          {{{"t", 0.0}, {"value", {{{1.0}}}}},
                           {{"t", 0.7}, {"value", {{{1.0}}}}}}}};
  expect_error(bad_samples, "path.samples");

  json decreasing = base_spec();
  decreasing["path"] = {{"samples",
                         {{{"t", 0.0}, {"value", {{{-1.0}}}}},
                          {{"t", 0.6}, {"value", {{{0.5}}}}},
                          {{"t", 0.4}, {"value", {{{1.0}}}}}}}};
  expect_error(decreasing, "path.samples[2].t");
}

TEST_CASE("sampled block path round-trips through the runner") {
  json j = base_spec();
  j["path"] = {{"samples",
                {{{"t", 0.0}, {"value", {{{-1.0}}}}},
                 {{"t", 0.5}, {"value", {{{0.1}}}}},
                 {{"t", 1.0}, {"value", {{{1.0}}}}}}}};
  auto outcome = execute_run_spec(parse_run_spec(j));
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.methods().at("crossing").value == doctest::Approx(1.0));
}

TEST_CASE("singular endpoint without regularization is a numerical failure") {
  json j = base_spec();
  j["path"]["params"]["start"] = 0.0;
  auto spec = parse_run_spec(j);
  try {
    execute_run_spec(spec);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("endpoint_not_invertible") != std::string::npos);
  }

  // with a regularize block the run succeeds and reports the correction
  j["method_params"] = {{"regularize", {{"eps", 0.5}}}};
  auto outcome = execute_run_spec(parse_run_spec(j));
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.methods().at("crossing").value == doctest::Approx(0.0));
  CHECK(outcome.document.at("corrections").contains("total"));
}

TEST_CASE("tan_wrap spec runs on a grid and methods agree") {
  json j;
  j["backend"] = {{"kind", "grid"},
                  {"points", {0.074, 0.274, 0.474, 0.674, 0.874}},
                  {"weights", {0.2, 0.2, 0.2, 0.2, 0.2}}};
  j["path"] = {{"family", "tan_wrap"}, {"params", {{"offset", 0.11}}}};
  j["methods"] = {"winding", "crossing", "analytic"};
  auto outcome = execute_run_spec(parse_run_spec(j));
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.methods().at("crossing").value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("the installed binary maps failures to documented exit codes") {
  auto run_cli = [](const std::string& args) {
    std::string cmd = std::string(SPECFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  auto write_spec = [](const json& j, const std::string& path) {
    std::ofstream out(path);
    out << j.dump();
  };

  std::string dir = "/tmp/specflow_cli_test";
  std::system(("mkdir -p " + dir).c_str());

  write_spec(base_spec(), dir + "/ok.json");
  CHECK(run_cli("run " + dir + "/ok.json") == 0);

  json bad = base_spec();
  bad["path"]["family"] = "moebius";
  write_spec(bad, dir + "/bad.json");
  CHECK(run_cli("run " + dir + "/bad.json") == 2);

  json singular = base_spec();
  singular["path"]["params"]["start"] = 0.0;
  write_spec(singular, dir + "/singular.json");
  CHECK(run_cli("run " + dir + "/singular.json") == 3);

  CHECK(run_cli("selfcheck --seed 7 --budget small") == 0);

  // determinism: identical seeds produce byte-identical report bodies
  std::string out1 = dir + "/s1.txt", out2 = dir + "/s2.txt";
  std::system((std::string(SPECFLOW_CLI_PATH) + " selfcheck --seed 11 > " + out1).c_str());
  std::system((std::string(SPECFLOW_CLI_PATH) + " selfcheck --seed 11 > " + out2).c_str());
  std::ifstream f1(out1), f2(out2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  CHECK(!s1.empty());
}
