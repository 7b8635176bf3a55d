// Command-line front end: run spec files, self-check the invariant suites,
// and build the demo families.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure,
// 4 method disagreement beyond the cross-check tolerance.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "specflow/gallery.hpp"
#include "specflow/integral_formulas.hpp"
#include "specflow/runspec.hpp"
#include "specflow/selfcheck.hpp"

namespace {

using namespace specflow;
using nlohmann::json;

void write_output(const std::string& file, const std::string& body) {
  if (file.empty() || file == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot open output file \"" + file + "\"");
  out << body;
}

json error_document(const std::string& reason, const std::string& message) {
  json j;
  j["error"] = message;
  j["reason"] = reason;
  j["version"] = kReportVersion;
  return j;
}

int run_command(const std::string& spec_path, std::string out_file, std::string format,
                double tolerance) {
  RunSpec spec;
  try {
    spec = load_run_spec(spec_path);
  } catch (const ValidationError& e) {
    std::cout << error_document("validation_error", e.what()).dump(2) << "\n";
    return 2;
  }
  if (out_file.empty()) out_file = spec.output_file;
  if (format.empty()) format = spec.output_format;

  try {
    RunOutcome outcome = execute_run_spec(spec, tolerance);
    std::string body = format == "csv" ? report_to_csv(outcome.document)
                                       : outcome.document.dump(2) + "\n";
    write_output(out_file, body);
    if (outcome.exit_code != 0)
      std::cerr << "specflow: " << outcome.reason << " (max discrepancy "
                << outcome.report.max_discrepancy() << ")\n";
    return outcome.exit_code;
  } catch (const ValidationError& e) {
    std::cout << error_document("validation_error", e.what()).dump(2) << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::string message = e.what();
    std::string reason = "numerical_failure";
    if (message.rfind("endpoint_not_invertible", 0) == 0) reason = "endpoint_not_invertible";
    std::cout << error_document(reason, message).dump(2) << "\n";
    return 3;
  }
}

int demo_tanwrap(int points, double weight, double offset) {
  std::vector<double> pts(points), wts(points, weight / points);
  for (int i = 0; i < points; ++i) pts[i] = (i + 0.37) / points;
  auto grid = make_grid_algebra(pts, wts);
  auto path = build_tan_wrap_loop(grid, offset);
  QuadratureConfig quad;
  double margin = std::min(path.endpoint_start().margin, path.endpoint_end().margin);
  auto chi = NormalizingFunction::smooth_gap(std::min(0.2, 0.5 * margin));

  json j;
  j["family"] = "tan_wrap";
  j["points"] = points;
  j["total_weight"] = weight;
  j["offset"] = offset;
  j["endpoint_margin"] = margin;
  j["sf_winding"] = sf_winding(path, chi, quad).value;
  j["sf_crossing"] = sf_crossing(path).value;
  j["sf_analytic"] = sf_analytic(path, uniform_partition(64)).value;
  auto step = FunctionSpec::nonnegative_indicator();
  j["endpoint_projection_telescoping"] =
      (trace(func_calc(step, path.value(1.0, Side::kLeft))) -
       trace(func_calc(step, path.value(0.0, Side::kRight))))
          .real();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int demo_covering(int m, int k) {
  CoveringSpec spec;
  spec.base_length = m;
  spec.deck_order = k;
  spec.edge_weight = [m](int j, double) { return 1.0 + 0.3 * std::cos(2.0 * kPi * j / m); };
  spec.edge_weight_dt = [](int, double) { return 0.0; };
  spec.potential = [](int, double) { return 0.0; };
  spec.potential_dt = [](int, double) { return 0.0; };
  auto probe = build_covering_path(spec);
  auto eig = hermitian_eigendecomposition(probe.path_full.value(0.0));
  std::vector<double> vals(eig.eigenvalues[0].data(),
                           eig.eigenvalues[0].data() + eig.eigenvalues[0].size());
  std::sort(vals.begin(), vals.end());
  double lo = 0.5 * (vals[0] + vals[1]), hi = 0.5 * (vals[2] + vals[3]);
  spec.potential = [=](int, double t) { return -hi + (hi - lo) * t; };
  spec.potential_dt = [=](int, double) { return hi - lo; };
  auto model = build_covering_path(spec);

  QuadratureConfig quad;
  double margin = std::min(model.path_full.endpoint_start().margin,
                           model.path_full.endpoint_end().margin);
  auto chi = NormalizingFunction::smooth_gap(0.5 * margin);
  double full = sf_winding(model.path_full, chi, quad).value;
  double gamma = sf_winding(model.path_gamma, chi, quad).value;

  json j;
  j["family"] = "covering";
  j["base_length"] = m;
  j["deck_order"] = k;
  j["equivariance_residual"] = model.equivariance_residual;
  j["sf_full_trace"] = full;
  j["sf_gamma_trace"] = gamma;
  j["ratio_defect"] = std::abs(gamma - full / k);
  j["sf_crossing_full"] = sf_crossing(model.path_full).value;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int demo_gn(std::vector<int> n_values, int depth) {
  if (n_values.empty()) n_values = {1, 2, 4, 8};
  auto report = build_gn_family(n_values, depth);
  json j;
  j["family"] = "gn";
  j["band_depth"] = report.band_depth;
  j["grid_points"] = report.grid->points().size();
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"n", e.n},
                       {"resolvent_distance", e.resolvent_distance},
                       {"functional_calculus_distance", e.fc_distance}});
  }
  j["entries"] = entries;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-valued spectral flow of Hermitian operator paths in weighted block and "
               "grid models, computed by independent methods and cross-verified"};
  app.require_subcommand(1);

  // run
  std::string spec_path, out_file, format;
  double tolerance = 1e-5;
  auto* run = app.add_subcommand("run", "execute a JSON run specification");
  run->add_option("spec", spec_path, "path to the spec file")->required();
  run->add_option("--out", out_file, "output file (default: spec's output.file or stdout)");
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv", ""}));
  run->add_option("--tolerance", tolerance, "cross-check tolerance for method disagreement");

  // selfcheck
  std::uint64_t seed = 7;
  std::string budget = "small";
  auto* selfcheck = app.add_subcommand("selfcheck", "run the invariant suites deterministically");
  selfcheck->add_option("--seed", seed, "random seed");
  selfcheck->add_option("--budget", budget, "small or full")
      ->check(CLI::IsMember({"small", "full"}));

  // demo
  auto* demo = app.add_subcommand("demo", "build and evaluate a demo family");
  std::string which;
  int points = 6, cover_m = 4, cover_k = 3, depth = 0;
  double weight = 1.0, offset = 0.11;
  std::vector<int> n_values;
  demo->add_option("name", which, "tanwrap, covering or gn")
      ->required()
      ->check(CLI::IsMember({"tanwrap", "covering", "gn"}));
  demo->add_option("--points", points, "tanwrap: number of grid points");
  demo->add_option("--weight", weight, "tanwrap: total grid weight");
  demo->add_option("--offset", offset, "tanwrap: phase offset");
  demo->add_option("--base", cover_m, "covering: base cycle length m");
  demo->add_option("--deck", cover_k, "covering: deck group order k");
  demo->add_option("--n", n_values, "gn: family indices");
  demo->add_option("--depth", depth, "gn: band depth (0 = automatic)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(spec_path, out_file, format, tolerance);
    if (*selfcheck) {
      int failures = specflow::run_selfcheck(
          seed, budget == "full" ? SelfcheckBudget::kFull : SelfcheckBudget::kSmall, std::cout);
      return failures == 0 ? 0 : 1;
    }
    if (which == "tanwrap") return demo_tanwrap(points, weight, offset);
    if (which == "covering") return demo_covering(cover_m, cover_k);
    if (which == "gn") return demo_gn(n_values, depth);
  } catch (const ValidationError& e) {
    std::cout << error_document("validation_error", e.what()).dump(2) << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cout << error_document("numerical_failure", e.what()).dump(2) << "\n";
    return 3;
  }
  return 0;
}
