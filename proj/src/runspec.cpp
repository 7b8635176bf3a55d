#include "specflow/runspec.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "specflow/gallery.hpp"
#include "specflow/integral_formulas.hpp"

namespace specflow {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

void require_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
  for (const auto& key : required)
    if (!j.contains(key)) fail(path + "." + key, "missing required key");
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Complex complex_at(const json& j, const std::string& path) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  fail(path, "expected a number or [re, im]");
}

Matrix matrix_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty row-major matrix");
  int rows = static_cast<int>(j.size());
  Matrix m;
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array()) fail(path + "[" + std::to_string(r) + "]", "expected a row array");
    if (r == 0) m = Matrix::Zero(rows, static_cast<int>(row.size()));
    if (static_cast<int>(row.size()) != m.cols())
      fail(path + "[" + std::to_string(r) + "]", "ragged matrix rows");
    for (int c = 0; c < m.cols(); ++c)
      m(r, c) = complex_at(row[c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

void parse_backend(const json& j, RunSpec& spec) {
  require_keys(j, "backend", {"kind", "blocks", "points", "weights"}, {"kind"});
  std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
  if (kind == "block") {
    spec.backend = RunSpec::BackendKind::kBlock;
    if (!j.contains("blocks") || !j.at("blocks").is_array() || j.at("blocks").empty())
      fail("backend.blocks", "block backend needs a non-empty list of [dim, weight]");
    for (std::size_t k = 0; k < j.at("blocks").size(); ++k) {
      const json& b = j.at("blocks")[k];
      std::string where = "backend.blocks[" + std::to_string(k) + "]";
      if (!b.is_array() || b.size() != 2) fail(where, "expected [dim, weight]");
      double dim = number_at(b[0], where + "[0]");
      double weight = number_at(b[1], where + "[1]");
      if (dim < 1 || dim != std::floor(dim)) fail(where + "[0]", "dimension must be a positive integer");
      if (!(weight > 0.0)) fail(where + "[1]", "weight must be > 0");
      spec.blocks.push_back({static_cast<int>(dim), weight});
    }
  } else if (kind == "grid") {
    spec.backend = RunSpec::BackendKind::kGrid;
    if (!j.contains("points") || !j.at("points").is_array())
      fail("backend.points", "grid backend needs sample points");
    if (!j.contains("weights") || !j.at("weights").is_array())
      fail("backend.weights", "grid backend needs weights");
    for (std::size_t i = 0; i < j.at("points").size(); ++i)
      spec.grid_points.push_back(number_at(j.at("points")[i],
                                           "backend.points[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < j.at("weights").size(); ++i) {
      double w = number_at(j.at("weights")[i], "backend.weights[" + std::to_string(i) + "]");
      if (!(w > 0.0)) fail("backend.weights[" + std::to_string(i) + "]", "weight must be > 0");
      spec.grid_weights.push_back(w);
    }
    if (spec.grid_points.size() != spec.grid_weights.size())
      fail("backend.weights", "points and weights must have equal length");
  } else {
    fail("backend.kind", "must be \"block\" or \"grid\"");
  }
}

void parse_path(const json& j, RunSpec& spec) {
  require_keys(j, "path", {"family", "params", "samples"}, {});
  if (j.contains("family")) {
    if (!j.at("family").is_string()) fail("path.family", "expected a string");
    spec.family = j.at("family").get<std::string>();
    json params = j.value("params", json::object());
    if (spec.family == "scalar_linear") {
      require_keys(params, "path.params", {"start", "end"}, {"start", "end"});
      spec.scalar_start = number_at(params.at("start"), "path.params.start");
      spec.scalar_end = number_at(params.at("end"), "path.params.end");
    } else if (spec.family == "tan_wrap") {
      require_keys(params, "path.params", {"offset"}, {"offset"});
      spec.tan_offset = number_at(params.at("offset"), "path.params.offset");
    } else {
      fail("path.family", "unknown family \"" + spec.family + "\"");
    }
    return;
  }
  if (!j.contains("samples")) fail("path", "needs either a family or samples");
  const json& samples = j.at("samples");
  if (!samples.is_array() || samples.size() < 2)
    fail("path.samples", "needs at least two samples");
  double prev_t = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string where = "path.samples[" + std::to_string(i) + "]";
    require_keys(samples[i], where, {"t", "value"}, {"t", "value"});
    RunSpec::Sample s;
    s.t = number_at(samples[i].at("t"), where + ".t");
    if (s.t < 0.0 || s.t > 1.0) fail(where + ".t", "t must lie in [0, 1]");
    if (s.t <= prev_t) fail(where + ".t", "sample times must be strictly increasing");
    prev_t = s.t;
    const json& value = samples[i].at("value");
    if (!value.is_array()) fail(where + ".value", "expected an array");
    if (spec.backend == RunSpec::BackendKind::kBlock) {
      for (std::size_t k = 0; k < value.size(); ++k)
        s.blocks.push_back(matrix_at(value[k], where + ".value[" + std::to_string(k) + "]"));
    } else {
      for (std::size_t k = 0; k < value.size(); ++k)
        s.grid_values.push_back(complex_at(value[k], where + ".value[" + std::to_string(k) + "]"));
    }
    spec.samples.push_back(std::move(s));
  }
  if (std::abs(spec.samples.front().t) > 1e-12 || std::abs(spec.samples.back().t - 1.0) > 1e-12)
    fail("path.samples", "samples must start at t = 0 and end at t = 1");
}

void parse_methods(const json& j, RunSpec& spec) {
  static const std::set<std::string> known{"winding",      "analytic", "crossing",
                                           "integral_chi", "heat",     "resolvent_power"};
  if (!j.is_array() || j.empty()) fail("methods", "needs a non-empty list");
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail("methods[" + std::to_string(i) + "]", "expected a string");
    std::string m = j[i].get<std::string>();
    if (!known.count(m)) fail("methods[" + std::to_string(i) + "]", "unknown method \"" + m + "\"");
    spec.methods.push_back(m);
  }
}

void parse_method_params(const json& j, RunSpec& spec) {
  require_keys(j, "method_params",
               {"chi", "p", "partition", "crossing_step", "regularize"}, {});
  if (j.contains("chi")) {
    const json& chi = j.at("chi");
    require_keys(chi, "method_params.chi", {"kind", "eps", "p"}, {"kind"});
    if (!chi.at("kind").is_string()) fail("method_params.chi.kind", "expected a string");
    spec.chi_kind = chi.at("kind").get<std::string>();
    if (spec.chi_kind != "smooth_gap" && spec.chi_kind != "chi_e" && spec.chi_kind != "chi_p")
      fail("method_params.chi.kind", "must be smooth_gap, chi_e or chi_p");
    if (chi.contains("eps")) {
      spec.chi_gap = number_at(chi.at("eps"), "method_params.chi.eps");
      if (!(spec.chi_gap > 0.0)) fail("method_params.chi.eps", "must be > 0");
    }
  }
  if (j.contains("p")) {
    spec.resolvent_p = number_at(j.at("p"), "method_params.p");
    if (!(spec.resolvent_p >= 1.0)) fail("method_params.p", "must be >= 1");
  }
  if (j.contains("partition")) {
    double n = number_at(j.at("partition"), "method_params.partition");
    if (n < 1 || n != std::floor(n)) fail("method_params.partition", "must be a positive integer");
    spec.partition = static_cast<int>(n);
  }
  if (j.contains("crossing_step")) {
    spec.crossing_step = number_at(j.at("crossing_step"), "method_params.crossing_step");
    if (!(spec.crossing_step > 0.0 && spec.crossing_step <= 0.5))
      fail("method_params.crossing_step", "must lie in (0, 0.5]");
  }
  if (j.contains("regularize")) {
    require_keys(j.at("regularize"), "method_params.regularize", {"eps"}, {"eps"});
    double eps = number_at(j.at("regularize").at("eps"), "method_params.regularize.eps");
    if (!(eps > 0.0 && eps < 1.0)) fail("method_params.regularize.eps", "must lie in (0, 1)");
    spec.regularize_eps = eps;
  }
}

void parse_quadrature(const json& j, RunSpec& spec) {
  require_keys(j, "quadrature", {"tolerance", "max_depth"}, {});
  if (j.contains("tolerance")) {
    spec.quadrature.tolerance = number_at(j.at("tolerance"), "quadrature.tolerance");
    if (!(spec.quadrature.tolerance > 0.0)) fail("quadrature.tolerance", "must be > 0");
  }
  if (j.contains("max_depth")) {
    double d = number_at(j.at("max_depth"), "quadrature.max_depth");
    if (d < 4 || d != std::floor(d)) fail("quadrature.max_depth", "must be an integer >= 4");
    spec.quadrature.max_depth = static_cast<int>(d);
  }
}

void parse_output(const json& j, RunSpec& spec) {
  require_keys(j, "output", {"file", "format"}, {});
  if (j.contains("file")) {
    if (!j.at("file").is_string()) fail("output.file", "expected a string");
    spec.output_file = j.at("file").get<std::string>();
  }
  if (j.contains("format")) {
    if (!j.at("format").is_string()) fail("output.format", "expected a string");
    spec.output_format = j.at("format").get<std::string>();
    if (spec.output_format != "json" && spec.output_format != "csv")
      fail("output.format", "must be json or csv");
  }
}

}  // namespace

RunSpec parse_run_spec(const json& j) {
  require_keys(j, "spec", {"backend", "path", "methods", "method_params", "quadrature", "output"},
               {"backend", "path", "methods"});
  RunSpec spec;
  parse_backend(j.at("backend"), spec);
  parse_path(j.at("path"), spec);
  parse_methods(j.at("methods"), spec);
  if (j.contains("method_params")) parse_method_params(j.at("method_params"), spec);
  if (j.contains("quadrature")) parse_quadrature(j.at("quadrature"), spec);
  if (j.contains("output")) parse_output(j.at("output"), spec);

  if (spec.family == "tan_wrap" && spec.backend != RunSpec::BackendKind::kGrid)
    fail("path.family", "tan_wrap requires the grid backend");
  if (spec.family == "scalar_linear" && spec.backend == RunSpec::BackendKind::kBlock) {
    int total = 0;
    for (const auto& b : spec.blocks) total += b.dim;
    if (total != 1) fail("path.family", "scalar_linear requires a one-dimensional block backend");
  }
  return spec;
}

RunSpec load_run_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("spec file is not valid JSON: ") + e.what());
  }
  return parse_run_spec(j);
}

namespace {

OperatorPath build_path(const RunSpec& spec, const AlgebraPtr& algebra) {
  if (spec.family == "scalar_linear") {
    Matrix a(1, 1), b(1, 1);
    a << Complex(spec.scalar_start, 0.0);
    b << Complex(spec.scalar_end, 0.0);
    return make_linear_path(Element::from_blocks(algebra, {a}, true),
                            Element::from_blocks(algebra, {b}, true));
  }
  if (spec.family == "tan_wrap") return build_tan_wrap_loop(algebra, spec.tan_offset);
  std::vector<std::pair<double, Element>> samples;
  for (const auto& s : spec.samples) {
    Element e = spec.backend == RunSpec::BackendKind::kBlock
                    ? Element::from_blocks(algebra, s.blocks, true)
                    : Element::from_grid(algebra, s.grid_values, true);
    samples.emplace_back(s.t, std::move(e));
  }
  return make_sampled_path(std::move(samples));
}

json result_to_json(const SfResult& r) {
  json j;
  j["value"] = r.value;
  j["error_estimate"] = r.error_estimate;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace

RunOutcome execute_run_spec(const RunSpec& spec, double cross_check_tolerance) {
  AlgebraPtr algebra = spec.backend == RunSpec::BackendKind::kBlock
                           ? make_block_algebra(spec.blocks)
                           : make_grid_algebra(spec.grid_points, spec.grid_weights);
  OperatorPath path = build_path(spec, algebra);

  RunOutcome out;
  json diagnostics;
  double correction = 0.0;

  auto start = path.endpoint_start();
  auto end = path.endpoint_end();
  if ((!start.invertible || !end.invertible)) {
    if (!spec.regularize_eps) {
      NumericalError err("endpoint_not_invertible: margins " + std::to_string(start.margin) +
                         ", " + std::to_string(end.margin) +
                         "; add method_params.regularize to proceed");
      throw err;
    }
    auto reg = regularize_endpoints(path, *spec.regularize_eps);
    path = reg.path;
    correction = reg.correction_total;
    out.report.set_corrections(reg.correction_start, reg.correction_end);
    diagnostics["regularization_notes"] = reg.notes;
    start = path.endpoint_start();
    end = path.endpoint_end();
  }
  diagnostics["endpoint_margins"] = {start.margin, end.margin};

  double margin = std::min(start.margin, end.margin);
  double gap = spec.chi_gap > 0.0 ? spec.chi_gap : std::min(0.2, 0.5 * margin);

  for (const auto& method : spec.methods) {
    SfResult r;
    if (method == "winding") {
      r = sf_winding(path, NormalizingFunction::smooth_gap(gap), spec.quadrature);
    } else if (method == "analytic") {
      r = sf_analytic(path, uniform_partition(spec.partition));
    } else if (method == "crossing") {
      CrossingControl ctl;
      ctl.initial_step = spec.crossing_step;
      r = sf_crossing(path, ctl);
    } else if (method == "integral_chi") {
      NormalizingFunction chi = spec.chi_kind == "chi_e" ? NormalizingFunction::chi_e()
                                : spec.chi_kind == "chi_p"
                                    ? NormalizingFunction::chi_p(spec.resolvent_p)
                                    : NormalizingFunction::smooth_gap(gap);
      auto f = sf_integral_chi(bounded_transform_path(path), chi, spec.quadrature);
      r = SfResult{f.value, f.error_estimate, f.warnings};
    } else if (method == "heat") {
      auto f = sf_heat(path, spec.quadrature);
      r = SfResult{f.value, f.error_estimate, f.warnings};
      diagnostics["heat_endpoint_route_discrepancy"] = f.endpoint_route_discrepancy;
    } else if (method == "resolvent_power") {
      auto f = sf_resolvent_power(path, spec.resolvent_p, spec.quadrature);
      r = SfResult{f.value, f.error_estimate, f.warnings};
    }
    r.value -= correction;
    out.report.add(method, r);
  }

  double max_disc = out.report.max_discrepancy();
  if (spec.methods.size() > 1) {
    // a posteriori coarseness check for the analytic partition
    if (out.report.methods().count("analytic") && max_disc > cross_check_tolerance)
      diagnostics["partition_warning"] =
          "methods disagree beyond tolerance; the analytic partition may be too coarse";
  }

  json doc;
  json values;
  for (const auto& [name, r] : out.report.methods()) values[name] = r.value;
  doc["values"] = values;
  doc["discrepancies"] = out.report.discrepancies();
  json details;
  for (const auto& [name, r] : out.report.methods()) details[name] = result_to_json(r);
  diagnostics["methods"] = details;
  doc["diagnostics"] = diagnostics;
  doc["corrections"] = {{"start", out.report.correction_start()},
                        {"end", out.report.correction_end()},
                        {"total", correction}};
  doc["version"] = kReportVersion;
  out.document = doc;

  if (max_disc > cross_check_tolerance) {
    out.exit_code = 4;
    out.reason = "method_disagreement";
  }
  return out;
}

std::string report_to_csv(const json& document) {
  std::ostringstream os;
  os << "method,value,error_estimate\n";
  const auto& diag = document.at("diagnostics").at("methods");
  for (auto it = diag.begin(); it != diag.end(); ++it) {
    os << it.key() << "," << it.value().at("value").get<double>() << ","
       << it.value().at("error_estimate").get<double>() << "\n";
  }
  return os.str();
}

}  // namespace specflow
