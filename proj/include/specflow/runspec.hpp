#pragma once

#include <optional>
#include <string>
#include <vector>

// vendored single-header nlohmann/json
#include <json.hpp>

#include "specflow/spectral_flow.hpp"

namespace specflow {

/// Declarative description of one spectral-flow run: backend, path, methods,
/// per-method parameters, quadrature, output. Parsed from JSON with the
/// top-level keys {"backend", "path", "methods", "method_params",
/// "quadrature", "output"}; every malformed field is rejected with the path
/// to the offending key.
struct RunSpec {
  // backend
  enum class BackendKind { kBlock, kGrid };
  BackendKind backend = BackendKind::kBlock;
  std::vector<BlockSpec> blocks;
  std::vector<double> grid_points, grid_weights;

  // path: a builtin family or dense samples
  std::string family;  // "scalar_linear" | "tan_wrap" | "" (samples)
  double scalar_start = 0.0, scalar_end = 0.0;
  double tan_offset = 0.0;
  struct Sample {
    double t;
    std::vector<Matrix> blocks;       // block backend
    std::vector<Complex> grid_values;  // grid backend
  };
  std::vector<Sample> samples;

  // methods and parameters
  std::vector<std::string> methods;
  double chi_gap = 0.0;        // 0 = auto from endpoint margins
  std::string chi_kind = "smooth_gap";
  double resolvent_p = 2.0;
  int partition = 64;
  double crossing_step = 1e-3;
  std::optional<double> regularize_eps;

  QuadratureConfig quadrature;

  // output
  std::string output_file;    // empty = stdout
  std::string output_format = "json";
};

RunSpec parse_run_spec(const nlohmann::json& j);
RunSpec load_run_spec(const std::string& path);

struct RunOutcome {
  SpectralFlowReport report;
  nlohmann::json document;  // serialized report
  int exit_code = 0;        // 0 ok, 4 method disagreement
  std::string reason;       // machine-readable failure reason
};

/// Executes the methods of a validated spec; cross-check tolerance governs
/// exit code 4 (method disagreement).
RunOutcome execute_run_spec(const RunSpec& spec, double cross_check_tolerance = 1e-5);

std::string report_to_csv(const nlohmann::json& document);

inline constexpr const char* kReportVersion = "0.1.0";

}  // namespace specflow
