#pragma once

#include <string>

#include <json.hpp>

#include "stokeshape/optimizer.hpp"

namespace stokeshape {

using json = nlohmann::json;

struct RichardsonResult {
  double limit = 0.0;
  double estimated_order = 0.0;
  bool order_defined = false;  // false for (near-)constant sequences
};

// Limit of a sequence sampled at h, h/2, h/4 assuming the given convergence
// order p: limit = v_h2 + (v_h4 - v_h2) * 2^p / (2^p - 1).  Also estimates
// the order from the three increments; a constant sequence returns itself
// with the order flagged undefined, a stalled non-constant one throws.
RichardsonResult richardson_extrapolate(double v_h, double v_h2, double v_h4,
                                        double assumed_order = 2.0);

// Full default configuration; user files override it key by key.  Unknown
// keys are rejected.
json default_config();
json merge_config(const json& base, const json& user);
json resolve_config(const json& user);

// Experiment drivers.  Each writes its outputs (CSV/JSON and a gnuplot
// script) plus the resolved configuration into out_dir.
void cmd_solve(const json& cfg, const std::string& out_dir);
void cmd_optimize(const json& cfg, const std::string& out_dir);
void cmd_converge(const json& cfg, const std::string& out_dir);
void cmd_sweep(const json& cfg, const std::string& out_dir);

// Pieces shared by the drivers, exposed for tests.
ControlGrid grid_from_config(const json& cfg);
ProblemData data_from_config(const json& cfg);
ControlFunction control_from_config(const json& cfg, const ControlGrid& grid);
FunctionalSpec spec_from_config(const json& cfg, const ControlGrid& grid);
OptimizerConfig optimizer_from_config(const json& cfg,
                                      const ControlGrid& grid);
std::string history_csv(const OptimizationHistory& hist);

// Parses arguments and dispatches; on failure prints an error JSON object
// to stderr and returns 2 (invalid input), 3 (numerical failure) or 1.
int run_cli(int argc, const char* const* argv);

}  // namespace stokeshape
