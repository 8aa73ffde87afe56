#include "stokeshape/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <CLI11.hpp>

#include "stokeshape/geometry.hpp"
#include "stokeshape/io.hpp"

namespace stokeshape {

RichardsonResult richardson_extrapolate(double v_h, double v_h2, double v_h4,
                                        double assumed_order) {
  if (!(assumed_order > 0.0))
    throw InvalidInput("assumed order must be positive");
  RichardsonResult out;
  const double d1 = v_h - v_h2;
  const double d2 = v_h2 - v_h4;
  if (d1 == 0.0 && d2 == 0.0) {
    out.limit = v_h4;
    out.order_defined = false;
    return out;
  }
  if (d2 == 0.0)
    throw NumericalFailure(
        "refinement sequence stalls at the finest levels; cannot extrapolate");
  const double r = std::pow(2.0, assumed_order);
  out.limit = v_h2 + (v_h4 - v_h2) * r / (r - 1.0);
  const double ratio = d1 / d2;
  if (ratio > 0.0) {
    out.estimated_order = std::log2(ratio);
    out.order_defined = true;
  }
  return out;
}

json default_config() {
  json cfg;
  cfg["policy"] = "parallel";
  cfg["mesh"] = {{"n", 32}};
  cfg["data"] = {{"preset", "channel"}, {"eta", 0.0}, {"nu", 1.0}};
  cfg["control"] = {
      {"cells", 0},  // 0: match the mesh (sigma = h)
      {"preset", "flat"},
      {"degree", 1},
      {"csv", ""}};
  cfg["functional"] = {{"variant", "perimeterEnergy"},
                       {"alpha", 10.0},
                       {"beta", 10000.0},
                       {"vbar", nullptr},  // null: vbarFactor x parabolic area
                       {"vbarFactor", 0.7},
                       {"gradientForm", "gradientCorrected"},
                       {"targetPreset", ""},
                       {"targetDegree", 4}};
  cfg["optimizer"] = {{"epsilonHat", 0.1},
                      {"epsilonMin", 1e-8},
                      {"maxIters", 100},
                      {"gradTol", 0.0}};
  cfg["converge"] = {{"meshSizes", json::array({8, 16, 32, 64})},
                     {"alphas", json::array({0.0, 0.01, 0.1})},
                     {"assumedOrder", 2.0},
                     {"saturationFilter", true},
                     {"warmStart", true},
                     {"targetPreset", "cosineBump"},
                     {"targetDegree", 4},
                     {"maxIters", 40}};
  cfg["sweep"] = {{"runs", json::array()}};
  cfg["output"] = {{"physical", true}, {"gnuplot", true}};
  return cfg;
}

namespace {

void check_known_keys(const json& base, const json& user,
                      const std::string& path) {
  if (!user.is_object()) {
    if (base.is_object())
      throw InvalidInput("config section " + path + " must be an object");
    return;
  }
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string sub = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key()))
      throw InvalidInput("unknown config key: " + sub);
    if (base.at(it.key()).is_object()) check_known_keys(base.at(it.key()), it.value(), sub);
  }
}

json merge_into(json base, const json& user) {
  if (!user.is_object()) return user;
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (base.contains(it.key()) && base.at(it.key()).is_object() &&
        it.value().is_object())
      base[it.key()] = merge_into(base.at(it.key()), it.value());
    else
      base[it.key()] = it.value();
  }
  return base;
}

ControlPreset preset_from_name(const std::string& name) {
  if (name == "flat") return ControlPreset::Flat;
  if (name == "parabolic") return ControlPreset::Parabolic;
  if (name == "sinusoidal") return ControlPreset::Sinusoidal;
  if (name == "cosineBump") return ControlPreset::CosineBump;
  throw InvalidInput("unknown control preset: " + name);
}

Policy policy_from_config(const json& cfg) {
  const std::string p = cfg.at("policy").get<std::string>();
  if (p == "serial") return Policy::Serial;
  if (p == "parallel") return Policy::Parallel;
  throw InvalidInput("unknown policy: " + p);
}

std::string csv_control(const ControlFunction& q) {
  std::ostringstream ss;
  ss << "x,q\n";
  for (int i = 0; i < q.num_values(); ++i)
    ss << format_double(q.value_coordinate(i)) << ','
       << format_double(q.values()[i]) << '\n';
  return ss.str();
}

// Simpson flux int u_x dy through a vertical mesh line of P2 edge cells.
double vertical_flux(const TaylorHoodSpace& space, const Vec& velocity,
                     int jx) {
  const int n = space.n;
  double flux = 0.0;
  for (int cell = 0; cell < n; ++cell) {
    const double ua =
        velocity[space.vel_dof(space.p2_node_at(jx, 2 * cell), 0)];
    const double um =
        velocity[space.vel_dof(space.p2_node_at(jx, 2 * cell + 1), 0)];
    const double ub =
        velocity[space.vel_dof(space.p2_node_at(jx, 2 * cell + 2), 0)];
    flux += (ua + 4.0 * um + ub) / (6.0 * n);
  }
  return flux;
}

std::string solution_csv(const TaylorHoodSpace& space, const StateSolution& st,
                         bool physical) {
  std::ostringstream ss;
  ss << "x,y,ux,uy,p\n";
  const int n = space.n;
  for (int iy = 0; iy <= n; ++iy) {
    for (int ix = 0; ix <= n; ++ix) {
      const int vtx = iy * (n + 1) + ix;
      Vec2 pt = space.mesh.vertices[vtx];
      if (physical) pt = map_forward(st.q, pt.x(), pt.y());
      const int node = space.p2_node_at(2 * ix, 2 * iy);
      ss << format_double(pt.x()) << ',' << format_double(pt.y()) << ','
         << format_double(st.velocity[space.vel_dof(node, 0)]) << ','
         << format_double(st.velocity[space.vel_dof(node, 1)]) << ','
         << format_double(st.pressure[vtx]) << '\n';
    }
  }
  return ss.str();
}

std::shared_ptr<const Vec> solve_target(const std::string& preset_name,
                                        int degree, const ControlGrid& grid,
                                        const ProblemData& data,
                                        const TaylorHoodSpace& space,
                                        Policy policy) {
  const ControlFunction qd =
      make_preset(preset_from_name(preset_name), grid, degree);
  StateSolution target = solve_state(qd, data, space, policy);
  return std::make_shared<const Vec>(std::move(target.velocity));
}

const char* kPlotHistory =
    "set datafile separator \",\"\n"
    "set key autotitle columnhead\n"
    "set xlabel \"iteration\"\n"
    "set ylabel \"functional\"\n"
    "set logscale y\n"
    "plot \"history.csv\" using 1:2 with linespoints, \\\n"
    "     \"history.csv\" using 1:3 with linespoints, \\\n"
    "     \"history.csv\" using 1:4 with linespoints\n";

const char* kPlotControls =
    "set datafile separator \",\"\n"
    "set key autotitle columnhead\n"
    "set xlabel \"x\"\n"
    "set ylabel \"q\"\n"
    "plot \"initial_control.csv\" using 1:2 with lines title \"initial\", \\\n"
    "     \"final_control.csv\" using 1:2 with lines title \"final\"\n";

const char* kPlotSolution =
    "set datafile separator \",\"\n"
    "set view map\n"
    "set xlabel \"x\"\n"
    "set ylabel \"y\"\n"
    "splot \"solution.csv\" using 1:2:(sqrt($3*$3+$4*$4)) with points "
    "pointtype 5 palette title \"|u|\"\n";

const char* kPlotConvergence =
    "set datafile separator \",\"\n"
    "set logscale xy\n"
    "set xlabel \"h\"\n"
    "set ylabel \"error\"\n"
    "plot \"convergence.csv\" using 3:8 with points title \"|j_h - ref|\"\n";

}  // namespace

json merge_config(const json& base, const json& user) {
  check_known_keys(base, user, "");
  return merge_into(base, user);
}

json resolve_config(const json& user) {
  return merge_config(default_config(), user);
}

ControlGrid grid_from_config(const json& cfg) {
  int cells = cfg.at("control").at("cells").get<int>();
  if (cells == 0) cells = cfg.at("mesh").at("n").get<int>();
  return make_uniform_grid(cells);
}

ProblemData data_from_config(const json& cfg) {
  const auto& d = cfg.at("data");
  const std::string preset = d.at("preset").get<std::string>();
  ProblemData data =
      make_constant_data(d.at("eta").get<double>(), d.at("nu").get<double>());
  if (preset == "channel") {
    data.inflow = [](double, double y) { return Vec2(y * (2.0 - y), 0.0); };
  } else if (preset != "zeroflow") {
    throw InvalidInput("unknown data preset: " + preset);
  }
  return data;
}

ControlFunction control_from_config(const json& cfg, const ControlGrid& grid) {
  const auto& c = cfg.at("control");
  const std::string preset = c.at("preset").get<std::string>();
  const int degree = c.at("degree").get<int>();
  if (preset == "csv") {
    const std::string path = c.at("csv").get<std::string>();
    if (path.empty()) throw InvalidInput("control preset csv needs a path");
    return deserialize_control(path, grid, degree);
  }
  return make_preset(preset_from_name(preset), grid, degree);
}

FunctionalSpec spec_from_config(const json& cfg, const ControlGrid& grid) {
  const auto& f = cfg.at("functional");
  FunctionalSpec spec;
  spec.variant = parse_variant(f.at("variant").get<std::string>());
  spec.alpha = f.at("alpha").get<double>();
  spec.beta = f.at("beta").get<double>();
  spec.gradient_form =
      parse_gradient_form(f.at("gradientForm").get<std::string>());
  if (f.at("vbar").is_null()) {
    const double factor = f.at("vbarFactor").get<double>();
    spec.vbar =
        factor * make_preset(ControlPreset::Parabolic, grid, 1).integral();
  } else {
    spec.vbar = f.at("vbar").get<double>();
  }
  return spec;
}

OptimizerConfig optimizer_from_config(const json& cfg,
                                      const ControlGrid& grid) {
  const auto& o = cfg.at("optimizer");
  OptimizerConfig ocfg;
  ocfg.epsilon_hat = o.at("epsilonHat").get<double>();
  ocfg.epsilon_min = o.at("epsilonMin").get<double>();
  ocfg.max_iters = o.at("maxIters").get<int>();
  ocfg.grad_tol = o.at("gradTol").get<double>();
  ocfg.spec = spec_from_config(cfg, grid);
  ocfg.policy = policy_from_config(cfg);
  return ocfg;
}

std::string history_csv(const OptimizationHistory& hist) {
  std::ostringstream ss;
  ss << "iter,j,j_energy,j_reg,j_vol,step\n";
  for (const auto& r : hist.records)
    ss << r.iter << ',' << format_double(r.j.total) << ','
       << format_double(r.j.flow) << ',' << format_double(r.j.regularization)
       << ',' << format_double(r.j.volume) << ',' << format_double(r.step)
       << '\n';
  return ss.str();
}

void cmd_solve(const json& cfg, const std::string& out_dir) {
  ensure_directory(out_dir);
  const Policy policy = policy_from_config(cfg);
  const int n = cfg.at("mesh").at("n").get<int>();
  const ControlGrid grid = grid_from_config(cfg);
  const ControlFunction q = control_from_config(cfg, grid);
  const ProblemData data = data_from_config(cfg);
  const TaylorHoodSpace space = build_space(build_mesh(n));

  const StateSolution st = solve_state(q, data, space, policy);
  const auto gram = assemble_gradient_gram(q, space, policy);

  write_text_file(out_dir + "/solution.csv", solution_csv(space, st, false));
  if (cfg.at("output").at("physical").get<bool>())
    write_text_file(out_dir + "/solution_physical.csv",
                    solution_csv(space, st, true));
  write_text_file(out_dir + "/control.csv", csv_control(q));

  json diag;
  diag["solveResidual"] = st.solve_residual;
  diag["divergenceResidual"] = st.divergence_residual;
  diag["dissipation"] = st.velocity.dot(gram->A * st.velocity);
  diag["fluxIn"] = vertical_flux(space, st.velocity, 0);
  diag["fluxOut"] = vertical_flux(space, st.velocity, 2 * n);
  write_text_file(out_dir + "/diagnostics.json", diag.dump(2) + "\n");

  write_text_file(out_dir + "/resolved_config.json", cfg.dump(2) + "\n");
  if (cfg.at("output").at("gnuplot").get<bool>())
    write_text_file(out_dir + "/plot_solution.gp", kPlotSolution);
}

void cmd_optimize(const json& cfg, const std::string& out_dir) {
  ensure_directory(out_dir);
  const Policy policy = policy_from_config(cfg);
  const int n = cfg.at("mesh").at("n").get<int>();
  const ControlGrid grid = grid_from_config(cfg);
  const ControlFunction q0 = control_from_config(cfg, grid);
  const ProblemData data = data_from_config(cfg);
  const TaylorHoodSpace space = build_space(build_mesh(n));

  OptimizerConfig ocfg = optimizer_from_config(cfg, grid);
  const std::string target_preset =
      cfg.at("functional").at("targetPreset").get<std::string>();
  if (ocfg.spec.variant == Variant::PerimeterTracking) {
    if (target_preset.empty())
      throw InvalidInput("tracking functional needs functional.targetPreset");
    ocfg.spec.target = solve_target(
        target_preset, cfg.at("functional").at("targetDegree").get<int>(),
        grid, data, space, policy);
  } else if (!target_preset.empty()) {
    throw InvalidInput("functional.targetPreset is only used for tracking");
  }

  const OptimizationHistory hist = run_optimization(q0, data, ocfg, space);
  const IterationRecord& last = hist.final_record();

  write_text_file(out_dir + "/history.csv", history_csv(hist));
  write_text_file(out_dir + "/initial_control.csv", csv_control(q0));
  write_text_file(out_dir + "/final_control.csv", csv_control(last.q));

  bool all_admissible = true;
  for (const auto& r : hist.records) all_admissible &= r.admissible;

  json summary;
  summary["finalJ"] = last.j.total;
  summary["finalTerms"] = {{"energy", last.j.flow},
                           {"reg", last.j.regularization},
                           {"vol", last.j.volume}};
  summary["iterations"] = static_cast<int>(hist.records.size()) - 1;
  summary["stopReason"] = hist.stop_reason;
  summary["finalGradNorm"] = last.grad_norm;
  summary["maxDivergenceResidual"] = hist.max_divergence_residual;
  summary["allAdmissible"] = all_admissible;
  summary["finalControl"] = "final_control.csv";
  write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

  json resolved = cfg;
  resolved["functional"]["vbar"] = ocfg.spec.vbar;
  write_text_file(out_dir + "/resolved_config.json", resolved.dump(2) + "\n");
  if (cfg.at("output").at("gnuplot").get<bool>()) {
    write_text_file(out_dir + "/plot_history.gp", kPlotHistory);
    write_text_file(out_dir + "/plot_controls.gp", kPlotControls);
  }
}

void cmd_converge(const json& cfg, const std::string& out_dir) {
  ensure_directory(out_dir);
  const Policy policy = policy_from_config(cfg);
  const auto& cv = cfg.at("converge");
  const std::vector<int> sizes = cv.at("meshSizes").get<std::vector<int>>();
  const std::vector<double> alphas =
      cv.at("alphas").get<std::vector<double>>();
  if (sizes.empty()) throw InvalidInput("converge.meshSizes is empty");
  for (size_t i = 0; i + 1 < sizes.size(); ++i)
    if (sizes[i + 1] <= sizes[i])
      throw InvalidInput("converge.meshSizes must be ascending");
  const double assumed_order = cv.at("assumedOrder").get<double>();
  const bool filter = cv.at("saturationFilter").get<bool>();

  bool needs_richardson = false;
  for (double a : alphas) needs_richardson |= a != 0.0;
  if (needs_richardson && sizes.size() < 3)
    throw InvalidInput(
        "Richardson reference needs at least 3 mesh sizes for alpha != 0");

  const ProblemData data = data_from_config(cfg);

  std::ostringstream csv;
  csv << "alpha,n,h,j,j_energy,j_reg,j_vol,error,saturated\n";
  json report;
  report["meshSizes"] = sizes;
  report["alphas"] = json::array();

  for (double alpha : alphas) {
    std::vector<FunctionalBreakdown> values;
    for (int n : sizes) {
      const ControlGrid grid = make_uniform_grid(n);
      const TaylorHoodSpace space = build_space(build_mesh(n));

      OptimizerConfig ocfg = optimizer_from_config(cfg, grid);
      ocfg.max_iters = cv.at("maxIters").get<int>();
      ocfg.spec = FunctionalSpec{};
      ocfg.spec.variant = Variant::PerimeterTracking;
      ocfg.spec.alpha = alpha;
      ocfg.spec.beta = 0.0;
      ocfg.spec.vbar = 0.0;
      ocfg.spec.gradient_form = parse_gradient_form(
          cfg.at("functional").at("gradientForm").get<std::string>());
      ocfg.spec.target = solve_target(
          cv.at("targetPreset").get<std::string>(),
          cv.at("targetDegree").get<int>(), grid, data, space, policy);

      const ControlFunction q0 =
          make_preset(ControlPreset::Flat, grid, 1);
      const OptimizationHistory hist = run_optimization(q0, data, ocfg, space);
      values.push_back(hist.final_record().j);
    }

    const size_t m = values.size();
    double reference = 0.0;
    json areport;
    areport["alpha"] = alpha;
    if (alpha == 0.0) {
      areport["referenceKind"] = "exact";
    } else {
      const RichardsonResult rr = richardson_extrapolate(
          values[m - 3].total, values[m - 2].total, values[m - 1].total,
          assumed_order);
      reference = rr.limit;
      areport["referenceKind"] = "richardson";
      areport["richardsonOrderDefined"] = rr.order_defined;
      if (rr.order_defined) areport["richardsonOrder"] = rr.estimated_order;
    }
    areport["reference"] = reference;

    std::vector<double> errors(m);
    for (size_t i = 0; i < m; ++i)
      errors[i] = std::abs(values[i].total - reference);
    std::vector<bool> saturated(m, false);
    if (filter) {
      for (size_t i = 1; i < m; ++i)
        saturated[i] = errors[i] >= errors[i - 1];
    }

    // Least-squares slope of log(error) vs log(h) over usable levels.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    json included = json::array();
    for (size_t i = 0; i < m; ++i) {
      if (saturated[i] || errors[i] <= 0.0) continue;
      const double lx = std::log(1.0 / sizes[i]);
      const double ly = std::log(errors[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
      included.push_back(sizes[i]);
    }
    areport["includedLevels"] = included;
    const double denom = cnt * sxx - sx * sx;
    if (cnt >= 2 && denom != 0.0) {
      areport["fittedOrder"] = (cnt * sxy - sx * sy) / denom;
      areport["fittedOrderDefined"] = true;
    } else {
      areport["fittedOrderDefined"] = false;
    }
    report["alphas"].push_back(areport);

    for (size_t i = 0; i < m; ++i) {
      csv << format_double(alpha) << ',' << sizes[i] << ','
          << format_double(1.0 / sizes[i]) << ','
          << format_double(values[i].total) << ','
          << format_double(values[i].flow) << ','
          << format_double(values[i].regularization) << ','
          << format_double(values[i].volume) << ','
          << format_double(errors[i]) << ',' << (saturated[i] ? 1 : 0)
          << '\n';
    }
  }

  write_text_file(out_dir + "/convergence.csv", csv.str());
  write_text_file(out_dir + "/report.json", report.dump(2) + "\n");
  write_text_file(out_dir + "/resolved_config.json", cfg.dump(2) + "\n");
  if (cfg.at("output").at("gnuplot").get<bool>())
    write_text_file(out_dir + "/plot_convergence.gp", kPlotConvergence);
}

void cmd_sweep(const json& cfg, const std::string& out_dir) {
  ensure_directory(out_dir);
  const json runs = cfg.at("sweep").at("runs");
  if (!runs.is_array()) throw InvalidInput("sweep.runs must be an array");

  std::ostringstream index;
  index << "name,command,dir,j,iterations\n";
  int i = 0;
  for (const auto& run : runs) {
    if (!run.is_object())
      throw InvalidInput("sweep.runs entries must be objects");
    std::string name = "run" + std::to_string(i);
    std::string command = "optimize";
    json overrides = json::object();
    for (auto it = run.begin(); it != run.end(); ++it) {
      if (it.key() == "name")
        name = it.value().get<std::string>();
      else if (it.key() == "command")
        command = it.value().get<std::string>();
      else if (it.key() == "overrides")
        overrides = it.value();
      else
        throw InvalidInput("unknown sweep run key: " + it.key());
    }
    if (overrides.contains("sweep"))
      throw InvalidInput("sweep runs cannot nest sweeps");

    json base = cfg;
    base.erase("sweep");
    json subdefaults = default_config();
    subdefaults.erase("sweep");
    check_known_keys(subdefaults, overrides, "");
    const json subcfg = merge_into(base, overrides);
    const std::string subdir = out_dir + "/" + name;

    if (command == "optimize") {
      cmd_optimize(subcfg, subdir);
      const json summary =
          json::parse(read_text_file(subdir + "/summary.json"));
      index << name << ",optimize," << name << ','
            << format_double(summary.at("finalJ").get<double>()) << ','
            << summary.at("iterations").get<int>() << '\n';
    } else if (command == "solve") {
      cmd_solve(subcfg, subdir);
      index << name << ",solve," << name << ",,\n";
    } else {
      throw InvalidInput("unknown sweep command: " + command);
    }
    ++i;
  }
  write_text_file(out_dir + "/index.csv", index.str());
  write_text_file(out_dir + "/resolved_config.json", cfg.dump(2) + "\n");
}

namespace {

void print_error_json(const std::string& type, const std::string& message) {
  json err;
  err["error"] = {{"type", type}, {"message", message}};
  std::fputs((err.dump() + "\n").c_str(), stderr);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Shape optimization of 2D generalized Stokes flow"};
  app.require_subcommand(1);

  struct Cmd {
    std::string name;
    void (*fn)(const json&, const std::string&);
  };
  const Cmd cmds[] = {{"solve", cmd_solve},
                      {"optimize", cmd_optimize},
                      {"converge", cmd_converge},
                      {"sweep", cmd_sweep}};

  std::string config_path;
  std::string out_dir;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const Cmd* chosen = nullptr;
  for (const auto& c : cmds)
    if (app.get_subcommand(c.name)->parsed()) chosen = &c;

  try {
    json user = json::object();
    if (!config_path.empty()) {
      try {
        user = json::parse(read_text_file(config_path));
      } catch (const json::exception& e) {
        throw InvalidInput(std::string("config parse error: ") + e.what());
      }
    }
    const json cfg = resolve_config(user);
    if (out_dir.empty()) out_dir = std::string("out/") + chosen->name;
    chosen->fn(cfg, out_dir);
    return 0;
  } catch (const InvalidInput& e) {
    print_error_json("invalidInput", e.what());
    return 2;
  } catch (const NumericalFailure& e) {
    print_error_json("numericalFailure", e.what());
    return 3;
  } catch (const json::exception& e) {
    print_error_json("invalidInput", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error_json("internal", e.what());
    return 1;
  }
}

}  // namespace stokeshape
