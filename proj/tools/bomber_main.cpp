// Command-line front end: closed-form evaluation, grid solving, boundary
// mapping, verification, and Monte Carlo simulation with CSV/JSON output.
//
// Exit codes: 0 success, 1 usage error, 2 domain/numeric error, 3 failed
// verification.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bomber/model.hpp"
#include "bomber/montecarlo.hpp"
#include "bomber/solver.hpp"
#include "bomber/verify.hpp"

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RunConfig {
  double u = 0.0;
  double x = 0.0;
  double t = 1.0;
  double x_max = 5.0;
  double t_max = 5.0;
  int nx = 2001;
  int nt = 2001;
  std::string scheme = "rk4";
  double quad_abs_tol = 1e-10;
  double quad_rel_tol = 1e-10;
  int quad_max_subdivisions = 50;
  uint64_t seed = 0;
  int64_t n_runs = 100000;
  int n_streams = 1;
  std::string policy = "closed_form";
  std::string out;
  std::string format = "csv";
  bool quick = false;
  bool numeric = false;
  std::vector<double> boundary_t = {0.25, 0.5, 1.0, 2.0, 4.0};

  bomber::solver::GridSpec grid_spec() const {
    bomber::solver::GridSpec spec;
    spec.x_max = x_max;
    spec.t_max = t_max;
    spec.nx = nx;
    spec.nt = nt;
    if (scheme == "euler") spec.scheme = bomber::solver::Scheme::Euler;
    else if (scheme == "rk4") spec.scheme = bomber::solver::Scheme::RK4;
    else throw std::domain_error("unknown scheme '" + scheme + "' (euler|rk4)");
    return spec;
  }

  bomber::QuadratureConfig quad() const {
    bomber::QuadratureConfig q;
    q.abs_tol = quad_abs_tol;
    q.rel_tol = quad_rel_tol;
    q.max_subdivisions = quad_max_subdivisions;
    q.validate();
    return q;
  }
};

// Flags beat the JSON config file, which beats defaults.
void overlay_config_file(RunConfig& cfg, const CLI::App& cmd, const json& j) {
  auto take = [&](const char* flag, const char* key, auto& slot) {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    const bool from_flag = opt != nullptr && opt->count() > 0;
    if (!from_flag && j.contains(key))
      slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  take("--u", "u", cfg.u);
  take("--x", "x", cfg.x);
  take("--t", "t", cfg.t);
  take("--x-max", "x_max", cfg.x_max);
  take("--t-max", "t_max", cfg.t_max);
  take("--nx", "nx", cfg.nx);
  take("--nt", "nt", cfg.nt);
  take("--scheme", "scheme", cfg.scheme);
  take("--seed", "seed", cfg.seed);
  take("--n-runs", "n_runs", cfg.n_runs);
  take("--n-streams", "n_streams", cfg.n_streams);
  take("--policy", "policy", cfg.policy);
  take("--out", "out", cfg.out);
  take("--format", "format", cfg.format);
  if (j.contains("quad_abs_tol")) cfg.quad_abs_tol = j["quad_abs_tol"];
  if (j.contains("quad_rel_tol")) cfg.quad_rel_tol = j["quad_rel_tol"];
  if (j.contains("quad_max_subdivisions"))
    cfg.quad_max_subdivisions = j["quad_max_subdivisions"];
}

// Results are fully built in memory, then written via temp + atomic rename:
// an error can never leave a partial file behind.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(out_path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::domain_error("cannot open " + tmp.string());
    f << content;
    if (!f.good()) {
      fs::remove(tmp);
      throw std::domain_error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

const char* region_label(double x, double t, const bomber::ModelParams& p) {
  // t = 0 is the t -> 0+ limit: f_u diverges, every x spends it all.
  if (t == 0.0) return to_string(bomber::Region::R1);
  return to_string(bomber::model::classify_region(bomber::State(x, t), p));
}

int cmd_eval(const RunConfig& cfg) {
  const bomber::ModelParams params(cfg.u);
  const bomber::State s(cfg.x, cfg.t);

  std::optional<bomber::solver::SolutionGrid> grid;
  if (cfg.numeric)
    grid = bomber::solver::solve_integral_equation(params, cfg.grid_spec());

  const std::string region = region_label(s.x, s.t, params);
  const double f = s.t > 0.0
                       ? bomber::model::boundary_f(s.t, params)
                       : std::numeric_limits<double>::infinity();
  std::optional<double> K, P;
  if (region != "Outside") {
    if (s.t == 0.0) {
      K = s.x;
      P = 1.0;
    } else {
      K = bomber::model::closed_form_K(s, params);
      P = bomber::model::closed_form_P(s, params, cfg.quad());
    }
  } else if (!cfg.numeric) {
    throw bomber::unsupported_region_error("no closed form outside R2");
  }

  std::optional<double> nP, nK;
  if (grid) {
    nP = bomber::solver::numeric_P(*grid, s);
    nK = bomber::solver::numeric_K(*grid, s);
  }

  std::ostringstream outs;
  if (cfg.format == "json") {
    json j{{"u", cfg.u}, {"x", s.x}, {"t", s.t}, {"region", region},
           {"f", f}};
    j["K"] = K ? json(*K) : json();
    j["P"] = P ? json(*P) : json();
    if (nP) j["numeric_P"] = *nP;
    if (nK) j["numeric_K"] = *nK;
    outs << j.dump(2) << "\n";
  } else {
    outs << "u=" << g17(cfg.u) << " x=" << g17(s.x) << " t=" << g17(s.t)
         << " region=" << region << " f=" << g17(f);
    outs << " K=" << (K ? g17(*K) : "NA") << " P=" << (P ? g17(*P) : "NA");
    if (nP) outs << " numeric_P=" << g17(*nP);
    if (nK) outs << " numeric_K=" << g17(*nK);
    outs << "\n";
  }
  emit(cfg.out, outs.str());
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  const bomber::ModelParams params(cfg.u);
  const auto grid =
      bomber::solver::solve_integral_equation(params, cfg.grid_spec());
  const auto& spec = grid.spec();

  std::ostringstream outs;
  if (cfg.format == "json") {
    json rows = json::array();
    for (int j = 0; j < spec.nt; ++j)
      for (int i = 0; i < spec.nx; ++i) {
        const double x = grid.x_node(i), t = grid.t_node(j);
        rows.push_back({{"x", x},
                        {"t", t},
                        {"region", region_label(x, t, params)},
                        {"pbar", grid.pbar_at(i, j)},
                        {"p", std::exp(-t) * grid.pbar_at(i, j)},
                        {"kstar", grid.kstar_at(i, j)}});
      }
    outs << json{{"u", cfg.u}, {"rows", rows}}.dump() << "\n";
  } else {
    outs << "x,t,region,pbar,p,kstar\n";
    for (int j = 0; j < spec.nt; ++j)
      for (int i = 0; i < spec.nx; ++i) {
        const double x = grid.x_node(i), t = grid.t_node(j);
        outs << g17(x) << ',' << g17(t) << ','
             << region_label(x, t, params) << ',' << g17(grid.pbar_at(i, j))
             << ',' << g17(std::exp(-t) * grid.pbar_at(i, j)) << ','
             << g17(grid.kstar_at(i, j)) << '\n';
      }
  }
  emit(cfg.out, outs.str());
  return 0;
}

int cmd_boundary(const RunConfig& cfg) {
  const bomber::ModelParams params(cfg.u);
  const auto grid =
      bomber::solver::solve_integral_equation(params, cfg.grid_spec());
  const double tol = 0.5 * grid.spec().dx();

  std::ostringstream outs;
  json rows = json::array();
  if (cfg.format != "json") outs << "t,x_detected,x_analytic,gap\n";
  for (double t : cfg.boundary_t) {
    const auto est = bomber::verify::boundary_detect(grid, t, tol);
    if (cfg.format == "json")
      rows.push_back({{"t", est.t},
                      {"x_detected", est.x_detected},
                      {"x_analytic", est.x_analytic},
                      {"gap", est.gap}});
    else
      outs << g17(est.t) << ',' << g17(est.x_detected) << ','
           << g17(est.x_analytic) << ',' << g17(est.gap) << '\n';
  }
  if (cfg.format == "json")
    outs << json{{"u", cfg.u}, {"rows", rows}}.dump(2) << "\n";
  emit(cfg.out, outs.str());
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const bomber::ModelParams params(cfg.u);
  const auto report = bomber::verify::run_battery(params, cfg.quick, cfg.seed);
  std::cout << report.to_text();
  if (!cfg.out.empty())
    emit(cfg.out, cfg.format == "json" ? report.to_json() + "\n"
                                       : report.to_text());
  return report.all_passed() ? 0 : 3;
}

int cmd_simulate(const RunConfig& cfg) {
  namespace mc = bomber::montecarlo;
  const bomber::ModelParams params(cfg.u);
  const bomber::State s0(cfg.x, cfg.t);

  std::optional<bomber::solver::SolutionGrid> grid;
  mc::Policy policy = mc::Policy::spend_all();
  if (cfg.policy == "spend_all") {
    policy = mc::Policy::spend_all();
  } else if (cfg.policy == "closed_form") {
    policy = mc::Policy::closed_form();
  } else if (cfg.policy == "grid") {
    grid = bomber::solver::solve_integral_equation(params, cfg.grid_spec());
    policy = mc::Policy::grid_interpolated(&*grid);
  } else if (cfg.policy.rfind("fractional:", 0) == 0) {
    policy = mc::Policy::fractional(std::stod(cfg.policy.substr(11)));
  } else {
    throw std::domain_error(
        "unknown policy '" + cfg.policy +
        "' (closed_form|grid|spend_all|fractional:<c>)");
  }

  mc::SimConfig sim;
  sim.n_runs = cfg.n_runs;
  sim.seed = cfg.seed;
  sim.n_streams = cfg.n_streams;
  const mc::SimResult res = mc::estimate_survival(policy, s0, params, sim);

  std::optional<double> analytic;
  if (s0.t == 0.0) {
    analytic = 1.0;
  } else if (bomber::model::classify_region(s0, params) !=
             bomber::Region::Outside) {
    analytic = bomber::model::closed_form_P(s0, params, cfg.quad());
  }

  std::ostringstream outs;
  if (cfg.format == "json") {
    json j{{"policy", policy.name()}, {"x", s0.x},       {"t", s0.t},
           {"u", cfg.u},              {"n_runs", res.n_runs},
           {"seed", cfg.seed},        {"p_hat", res.p_hat},
           {"stderr", res.std_err}};
    j["analytic_P"] = analytic ? json(*analytic) : json();
    outs << j.dump(2) << "\n";
  } else {
    outs << "policy,x,t,u,n_runs,seed,p_hat,stderr,analytic_P\n";
    outs << policy.name() << ',' << g17(s0.x) << ',' << g17(s0.t) << ','
         << g17(cfg.u) << ',' << res.n_runs << ',' << cfg.seed << ','
         << g17(res.p_hat) << ',' << g17(res.std_err) << ','
         << (analytic ? g17(*analytic) : "") << '\n';
  }
  emit(cfg.out, outs.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bomber Problem toolkit: closed-form K/P, integral-equation grid "
      "solver, verification harness, Monte Carlo policy simulation"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--u", cfg.u, "counterattack parameter, 0 <= u < 1");
    cmd->add_option("--config", config_path, "JSON config file (flags win)");
    cmd->add_option("--out", cfg.out, "output path (atomic write)");
    cmd->add_option("--format", cfg.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--quad-abs-tol", cfg.quad_abs_tol);
    cmd->add_option("--quad-rel-tol", cfg.quad_rel_tol);
    return cmd;
  };
  auto add_grid = [&](CLI::App* cmd) {
    cmd->add_option("--x-max", cfg.x_max, "grid x extent");
    cmd->add_option("--t-max", cfg.t_max, "grid t extent");
    cmd->add_option("--nx", cfg.nx, "grid x nodes");
    cmd->add_option("--nt", cfg.nt, "grid t nodes");
    cmd->add_option("--scheme", cfg.scheme, "euler|rk4");
    return cmd;
  };

  CLI::App* eval = add_grid(add_common(
      app.add_subcommand("eval", "evaluate region, f_u(t), K and P")));
  eval->add_option("--x", cfg.x, "ammunition");
  eval->add_option("--t", cfg.t, "time to go");
  eval->add_flag("--numeric", cfg.numeric, "also solve a grid and report "
                                           "numeric P and K");

  CLI::App* solve = add_grid(add_common(
      app.add_subcommand("solve", "solve the integral equation on a grid")));

  CLI::App* boundary = add_grid(add_common(app.add_subcommand(
      "boundary", "detect the spend-it-all boundary from a solved grid")));
  boundary->add_option("--t", cfg.boundary_t,
                       "boundary times (repeatable)");

  CLI::App* verify =
      add_common(app.add_subcommand("verify", "run the verification battery"));
  verify->add_flag("--quick", cfg.quick, "smaller grids and sample counts");
  verify->add_option("--seed", cfg.seed, "sampling seed");

  CLI::App* simulate = add_grid(add_common(app.add_subcommand(
      "simulate", "Monte Carlo survival estimate under a policy")));
  simulate->add_option("--x", cfg.x, "initial ammunition");
  simulate->add_option("--t", cfg.t, "initial time to go");
  simulate->add_option("--policy", cfg.policy,
                       "closed_form|grid|spend_all|fractional:<c>");
  simulate->add_option("--seed", cfg.seed, "RNG seed");
  simulate->add_option("--n-runs", cfg.n_runs, "number of missions");
  simulate->add_option("--n-streams", cfg.n_streams, "RNG stream count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    json jcfg = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::domain_error("cannot read config file " + config_path);
      jcfg = json::parse(in);
      overlay_config_file(cfg, *active, jcfg);
    }
    if (active == eval || active == simulate) {
      const bool has_x = active->count("--x") > 0 || jcfg.contains("x");
      const bool has_t = active->count("--t") > 0 || jcfg.contains("t");
      if (!has_x || !has_t) {
        std::cerr << "error: --x and --t are required (as a flag or in the "
                     "config file)\n";
        return 1;
      }
    }

    if (active == eval) return cmd_eval(cfg);
    if (active == solve) return cmd_solve(cfg);
    if (active == boundary) return cmd_boundary(cfg);
    if (active == verify) return cmd_verify(cfg);
    if (active == simulate) return cmd_simulate(cfg);
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bomber::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
