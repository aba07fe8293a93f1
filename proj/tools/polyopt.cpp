// polyopt — certified global polynomial optimization.
//
// Subcommands expose the pipeline stages: `solve` runs the full hybrid loop
// (relaxation slices, identification, alpha-certified Newton, global gate);
// `relax`, `identify`, `alpha`, and `newton` run one stage each.  Reports are
// JSON on stdout; constraint indices in reports and flags are 1-based.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyopt/acopf.hpp"
#include "polyopt/driver.hpp"
#include "polyopt/errors.hpp"
#include "polyopt/problem_io.hpp"

namespace {

using nlohmann::json;
using namespace polyopt;

bool is_matpower(const std::string& path) {
  return path.size() >= 2 && path.substr(path.size() - 2) == ".m";
}

struct LoadedProblem {
  Pop pop;
  std::vector<std::string> labels;  // empty for plain problem files
};

LoadedProblem load(const std::string& path) {
  if (is_matpower(path)) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    Network net = parse_matpower(buf.str());
    for (const auto& w : net.warnings) std::cerr << "warning: " << w << "\n";
    AcopfPop apop = build_pop(net);
    return {std::move(apop.pop), std::move(apop.labels)};
  }
  return {load_problem(path), {}};
}

Eigen::VectorXd parse_point(const std::string& text, int n) {
  std::vector<double> vals;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InputError("malformed coordinate '" + tok + "'");
    }
  }
  if (static_cast<int>(vals.size()) != n) {
    throw InputError("point has " + std::to_string(vals.size()) + " coordinates, expected " +
                     std::to_string(n));
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

std::vector<int> parse_active(const std::string& text, const Pop& pop) {
  std::vector<int> idx;
  if (text.empty()) return idx;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    int i;
    try {
      i = std::stoi(tok);
    } catch (const std::exception&) {
      throw InputError("malformed constraint index '" + tok + "'");
    }
    if (i < 1 || i > pop.constraint_count()) {
      throw InputError("constraint index " + std::to_string(i) + " out of range");
    }
    idx.push_back(i - 1);  // reports are 1-based, internals 0-based
  }
  return idx;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json one_based(const std::vector<int>& idx) {
  json a = json::array();
  for (int i : idx) a.push_back(i + 1);
  return a;
}

json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},      {"total_iterations", r.total_iterations},
          {"converged", r.converged},        {"objective", r.objective},
          {"dual_objective", r.dual_objective}, {"primal_residual", r.primal_residual},
          {"dual_residual", r.dual_residual},   {"gap", r.gap}};
}

json to_json(const AlphaReport& r) {
  return {{"beta", r.beta},
          {"mu", r.mu},
          {"sigma_min", r.sigma_min},
          {"alpha_hat", r.alpha_hat},
          {"threshold", r.threshold},
          {"passes", r.passes},
          {"form", r.form == AlphaForm::Generic ? "generic" : "degree3"}};
}

// Settings resolution: explicit flag > config-file key > built-in default.
struct Config {
  json doc = json::object();

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid config JSON: ") + e.what(), 0);
    }
    if (!doc.is_object()) throw ParseError("config must be a JSON object", 0);
  }

  template <typename T>
  T pick(const CLI::Option* opt, T flag_value, const char* key, T fallback) const {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (doc.contains(key)) return doc[key].get<T>();
    return fallback;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

void write_solve_trace(std::ostream& out, const HybridResult& res) {
  out << "outer,order,probe,sdp_iterations,objective,primal_residual,dual_residual,"
         "sdp_gap,omega,threshold,active,licq_ok,alpha_ran,alpha_hat,newton_ran,"
         "newton_converged,newton_iterations,global_ok,global_gap,note\n";
  for (const auto& e : res.trace) {
    std::string active;
    for (std::size_t i = 0; i < e.active.size(); ++i) {
      active += (i ? ";" : "") + std::to_string(e.active[i] + 1);
    }
    std::string note = e.note;
    for (char& c : note) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << e.outer << ',' << e.order << ',' << e.probe << ',' << e.sdp.iterations << ','
        << e.sdp.objective << ',' << e.sdp.primal_residual << ',' << e.sdp.dual_residual
        << ',' << e.sdp.gap << ',' << e.omega << ',' << e.threshold << ',' << active
        << ',' << e.licq_ok << ',' << e.alpha_ran << ','
        << (e.alpha_ran ? e.alpha.alpha_hat : 0.0) << ',' << e.newton_ran << ','
        << e.newton_converged << ',' << e.newton_iterations << ',' << e.global_ok << ','
        << e.global_gap << ',' << note << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified global polynomial optimization"};
  app.require_subcommand(1);

  std::string input, at_text, active_text, trace_path, sdpa_path, config_path;
  int order = 0, max_order = 3, max_iter = 50;
  long budget = 0;
  double tol = 1e-7, gap_tol = 1e-6, feas_tol = 1e-8, eps = 1e-12;
  bool verbose = false, degree3 = false;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("input", input, "problem file (.json) or MATPOWER case (.m)")
        ->required();
    sc->add_option("--config", config_path, "JSON file of option defaults");
    sc->add_flag("--verbose", verbose, "progress to stderr");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the full hybrid loop");
  add_common(solve);
  auto* so_order = solve->add_option("-r,--order", order, "initial relaxation order");
  auto* so_maxord = solve->add_option("--max-order", max_order, "escalation cap");
  auto* so_tol = solve->add_option("--tol", tol, "SDP residual target");
  auto* so_budget = solve->add_option("--budget", budget, "SDP iterations per slice");
  auto* so_gap = solve->add_option("--gap-tol", gap_tol, "global-gate gap tolerance");
  auto* so_feas = solve->add_option("--feas-tol", feas_tol, "feasibility tolerance");
  solve->add_option("--trace", trace_path, "write outer-loop trace CSV here");

  CLI::App* relax = app.add_subcommand("relax", "solve one moment relaxation");
  add_common(relax);
  auto* rx_order = relax->add_option("-r,--order", order, "relaxation order");
  auto* rx_tol = relax->add_option("--tol", tol, "residual target");
  auto* rx_budget = relax->add_option("--budget", budget, "iteration budget");
  relax->add_option("--trace", trace_path, "write per-iteration CSV here");
  relax->add_option("--sdpa", sdpa_path, "export the relaxation in SDPA format");

  CLI::App* identify = app.add_subcommand("identify", "active constraints at a point");
  add_common(identify);
  identify->add_option("--at", at_text, "comma-separated point")->required();

  CLI::App* alpha = app.add_subcommand("alpha", "alpha-hat test on the reduced system");
  add_common(alpha);
  alpha->add_option("--at", at_text, "comma-separated point")->required();
  alpha->add_option("--active", active_text, "1-based active inequality indices");
  alpha->add_flag("--degree3", degree3, "use the degree-3 specialized bound");

  CLI::App* newton = app.add_subcommand("newton", "Newton on the reduced KKT system");
  add_common(newton);
  newton->add_option("--at", at_text, "comma-separated point")->required();
  newton->add_option("--active", active_text, "1-based active inequality indices");
  auto* nw_eps = newton->add_option("--eps", eps, "residual target");
  auto* nw_maxit = newton->add_option("--max-iter", max_iter, "iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg.load(config_path);
    LoadedProblem prob = load(input);
    const Pop& pop = prob.pop;
    json report;

    if (solve->parsed()) {
      HybridConfig hc;
      hc.max_order = cfg.pick(so_maxord, max_order, "max_order", 3);
      int init = cfg.pick(so_order, order, "order", 0);
      if (init > 0) hc.initial_order = init;
      hc.sdp_tol = cfg.pick(so_tol, tol, "tol", 1e-7);
      hc.slice_budget = cfg.pick(so_budget, budget, "budget", 2000L);
      hc.gap_tol = cfg.pick(so_gap, gap_tol, "gap_tol", 1e-6);
      hc.feas_tol = cfg.pick(so_feas, feas_tol, "feas_tol", 1e-8);
      // Rarely-tuned loop knobs have no flags and come from the config only.
      hc.max_outer = cfg.pick<int>(nullptr, 0, "max_outer", hc.max_outer);
      hc.stall_limit = cfg.pick<int>(nullptr, 0, "stall_limit", hc.stall_limit);
      hc.newton_eps = cfg.pick<double>(nullptr, 0.0, "newton_eps", hc.newton_eps);
      hc.newton_max_iter = cfg.pick<int>(nullptr, 0, "newton_max_iter", hc.newton_max_iter);
      hc.verbose = verbose;
      HybridResult res = run(pop, hc);
      report["certified"] = res.certified;
      report["x"] = to_json(res.x);
      report["lambda"] = to_json(res.lambda);
      report["objective"] = res.objective;
      report["bound"] = res.bound ? json(*res.bound) : json();
      report["final_order"] = res.final_order;
      report["outer_iterations"] = res.trace.size();
      if (res.certificate) {
        report["certificate"] = {{"gap", res.certificate->gap},
                                 {"bound", res.certificate->bound},
                                 {"alpha", to_json(res.certificate->alpha)},
                                 {"newton_iterations", res.certificate->newton_iterations},
                                 {"kkt_residual", res.certificate->kkt_residual}};
      } else {
        report["certificate"] = json();
      }
      if (!trace_path.empty()) {
        auto out = open_out(trace_path);
        write_solve_trace(out, res);
        report["trace"] = trace_path;
      }
      std::cout << report.dump(2) << std::endl;
      return res.certified ? 0 : 2;
    }

    if (relax->parsed()) {
      int r = cfg.pick(rx_order, order, "order", min_order(pop));
      MomentSdp sdp = build_moment_sdp(pop, r);
      if (!sdpa_path.empty()) {
        auto out = open_out(sdpa_path);
        write_sdpa(sdp, out);
        report["sdpa"] = sdpa_path;
      }
      SdpState state = make_state(sdp);
      SolveOptions opt;
      opt.tol = cfg.pick(rx_tol, tol, "tol", 1e-7);
      opt.budget = cfg.pick(rx_budget, budget, "budget", 50000L);
      std::ofstream trace_out;
      if (!trace_path.empty()) {
        trace_out = open_out(trace_path);
        opt.trace = &trace_out;
        report["trace"] = trace_path;
      }
      SolveReport rep = solve_partial(sdp, state, opt);
      report["order"] = r;
      report["moment_length"] = state.y.size();
      report["sdp"] = to_json(rep);
      auto bound = lower_bound(rep, opt.tol);
      report["bound"] = bound ? json(*bound) : json();
      report["x"] = to_json(extract_point(sdp, state.y));
      std::cout << report.dump(2) << std::endl;
      return 0;
    }

    if (identify->parsed()) {
      Eigen::VectorXd x = parse_point(at_text, pop.n);
      IdentReport rep = active_set(pop, x);
      report["omega"] = rep.omega;
      report["omega_scaled"] = rep.omega_scaled;
      report["threshold"] = rep.threshold;
      report["active"] = one_based(rep.active);
      report["lambda"] = to_json(rep.lambda);
      report["accuracy_warning"] = rep.accuracy_warning;
      if (!prob.labels.empty()) {
        json labels = json::array();
        for (int i : rep.active) labels.push_back(prob.labels[i]);
        report["active_labels"] = labels;
      }
      std::cout << report.dump(2) << std::endl;
      return 0;
    }

    if (alpha->parsed() || newton->parsed()) {
      Eigen::VectorXd x = parse_point(at_text, pop.n);
      ActiveSet act(pop, parse_active(active_text, pop));
      Eigen::VectorXd lam = fletcher_multiplier(pop, act, x);
      PolySystem F = reduce(pop, act);
      Eigen::VectorXd z(x.size() + lam.size());
      z << x, lam;
      if (alpha->parsed()) {
        AlphaReport rep = degree3 ? alpha_hat_degree3(F, z) : alpha_hat(F, z);
        report = to_json(rep);
        report["z"] = to_json(z);
        std::cout << report.dump(2) << std::endl;
        return 0;
      }
      NewtonOptions opt;
      opt.eps = cfg.pick(nw_eps, eps, "eps", 1e-12);
      opt.max_iter = cfg.pick(nw_maxit, max_iter, "max_iter", 50);
      NewtonTrace tr = newton_solve(F, z, opt);
      report["converged"] = tr.converged;
      report["iterations"] = tr.iterations;
      report["final_residual"] = tr.final_residual;
      report["z"] = to_json(tr.iterates.back().z);
      json steps = json::array();
      for (const auto& it : tr.iterates) {
        steps.push_back({{"residual", it.residual_norm}, {"step", it.step_norm}});
      }
      report["trace"] = steps;
      std::cout << report.dump(2) << std::endl;
      return tr.converged ? 0 : 2;
    }
  } catch (const polyopt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
