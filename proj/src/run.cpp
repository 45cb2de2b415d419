#include <chrono>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mfc/config.hpp"
#include "mfc/csv_io.hpp"
#include "mfc/error.hpp"
#include "mfc/parallel.hpp"

#ifndef MFC_VERSION
#define MFC_VERSION "0.1.0"
#endif

namespace mfc {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class Runner {
 public:
  Runner(const RunConfig& cfg, const RunOptions& opts)
      : cfg_(cfg), opts_(opts), dir_(opts.output_dir.empty() ? cfg.output_dir : opts.output_dir) {}

  int execute() {
    const auto start = std::chrono::steady_clock::now();
    manifest_["scenario"] = scenario_name(cfg_.scenario);
    manifest_["seed"] = cfg_.seed;
    manifest_["version"] = MFC_VERSION;
    json resolved = json::object();
    for (const auto& [k, v] : cfg_.resolved) resolved[k] = v;
    manifest_["config"] = resolved;
    int code = kExitOk;
    try {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw IoError("cannot create output directory '" + dir_.string() + "'");
      code = dispatch();
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitIo;
    } catch (const ConvergenceError& e) {
      std::cerr << "error: " << e.what() << '\n';
      code = kExitNonConvergence;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      code = kExitValidation;
    }
    manifest_["exit_code"] = code;
    json outputs = json::array();
    for (const auto& o : outputs_) outputs.push_back(o);
    manifest_["outputs"] = outputs;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest_["wall_time_seconds"] = secs;
    try {
      auto out = open_output(dir_ / "manifest.json");
      out << manifest_.dump(2) << '\n';
      if (!out) throw IoError("failed writing manifest.json");
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitIo;
    }
    return code;
  }

 private:
  const RunConfig& cfg_;
  const RunOptions& opts_;
  fs::path dir_;
  json manifest_ = json::object();
  std::vector<std::string> outputs_;

  void phase(const std::string& line) { std::cout << line << std::endl; }
  void progress(const json& j) {
    if (opts_.progress) std::cerr << j.dump() << std::endl;
  }

  std::ofstream file(const std::string& name) {
    outputs_.push_back(name);
    return open_output(dir_ / name);
  }
  void finish(std::ofstream& out, const std::string& name) {
    out.flush();
    if (!out) throw IoError("failed writing " + name);
  }

  PicardOptions picard_options() {
    PicardOptions o;
    o.truncate = cfg_.truncate;
    o.truncation_cap = cfg_.truncation_cap;
    o.on_iteration = [this](std::size_t it, double gap) {
      progress({{"phase", "picard"}, {"iteration", it}, {"gap", gap}});
    };
    return o;
  }

  void write_flow(const MeasureFlow& flow, const std::string& name) {
    auto out = file(name);
    write_flow_csv(out, flow);
    finish(out, name);
  }
  void write_leaders(const LeaderTrajectory& traj, const std::string& name) {
    auto out = file(name);
    write_leader_csv(out, traj);
    finish(out, name);
  }
  void write_picard(const PicardReport& rep, const std::string& name) {
    json j;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    json gaps = json::array();
    for (double g : rep.gaps) gaps.push_back(format_double(g));
    j["gaps"] = gaps;
    auto out = file(name);
    out << j.dump(2) << '\n';
    finish(out, name);
  }
  void write_table(const ConvergenceTable& t) {
    {
      auto out = file(t.name + ".csv");
      write_table_csv(out, t);
      finish(out, t.name + ".csv");
    }
    auto out = file(t.name + ".dat");
    write_gnuplot_dat(out, t);
    finish(out, t.name + ".dat");
  }

  int dispatch() {
    const LeaderFollowerModel model = cfg_.model();
    const SimConfig sim = cfg_.sim();
    switch (cfg_.scenario) {
      case Scenario::simulate: {
        const ParticleEnsemble init = sample_initial(model.law, sim.N, sim.seed);
        const BrownianPaths paths = generate_brownian(sim);
        const auto run = simulate_interacting(model.kernels, cfg_.control(), init, model.Y0, sim, paths);
        phase("simulate: N=" + std::to_string(sim.N) + " steps=" + std::to_string(sim.n_steps));
        write_flow(run.flow, "flow.csv");
        if (model.m() > 0) write_leaders(run.leaders, "leaders.csv");
        return kExitOk;
      }
      case Scenario::meanfield: {
        const ParticleEnsemble init = sample_initial(model.law, sim.N, sim.seed);
        const DriftField f = fields::kernel_drift(model.kernels.k11, model.d, model.p);
        const auto rep = picard_solve(f, init, sim, cfg_.tol, cfg_.max_iter, picard_options());
        phase("meanfield: iterations=" + std::to_string(rep.iterations) +
              " converged=" + (rep.converged ? "true" : "false"));
        write_picard(rep, "picard.json");
        write_flow(rep.final_flow, "flow.csv");
        return rep.converged ? kExitOk : kExitNonConvergence;
      }
      case Scenario::coupled: {
        const ParticleEnsemble init = sample_initial(model.law, sim.N, sim.seed);
        const auto sol = solve_coupled(model.coupled(), cfg_.control(), init, sim, cfg_.tol,
                                       cfg_.max_iter, picard_options());
        phase("coupled: iterations=" + std::to_string(sol.picard.iterations) +
              " converged=" + (sol.picard.converged ? "true" : "false"));
        write_picard(sol.picard, "picard.json");
        write_flow(sol.flow, "flow.csv");
        if (model.m() > 0) write_leaders(sol.leaders, "leaders.csv");
        return sol.picard.converged ? kExitOk : kExitNonConvergence;
      }
      case Scenario::optimize: {
        const CostSpec cost = cfg_.cost();
        MeanFieldCostOptions mo{cfg_.tol, cfg_.max_iter, picard_options()};
        mo.picard.on_iteration = nullptr;
        std::size_t n_eval = 0;
        const auto res = optimize(
            cfg_.control(),
            [&](const ControlSpec& u) {
              const double c = evaluate_cost_meanfield(u, model, cost, sim, mo);
              progress({{"phase", "optimize"}, {"evaluation", ++n_eval}, {"cost", c}});
              return c;
            },
            cfg_.budget, cfg_.step0, cfg_.seed);
        phase("optimize: evaluations=" + std::to_string(res.evaluations) +
              " best_cost=" + format_double(res.best_cost));
        auto out = file("history.csv");
        out << "eval,cost,best_cost\n";
        for (std::size_t i = 0; i < res.costs.size(); ++i)
          out << i + 1 << ',' << format_double(res.costs[i]) << ','
              << format_double(res.best_so_far[i]) << '\n';
        finish(out, "history.csv");
        auto ctl = file("control.txt");
        ctl << "h =";
        for (double e : res.best.parameters()) ctl << ' ' << format_double(e);
        ctl << '\n';
        finish(ctl, "control.txt");
        return std::isfinite(res.best_cost) ? kExitOk : kExitNonConvergence;
      }
      case Scenario::chaos: {
        const auto table =
            chaos_experiment(model, cfg_.control(), cfg_.N_list, cfg_.N_ref, sim, cfg_.seeds);
        phase("chaos: rows=" + std::to_string(table.rows.size()));
        write_table(table);
        return kExitOk;
      }
      case Scenario::gamma: {
        GammaOptions go;
        go.N_ref = cfg_.N_ref;
        go.reference_seed = cfg_.seed;
        go.meanfield = {cfg_.tol, cfg_.max_iter, {}};
        const auto table = gamma_convergence_experiment(cfg_.control(), model, cfg_.cost(),
                                                        cfg_.N_list, sim, cfg_.seeds, go);
        phase("gamma: rows=" + std::to_string(table.rows.size()));
        write_table(table);
        return kExitOk;
      }
      case Scenario::validate:
        return validate(model, sim);
    }
    return kExitOk;
  }

  int validate(const LeaderFollowerModel& model, const SimConfig& sim) {
    const DriftField f = fields::kernel_drift(model.kernels.k11, model.d, model.p);
    const ParticleEnsemble init = sample_initial(model.law, sim.N, sim.seed);
    auto flow_for = [&](std::uint64_t seed) {
      SimConfig c = sim;
      c.seed = seed;
      const BrownianPaths paths = generate_brownian(c);
      return simulate_interacting(model.kernels, ControlSpec::zero(0, model.d, sim.T), init,
                                  LeaderState(0, model.d), c, paths)
          .flow;
    };
    const MeasureFlow flow1 = flow_for(sim.seed), flow2 = flow_for(sim.seed + 1);
    const std::size_t n = cfg_.validation_samples;
    const double R = 3.0;
    const auto pts = latin_hypercube(n, model.d, R / std::sqrt(2.0 * model.d), sim.seed);
    const auto pts2 = latin_hypercube(n, model.d, R / std::sqrt(2.0 * model.d), sim.seed + 7);
    // Growth is probed far out; the local checks stay inside the ball.
    const auto far = latin_hypercube(n, model.d, 1e3, sim.seed + 13);
    std::vector<std::pair<PhasePoint, PhasePoint>> pairs;
    for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(pts[i], pts2[i]);
    const std::vector<double> times{0.0, sim.T};
    const std::vector<std::size_t> nodes{0, flow1.nodes() / 2, flow1.nodes() - 1};
    std::vector<ValidationReport> reps;
    reps.push_back(validate_sublinearity(f, flow1, far, times));
    const MeasureFlow last = MeasureFlow::constant(flow1.at(flow1.nodes() - 1), {0.0});
    reps.push_back(validate_hoelder(f, last, pairs,
                                    kernel_drift_hoelder_constant(model.kernels.k11.lipschitz, R),
                                    1.0, R * (1.0 + 1e-12)));
    reps.push_back(validate_dissipativity_v3pp(f, flow1, flow2, pairs, nodes,
                                               sim.N <= 256 ? GapMetric::exact : GapMetric::paired));
    const ControlSpec u = cfg_.control();
    if (u.m > 0) reps.push_back(validate_control_bound(u));
    auto out = file("validation.csv");
    out << "check,pass,worst_ratio,threshold,samples,skipped,offender\n";
    bool all = true;
    for (const auto& r : reps) {
      all = all && r.pass;
      out << r.check << ',' << (r.pass ? "true" : "false") << ',' << format_double(r.worst_ratio)
          << ',' << format_double(r.threshold) << ',' << r.samples << ',' << r.skipped << ",\""
          << r.offender << "\"\n";
      phase("validate " + r.check + ": " + (r.pass ? "PASS" : "FAIL") +
            " worst=" + format_double(r.worst_ratio));
    }
    finish(out, "validation.csv");
    return all ? kExitOk : kExitValidation;
  }
};

}  // namespace

int run(const RunConfig& config, const RunOptions& opts) {
  if (opts.threads > 0) set_thread_count(opts.threads);
  Runner runner(config, opts);
  return runner.execute();
}

}  // namespace mfc
