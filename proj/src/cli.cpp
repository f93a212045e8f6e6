#include "multisync/cli.hpp"

#include "multisync/criteria.hpp"
#include "multisync/json_io.hpp"
#include "multisync/sim.hpp"
#include "multisync/spectra.hpp"
#include "multisync/ximax.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <ostream>
#include <thread>

namespace multisync::cli {

namespace {

namespace fs = std::filesystem;
using io::format12;
using io::json;

std::size_t thread_budget() {
    if (const char* env = std::getenv("MULTISYNC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Runs fn(i) for i in [0, count) on up to thread_budget() workers; results
// are stored by index so the output is order-independent.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min(thread_budget(), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

struct GlobalOpts {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    double tol = 1e-7;
};

std::vector<LaplacianMatrix> load_laplacians(const std::vector<std::string>& paths) {
    std::vector<LaplacianMatrix> gs;
    gs.reserve(paths.size());
    for (const std::string& p : paths) gs.push_back(io::laplacian_from_json(io::load_json_file(p)));
    if (gs.empty()) throw ValidationError("no graph files given");
    const std::size_t n = gs.front().size();
    for (const LaplacianMatrix& g : gs)
        if (g.size() != n) throw ValidationError("graph order mismatch across layers");
    return gs;
}

void write_out(const GlobalOpts& opts, const std::string& name, const std::string& content) {
    fs::create_directories(opts.out_dir);
    io::write_text_file(fs::path(opts.out_dir) / name, content);
}

int cmd_spanning_tree(const std::vector<std::string>& paths, std::ostream& out) {
    std::vector<WeightedDigraph> layers;
    for (const std::string& p : paths) layers.push_back(io::digraph_from_json(io::load_json_file(p)));
    if (layers.empty()) throw ValidationError("no graph files given");
    const std::size_t n = layers.front().size();
    for (const WeightedDigraph& g : layers)
        if (g.size() != n) throw ValidationError("graph order mismatch across layers");

    for (std::size_t k = 0; k < layers.size(); ++k)
        out << "layer " << k << ": strongly connected = "
            << (is_strongly_connected(layers[k]) ? "yes" : "no")
            << ", balanced = " << (is_balanced(layers[k]) ? "yes" : "no") << "\n";

    const WeightedDigraph sum = graph_sum(layers);
    const SpanningTreeReport report = has_spanning_directed_tree(reversal(sum));
    out << "graph-sum reversal spanning directed tree: " << (report.has_tree ? "yes" : "no")
        << "\n";
    if (report.has_tree) {
        out << "roots:";
        for (std::size_t r : report.roots) out << ' ' << r;
        out << "\n";
    }
    return report.has_tree ? kExitSatisfied : kExitUnsatisfied;
}

int cmd_bounds(const GlobalOpts& opts, const std::vector<std::string>& paths, std::ostream& out) {
    const std::vector<LaplacianMatrix> gs = load_laplacians(paths);
    json j;
    j["lower_bound"] = io::round12(xi_lower_bound(gs));
    j["upper_bound"] = io::round12(xi_upper_bound(gs));
    json per = json::array();
    for (const LaplacianMatrix& g : gs) per.push_back(io::round12(mu2(g.matrix())));
    j["mu2"] = per;
    write_out(opts, "bounds.json", j.dump(2) + "\n");
    out << "xi lower bound = " << format12(j["lower_bound"].get<double>()) << "\n";
    out << "xi upper bound = " << format12(j["upper_bound"].get<double>()) << "\n";
    for (std::size_t k = 0; k < gs.size(); ++k)
        out << "mu2(G" << k + 1 << ") = " << format12(per[k].get<double>()) << "\n";
    return kExitSatisfied;
}

struct XiMaxCmd {
    std::vector<std::string> graphs;
    double epsilon = 1e-3;
    double lb = 0.0, ub = 0.0;
    bool has_lb = false, has_ub = false;
    bool individual = false;
};

int cmd_xi_max(const GlobalOpts& opts, const XiMaxCmd& cmd, std::ostream& out) {
    const std::vector<LaplacianMatrix> gs = load_laplacians(cmd.graphs);
    XiMaxOptions xopts;
    xopts.epsilon = cmd.epsilon;
    xopts.feas_tol = opts.tol;
    if (cmd.has_lb) xopts.lb = cmd.lb;
    if (cmd.has_ub) xopts.ub = cmd.ub;

    const XiMaxResult joint = xi_max(gs, xopts);
    json j = io::ximax_to_json(joint);

    out << "xi_M = " << format12(joint.value) << "  (bracket [" << format12(joint.lb) << ", "
        << format12(joint.ub) << "], epsilon " << format12(joint.epsilon) << ")\n";
    out << "bounds: lower " << format12(joint.lower_bound) << ", upper "
        << format12(joint.upper_bound) << "\n";
    if (joint.solver_nonconvergence)
        out << "warning: solver hit its iteration cap on at least one bisection step\n";

    if (cmd.individual) {
        std::vector<XiMaxResult> each(gs.size());
        XiMaxOptions iopts;
        iopts.epsilon = cmd.epsilon;
        iopts.feas_tol = opts.tol;
        parallel_for(gs.size(), [&](std::size_t i) { each[i] = xi_max({gs[i]}, iopts); });
        double best = each.front().value;
        json individual = json::array();
        for (std::size_t i = 0; i < each.size(); ++i) {
            individual.push_back(io::ximax_to_json(each[i]));
            best = std::min(best, each[i].value);
            out << "xi_M(G" << i + 1 << ") = " << format12(each[i].value) << "\n";
        }
        out << "min individual xi_M = " << format12(best) << "\n";
        j["individual"] = std::move(individual);
        j["min_individual"] = io::round12(best);
    }

    write_out(opts, "ximax.json", j.dump(2) + "\n");
    return kExitSatisfied;
}

struct CheckCmd {
    std::string criterion;
    std::string system_path;
    std::string cert_path;
    double xi = 0.0;
    bool has_xi = false;
};

RealMatrix certificate_for(const CheckCmd& cmd, const std::vector<LaplacianMatrix>& gs, double xi,
                           double tol) {
    if (!cmd.cert_path.empty()) {
        const json j = io::load_json_file(cmd.cert_path);
        return io::matrix_from_json(j.contains("U") ? j["U"] : j, "certificate U");
    }
    const SdpResult sdp = sdp_feasible(SdpProblem::make(gs, xi), tol);
    if (sdp.status != SdpStatus::Feasible)
        throw HypothesisError("no feasible certificate at xi = " + format12(xi) + ": " +
                              sdp.message);
    return sdp.certificate->u;
}

int cmd_check(const GlobalOpts& opts, const CheckCmd& cmd, std::ostream& out) {
    const json sys_json = io::load_json_file(cmd.system_path);
    io::SystemSpec spec =
        io::system_from_json(sys_json, fs::path(cmd.system_path).parent_path());
    const MultiNetworkSystem& sys = spec.system;

    std::optional<double> xi = spec.xi;
    if (cmd.has_xi) xi = cmd.xi;
    const auto need_xi = [&]() -> double {
        if (!xi) throw ValidationError("criterion needs xi (--xi or system \"xi\")");
        return *xi;
    };

    SyncVerdict verdict;
    if (cmd.criterion == "theorem3") {
        MultiNetworkSystem with_p = sys;
        if (!with_p.p) {
            const double x = need_xi();
            RealMatrix p(sys.state_dim(), sys.state_dim());
            for (const RealMatrix& d : sys.d_list) p += d;
            p *= x;
            with_p.p = std::move(p);
        }
        const RealMatrix u = certificate_for(cmd, sys.g_list, xi.value_or(0.0), opts.tol);
        verdict = check_eq2(with_p, u, opts.tol);
        verdict.criterion = "theorem3";
    } else if (cmd.criterion == "theorem4") {
        const double x = need_xi();
        const RealMatrix u = certificate_for(cmd, sys.g_list, x, opts.tol);
        verdict = check_theorem4(sys.g_list, sys.d_list, sys.v, x, u, opts.tol);
    } else if (cmd.criterion == "theorem5") {
        verdict = check_theorem5(sys.g_list, need_xi());
    } else if (cmd.criterion == "corollary4") {
        std::vector<RealMatrix> members;
        for (const LaplacianMatrix& g : sys.g_list) members.push_back(g.matrix());
        const double threshold =
            threshold_spanning_tree(make_family(members), sys.d_list, sys.lipschitz_c);
        const double x = need_xi();
        verdict.criterion = "corollary4";
        verdict.margin = x - threshold;
        verdict.satisfied = x >= threshold;
        verdict.details = "coupling threshold xi* = " + format12(threshold);
    } else if (cmd.criterion == "eq4") {
        std::vector<RealMatrix> members;
        for (const LaplacianMatrix& g : sys.g_list) members.push_back(g.matrix());
        verdict = discrete_criterion(make_family(members), sys.d_list, sys.v, sys.lipschitz_c);
    } else if (cmd.criterion == "linear") {
        if (spec.dynamics.kind() != "affine")
            throw ValidationError("linear criterion needs affine dynamics");
        const json& dyn = sys_json.at("dynamics");
        RealMatrix a = io::matrix_from_json(dyn.at("A"), "dynamics A");
        std::vector<double> b(a.rows(), 0.0);
        if (dyn.contains("b")) b = dyn["b"].get<std::vector<double>>();
        std::vector<RealMatrix> members;
        for (const LaplacianMatrix& g : sys.g_list) members.push_back(g.matrix());
        verdict = is_synchronizing_linear(a, b, make_family(members), sys.d_list);
    } else {
        throw ValidationError("unknown criterion: " + cmd.criterion);
    }

    write_out(opts, "verdict.json", io::verdict_to_json(verdict).dump(2) + "\n");
    out << verdict.criterion << ": " << (verdict.satisfied ? "satisfied" : "not satisfied")
        << " (margin " << format12(verdict.margin) << ")\n"
        << verdict.details << "\n";
    return verdict.satisfied ? kExitSatisfied : kExitUnsatisfied;
}

struct SimulateCmd {
    std::string mode;
    std::string system_path;
    double dt = 1e-3;
    double horizon = 10.0;
    std::size_t steps = 1000;
    std::size_t record_every = 1;
    double threshold = 1e-6;
    double perturbation = 0.1;
    std::vector<double> base;
};

int cmd_simulate(const GlobalOpts& opts, const SimulateCmd& cmd, std::ostream& out) {
    const json sys_json = io::load_json_file(cmd.system_path);
    const io::SystemSpec spec =
        io::system_from_json(sys_json, fs::path(cmd.system_path).parent_path());

    std::vector<double> base = cmd.base;
    if (base.empty()) {
        base.assign(spec.dynamics.dim(), 1.0);
        if (spec.dynamics.kind() == "logistic_map") base.assign(1, 0.4);
    }
    if (base.size() != spec.dynamics.dim())
        throw ValidationError("--base length must match the state dimension");

    const std::vector<double> x0 = perturbed_initial_state(spec.system.node_count(), base,
                                                           cmd.perturbation, opts.seed);
    TrajectoryTrace trace;
    if (cmd.mode == "ct")
        trace = simulate_ct(spec.system, spec.dynamics, x0, cmd.dt, cmd.horizon,
                            cmd.record_every);
    else if (cmd.mode == "dt")
        trace = simulate_dt(spec.system, spec.dynamics, x0, cmd.steps, nullptr,
                            cmd.record_every);
    else
        throw ValidationError("simulate mode must be ct or dt");

    const SyncReport report = sync_error(trace, cmd.threshold);
    write_out(opts, "trace.csv", io::trace_to_csv(trace));
    write_out(opts, "report.json", io::report_to_json(report).dump(2) + "\n");
    out << "final sync error = " << format12(report.final_error) << " (threshold "
        << format12(report.threshold) << ")\n";
    out << "fit rate per time = " << format12(report.fit_rate_per_time)
        << ", ratio per step = " << format12(report.fit_ratio_per_step) << "\n";
    return report.synchronized ? kExitSatisfied : kExitUnsatisfied;
}

struct RegionCmd {
    std::string a_path;
    std::vector<std::string> d_paths;
    GridSpec grid;
    std::vector<std::string> slices;
};

int cmd_region(const GlobalOpts& opts, const RegionCmd& cmd, std::ostream& out) {
    const RealMatrix a = io::matrix_from_json(io::load_json_file(cmd.a_path), "region A");
    std::vector<RealMatrix> ds;
    for (const std::string& p : cmd.d_paths)
        ds.push_back(io::matrix_from_json(io::load_json_file(p), "region D"));

    GridSpec grid = cmd.grid;
    for (const std::string& s : cmd.slices) {
        double re = 0.0, im = 0.0;
        if (std::sscanf(s.c_str(), "%lf,%lf", &re, &im) < 1)
            throw ValidationError("bad --slice value: " + s);
        grid.second_layer_slices.emplace_back(re, im);
    }

    const StabilityRegion region = stability_region(a, ds, grid);
    write_out(opts, "region.csv", io::region_to_csv(region, ds.size() == 2));
    out << "sampled " << region.samples.size() << " grid points\n";
    return kExitSatisfied;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"analysis and simulation of systems coupled through multiple directed networks"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--out", opts.out_dir, "output directory for result files");
    app.add_option("--seed", opts.seed, "seed for randomized initial conditions");
    app.add_option("--tol", opts.tol, "feasibility/verification tolerance");

    auto* sp = app.add_subcommand("spanning-tree",
                                  "check the graph-sum reversal for a spanning directed tree");
    std::vector<std::string> sp_graphs;
    sp->add_option("graphs", sp_graphs, "graph JSON files")->required();

    auto* bd = app.add_subcommand("bounds", "analytic bounds for xi_M");
    std::vector<std::string> bd_graphs;
    bd->add_option("graphs", bd_graphs, "graph JSON files")->required();

    auto* xm = app.add_subcommand("xi-max", "bisection for the coupling threshold xi_M");
    XiMaxCmd xm_cmd;
    xm->add_option("graphs", xm_cmd.graphs, "graph JSON files")->required();
    xm->add_option("--eps", xm_cmd.epsilon, "bisection tolerance");
    auto* xm_lb = xm->add_option("--lb", xm_cmd.lb, "initial lower bound");
    auto* xm_ub = xm->add_option("--ub", xm_cmd.ub, "initial upper bound");
    xm->add_flag("--individual", xm_cmd.individual, "also compute per-graph xi_M");

    auto* ck = app.add_subcommand("check", "evaluate a synchronization criterion");
    CheckCmd ck_cmd;
    ck->add_option("criterion", ck_cmd.criterion,
                   "one of theorem3|theorem4|theorem5|corollary4|eq4|linear")
        ->required();
    ck->add_option("--system", ck_cmd.system_path, "system JSON file")->required();
    auto* ck_xi = ck->add_option("--xi", ck_cmd.xi, "coupling threshold");
    ck->add_option("--cert", ck_cmd.cert_path, "certificate U JSON file");

    auto* sm = app.add_subcommand("simulate", "integrate the coupled network");
    SimulateCmd sm_cmd;
    sm->add_option("mode", sm_cmd.mode, "ct or dt")->required();
    sm->add_option("--system", sm_cmd.system_path, "system JSON file")->required();
    sm->add_option("--dt", sm_cmd.dt, "integration step");
    sm->add_option("--horizon", sm_cmd.horizon, "continuous-time horizon");
    sm->add_option("--steps", sm_cmd.steps, "discrete-time step count");
    sm->add_option("--record-every", sm_cmd.record_every, "sample stride");
    sm->add_option("--threshold", sm_cmd.threshold, "synchronization threshold");
    sm->add_option("--perturbation", sm_cmd.perturbation, "initial perturbation magnitude");
    sm->add_option("--base", sm_cmd.base, "common base state (comma separated)")->delimiter(',');

    auto* rg = app.add_subcommand("region", "sample the linear stability map phi on a grid");
    RegionCmd rg_cmd;
    rg->add_option("--A", rg_cmd.a_path, "system matrix JSON file")->required();
    rg->add_option("--D", rg_cmd.d_paths, "inner coupling JSON files")->required();
    rg->add_option("--re0", rg_cmd.grid.re0, "grid lower real bound");
    rg->add_option("--re1", rg_cmd.grid.re1, "grid upper real bound");
    rg->add_option("--im0", rg_cmd.grid.im0, "grid lower imaginary bound");
    rg->add_option("--im1", rg_cmd.grid.im1, "grid upper imaginary bound");
    rg->add_option("--nre", rg_cmd.grid.nre, "grid points along the real axis");
    rg->add_option("--nim", rg_cmd.grid.nim, "grid points along the imaginary axis");
    rg->add_option("--slice", rg_cmd.slices, "second-layer eigenvalue slice re[,im]");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitSatisfied;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    xm_cmd.has_lb = xm_lb->count() > 0;
    xm_cmd.has_ub = xm_ub->count() > 0;
    ck_cmd.has_xi = ck_xi->count() > 0;

    try {
        if (sp->parsed()) return cmd_spanning_tree(sp_graphs, out);
        if (bd->parsed()) return cmd_bounds(opts, bd_graphs, out);
        if (xm->parsed()) return cmd_xi_max(opts, xm_cmd, out);
        if (ck->parsed()) return cmd_check(opts, ck_cmd, out);
        if (sm->parsed()) return cmd_simulate(opts, sm_cmd, out);
        if (rg->parsed()) return cmd_region(opts, rg_cmd, out);
        err << "error: no subcommand\n";
        return kExitInputError;
    } catch (const HypothesisError& e) {
        err << "hypothesis violation: " << e.what() << "\n";
        return kExitHypothesis;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace multisync::cli
