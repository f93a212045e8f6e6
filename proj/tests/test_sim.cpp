#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "multisync/criteria.hpp"
#include "multisync/sim.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace multisync;

namespace {

LaplacianMatrix undirected_cycle(std::size_t n, double w = 1.0) {
    WeightedDigraph g = WeightedDigraph::empty(n);
    for (std::size_t v = 0; v < n; ++v) {
        g.add_edge(v, (v + 1) % n, w);
        g.add_edge((v + 1) % n, v, w);
    }
    return laplacian(g);
}

MultiNetworkSystem zero_coupling(std::size_t n, std::size_t m) {
    return MultiNetworkSystem::make({LaplacianMatrix(RealMatrix(n, n, 0.0))},
                                    {RealMatrix(m, m, 0.0)});
}

}  // namespace

TEST_CASE("consensus manifold is invariant") {
    const std::vector<double> base{0.7, -0.3, 1.1};
    const MultiNetworkSystem sys =
        MultiNetworkSystem::make({undirected_cycle(4)}, {RealMatrix::identity(3)});
    const std::vector<double> x0 = perturbed_initial_state(4, base, 0.0, 1);

    const TrajectoryTrace ct =
        simulate_ct(sys, NodeDynamics::lorenz(), x0, 1e-3, 2.0, 10);
    const SyncReport ct_report = sync_error(ct);
    double worst_norm = 0.0;
    for (const auto& s : ct.states)
        for (double v : s) worst_norm = std::max(worst_norm, std::abs(v));
    for (double e : ct_report.error_series) CHECK(e <= 1e-10 * (1.0 + worst_norm));

    const MultiNetworkSystem dt_sys =
        MultiNetworkSystem::make({undirected_cycle(4, 0.2)}, {RealMatrix::identity(1)});
    const std::vector<double> same(4, 0.4);
    const TrajectoryTrace dt = simulate_dt(dt_sys, NodeDynamics::logistic_map(), same, 200);
    for (double e : sync_error(dt).error_series) CHECK(e <= 1e-10);
}

TEST_CASE("zero coupling keeps identical nodes identical") {
    const std::vector<double> x0 = perturbed_initial_state(3, {1.0, 1.0, 1.0}, 0.0, 2);
    const TrajectoryTrace trace =
        simulate_ct(zero_coupling(3, 3), NodeDynamics::lorenz(), x0, 1e-3, 1.0, 5);
    CHECK(sync_error(trace).final_error <= 1e-12);

    const TrajectoryTrace dt = simulate_dt(zero_coupling(3, 1), NodeDynamics::logistic_map(),
                                           std::vector<double>(3, 0.3), 100);
    CHECK(sync_error(dt).final_error == 0.0);
}

TEST_CASE("linear consensus decays at the spectral rate") {
    // f = 0, single undirected cycle with weight w: slowest transverse mode
    // decays like exp(-w lambda_2 t), lambda_2(cycle_4) = 2.
    const double w = 0.7;
    const MultiNetworkSystem sys =
        MultiNetworkSystem::make({undirected_cycle(4, w)}, {RealMatrix::identity(1)});
    const NodeDynamics still = NodeDynamics::affine(RealMatrix(1, 1, 0.0), {0.0});
    const std::vector<double> x0 = perturbed_initial_state(4, {0.0}, 0.1, 3);
    const TrajectoryTrace trace = simulate_ct(sys, still, x0, 1e-3, 8.0, 20);
    const SyncReport report = sync_error(trace);
    CHECK(report.fit_rate_per_time == doctest::Approx(-w * 2.0).epsilon(0.1));
}

TEST_CASE("RK4 order via step halving") {
    const RealMatrix a = RealMatrix::from_rows({{0.0, 1.0}, {-4.0, -0.1}});
    const NodeDynamics f = NodeDynamics::affine(a, {0.3, 0.0});
    const MultiNetworkSystem sys =
        MultiNetworkSystem::make({undirected_cycle(3, 0.5)}, {RealMatrix::identity(2)});
    const std::vector<double> x0 = perturbed_initial_state(3, {1.0, 0.0}, 0.1, 4);

    const auto final_state = [&](double dt) {
        return simulate_ct(sys, f, x0, dt, 2.0, 1 << 20).states.back();
    };
    const std::vector<double> ref = final_state(2.5e-4);
    const auto err = [&](double dt) {
        const std::vector<double> x = final_state(dt);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - ref[i]) * (x[i] - ref[i]);
        return std::sqrt(s);
    };
    const double coarse = err(8e-3);
    const double fine = err(4e-3);
    CHECK(coarse / fine >= 12.0);
}

TEST_CASE("certified discrete instance synchronizes geometrically") {
    // near-complete circulant layer pair with equal scalar gains
    const std::vector<double> off1{1.0, 0.9, 1.1};
    const std::vector<double> off2{0.8, 1.2, 1.0};
    const RealMatrix g1 = oracles::circulant_laplacian(off1);
    const RealMatrix g2 = oracles::circulant_laplacian(off2);
    const CommutingFamily family = make_family({g1, g2});

    const NodeDynamics logistic = NodeDynamics::logistic_map(3.9);
    const double c = *logistic.documented_c();

    // pick the scalar gain by scanning the simplified criterion
    double best_t = 0.0;
    double best_margin = -1e300;
    const JointZeroIndex j0 = joint_zero_index(family);
    for (int i = 1; i <= 400; ++i) {
        const double t = 1e-3 * i;
        double worst = 0.0;
        for (std::size_t j = 0; j < family.order(); ++j) {
            if (j == j0.index) continue;
            worst = std::max(worst, std::abs(Complex(1.0, 0.0) -
                                             t * (family.joint_table[0][j] +
                                                  family.joint_table[1][j])));
        }
        const double margin = 1.0 / std::sqrt(c) - worst;
        if (margin > best_margin) {
            best_margin = margin;
            best_t = t;
        }
    }
    REQUIRE(best_margin > 0.05);

    RealMatrix d(1, 1);
    d(0, 0) = best_t;
    const SyncVerdict verdict =
        discrete_criterion(family, {d, d}, RealMatrix::identity(1), c);
    CHECK(verdict.margin == doctest::Approx(best_margin).epsilon(1e-9));
    CHECK(verdict.satisfied);

    const MultiNetworkSystem sys = MultiNetworkSystem::make(
        {LaplacianMatrix(g1), LaplacianMatrix(g2)}, {d, d}, c);
    const std::vector<double> x0 = perturbed_initial_state(4, {0.4}, 0.1, 5);
    const TrajectoryTrace trace = simulate_dt(sys, logistic, x0, 400);
    const SyncReport report = sync_error(trace);
    CHECK(report.final_error < 1e-6);
    CHECK(report.fit_ratio_per_step < 1.0);
    // contraction at least as fast as the norm bound sqrt(c) * max-norm
    const double bound = std::sqrt(c) * (1.0 / std::sqrt(c) - best_margin);
    CHECK(report.fit_ratio_per_step <= bound + 0.1);
}

TEST_CASE("uncoupled chaotic maps do not synchronize") {
    const MultiNetworkSystem sys = zero_coupling(4, 1);
    const std::vector<double> x0 = perturbed_initial_state(4, {0.4}, 0.1, 6);
    const TrajectoryTrace trace = simulate_dt(sys, NodeDynamics::logistic_map(3.9), x0, 2000);
    const SyncReport report = sync_error(trace);
    CHECK(report.final_error > 1e-6);
    CHECK_FALSE(report.synchronized);
}

TEST_CASE("input sequences: vanishing differences still synchronize") {
    const std::vector<double> off{1.0, 0.9, 1.1};
    const RealMatrix g = oracles::circulant_laplacian(off);
    RealMatrix d(1, 1);
    d(0, 0) = 0.3;
    const MultiNetworkSystem sys =
        MultiNetworkSystem::make({LaplacianMatrix(g)}, {d}, 3.9 * 3.9);
    const NodeDynamics logistic = NodeDynamics::logistic_map(3.9);
    const std::vector<double> x0 = perturbed_initial_state(4, {0.4}, 0.05, 7);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> amp(-0.05, 0.05);
    std::vector<double> node_amp(4);
    for (double& a : node_amp) a = amp(rng);

    const InputSignal decaying = [&](std::size_t p, std::span<double> u) {
        const double scale = std::pow(0.9, static_cast<double>(p));
        for (std::size_t i = 0; i < 4; ++i) u[i] = node_amp[i] * scale;
    };
    const TrajectoryTrace good = simulate_dt(sys, logistic, x0, 3000, decaying);
    CHECK(sync_error(good).final_error < 1e-6);

    const InputSignal constant = [&](std::size_t, std::span<double> u) {
        for (std::size_t i = 0; i < 4; ++i) u[i] = node_amp[i];
    };
    const TrajectoryTrace plateau = simulate_dt(sys, logistic, x0, 3000, constant);
    const SyncReport report = sync_error(plateau);
    CHECK(report.final_error > 1e-3);
    // the error levels off instead of decaying
    const std::size_t last = report.error_series.size() - 1;
    CHECK(report.error_series[last] > 0.2 * report.error_series[3 * last / 4]);
}

TEST_CASE("divergence is reported with the failing time") {
    const RealMatrix blow = RealMatrix::from_rows({{40.0}});
    const NodeDynamics f = NodeDynamics::affine(blow, {0.0});
    const MultiNetworkSystem sys = zero_coupling(2, 1);
    CHECK_THROWS_AS(
        (void)simulate_ct(sys, f, std::vector<double>{1.0, 2.0}, 1e-2, 10.0, 100),
        NumericalError);
}

TEST_CASE("sync_error on constant separation") {
    TrajectoryTrace trace;
    trace.nodes = 2;
    trace.state_dim = 1;
    for (int i = 0; i < 10; ++i) {
        trace.times.push_back(i);
        trace.states.push_back({1.0, 3.0});
    }
    const SyncReport report = sync_error(trace);
    for (double e : report.error_series) CHECK(e == doctest::Approx(2.0));
    CHECK(report.final_error == doctest::Approx(2.0));
}
