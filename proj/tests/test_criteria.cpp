#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "multisync/criteria.hpp"
#include "multisync/eigen.hpp"
#include "multisync/ximax.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace multisync;

namespace {

LaplacianMatrix complete_graph(std::size_t n) {
    RealMatrix l(n, n, -1.0);
    for (std::size_t i = 0; i < n; ++i) l(i, i) = static_cast<double>(n) - 1.0;
    return LaplacianMatrix(std::move(l));
}

LaplacianMatrix directed_ring(std::size_t n, double w = 1.0) {
    WeightedDigraph g = WeightedDigraph::empty(n);
    for (std::size_t v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n, w);
    return laplacian(g);
}

RealMatrix unit_entry(std::size_t m, std::size_t k) {
    RealMatrix e(m, m);
    e(k, k) = 1.0;
    return e;
}

std::vector<LaplacianMatrix> paper_layers() {
    const auto gs = paper_example();
    return {gs.begin(), gs.end()};
}

}  // namespace

TEST_CASE("check_eq2 basic cases") {
    const LaplacianMatrix k3 = complete_graph(3);
    MultiNetworkSystem sys = MultiNetworkSystem::make({k3}, {RealMatrix::identity(2)});
    const SyncVerdict good = check_eq2(sys, k3.matrix());
    CHECK(good.satisfied);

    // strong positive feedback overwhelms weak coupling
    RealMatrix weak = k3.matrix();
    weak *= 0.01;
    RealMatrix p = RealMatrix::identity(2);
    p *= 10.0;
    MultiNetworkSystem hostile = MultiNetworkSystem::make(
        {LaplacianMatrix(std::move(weak))}, {RealMatrix::identity(2)}, 1.0, std::nullopt, p);
    const SyncVerdict bad = check_eq2(hostile, k3.matrix());
    CHECK_FALSE(bad.satisfied);
    CHECK(bad.margin < -1.0);

    CHECK_THROWS_AS((void)check_eq2(sys, RealMatrix::identity(3)), HypothesisError);
}

TEST_CASE("check_eq2 flips around the feasibility threshold on the example layers") {
    const auto gs = paper_layers();
    std::vector<RealMatrix> ds{unit_entry(3, 0), unit_entry(3, 1), unit_entry(3, 2)};

    const double xi = 0.8;  // below the threshold near 0.838
    const SdpResult sdp = sdp_feasible(SdpProblem::make(gs, xi));
    REQUIRE(sdp.status == SdpStatus::Feasible);

    RealMatrix p(3, 3);
    for (const RealMatrix& d : ds) p += d;
    p *= xi;
    const MultiNetworkSystem sys =
        MultiNetworkSystem::make(gs, ds, 1.0, std::nullopt, p);
    CHECK(check_eq2(sys, sdp.certificate->u).satisfied);

    // above the threshold no certificate exists at all
    CHECK(sdp_feasible(SdpProblem::make(gs, 0.9)).status == SdpStatus::Infeasible);
}

TEST_CASE("threshold_spanning_tree") {
    // single 3-cycle: nonzero eigenvalues 1.5 +- 0.866i, D = I
    const CommutingFamily ring = make_family({directed_ring(3).matrix()});
    const double xi_star = threshold_spanning_tree(ring, {RealMatrix::identity(2)}, 1.0);
    CHECK(xi_star == doctest::Approx(1.0 / 1.5).epsilon(1e-9));

    // identical D matrices: the hull is a single point
    const RealMatrix d = RealMatrix::diag({0.5, 2.0});
    const double xi_same = threshold_spanning_tree(ring, {d, d}, 2.0);
    CHECK(xi_same == doctest::Approx(2.0 / (1.5 * 0.5)).epsilon(1e-9));

    // E1/E2 couplings: hull vertices are singular
    try {
        (void)threshold_spanning_tree(ring, {unit_entry(2, 0), unit_entry(2, 1)}, 1.0);
        FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
        CHECK(std::string(e.what()).find("singular convex combination") != std::string::npos);
    }

    // non-normal layer rejected
    const auto gs = paper_layers();
    CHECK_THROWS_AS(
        (void)threshold_spanning_tree(make_family({gs[2].matrix()}), {RealMatrix::identity(2)}, 1.0),
        HypothesisError);
}

TEST_CASE("check_theorem4") {
    const auto gs = paper_layers();
    std::vector<RealMatrix> ds{unit_entry(3, 0), unit_entry(3, 1), unit_entry(3, 2)};
    const RealMatrix v = RealMatrix::identity(3);

    const SdpResult sdp = sdp_feasible(SdpProblem::make(gs, 0.8));
    REQUIRE(sdp.status == SdpStatus::Feasible);
    const SyncVerdict ok = check_theorem4(gs, ds, v, 0.8, sdp.certificate->u);
    CHECK(ok.satisfied);

    CHECK(sdp_feasible(SdpProblem::make(gs, 0.9)).status == SdpStatus::Infeasible);

    // boundary: U = L_K, single complete layer, xi = n
    const LaplacianMatrix k4 = complete_graph(4);
    const SyncVerdict boundary =
        check_theorem4({k4}, {RealMatrix::identity(2)}, RealMatrix::identity(2), 4.0, k4.matrix());
    CHECK(boundary.margin == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(boundary.satisfied);

    // V D not psd is a hypothesis failure, not a verdict
    RealMatrix negative = RealMatrix::identity(2);
    negative *= -1.0;
    CHECK_THROWS_AS(
        (void)check_theorem4({k4}, {negative}, RealMatrix::identity(2), 1.0, k4.matrix()),
        HypothesisError);
}

TEST_CASE("check_theorem5") {
    const std::vector<LaplacianMatrix> ring{directed_ring(4)};
    const SyncVerdict ok = check_theorem5(ring, 0.5);
    CHECK(ok.satisfied);
    CHECK(ok.margin == doctest::Approx(0.5).epsilon(1e-9));  // lambda_2(sym) = 1

    const SyncVerdict no = check_theorem5(ring, 1.2);
    CHECK_FALSE(no.satisfied);
    CHECK(no.margin == doctest::Approx(-0.2).epsilon(1e-9));

    WeightedDigraph unbalanced = WeightedDigraph::empty(3);
    unbalanced.add_edge(0, 1);
    unbalanced.add_edge(1, 2);
    unbalanced.add_edge(2, 1);
    unbalanced.add_edge(1, 0);
    // rows sum to zero but columns do not for the asymmetric variant below
    WeightedDigraph oneway = WeightedDigraph::empty(2);
    oneway.add_edge(0, 1);
    CHECK_THROWS_AS((void)check_theorem5({laplacian(oneway)}, 0.1), HypothesisError);
}

TEST_CASE("discrete_criterion scalar reduction") {
    // two-node bidirectional graph: eigenvalues {0, 2}; D = d, V = I, c = 1
    const RealMatrix l2 = RealMatrix::from_rows({{1, -1}, {-1, 1}});
    const CommutingFamily family = make_family({l2});
    const RealMatrix v = RealMatrix::identity(1);

    RealMatrix half(1, 1);
    half(0, 0) = 0.5;
    const SyncVerdict mid = discrete_criterion(family, {half}, v, 1.0);
    CHECK(mid.satisfied);
    CHECK(mid.margin == doctest::Approx(1.0).epsilon(1e-9));  // |1 - 2*0.5| = 0

    RealMatrix big(1, 1);
    big(0, 0) = 1.5;
    const SyncVerdict out = discrete_criterion(family, {big}, v, 1.0);
    CHECK_FALSE(out.satisfied);
    CHECK(out.margin == doctest::Approx(-1.0).epsilon(1e-9));  // |1 - 3| = 2
}

TEST_CASE("discrete_criterion diagonal couplings match the scalar formula") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> mu(0.05, 0.6);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 3 + trial % 4;
        const std::size_t m = 1 + trial % 3;
        std::vector<double> off1(n - 1, 0.0), off2(n - 1, 0.0);
        off1[0] = 1.0;
        off2[(n > 2) ? 1 : 0] = 0.8;
        const RealMatrix g1 = oracles::circulant_laplacian(off1);
        const RealMatrix g2 = oracles::circulant_laplacian(off2);
        const CommutingFamily family = make_family({g1, g2}, 500 + trial);

        const double mu1 = mu(rng);
        const double mu2v = mu(rng);
        RealMatrix d1 = RealMatrix::identity(m);
        d1 *= mu1;
        RealMatrix d2 = RealMatrix::identity(m);
        d2 *= mu2v;
        const double c = 1.21;

        const SyncVerdict full = discrete_criterion(family, {d1, d2}, RealMatrix::identity(m), c);

        // scalar path: max_j |1 - mu1 lambda_1j - mu2 lambda_2j| over j != j0
        const JointZeroIndex j0 = joint_zero_index(family);
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == j0.index) continue;
            const Complex val = Complex(1.0, 0.0) - mu1 * family.joint_table[0][j] -
                                mu2v * family.joint_table[1][j];
            worst = std::max(worst, std::abs(val));
        }
        CHECK(full.margin == doctest::Approx(1.0 / std::sqrt(c) - worst).epsilon(1e-10));
    }
}

TEST_CASE("stability_region closed forms") {
    RealMatrix minus_i = RealMatrix::identity(1);
    minus_i *= -1.0;
    GridSpec grid;
    grid.re0 = -2.0;
    grid.re1 = 2.0;
    grid.im0 = -1.0;
    grid.im1 = 1.0;
    grid.nre = 9;
    grid.nim = 5;

    const StabilityRegion shifted =
        stability_region(minus_i, {RealMatrix::identity(1)}, grid);
    for (const auto& s : shifted.samples)
        CHECK(s.phi == doctest::Approx(s.lambda1.real() - 1.0).epsilon(1e-12));

    const StabilityRegion axis =
        stability_region(RealMatrix(1, 1, 0.0), {RealMatrix::identity(1)}, grid);
    for (const auto& s : axis.samples) {
        if (s.lambda1.real() > 0.0) CHECK(s.phi > 0.0);
        if (s.lambda1.real() < 0.0) CHECK(s.phi < 0.0);
    }

    const RealMatrix saddle = RealMatrix::diag({1.0, -1.0});
    const StabilityRegion sr = stability_region(saddle, {RealMatrix::identity(2)}, grid);
    for (const auto& s : sr.samples)
        CHECK(s.phi == doctest::Approx(1.0 + s.lambda1.real()).epsilon(1e-9));
}

TEST_CASE("stability_region phi at the origin is the spectral abscissa") {
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t m = 2 + trial % 3;
        RealMatrix a(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) a(i, j) = entry(rng);
        const double phi0 = phi_point(a, {RealMatrix::identity(m)}, {Complex(0.0, 0.0)});
        double abscissa = -1e300;
        for (const Complex& v : eig(a).values) abscissa = std::max(abscissa, v.real());
        CHECK(phi0 == doctest::Approx(abscissa).epsilon(1e-9));
    }
}

TEST_CASE("is_synchronizing_linear scalar case") {
    const RealMatrix l2 = RealMatrix::from_rows({{1, -1}, {-1, 1}});
    const CommutingFamily family = make_family({l2});
    const RealMatrix unstable = RealMatrix::from_rows({{1.0}});

    RealMatrix strong(1, 1);
    strong(0, 0) = 0.6;  // 1 - 2 * 0.6 < 0
    CHECK(is_synchronizing_linear(unstable, {}, family, {strong}).satisfied);

    RealMatrix weak(1, 1);
    weak(0, 0) = 0.4;  // 1 - 2 * 0.4 > 0
    CHECK_FALSE(is_synchronizing_linear(unstable, {}, family, {weak}).satisfied);
}

TEST_CASE("is_synchronizing_linear agrees with brute force") {
    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    std::uniform_real_distribution<double> gain(0.05, 0.9);
    int flips = 0;
    for (int trial = 0; trial < 24; ++trial) {
        const std::size_t n = 3 + trial % 4;
        const std::size_t m = 1 + trial % 3;
        std::vector<double> off1(n - 1, 0.0), off2(n - 1, 0.0);
        off1[0] = 1.0;
        off2[rng() % (n - 1)] += 0.7;
        const RealMatrix g1 = oracles::circulant_laplacian(off1);
        const RealMatrix g2 = oracles::circulant_laplacian(off2);
        const CommutingFamily family = make_family({g1, g2}, 900 + trial);

        RealMatrix a(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) a(i, j) = entry(rng);
        RealMatrix d1 = RealMatrix::identity(m);
        d1 *= gain(rng);
        RealMatrix d2 = RealMatrix::identity(m);
        d2 *= gain(rng);

        const SyncVerdict verdict = is_synchronizing_linear(a, {}, family, {d1, d2});

        RealMatrix closed = kron(RealMatrix::identity(n), a);
        closed -= kron(g1, d1);
        closed -= kron(g2, d2);
        // drop the m consensus eigenvalues (those of A itself)
        std::vector<Complex> all = eig(closed).values;
        for (const Complex& av : eig(a).values) {
            std::size_t best = 0;
            double dist = 1e300;
            for (std::size_t i = 0; i < all.size(); ++i)
                if (std::abs(all[i] - av) < dist) {
                    dist = std::abs(all[i] - av);
                    best = i;
                }
            all.erase(all.begin() + static_cast<std::ptrdiff_t>(best));
        }
        double max_re = -1e300;
        for (const Complex& v : all) max_re = std::max(max_re, v.real());

        CHECK(verdict.margin == doctest::Approx(-max_re).epsilon(1e-6));
        if (std::abs(max_re) > 1e-7) CHECK(verdict.satisfied == (max_re < 0.0));
        if (verdict.satisfied) ++flips;
    }
    CHECK(flips > 0);
    CHECK(flips < 24);
}

TEST_CASE("affine_contraction") {
    const RealMatrix a = RealMatrix::from_rows({{0.3, 1.0}, {-1.0, 0.1}});
    RealMatrix p = RealMatrix::identity(2);
    p *= 0.8;
    CHECK(affine_contraction(a, p) == doctest::Approx(0.8 - 0.3).epsilon(1e-9));
}
