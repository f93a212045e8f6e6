#include "multisync/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace multisync {

namespace {

constexpr double kDivergenceGuard = 1e9;

void check_dims(const MultiNetworkSystem& sys, const NodeDynamics& f,
                const std::vector<double>& x0, const char* op) {
    if (f.dim() != sys.state_dim())
        throw ValidationError(std::string(op) + ": dynamics dimension does not match the system");
    if (x0.size() != sys.node_count() * sys.state_dim())
        throw ValidationError(std::string(op) + ": initial state must have n*m entries");
}

// Coupling term rows: sum_k (G_k X) D_k^T where row i of X is node i's state.
void apply_coupling(const MultiNetworkSystem& sys, const std::vector<double>& x,
                    std::vector<double>& out) {
    const std::size_t n = sys.node_count();
    const std::size_t m = sys.state_dim();
    std::vector<double> gx(m);
    for (std::size_t k = 0; k < sys.layer_count(); ++k) {
        const RealMatrix& g = sys.g_list[k].matrix();
        const RealMatrix& d = sys.d_list[k];
        for (std::size_t i = 0; i < n; ++i) {
            gx.assign(m, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double gij = g(i, j);
                if (gij == 0.0) continue;
                for (std::size_t c = 0; c < m; ++c) gx[c] += gij * x[j * m + c];
            }
            for (std::size_t rr = 0; rr < m; ++rr) {
                double s = 0.0;
                for (std::size_t c = 0; c < m; ++c) s += d(rr, c) * gx[c];
                out[i * m + rr] += s;
            }
        }
    }
}

void guard_finite(const std::vector<double>& x, double t, const char* op) {
    for (double v : x)
        if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard) {
            std::ostringstream msg;
            msg << op << ": state diverged at t = " << t;
            throw NumericalError(msg.str());
        }
}

}  // namespace

NodeDynamics NodeDynamics::affine(RealMatrix a, std::vector<double> b) {
    if (!a.square() || a.rows() != b.size())
        throw ValidationError("NodeDynamics::affine: A must be square and match b");
    ensure_finite(a, "NodeDynamics::affine");
    const std::size_t m = a.rows();
    auto fn = [a = std::move(a), b = std::move(b), m](std::span<const double> x, double,
                                                      std::span<double> out) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < m; ++j) s += a(i, j) * x[j];
            out[i] = s;
        }
    };
    return NodeDynamics(m, "affine", std::move(fn), std::nullopt);
}

NodeDynamics NodeDynamics::lorenz(double sigma, double rho, double beta) {
    auto fn = [sigma, rho, beta](std::span<const double> x, double, std::span<double> out) {
        out[0] = sigma * (x[1] - x[0]);
        out[1] = x[0] * (rho - x[2]) - x[1];
        out[2] = x[0] * x[1] - beta * x[2];
    };
    return NodeDynamics(3, "lorenz", std::move(fn), std::nullopt);
}

NodeDynamics NodeDynamics::logistic_map(double a) {
    auto fn = [a](std::span<const double> x, double, std::span<double> out) {
        out[0] = a * x[0] * (1.0 - x[0]);
    };
    // |f'| <= a on [0,1], so the quadratic-form constant is a^2.
    return NodeDynamics(1, "logistic_map", std::move(fn), a * a);
}

NodeDynamics NodeDynamics::custom(std::size_t dim, std::string name, EvalFn fn,
                                  std::optional<double> c) {
    if (dim == 0 || !fn) throw ValidationError("NodeDynamics::custom: bad dimension or callback");
    return NodeDynamics(dim, std::move(name), std::move(fn), c);
}

TrajectoryTrace simulate_ct(const MultiNetworkSystem& sys, const NodeDynamics& f,
                            const std::vector<double>& x0, double dt, double horizon,
                            std::size_t record_every) {
    check_dims(sys, f, x0, "simulate_ct");
    if (!(dt > 0.0) || !(horizon >= dt))
        throw ValidationError("simulate_ct: need dt > 0 and horizon >= dt");
    if (record_every == 0) record_every = 1;

    const std::size_t n = sys.node_count();
    const std::size_t m = sys.state_dim();
    const std::size_t dim = n * m;
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));

    std::vector<double> x = x0;
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    const auto deriv = [&](const std::vector<double>& state, double t, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i)
            f.eval(std::span<const double>(state.data() + i * m, m), t,
                   std::span<double>(out.data() + i * m, m));
        std::vector<double> coupling(dim, 0.0);
        apply_coupling(sys, state, coupling);
        for (std::size_t i = 0; i < dim; ++i) out[i] -= coupling[i];
    };

    TrajectoryTrace trace;
    trace.nodes = n;
    trace.state_dim = m;
    trace.times.push_back(0.0);
    trace.states.push_back(x);

    double t = 0.0;
    for (std::size_t step = 1; step <= steps; ++step) {
        deriv(x, t, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        deriv(tmp, t + 0.5 * dt, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        deriv(tmp, t + 0.5 * dt, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + dt * k3[i];
        deriv(tmp, t + dt, k4);
        for (std::size_t i = 0; i < dim; ++i)
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = static_cast<double>(step) * dt;
        guard_finite(x, t, "simulate_ct");
        if (step % record_every == 0 || step == steps) {
            trace.times.push_back(t);
            trace.states.push_back(x);
        }
    }
    return trace;
}

TrajectoryTrace simulate_dt(const MultiNetworkSystem& sys, const NodeDynamics& f,
                            const std::vector<double>& x0, std::size_t steps,
                            const InputSignal& u, std::size_t record_every) {
    check_dims(sys, f, x0, "simulate_dt");
    if (record_every == 0) record_every = 1;

    const std::size_t n = sys.node_count();
    const std::size_t m = sys.state_dim();
    const std::size_t dim = n * m;

    std::vector<double> x = x0;
    std::vector<double> fx(dim), coupling(dim), input(dim);

    TrajectoryTrace trace;
    trace.nodes = n;
    trace.state_dim = m;
    trace.times.push_back(0.0);
    trace.states.push_back(x);

    for (std::size_t p = 0; p < steps; ++p) {
        const auto tp = static_cast<double>(p);
        for (std::size_t i = 0; i < n; ++i)
            f.eval(std::span<const double>(x.data() + i * m, m), tp,
                   std::span<double>(fx.data() + i * m, m));
        coupling.assign(dim, 0.0);
        apply_coupling(sys, fx, coupling);
        for (std::size_t i = 0; i < dim; ++i) x[i] = fx[i] - coupling[i];
        if (u) {
            input.assign(dim, 0.0);
            u(p, std::span<double>(input.data(), dim));
            for (std::size_t i = 0; i < dim; ++i) x[i] += input[i];
        }
        guard_finite(x, tp + 1.0, "simulate_dt");
        if ((p + 1) % record_every == 0 || p + 1 == steps) {
            trace.times.push_back(tp + 1.0);
            trace.states.push_back(x);
        }
    }
    return trace;
}

SyncReport sync_error(const TrajectoryTrace& trace, double threshold) {
    const std::size_t n = trace.nodes;
    const std::size_t m = trace.state_dim;
    if (n == 0 || m == 0 || trace.states.empty())
        throw ValidationError("sync_error: empty trace");

    SyncReport report;
    report.threshold = threshold;
    report.error_series.reserve(trace.states.size());
    for (const std::vector<double>& x : trace.states) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double dist2 = 0.0;
                for (std::size_t c = 0; c < m; ++c) {
                    const double diff = x[i * m + c] - x[j * m + c];
                    dist2 += diff * diff;
                }
                worst = std::max(worst, std::sqrt(dist2));
            }
        report.error_series.push_back(worst);
    }
    report.final_error = report.error_series.back();
    report.synchronized = report.final_error <= threshold;

    // Least-squares fit of log(error) on the tail half of the samples still
    // above the rounding-noise floor, so a run that collapses to machine
    // zero is fitted on its decaying stretch rather than on the noise
    // plateau.
    double state_scale = 0.0;
    for (const std::vector<double>& x : trace.states)
        for (double v : x) state_scale = std::max(state_scale, std::abs(v));
    const double floor = 1e-14 * (1.0 + state_scale);
    std::vector<std::size_t> positive;
    for (std::size_t i = 0; i < report.error_series.size(); ++i)
        if (report.error_series[i] > floor) positive.push_back(i);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    double spacing = 0.0;
    for (std::size_t k = positive.size() / 2; k < positive.size(); ++k) {
        const std::size_t i = positive[k];
        const double tx = trace.times[i];
        const double ty = std::log(report.error_series[i]);
        sx += tx;
        sy += ty;
        sxx += tx * tx;
        sxy += tx * ty;
        ++count;
    }
    if (trace.times.size() >= 2)
        spacing = (trace.times.back() - trace.times.front()) /
                  static_cast<double>(trace.times.size() - 1);
    const double denom = static_cast<double>(count) * sxx - sx * sx;
    if (count >= 2 && std::abs(denom) > 0.0) {
        report.fit_rate_per_time = (static_cast<double>(count) * sxy - sx * sy) / denom;
        report.fit_ratio_per_step = std::exp(report.fit_rate_per_time * spacing);
    }
    return report;
}

std::vector<double> perturbed_initial_state(std::size_t nodes, const std::vector<double>& base,
                                            double magnitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-magnitude, magnitude);
    std::vector<double> x0(nodes * base.size());
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t c = 0; c < base.size(); ++c) x0[i * base.size() + c] = base[c] + offset(rng);
    return x0;
}

}  // namespace multisync
