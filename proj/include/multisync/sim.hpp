#pragma once

#include "multisync/system.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace multisync {

/// Node vector field (continuous time) or node map (discrete time).
/// Built-in kinds carry their documented contraction constants where known;
/// the Lorenz bound is an absorbing-set estimate, not a certified value.
class NodeDynamics {
public:
    using EvalFn = std::function<void(std::span<const double>, double, std::span<double>)>;

    static NodeDynamics affine(RealMatrix a, std::vector<double> b);
    static NodeDynamics lorenz(double sigma = 10.0, double rho = 28.0, double beta = 8.0 / 3.0);
    static NodeDynamics logistic_map(double a = 3.9);
    static NodeDynamics custom(std::size_t dim, std::string name, EvalFn fn,
                               std::optional<double> c = std::nullopt);

    std::size_t dim() const { return dim_; }
    const std::string& kind() const { return kind_; }
    /// Theorem-style constant c where one is documented for the kind
    /// (logistic map: a^2). Empty when the caller must supply it.
    std::optional<double> documented_c() const { return c_; }
    void eval(std::span<const double> x, double t, std::span<double> out) const {
        fn_(x, t, out);
    }

    /// Rough one-sided Lipschitz bound for the classic Lorenz parameters on
    /// the standard absorbing set (estimate used to size feedback gains).
    static double lorenz_lipschitz_estimate() { return 30.0; }

private:
    NodeDynamics(std::size_t dim, std::string kind, EvalFn fn, std::optional<double> c)
        : dim_(dim), kind_(std::move(kind)), fn_(std::move(fn)), c_(c) {}

    std::size_t dim_;
    std::string kind_;
    EvalFn fn_;
    std::optional<double> c_;
};

/// Time-indexed stacked states of all nodes.
struct TrajectoryTrace {
    std::size_t nodes = 0;
    std::size_t state_dim = 0;
    std::vector<double> times;                // step indices for discrete runs
    std::vector<std::vector<double>> states;  // each of size nodes * state_dim
};

struct SyncReport {
    std::vector<double> error_series;  // max pairwise node distance per sample
    double final_error = 0.0;
    double fit_rate_per_time = 0.0;   // slope of log error over the tail half
    double fit_ratio_per_step = 1.0;  // contraction ratio per recorded sample
    double threshold = 1e-6;
    bool synchronized = false;
};

/// Additive input sequence u(p) for the discrete iteration; writes the full
/// n*m stacked input for step p.
using InputSignal = std::function<void(std::size_t, std::span<double>)>;

/// Fixed-step RK4 integration of the coupled continuous-time network.
/// Throws NumericalError at the first non-finite or exploding state.
TrajectoryTrace simulate_ct(const MultiNetworkSystem& sys, const NodeDynamics& f,
                            const std::vector<double>& x0, double dt, double horizon,
                            std::size_t record_every = 1);

/// Exact iteration of the coupled discrete-time network
/// x(p+1) = (I - sum_k G_k x D_k) F(x(p), p) + u(p).
TrajectoryTrace simulate_dt(const MultiNetworkSystem& sys, const NodeDynamics& f,
                            const std::vector<double>& x0, std::size_t steps,
                            const InputSignal& u = nullptr, std::size_t record_every = 1);

/// Synchronization-error diagnostics: max pairwise distances, decay fit on
/// the tail half, verdict at the threshold.
SyncReport sync_error(const TrajectoryTrace& trace, double threshold = 1e-6);

/// Fixed-seed initial condition: common base point plus uniform node
/// perturbations of the given magnitude.
std::vector<double> perturbed_initial_state(std::size_t nodes, const std::vector<double>& base,
                                            double magnitude, std::uint64_t seed);

}  // namespace multisync
