#pragma once

#include "multisync/graphs.hpp"
#include "multisync/matrix.hpp"

#include <optional>
#include <string>

namespace multisync {

/// Fixed-xi feasibility instance: find symmetric U with zero row sums,
/// nonpositive off-diagonals, Q^T U Q >= I and U(G_k - xi I) psd for all k.
struct SdpProblem {
    std::vector<LaplacianMatrix> g_list;
    double xi = 0.0;
    RealMatrix q;  // orthonormal basis of e-perp

    static SdpProblem make(std::vector<LaplacianMatrix> gs, double xi);
    std::size_t order() const { return g_list.empty() ? 0 : g_list.front().size(); }
};

struct CertificateSlacks {
    double symmetry_error = 0.0;
    double row_sum_error = 0.0;
    double max_offdiagonal = 0.0;       // most positive off-diagonal entry
    double min_eig_scaled = 0.0;        // lambda_min(Q^T U Q)
    double min_constraint_slack = 0.0;  // min_k lambda_min(sym(U(G_k - xi I)))
    bool irreducible = false;
};

/// Symmetric witness for SDP feasibility, re-checkable without solver state.
struct FeasibilityCertificate {
    RealMatrix u;
    CertificateSlacks slacks;
};

enum class SdpStatus { Feasible, Infeasible, NoConvergence };

struct SdpResult {
    SdpStatus status = SdpStatus::NoConvergence;
    std::optional<FeasibilityCertificate> certificate;  // set when Feasible
    double best_slack = 0.0;  // largest constraint slack reached by the solver
    double gap = 0.0;         // residual optimality gap bound on the slack
    std::string message;
};

/// Max-slack log-barrier interior-point solve of the feasibility problem.
/// Feasible iff the achievable slack is >= -tol.
SdpResult sdp_feasible(const SdpProblem& p, double tol = 1e-7);

struct CertificateCheck {
    bool ok = false;
    CertificateSlacks slacks;
    std::string failure;  // empty when ok
};

/// Re-checks every SDP constraint (plus irreducibility of the support of U)
/// using eigenvalue primitives only.
CertificateCheck verify_certificate(const RealMatrix& u, const SdpProblem& p, double tol = 1e-7);

/// Minimum real part among eigenvalues of G restricted to e-perp.
double mu2(const RealMatrix& g);

/// Theorem-style lower bound: min_k lambda_min(Q^T sym(G_k) Q).
double xi_lower_bound(const std::vector<LaplacianMatrix>& gs);

/// Theorem-style upper bound: min_k mu2(G_k).
double xi_upper_bound(const std::vector<LaplacianMatrix>& gs);

struct XiMaxOptions {
    double epsilon = 1e-3;
    std::optional<double> lb;  // default: xi_lower_bound - 0.1 * span
    std::optional<double> ub;  // default: xi_upper_bound + 0.1 * span
    double feas_tol = 1e-7;
};

struct XiMaxResult {
    double value = 0.0;
    double lb = 0.0;
    double ub = 0.0;
    double epsilon = 0.0;
    FeasibilityCertificate certificate_at_lb;
    double lower_bound = 0.0;  // analytic seed bounds
    double upper_bound = 0.0;
    bool solver_nonconvergence = false;  // some solve hit its iteration cap
};

/// Bisection for the supremum of feasible xi. The initial bracket must be
/// valid: feasible at lb, infeasible at ub (reported otherwise, not widened).
XiMaxResult xi_max(const std::vector<LaplacianMatrix>& gs, const XiMaxOptions& opts = {});

}  // namespace multisync
