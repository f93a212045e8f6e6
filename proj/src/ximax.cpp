#include "multisync/ximax.hpp"

#include "multisync/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace multisync {

namespace {

constexpr double kTraceCap = 100.0;  // trace(U) <= n * kTraceCap compactifies the set

// Cholesky factor (lower) of a symmetric matrix; empty return means the
// matrix is not positive definite.
bool chol_lower(const RealMatrix& m, RealMatrix& lower) {
    const std::size_t n = m.rows();
    lower = RealMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
        if (diag <= 0.0 || !std::isfinite(diag)) return false;
        lower(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = m(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
            lower(i, j) = sum / lower(j, j);
        }
    }
    return true;
}

double chol_logdet(const RealMatrix& lower) {
    double ld = 0.0;
    for (std::size_t i = 0; i < lower.rows(); ++i) ld += std::log(lower(i, i));
    return 2.0 * ld;
}

// Solve (L L^T) x = b given the lower factor.
std::vector<double> chol_solve(const RealMatrix& lower, std::vector<double> b) {
    const std::size_t n = lower.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * b[k];
        b[i] = s / lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * b[k];
        b[ii] = s / lower(ii, ii);
    }
    return b;
}

RealMatrix chol_inverse(const RealMatrix& lower) {
    const std::size_t n = lower.rows();
    RealMatrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e.assign(n, 0.0);
        e[j] = 1.0;
        const std::vector<double> col = chol_solve(lower, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Max-slack barrier solver for the feasibility SDP. U is parameterized by
// its strict upper triangle with the diagonal pinned by zero row sums, which
// keeps U = U^T and Ue = 0 exact; the slack variable s turns the PSD
// constraints into Q^T sym(U(G_k - xi I)) Q >= s I, so any interior point of
// the remaining constraints is a valid start.
class SlackSolver {
public:
    SlackSolver(const SdpProblem& p, double tol)
        : n_(p.order()), nq_(n_ - 1), npairs_(n_ * (n_ - 1) / 2), tol_(tol), q_(p.q) {
        pair_p_.reserve(npairs_);
        pair_q_.reserve(npairs_);
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = a + 1; b < n_; ++b) {
                pair_p_.push_back(a);
                pair_q_.push_back(b);
            }

        // dU^a = -(e_p - e_q)(e_p - e_q)^T, so the projected constraint
        // derivatives are rank one (B block) and rank two (G_k blocks).
        qvec_.assign(npairs_, std::vector<double>(nq_));
        for (std::size_t a = 0; a < npairs_; ++a)
            for (std::size_t c = 0; c < nq_; ++c)
                qvec_[a][c] = q_(pair_p_[a], c) - q_(pair_q_[a], c);

        gvec_.assign(p.g_list.size(), qvec_);
        for (std::size_t k = 0; k < p.g_list.size(); ++k) {
            RealMatrix ghat = p.g_list[k].matrix();
            for (std::size_t i = 0; i < n_; ++i) ghat(i, i) -= p.xi;
            const RealMatrix gtq = ghat * q_;  // n x nq; row differences give Q^T Ghat^T w
            for (std::size_t a = 0; a < npairs_; ++a)
                for (std::size_t c = 0; c < nq_; ++c)
                    gvec_[k][a][c] = gtq(pair_p_[a], c) - gtq(pair_q_[a], c);
            ghat_list_.push_back(std::move(ghat));
        }
    }

    SdpResult run() {
        const std::size_t r = ghat_list_.size();
        const std::size_t dim = npairs_ + 1;
        const double nu =
            static_cast<double>(r * nq_ + nq_ + npairs_ + 1);  // barrier complexity
        const double gap_target = 0.25 * tol_;

        // Interior start: U = (2/n) L_K, slack below the worst eigenvalue.
        std::vector<double> z(dim, -2.0 / static_cast<double>(n_));
        {
            double smin = 0.0;
            const RealMatrix u = build_u(z);
            for (std::size_t k = 0; k < r; ++k) {
                const std::vector<double> ev = eig_sym(projected_constraint(u, k));
                smin = std::min(smin, ev.front());
            }
            z[npairs_] = smin - 1.0;
        }

        SdpResult result;
        double t = 1.0;
        int total_newton = 0;
        while (true) {
            for (int it = 0; it < 100; ++it) {
                if (++total_newton > 4000) {
                    result.status = SdpStatus::NoConvergence;
                    result.best_slack = z[npairs_];
                    result.gap = nu / t;
                    result.message = "interior-point iteration cap reached";
                    return result;
                }
                std::vector<double> grad;
                RealMatrix hess;
                if (!assemble(z, t, grad, hess)) {
                    result.status = SdpStatus::NoConvergence;
                    result.message = "lost strict feasibility during centering";
                    return result;
                }
                std::vector<double> step = newton_step(hess, grad);
                const double decrement2 = -dot(grad, step);
                if (decrement2 <= 2e-9) break;
                if (!line_search(z, step, grad, t)) break;
            }
            if (z[npairs_] >= tol_) break;           // feasible with margin
            if (nu / t <= gap_target) break;         // slack pinned to gap_target
            t *= 20.0;
        }

        result.best_slack = z[npairs_];
        result.gap = nu / t;
        if (result.best_slack >= -tol_) {
            result.status = SdpStatus::Feasible;
            result.certificate = FeasibilityCertificate{build_u(z), CertificateSlacks{}};
        } else {
            result.status = SdpStatus::Infeasible;
            std::ostringstream msg;
            msg << "max constraint slack " << result.best_slack << " (gap bound " << result.gap
                << ") below -tol";
            result.message = msg.str();
        }
        return result;
    }

    RealMatrix build_u(const std::vector<double>& z) const {
        RealMatrix u(n_, n_);
        for (std::size_t a = 0; a < npairs_; ++a) {
            const std::size_t p = pair_p_[a];
            const std::size_t q = pair_q_[a];
            u(p, q) = z[a];
            u(q, p) = z[a];
            u(p, p) -= z[a];
            u(q, q) -= z[a];
        }
        return u;
    }

private:
    RealMatrix projected_constraint(const RealMatrix& u, std::size_t k) const {
        const RealMatrix prod = u * ghat_list_[k];
        return sym_part(q_.transpose() * prod * q_);
    }

    double trace_slack(const std::vector<double>& z) const {
        double tr = 0.0;
        for (std::size_t a = 0; a < npairs_; ++a) tr -= 2.0 * z[a];
        return static_cast<double>(n_) * kTraceCap - tr;
    }

    // Evaluates all blocks at z; returns false unless strictly feasible.
    bool evaluate(const std::vector<double>& z, std::vector<RealMatrix>& chol_m,
                  RealMatrix& chol_b, double& barrier) const {
        const double s = z[npairs_];
        for (std::size_t a = 0; a < npairs_; ++a)
            if (z[a] >= 0.0) return false;
        const double tau = trace_slack(z);
        if (tau <= 0.0) return false;

        const RealMatrix u = build_u(z);
        barrier = -std::log(tau);
        for (std::size_t a = 0; a < npairs_; ++a) barrier -= std::log(-z[a]);

        chol_m.resize(ghat_list_.size());
        for (std::size_t k = 0; k < ghat_list_.size(); ++k) {
            RealMatrix m = projected_constraint(u, k);
            for (std::size_t i = 0; i < nq_; ++i) m(i, i) -= s;
            if (!chol_lower(m, chol_m[k])) return false;
            barrier -= chol_logdet(chol_m[k]);
        }
        RealMatrix b = sym_part(q_.transpose() * u * q_);
        for (std::size_t i = 0; i < nq_; ++i) b(i, i) -= 1.0;
        if (!chol_lower(b, chol_b)) return false;
        barrier -= chol_logdet(chol_b);
        return true;
    }

    bool assemble(const std::vector<double>& z, double t, std::vector<double>& grad,
                  RealMatrix& hess) const {
        const std::size_t dim = npairs_ + 1;
        std::vector<RealMatrix> chol_m;
        RealMatrix chol_b;
        double barrier = 0.0;
        if (!evaluate(z, chol_m, chol_b, barrier)) return false;

        grad.assign(dim, 0.0);
        hess = RealMatrix(dim, dim);
        grad[npairs_] = -t;  // objective: maximize s

        // Scalar barriers.
        const double tau = trace_slack(z);
        for (std::size_t a = 0; a < npairs_; ++a) {
            grad[a] += -1.0 / z[a] - 2.0 / tau;
            hess(a, a) += 1.0 / (z[a] * z[a]);
            for (std::size_t b = 0; b < npairs_; ++b) hess(a, b) += 4.0 / (tau * tau);
        }

        // G_k blocks: dM^a = -(q_a g_a^T + g_a q_a^T)/2, dM/ds = -I.
        for (std::size_t k = 0; k < ghat_list_.size(); ++k) {
            std::vector<std::vector<double>> aq(npairs_), ag(npairs_);
            for (std::size_t a = 0; a < npairs_; ++a) {
                aq[a] = chol_solve(chol_m[k], qvec_[a]);
                ag[a] = chol_solve(chol_m[k], gvec_[k][a]);
            }
            const RealMatrix minv = chol_inverse(chol_m[k]);
            double tr_minv = 0.0;
            double tr_minv2 = 0.0;
            for (std::size_t i = 0; i < nq_; ++i) {
                tr_minv += minv(i, i);
                for (std::size_t j = 0; j < nq_; ++j) tr_minv2 += minv(i, j) * minv(i, j);
            }
            grad[npairs_] += tr_minv;
            hess(npairs_, npairs_) += tr_minv2;
            for (std::size_t a = 0; a < npairs_; ++a) {
                grad[a] += dot(gvec_[k][a], aq[a]);
                const double cross = dot(ag[a], aq[a]);
                hess(a, npairs_) += cross;
                hess(npairs_, a) += cross;
                for (std::size_t b = a; b < npairs_; ++b) {
                    const double term = 0.25 * (dot(gvec_[k][a], aq[b]) * dot(gvec_[k][b], aq[a]) +
                                                dot(gvec_[k][a], ag[b]) * dot(qvec_[b], aq[a]) +
                                                dot(qvec_[a], aq[b]) * dot(gvec_[k][b], ag[a]) +
                                                dot(qvec_[a], ag[b]) * dot(qvec_[b], ag[a]));
                    hess(a, b) += term;
                    if (b != a) hess(b, a) += term;
                }
            }
        }

        // B block: dB^a = -q_a q_a^T.
        {
            std::vector<std::vector<double>> gq(npairs_);
            for (std::size_t a = 0; a < npairs_; ++a) gq[a] = chol_solve(chol_b, qvec_[a]);
            for (std::size_t a = 0; a < npairs_; ++a) {
                grad[a] += dot(qvec_[a], gq[a]);
                for (std::size_t b = a; b < npairs_; ++b) {
                    const double w = dot(qvec_[a], gq[b]);
                    hess(a, b) += w * w;
                    if (b != a) hess(b, a) += w * w;
                }
            }
        }
        return true;
    }

    std::vector<double> newton_step(RealMatrix hess, const std::vector<double>& grad) const {
        double ridge = 0.0;
        for (int attempt = 0; attempt < 12; ++attempt) {
            RealMatrix lower;
            if (chol_lower(hess, lower)) {
                std::vector<double> rhs(grad.size());
                for (std::size_t i = 0; i < grad.size(); ++i) rhs[i] = -grad[i];
                return chol_solve(lower, rhs);
            }
            double maxdiag = 1.0;
            for (std::size_t i = 0; i < hess.rows(); ++i)
                maxdiag = std::max(maxdiag, std::abs(hess(i, i)));
            ridge = (ridge == 0.0) ? 1e-12 * maxdiag : ridge * 100.0;
            for (std::size_t i = 0; i < hess.rows(); ++i) hess(i, i) += ridge;
        }
        throw NumericalError("sdp_feasible: Newton system unsolvable");
    }

    bool line_search(std::vector<double>& z, const std::vector<double>& step,
                     const std::vector<double>& grad, double t) const {
        std::vector<RealMatrix> chol_m;
        RealMatrix chol_b;
        double barrier0 = 0.0;
        evaluate(z, chol_m, chol_b, barrier0);
        const double f0 = -t * z[npairs_] + barrier0;
        const double slope = dot(grad, step);

        double alpha = 1.0;
        std::vector<double> trial(z.size());
        for (int it = 0; it < 60; ++it) {
            for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] + alpha * step[i];
            double barrier = 0.0;
            if (evaluate(trial, chol_m, chol_b, barrier)) {
                const double f = -t * trial[npairs_] + barrier;
                if (f <= f0 + 0.25 * alpha * slope) {
                    z = trial;
                    return true;
                }
            }
            alpha *= 0.5;
        }
        return false;
    }

    std::size_t n_;
    std::size_t nq_;
    std::size_t npairs_;
    double tol_;
    RealMatrix q_;
    std::vector<RealMatrix> ghat_list_;
    std::vector<std::size_t> pair_p_, pair_q_;
    std::vector<std::vector<double>> qvec_;               // Q^T (e_p - e_q)
    std::vector<std::vector<std::vector<double>>> gvec_;  // Q^T Ghat_k^T (e_p - e_q)
};

bool support_irreducible(const RealMatrix& u) {
    const std::size_t n = u.rows();
    const double thresh = 1e-12 * std::max(1.0, u.max_abs());
    RealMatrix support(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && std::abs(u(i, j)) > thresh) support(i, j) = 1.0;
    return is_strongly_connected(WeightedDigraph(std::move(support)));
}

}  // namespace

SdpProblem SdpProblem::make(std::vector<LaplacianMatrix> gs, double xi) {
    if (gs.empty()) throw ValidationError("SdpProblem: empty G list");
    const std::size_t n = gs.front().size();
    if (n < 2) throw ValidationError("SdpProblem: need order >= 2");
    for (const LaplacianMatrix& g : gs)
        if (g.size() != n) throw ValidationError("SdpProblem: G order mismatch");
    SdpProblem p;
    p.g_list = std::move(gs);
    p.xi = xi;
    p.q = basis_e_perp(n);
    return p;
}

CertificateCheck verify_certificate(const RealMatrix& u, const SdpProblem& p, double tol) {
    CertificateCheck check;
    const std::size_t n = p.order();
    if (!u.square() || u.rows() != n) {
        check.failure = "certificate has wrong order";
        return check;
    }
    ensure_finite(u, "verify_certificate");
    const double scale = std::max(1.0, u.frobenius_norm());

    check.slacks.symmetry_error = (u - u.transpose()).frobenius_norm();
    double row_err = 0.0;
    double max_off = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            rowsum += u(i, j);
            if (i != j) max_off = std::max(max_off, u(i, j));
        }
        row_err = std::max(row_err, std::abs(rowsum));
    }
    check.slacks.row_sum_error = row_err;
    check.slacks.max_offdiagonal = max_off;

    const RealMatrix scaled = sym_part(p.q.transpose() * u * p.q);
    check.slacks.min_eig_scaled = eig_sym(scaled).front();

    double min_slack = 1e300;
    for (const LaplacianMatrix& g : p.g_list) {
        RealMatrix ghat = g.matrix();
        for (std::size_t i = 0; i < n; ++i) ghat(i, i) -= p.xi;
        min_slack = std::min(min_slack, eig_sym(sym_part(u * ghat)).front());
    }
    check.slacks.min_constraint_slack = min_slack;
    check.slacks.irreducible = support_irreducible(u);

    std::ostringstream why;
    if (check.slacks.symmetry_error > 1e-10 * scale)
        why << "U not symmetric; ";
    if (check.slacks.row_sum_error > 1e-8 * scale)
        why << "row sums nonzero; ";
    if (check.slacks.max_offdiagonal > 1e-9)
        why << "positive off-diagonal entry; ";
    if (check.slacks.min_eig_scaled < 1.0 - 1e-6)
        why << "Q^T U Q >= I fails; ";
    if (check.slacks.min_constraint_slack < -tol)
        why << "U(G_k - xi I) psd fails; ";
    if (!check.slacks.irreducible)
        why << "support of U reducible; ";
    check.failure = why.str();
    check.ok = check.failure.empty();
    return check;
}

SdpResult sdp_feasible(const SdpProblem& p, double tol) {
    SlackSolver solver(p, tol);
    SdpResult result = solver.run();
    if (result.status != SdpStatus::Feasible) return result;

    RealMatrix u = result.certificate->u;
    CertificateCheck check = verify_certificate(u, p, tol);
    if (!check.ok && !check.slacks.irreducible) {
        // Shift slightly toward the complete-graph Laplacian; this stays in
        // class W and generically reconnects the support.
        const double delta = 1e-6 * std::max(1.0, u.frobenius_norm());
        const double n = static_cast<double>(p.order());
        for (std::size_t i = 0; i < u.rows(); ++i)
            for (std::size_t j = 0; j < u.cols(); ++j)
                u(i, j) += (i == j) ? delta * (n - 1.0) : -delta;
        check = verify_certificate(u, p, tol);
    }
    if (!check.ok) {
        result.status = SdpStatus::NoConvergence;
        result.certificate.reset();
        result.message = "solver produced a certificate that failed verification: " + check.failure;
        return result;
    }
    result.certificate = FeasibilityCertificate{std::move(u), check.slacks};
    return result;
}

double mu2(const RealMatrix& g) {
    if (!g.square()) throw ValidationError("mu2: matrix must be square");
    ensure_finite(g, "mu2");
    const std::size_t n = g.rows();
    const double scale = std::max(1.0, g.frobenius_norm());
    for (std::size_t i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) rowsum += g(i, j);
        if (std::abs(rowsum) > 1e-8 * scale)
            throw ValidationError("mu2: row sums must be zero");
    }
    const RealMatrix q = basis_e_perp(n);
    const ComplexSpectrum deflated = eig(q.transpose() * g * q);
    double best = 1e300;
    for (const Complex& v : deflated.values) best = std::min(best, v.real());
    return best;
}

double xi_lower_bound(const std::vector<LaplacianMatrix>& gs) {
    if (gs.empty()) throw ValidationError("xi_lower_bound: empty G list");
    const RealMatrix q = basis_e_perp(gs.front().size());
    double bound = 1e300;
    for (const LaplacianMatrix& g : gs) {
        const RealMatrix projected = sym_part(q.transpose() * sym_part(g.matrix()) * q);
        bound = std::min(bound, eig_sym(projected).front());
    }
    return bound;
}

double xi_upper_bound(const std::vector<LaplacianMatrix>& gs) {
    if (gs.empty()) throw ValidationError("xi_upper_bound: empty G list");
    double bound = 1e300;
    for (const LaplacianMatrix& g : gs) bound = std::min(bound, mu2(g.matrix()));
    return bound;
}

XiMaxResult xi_max(const std::vector<LaplacianMatrix>& gs, const XiMaxOptions& opts) {
    XiMaxResult result;
    result.epsilon = opts.epsilon;
    result.lower_bound = xi_lower_bound(gs);
    result.upper_bound = xi_upper_bound(gs);
    const double span = std::max(1.0, result.upper_bound - result.lower_bound);
    double lb = opts.lb.value_or(result.lower_bound - 0.1 * span);
    double ub = opts.ub.value_or(result.upper_bound + 0.1 * span);
    if (!(lb < ub)) throw ValidationError("xi_max: bracket is empty");

    const auto solve_at = [&](double xi) {
        return sdp_feasible(SdpProblem::make(gs, xi), opts.feas_tol);
    };

    SdpResult at_lb = solve_at(lb);
    if (at_lb.status == SdpStatus::NoConvergence) result.solver_nonconvergence = true;
    if (at_lb.status != SdpStatus::Feasible) {
        std::ostringstream msg;
        msg << "xi_max: invalid bracket, lower seed " << lb << " not feasible ("
            << at_lb.message << ")";
        throw ValidationError(msg.str());
    }
    SdpResult at_ub = solve_at(ub);
    if (at_ub.status == SdpStatus::NoConvergence) result.solver_nonconvergence = true;
    if (at_ub.status == SdpStatus::Feasible) {
        std::ostringstream msg;
        msg << "xi_max: invalid bracket, upper seed " << ub << " still feasible";
        throw ValidationError(msg.str());
    }

    FeasibilityCertificate best = *at_lb.certificate;
    double xi = 0.5 * (lb + ub);
    while (std::abs(ub - lb) > opts.epsilon) {
        const SdpResult mid = solve_at(xi);
        if (mid.status == SdpStatus::Feasible) {
            lb = xi;
            best = *mid.certificate;
        } else {
            if (mid.status == SdpStatus::NoConvergence) result.solver_nonconvergence = true;
            ub = xi;
        }
        xi = 0.5 * (lb + ub);
    }

    result.value = xi;
    result.lb = lb;
    result.ub = ub;
    result.certificate_at_lb = std::move(best);
    return result;
}

}  // namespace multisync
