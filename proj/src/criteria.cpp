#include "multisync/criteria.hpp"

#include "multisync/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace multisync {

namespace {

bool is_zero_row_sum(const RealMatrix& m, double tol = 1e-10) {
    const double scale = std::max(1.0, m.frobenius_norm());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) rowsum += m(i, j);
        if (std::abs(rowsum) > tol * scale) return false;
    }
    return true;
}

bool is_normal_matrix(const RealMatrix& m) {
    const double scale = std::max(1.0, m.frobenius_norm() * m.frobenius_norm());
    return (m * m.transpose() - m.transpose() * m).frobenius_norm() <= 1e-8 * scale;
}

RealMatrix upper_tri_inverse(const RealMatrix& c) {
    const std::size_t n = c.rows();
    RealMatrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / c(j, j);
        for (std::size_t ii = j; ii-- > 0;) {
            double s = 0.0;
            for (std::size_t k = ii + 1; k <= j; ++k) s += c(ii, k) * inv(k, j);
            inv(ii, j) = -s / c(ii, ii);
        }
    }
    return inv;
}

// Minimum real part over eigenvalues of convex combinations of the D_k.
// Exact via joint tables when the family commutes, otherwise sampled on a
// simplex grid of step 1/32 (vertices included).
double conv_hull_min_real(const std::vector<RealMatrix>& d_list) {
    const std::size_t r = d_list.size();
    bool commuting = true;
    for (std::size_t i = 0; i < r && commuting; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            const double scale =
                std::max(1.0, d_list[i].frobenius_norm() * d_list[j].frobenius_norm());
            if ((d_list[i] * d_list[j] - d_list[j] * d_list[i]).frobenius_norm() > 1e-8 * scale) {
                commuting = false;
                break;
            }
        }
    if (commuting) {
        try {
            const CommutingFamily family = make_family(d_list);
            double best = 1e300;
            for (std::size_t j = 0; j < family.order(); ++j)
                for (std::size_t k = 0; k < r; ++k)
                    best = std::min(best, family.joint_table[k][j].real());
            return best;
        } catch (const NumericalError&) {
            // defective but commuting: fall through to the grid
        }
    }

    const int steps = 32;
    double best = 1e300;
    std::vector<int> weights(r, 0);
    const std::function<void(std::size_t, int)> enumerate = [&](std::size_t idx, int remaining) {
        if (idx + 1 == r) {
            weights[idx] = remaining;
            RealMatrix combo(d_list.front().rows(), d_list.front().rows());
            for (std::size_t k = 0; k < r; ++k) {
                RealMatrix scaled = d_list[k];
                scaled *= static_cast<double>(weights[k]) / steps;
                combo += scaled;
            }
            for (const Complex& v : eig(combo).values) best = std::min(best, v.real());
            return;
        }
        for (int w = 0; w <= remaining; ++w) {
            weights[idx] = w;
            enumerate(idx + 1, remaining - w);
        }
    };
    enumerate(0, steps);
    return best;
}

}  // namespace

MultiNetworkSystem MultiNetworkSystem::make(std::vector<LaplacianMatrix> gs,
                                            std::vector<RealMatrix> ds, double c,
                                            std::optional<RealMatrix> v,
                                            std::optional<RealMatrix> p) {
    if (gs.empty()) throw ValidationError("MultiNetworkSystem: no coupling layers");
    if (ds.size() != gs.size())
        throw ValidationError("MultiNetworkSystem: need one D per layer");
    const std::size_t n = gs.front().size();
    for (const LaplacianMatrix& g : gs)
        if (g.size() != n) throw ValidationError("MultiNetworkSystem: layer order mismatch");
    const std::size_t m = ds.front().rows();
    for (const RealMatrix& d : ds) {
        if (!d.square() || d.rows() != m)
            throw ValidationError("MultiNetworkSystem: D order mismatch");
        ensure_finite(d, "MultiNetworkSystem");
    }
    if (!(c > 0.0)) throw ValidationError("MultiNetworkSystem: constant c must be positive");

    MultiNetworkSystem sys;
    sys.g_list = std::move(gs);
    sys.d_list = std::move(ds);
    sys.lipschitz_c = c;
    sys.v = v ? std::move(*v) : RealMatrix::identity(m);
    if (sys.v.rows() != m || sys.v.cols() != m)
        throw ValidationError("MultiNetworkSystem: V must be m x m");
    if (p) {
        if (p->rows() != m || p->cols() != m)
            throw ValidationError("MultiNetworkSystem: P must be m x m");
        sys.p = std::move(*p);
    }
    return sys;
}

void require_class_w(const RealMatrix& u, const std::string& context) {
    if (!u.square()) throw HypothesisError(context + ": U must be square");
    const double scale = std::max(1.0, u.frobenius_norm());
    if ((u - u.transpose()).frobenius_norm() > 1e-10 * scale)
        throw HypothesisError(context + ": U not symmetric");
    if (!is_zero_row_sum(u, 1e-8))
        throw HypothesisError(context + ": U row sums not zero");
    const std::size_t n = u.rows();
    RealMatrix support(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (u(i, j) > 1e-9) throw HypothesisError(context + ": U has positive off-diagonal");
            if (std::abs(u(i, j)) > 1e-12 * scale) support(i, j) = 1.0;
        }
    if (!is_strongly_connected(WeightedDigraph(std::move(support))))
        throw HypothesisError(context + ": U is reducible");
}

SyncVerdict check_eq2(const MultiNetworkSystem& sys, const RealMatrix& u, double tol) {
    require_class_w(u, "check_eq2");
    const std::size_t n = sys.node_count();
    const std::size_t m = sys.state_dim();
    if (u.rows() != n) throw ValidationError("check_eq2: U order must match node count");
    if (eig_sym(sym_part(sys.v)).front() <= 0.0)
        throw HypothesisError("check_eq2: V must be symmetric positive definite");

    RealMatrix inner(n * m, n * m);
    for (std::size_t k = 0; k < sys.layer_count(); ++k)
        inner += kron(sys.g_list[k].matrix(), sys.d_list[k]);
    if (sys.p) inner -= kron(RealMatrix::identity(n), *sys.p);

    const RealMatrix condition = kron(u, sys.v) * inner;
    const PsdVerdict psd = is_psd(condition, tol);

    SyncVerdict verdict;
    verdict.criterion = "eq2";
    verdict.margin = psd.min_sym_eigenvalue;
    verdict.satisfied = psd.is_psd;
    std::ostringstream det;
    det << "min eigenvalue of sym((U x V) Z) = " << psd.min_sym_eigenvalue << " (tol "
        << psd.tolerance_used << ")";
    verdict.details = det.str();
    return verdict;
}

double threshold_spanning_tree(const CommutingFamily& l_family,
                               const std::vector<RealMatrix>& d_list, double c) {
    if (!(c > 0.0)) throw HypothesisError("threshold_spanning_tree: need c > 0");
    if (d_list.empty()) throw ValidationError("threshold_spanning_tree: no D matrices");
    const std::size_t n = l_family.order();

    for (std::size_t i = 0; i < l_family.member_count(); ++i) {
        const RealMatrix& l = l_family.members[i];
        if (!is_zero_row_sum(l))
            throw HypothesisError("threshold_spanning_tree: member " + std::to_string(i) +
                                  " is not a Laplacian (row sums nonzero)");
        if (!is_normal_matrix(l))
            throw HypothesisError("threshold_spanning_tree: member " + std::to_string(i) +
                                  " is not normal");
    }
    for (std::size_t k = 0; k < d_list.size(); ++k)
        if (!is_normal_matrix(d_list[k]))
            throw HypothesisError("threshold_spanning_tree: D_" + std::to_string(k) +
                                  " is not normal");

    RealMatrix sum(n, n);
    for (const RealMatrix& l : l_family.members) sum += l;
    const WeightedDigraph sum_graph = digraph_from_laplacian(LaplacianMatrix(sum));
    if (!has_spanning_directed_tree(reversal(sum_graph)).has_tree)
        throw HypothesisError(
            "threshold_spanning_tree: layer-sum reversal lacks a spanning directed tree");

    double lambda_l = 1e300;
    for (std::size_t i = 0; i < l_family.member_count(); ++i) {
        const double limit = 1e-7 * std::max(1.0, l_family.members[i].frobenius_norm());
        for (std::size_t j = 0; j < n; ++j) {
            const Complex lam = l_family.joint_table[i][j];
            if (std::abs(lam) > limit) lambda_l = std::min(lambda_l, lam.real());
        }
    }
    if (!(lambda_l > 0.0) || lambda_l == 1e300)
        throw HypothesisError("threshold_spanning_tree: no nonzero layer eigenvalue with "
                              "positive real part");

    const double lambda_d = conv_hull_min_real(d_list);
    if (!(lambda_d > 1e-12)) {
        std::ostringstream msg;
        msg << "threshold_spanning_tree: conv(D_k) reaches eigenvalue real part " << lambda_d
            << " <= 0 (singular convex combination)";
        throw HypothesisError(msg.str());
    }
    return c / (lambda_l * lambda_d);
}

SyncVerdict check_theorem4(const std::vector<LaplacianMatrix>& g_list,
                           const std::vector<RealMatrix>& d_list, const RealMatrix& v, double xi,
                           const RealMatrix& u, double tol) {
    if (g_list.empty()) throw ValidationError("check_theorem4: no layers");
    for (std::size_t k = 0; k < d_list.size(); ++k) {
        const PsdVerdict vd = is_psd(v * d_list[k]);
        if (!vd.is_psd) {
            std::ostringstream msg;
            msg << "check_theorem4: V D_" << k << " not psd (min eig " << vd.min_sym_eigenvalue
                << ")";
            throw HypothesisError(msg.str());
        }
    }
    require_class_w(u, "check_theorem4");
    if (u.rows() != g_list.front().size())
        throw ValidationError("check_theorem4: U order must match layers");

    double margin = 1e300;
    for (const LaplacianMatrix& g : g_list) {
        RealMatrix ghat = g.matrix();
        for (std::size_t i = 0; i < ghat.rows(); ++i) ghat(i, i) -= xi;
        margin = std::min(margin, eig_sym(sym_part(u * ghat)).front());
    }

    SyncVerdict verdict;
    verdict.criterion = "theorem4";
    verdict.margin = margin;
    verdict.satisfied = margin >= -tol;
    std::ostringstream det;
    det << "min_k lambda_min(sym(U(G_k - xi I))) = " << margin << " at xi = " << xi;
    verdict.details = det.str();
    return verdict;
}

SyncVerdict check_theorem5(const std::vector<LaplacianMatrix>& g_list, double xi, double tol) {
    if (g_list.empty()) throw ValidationError("check_theorem5: no layers");
    double margin = 1e300;
    for (std::size_t k = 0; k < g_list.size(); ++k) {
        const RealMatrix& g = g_list[k].matrix();
        const double scale = std::max(1.0, g.frobenius_norm());
        for (std::size_t j = 0; j < g.cols(); ++j) {
            double colsum = 0.0;
            for (std::size_t i = 0; i < g.rows(); ++i) colsum += g(i, j);
            if (std::abs(colsum) > 1e-10 * scale)
                throw HypothesisError("check_theorem5: zero column sums violated in layer " +
                                      std::to_string(k));
        }
        const std::vector<double> spec = eig_sym(sym_part(g));
        std::size_t zeros = 0;
        for (double v : spec)
            if (std::abs(v) <= 1e-7 * scale) ++zeros;
        if (zeros != 1)
            throw HypothesisError("check_theorem5: sym(G_" + std::to_string(k) +
                                  ") zero eigenvalue not simple");
        margin = std::min(margin, spec[1] - xi);
    }

    SyncVerdict verdict;
    verdict.criterion = "theorem5";
    verdict.margin = margin;
    verdict.satisfied = margin >= -tol;
    std::ostringstream det;
    det << "min_k lambda_2(sym(G_k)) - xi = " << margin;
    verdict.details = det.str();
    return verdict;
}

SyncVerdict discrete_criterion(const CommutingFamily& g_family,
                               const std::vector<RealMatrix>& d_list, const RealMatrix& v,
                               double c, double tol) {
    if (!(c > 0.0)) throw HypothesisError("discrete_criterion: need c > 0");
    if (d_list.size() != g_family.member_count())
        throw ValidationError("discrete_criterion: need one D per layer");
    for (std::size_t i = 0; i < g_family.member_count(); ++i) {
        if (!is_normal_matrix(g_family.members[i]))
            throw HypothesisError("discrete_criterion: G_" + std::to_string(i) + " is not normal");
        if (!is_zero_row_sum(g_family.members[i]))
            throw HypothesisError("discrete_criterion: G_" + std::to_string(i) +
                                  " row sums not zero");
    }
    const std::size_t m = d_list.front().rows();
    if (v.rows() != m || v.cols() != m)
        throw ValidationError("discrete_criterion: V must match the D order");
    if (eig_sym(sym_part(v)).front() <= 0.0)
        throw HypothesisError("discrete_criterion: V must be symmetric positive definite");

    const RealMatrix chol = cholesky_factor(v);
    const RealMatrix chol_inv = upper_tri_inverse(chol);
    std::vector<RealMatrix> conjugated;
    conjugated.reserve(d_list.size());
    for (const RealMatrix& d : d_list) conjugated.push_back(chol * d * chol_inv);

    const JointZeroIndex consensus = joint_zero_index(g_family);
    const std::size_t n = g_family.order();
    double worst_norm = 0.0;
    std::size_t worst_index = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == consensus.index) continue;
        ComplexMatrix mj = ComplexMatrix::identity(m);
        for (std::size_t k = 0; k < conjugated.size(); ++k) {
            const Complex lam = g_family.joint_table[k][j];
            for (std::size_t p = 0; p < m; ++p)
                for (std::size_t q = 0; q < m; ++q) mj(p, q) -= lam * conjugated[k](p, q);
        }
        const double norm = spectral_norm(mj);
        if (norm > worst_norm) {
            worst_norm = norm;
            worst_index = j;
        }
    }

    SyncVerdict verdict;
    verdict.criterion = "eq4";
    verdict.margin = 1.0 / std::sqrt(c) - worst_norm;
    verdict.satisfied = verdict.margin > tol;
    std::ostringstream det;
    det << "max_j ||I - sum_k lambda_kj C D_k C^-1||_2 = " << worst_norm << " at position "
        << worst_index << ", bound 1/sqrt(c) = " << 1.0 / std::sqrt(c);
    verdict.details = det.str();
    return verdict;
}

double phi_point(const RealMatrix& a, const std::vector<RealMatrix>& d_list,
                 const std::vector<Complex>& lambdas) {
    if (lambdas.size() != d_list.size())
        throw ValidationError("phi_point: need one eigenvalue per layer");
    const std::size_t m = a.rows();
    ComplexMatrix total = ComplexMatrix::from_real(a);
    for (std::size_t k = 0; k < d_list.size(); ++k) {
        if (d_list[k].rows() != m || d_list[k].cols() != m)
            throw ValidationError("phi_point: D order mismatch");
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = 0; q < m; ++q) total(p, q) += lambdas[k] * d_list[k](p, q);
    }
    double worst = -1e300;
    for (const Complex& v : eig_complex(std::move(total))) worst = std::max(worst, v.real());
    return worst;
}

StabilityRegion stability_region(const RealMatrix& a, const std::vector<RealMatrix>& d_list,
                                 const GridSpec& grid) {
    if (!a.square()) throw ValidationError("stability_region: A must be square");
    if (d_list.empty() || d_list.size() > 2)
        throw ValidationError("stability_region: grid sampling supports r = 1 or 2 layers");
    if (grid.nre < 1 || grid.nim < 1) throw ValidationError("stability_region: empty grid");

    std::vector<Complex> slices = grid.second_layer_slices;
    if (d_list.size() == 1)
        slices = {Complex(0.0, 0.0)};
    else if (slices.empty())
        slices = {Complex(0.0, 0.0)};

    StabilityRegion region;
    region.samples.reserve(slices.size() * grid.nre * grid.nim);
    for (const Complex& lambda2 : slices) {
        for (std::size_t i = 0; i < grid.nre; ++i) {
            const double re = (grid.nre == 1)
                                  ? grid.re0
                                  : grid.re0 + (grid.re1 - grid.re0) * static_cast<double>(i) /
                                                   static_cast<double>(grid.nre - 1);
            for (std::size_t j = 0; j < grid.nim; ++j) {
                const double im = (grid.nim == 1)
                                      ? grid.im0
                                      : grid.im0 + (grid.im1 - grid.im0) * static_cast<double>(j) /
                                                       static_cast<double>(grid.nim - 1);
                StabilityRegion::Sample sample;
                sample.lambda1 = Complex(re, im);
                sample.lambda2 = (d_list.size() == 2) ? lambda2 : Complex(0.0, 0.0);
                std::vector<Complex> point{sample.lambda1};
                if (d_list.size() == 2) point.push_back(sample.lambda2);
                sample.phi = phi_point(a, d_list, point);
                region.samples.push_back(sample);
            }
        }
    }
    return region;
}

SyncVerdict is_synchronizing_linear(const RealMatrix& a, const std::vector<double>& affine_offset,
                                    const CommutingFamily& g_family,
                                    const std::vector<RealMatrix>& d_list) {
    (void)affine_offset;  // shifts the synchronized trajectory, not the transverse spectrum
    if (d_list.size() != g_family.member_count())
        throw ValidationError("is_synchronizing_linear: need one D per layer");
    const JointZeroIndex consensus = joint_zero_index(g_family);

    double worst_phi = -1e300;
    std::size_t worst_index = 0;
    for (std::size_t j = 0; j < g_family.order(); ++j) {
        if (j == consensus.index) continue;
        std::vector<Complex> point(g_family.member_count());
        for (std::size_t k = 0; k < g_family.member_count(); ++k) {
            // State equation couples through -G_k x D_k, so the transverse
            // blocks are A - sum_k lambda_kj D_k.
            point[k] = -g_family.joint_table[k][j];
        }
        const double phi = phi_point(a, d_list, point);
        if (phi > worst_phi) {
            worst_phi = phi;
            worst_index = j;
        }
    }

    SyncVerdict verdict;
    verdict.criterion = "linear";
    verdict.margin = -worst_phi;
    verdict.satisfied = worst_phi < 0.0;
    std::ostringstream det;
    det << "max_j phi(A - sum_k lambda_kj D_k) = " << worst_phi << " at position " << worst_index;
    verdict.details = det.str();
    return verdict;
}

double affine_contraction(const RealMatrix& a, const RealMatrix& p) {
    return -eig_sym(sym_part(a - p)).back();
}

}  // namespace multisync
