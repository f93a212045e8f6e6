#pragma once

#include "multisync/spectra.hpp"
#include "multisync/system.hpp"

#include <string>

namespace multisync {

/// Outcome of a synchronization criterion: `margin` is the smallest slack
/// eigenvalue (or inequality gap), so satisfied tracks margin >= -tol for the
/// semidefinite checks and margin > tol for the strict norm criterion.
struct SyncVerdict {
    std::string criterion;
    bool satisfied = false;
    double margin = 0.0;
    std::string details;
};

/// Full matrix condition (U x V)(sum_k G_k x D_k - I x P) psd, U in class W
/// and irreducible, V symmetric positive definite.
SyncVerdict check_eq2(const MultiNetworkSystem& sys, const RealMatrix& u, double tol = 1e-7);

/// Coupling threshold for commuting normal Laplacian layers whose graph-sum
/// reversal has a spanning directed tree: c / (Re(lambda_L) Re(lambda_D)),
/// lambda_L the nonzero joint eigenvalue with minimal real part, lambda_D the
/// minimal-real-part eigenvalue over the convex hull of the D_k.
double threshold_spanning_tree(const CommutingFamily& l_family,
                               const std::vector<RealMatrix>& d_list, double c);

/// Per-layer condition U(G_k - xi I) psd for a class-W irreducible U, given
/// V D_k psd for all k.
SyncVerdict check_theorem4(const std::vector<LaplacianMatrix>& g_list,
                           const std::vector<RealMatrix>& d_list, const RealMatrix& v, double xi,
                           const RealMatrix& u, double tol = 1e-7);

/// Balanced-layer condition lambda_2(sym(G_k)) >= xi; needs zero row and
/// column sums and a simple zero eigenvalue of each symmetric part.
SyncVerdict check_theorem5(const std::vector<LaplacianMatrix>& g_list, double xi,
                           double tol = 1e-9);

/// Discrete-time criterion: for every joint eigenvalue position except the
/// consensus one, || I - sum_k lambda_kj C D_k C^-1 ||_2 < 1/sqrt(c) with
/// V = C^T C. Margin is the worst gap; satisfied means strictly positive.
SyncVerdict discrete_criterion(const CommutingFamily& g_family,
                               const std::vector<RealMatrix>& d_list, const RealMatrix& v,
                               double c, double tol = 1e-9);

/// Largest real part among eigenvalues of A + sum_k lambda_k D_k.
double phi_point(const RealMatrix& a, const std::vector<RealMatrix>& d_list,
                 const std::vector<Complex>& lambdas);

struct GridSpec {
    double re0 = -2.0, re1 = 2.0;
    double im0 = -2.0, im1 = 2.0;
    std::size_t nre = 41, nim = 41;
    std::vector<Complex> second_layer_slices;  // lambda_2 values when r == 2
};

struct StabilityRegion {
    struct Sample {
        Complex lambda1;
        Complex lambda2;  // 0 when r == 1
        double phi = 0.0;
    };
    std::vector<Sample> samples;
};

/// Samples phi over a rectangular grid in the first layer's eigenvalue plane
/// (optionally repeated per second-layer slice); the boundary of the
/// stability region is recoverable from sign changes.
StabilityRegion stability_region(const RealMatrix& a, const std::vector<RealMatrix>& d_list,
                                 const GridSpec& grid);

/// Linear node dynamics f(x) = A x + b: synchronizing iff every non-consensus
/// joint eigenvalue tuple satisfies phi < 0. The affine offset only shifts
/// the synchronized trajectory and is ignored.
SyncVerdict is_synchronizing_linear(const RealMatrix& a, const std::vector<double>& affine_offset,
                                    const CommutingFamily& g_family,
                                    const std::vector<RealMatrix>& d_list);

/// One-sided contraction constant of f(x) = A x + b under feedback P with
/// V = I: -lambda_max(sym(A - P)).
double affine_contraction(const RealMatrix& a, const RealMatrix& p);

/// Class-W membership plus irreducibility of the support (symmetric, zero
/// row sums, nonpositive off-diagonals). Throws HypothesisError when not.
void require_class_w(const RealMatrix& u, const std::string& context);

}  // namespace multisync
