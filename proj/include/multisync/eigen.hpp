#pragma once

#include "multisync/matrix.hpp"

namespace multisync {

/// Eigenvalues with algebraic multiplicity, sorted by (real asc, imag asc).
/// Values whose imaginary part is below the pairing tolerance are snapped to
/// the real axis, so spectra of real matrices stay closed under conjugation.
struct ComplexSpectrum {
    std::vector<Complex> values;

    std::size_t size() const { return values.size(); }
    const Complex& operator[](std::size_t i) const { return values[i]; }
};

/// Full real eigendecomposition: values in solver order (conjugate pairs
/// adjacent), vectors holds the matching unit-norm right eigenvectors as
/// columns.
struct RealEigenSystem {
    std::vector<Complex> values;
    ComplexMatrix vectors;
};

/// Symmetric eigendecomposition: ascending values, orthonormal columns.
struct SymmetricEigenSystem {
    std::vector<double> values;
    RealMatrix vectors;
};

struct PsdVerdict {
    bool is_psd = false;
    double min_sym_eigenvalue = 0.0;
    double tolerance_used = 0.0;
};

/// Eigenvalues of a general square real matrix (Hessenberg + Francis QR).
ComplexSpectrum eig(const RealMatrix& a);

/// Eigenvalues and right eigenvectors of a general square real matrix.
RealEigenSystem eig_full(const RealMatrix& a);

/// Eigenvalues of a symmetric matrix, ascending. Rejects asymmetric input.
std::vector<double> eig_sym(const RealMatrix& a);

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix.
SymmetricEigenSystem eig_sym_full(const RealMatrix& a);

/// Eigenvalues of a general complex square matrix (Hessenberg + shifted QR),
/// in deflation order.
std::vector<Complex> eig_complex(ComplexMatrix h);

/// Eigenvalues of a Hermitian matrix, ascending, computed through the
/// symmetric 2m x 2m real embedding [[X, -Y], [Y, X]].
std::vector<double> hermitian_eig(const ComplexMatrix& h);

/// Positive semidefiniteness in the A + A^T sense: verdict on
/// lambda_min((A + A^T)/2) >= -tol * max(1, ||A||_F).
PsdVerdict is_psd(const RealMatrix& a, double tol = 1e-9);

/// Upper-triangular C with V = C^T C for symmetric positive definite V.
/// Reports the offending pivot index when V is not positive definite.
RealMatrix cholesky_factor(const RealMatrix& v);

/// n x (n-1) matrix Q with orthonormal columns spanning the complement of
/// the all-ones vector: Q^T Q = I, Q^T e = 0 (Householder construction).
RealMatrix basis_e_perp(std::size_t n);

/// Largest singular value.
double spectral_norm(const RealMatrix& a);
double spectral_norm(const ComplexMatrix& a);

/// Snap near-real values to the real axis and sort by (re, im).
/// `scale` is the norm of the source matrix used for the snapping tolerance.
ComplexSpectrum sorted_spectrum(std::vector<Complex> values, double scale);

}  // namespace multisync
