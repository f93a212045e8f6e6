#pragma once

#include "multisync/eigen.hpp"
#include "multisync/matrix.hpp"

#include <cstdint>

namespace multisync {

/// A family of pairwise-commuting square matrices together with a joint
/// eigenvalue table: joint_table[i][j] is the eigenvalue of member i at
/// alignment position j, positions being shared across members (common
/// eigenvectors when the family is diagonalizable).
struct CommutingFamily {
    std::vector<RealMatrix> members;
    std::vector<std::vector<Complex>> joint_table;  // [member][position]
    ComplexMatrix alignment_vectors;                // column per position; may be empty
    double commutation_residual = 0.0;

    std::size_t order() const { return members.empty() ? 0 : members.front().rows(); }
    std::size_t member_count() const { return members.size(); }
    bool has_alignment_vectors() const { return alignment_vectors.rows() > 0; }
};

/// Joint index at which every member's eigenvalue vanishes; its eigenvector
/// is the all-ones direction.
struct JointZeroIndex {
    std::size_t index = 0;
    std::vector<double> eigenvector;
};

/// Builds a commuting family by diagonalizing a random linear combination of
/// the members and reading each member's eigenvalues through the shared
/// eigenvectors. Retries with fresh combination weights when the alignment
/// residuals fail; rejects defective families.
CommutingFamily make_family(const std::vector<RealMatrix>& ms, std::uint64_t seed = 42);

/// Family {p_1(A), ..., p_r(A)}; alignment is analytic via the spectral
/// mapping, so this also covers non-diagonalizable A. Coefficients are
/// ascending: {c0, c1, c2} means c0 + c1 x + c2 x^2.
CommutingFamily polynomial_family(const RealMatrix& a,
                                  const std::vector<std::vector<double>>& polys);

/// Evaluates p(A) by Horner's rule (ascending coefficients).
RealMatrix matrix_polynomial(const RealMatrix& a, const std::vector<double>& coeffs);

/// Spectrum of sum_i A_i (x) B_i computed from the joint table: for each
/// position j, the eigenvalues of sum_i lambda_ij B_i.
ComplexSpectrum kron_sum_spectrum(const CommutingFamily& family,
                                  const std::vector<RealMatrix>& bs);

/// Number of eigenvalues with modulus <= tol * max(1, ||M||_F).
std::size_t zero_multiplicity(const RealMatrix& m, double tol = 1e-7);

/// The unique position where every member's eigenvalue is zero. Throws
/// HypothesisError when no or several such positions exist (e.g. the layer
/// sum lacks a spanning directed tree).
JointZeroIndex joint_zero_index(const CommutingFamily& family, double tol = 1e-7);

}  // namespace multisync
