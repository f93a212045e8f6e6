#include "multisync/spectra.hpp"

#include "multisync/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace multisync {

namespace {

double commutator_residual(const RealMatrix& a, const RealMatrix& b) {
    return (a * b - b * a).frobenius_norm();
}

bool all_zero_row_sums(const std::vector<RealMatrix>& ms) {
    for (const RealMatrix& m : ms) {
        const double scale = std::max(1.0, m.frobenius_norm());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double rowsum = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) rowsum += m(i, j);
            if (std::abs(rowsum) > 1e-10 * scale) return false;
        }
    }
    return true;
}

void validate_members(const std::vector<RealMatrix>& ms) {
    if (ms.empty()) throw ValidationError("make_family: empty member list");
    const std::size_t n = ms.front().rows();
    for (const RealMatrix& m : ms) {
        if (!m.square() || m.rows() != n)
            throw ValidationError("make_family: members must be square and share one order");
        ensure_finite(m, "make_family");
    }
}

}  // namespace

CommutingFamily make_family(const std::vector<RealMatrix>& ms, std::uint64_t seed) {
    validate_members(ms);
    const std::size_t n = ms.front().rows();
    const std::size_t r = ms.size();

    double worst = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            const double res = commutator_residual(ms[i], ms[j]);
            const double limit = 1e-8 * std::max(1.0, ms[i].frobenius_norm() * ms[j].frobenius_norm());
            if (res > limit) {
                std::ostringstream msg;
                msg << "make_family: members " << i << " and " << j
                    << " do not commute (residual " << res << ")";
                throw ValidationError(msg.str());
            }
            worst = std::max(worst, res);
        }

    const bool zero_rows = all_zero_row_sums(ms);
    std::vector<double> scales(r);
    for (std::size_t i = 0; i < r; ++i) scales[i] = std::max(1.0, ms[i].frobenius_norm());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(0.5, 1.5);

    std::string last_failure;
    for (int attempt = 0; attempt < 5; ++attempt) {
        RealMatrix combo(n, n);
        for (std::size_t i = 0; i < r; ++i) {
            const double c = coeff(rng);
            RealMatrix scaled = ms[i];
            scaled *= c;
            combo += scaled;
        }
        RealEigenSystem sys;
        try {
            sys = eig_full(combo);
        } catch (const NumericalError& err) {
            last_failure = err.what();
            continue;
        }

        // Snap the position nearest the all-ones direction onto it exactly,
        // so zero-row-sum families get an exact joint zero column.
        if (zero_rows) {
            const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
            std::size_t best = 0;
            double best_overlap = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                Complex dot(0.0, 0.0);
                for (std::size_t i = 0; i < n; ++i) dot += std::conj(sys.vectors(i, j));
                const double overlap = std::abs(dot) * inv_sqrt_n;
                if (overlap > best_overlap) {
                    best_overlap = overlap;
                    best = j;
                }
            }
            if (best_overlap > 0.9) {
                for (std::size_t i = 0; i < n; ++i)
                    sys.vectors(i, best) = Complex(inv_sqrt_n, 0.0);
            }
        }

        // Rayleigh quotients through the shared eigenvectors, with a residual
        // check that rejects mixtures from degenerate combination eigenvalues.
        std::vector<std::vector<Complex>> table(r, std::vector<Complex>(n));
        bool ok = true;
        for (std::size_t i = 0; i < r && ok; ++i) {
            const ComplexMatrix a = ComplexMatrix::from_real(ms[i]);
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Complex> v(n);
                for (std::size_t k = 0; k < n; ++k) v[k] = sys.vectors(k, j);
                const std::vector<Complex> av = a * v;
                Complex lambda(0.0, 0.0);
                double vnorm2 = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    lambda += std::conj(v[k]) * av[k];
                    vnorm2 += std::norm(v[k]);
                }
                lambda /= vnorm2;
                double resid2 = 0.0;
                for (std::size_t k = 0; k < n; ++k) resid2 += std::norm(av[k] - lambda * v[k]);
                if (std::sqrt(resid2) > 1e-6 * scales[i] * std::sqrt(vnorm2)) {
                    ok = false;
                    std::ostringstream msg;
                    msg << "alignment residual " << std::sqrt(resid2) << " at member " << i
                        << ", position " << j;
                    last_failure = msg.str();
                    break;
                }
                table[i][j] = lambda;
            }
        }
        if (!ok) continue;

        CommutingFamily family;
        family.members = ms;
        family.joint_table = std::move(table);
        family.alignment_vectors = std::move(sys.vectors);
        family.commutation_residual = worst;
        return family;
    }

    throw NumericalError(
        "make_family: could not align eigenvalues after 5 attempts (family may be "
        "defective); last failure: " +
        last_failure);
}

RealMatrix matrix_polynomial(const RealMatrix& a, const std::vector<double>& coeffs) {
    if (!a.square()) throw ValidationError("matrix_polynomial: matrix must be square");
    if (coeffs.empty()) throw ValidationError("matrix_polynomial: empty coefficient list");
    const std::size_t n = a.rows();
    RealMatrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) p(i, i) = coeffs.back();
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
        p = p * a;
        for (std::size_t i = 0; i < n; ++i) p(i, i) += coeffs[k];
    }
    return p;
}

CommutingFamily polynomial_family(const RealMatrix& a,
                                  const std::vector<std::vector<double>>& polys) {
    if (polys.empty()) throw ValidationError("polynomial_family: empty polynomial list");
    if (!a.square()) throw ValidationError("polynomial_family: matrix must be square");
    ensure_finite(a, "polynomial_family");

    const std::size_t n = a.rows();
    const RealEigenSystem base = eig_full(a);

    CommutingFamily family;
    family.members.reserve(polys.size());
    family.joint_table.reserve(polys.size());
    for (const std::vector<double>& coeffs : polys) {
        family.members.push_back(matrix_polynomial(a, coeffs));
        std::vector<Complex> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            Complex value(coeffs.back(), 0.0);
            for (std::size_t k = coeffs.size() - 1; k-- > 0;)
                value = value * base.values[j] + coeffs[k];
            row[j] = value;
        }
        family.joint_table.push_back(std::move(row));
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < family.members.size(); ++i)
        for (std::size_t j = i + 1; j < family.members.size(); ++j)
            worst = std::max(worst, commutator_residual(family.members[i], family.members[j]));
    family.commutation_residual = worst;

    // Keep the eigenvectors only when they genuinely diagonalize A.
    bool vectors_good = true;
    const ComplexMatrix ac = ComplexMatrix::from_real(a);
    for (std::size_t j = 0; j < n && vectors_good; ++j) {
        std::vector<Complex> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = base.vectors(k, j);
        const std::vector<Complex> av = ac * v;
        double resid2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) resid2 += std::norm(av[k] - base.values[j] * v[k]);
        vectors_good = std::sqrt(resid2) <= 1e-6 * std::max(1.0, a.frobenius_norm());
    }
    if (vectors_good) family.alignment_vectors = base.vectors;
    return family;
}

ComplexSpectrum kron_sum_spectrum(const CommutingFamily& family,
                                  const std::vector<RealMatrix>& bs) {
    if (bs.size() != family.member_count())
        throw ValidationError("kron_sum_spectrum: need one B per family member");
    if (bs.empty()) throw ValidationError("kron_sum_spectrum: empty family");
    const std::size_t m = bs.front().rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        if (!bs[i].square() || bs[i].rows() != m)
            throw ValidationError("kron_sum_spectrum: B matrices must be square of one order");
        ensure_finite(bs[i], "kron_sum_spectrum");
        scale += family.members[i].frobenius_norm() * bs[i].frobenius_norm();
    }

    const std::size_t n = family.order();
    std::vector<Complex> values;
    values.reserve(n * m);
    for (std::size_t j = 0; j < n; ++j) {
        ComplexMatrix combo(m, m);
        for (std::size_t i = 0; i < bs.size(); ++i) {
            const Complex lambda = family.joint_table[i][j];
            for (std::size_t p = 0; p < m; ++p)
                for (std::size_t q = 0; q < m; ++q) combo(p, q) += lambda * bs[i](p, q);
        }
        for (const Complex& gamma : eig_complex(std::move(combo))) values.push_back(gamma);
    }
    return sorted_spectrum(std::move(values), scale);
}

std::size_t zero_multiplicity(const RealMatrix& m, double tol) {
    const ComplexSpectrum spectrum = eig(m);
    const double limit = tol * std::max(1.0, m.frobenius_norm());
    std::size_t count = 0;
    for (const Complex& v : spectrum.values)
        if (std::abs(v) <= limit) ++count;
    return count;
}

JointZeroIndex joint_zero_index(const CommutingFamily& family, double tol) {
    const std::size_t n = family.order();
    const std::size_t r = family.member_count();
    if (r == 0) throw ValidationError("joint_zero_index: empty family");
    if (!all_zero_row_sums(family.members))
        throw HypothesisError("joint_zero_index: members must have zero row sums");

    std::vector<std::size_t> zeros;
    for (std::size_t j = 0; j < n; ++j) {
        bool all_zero = true;
        for (std::size_t i = 0; i < r; ++i) {
            const double limit = tol * std::max(1.0, family.members[i].frobenius_norm());
            if (std::abs(family.joint_table[i][j]) > limit) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) zeros.push_back(j);
    }

    if (zeros.size() != 1) {
        std::ostringstream msg;
        msg << "joint_zero_index: expected exactly one joint zero position, found "
            << zeros.size() << " {";
        for (std::size_t i = 0; i < zeros.size(); ++i) msg << (i ? "," : "") << zeros[i];
        msg << "}";
        // When the members are graph Laplacians, say whether the layer sum's
        // reversal has a spanning directed tree.
        bool graph_like = true;
        for (const RealMatrix& m : family.members)
            for (std::size_t i = 0; i < n && graph_like; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j && m(i, j) > 1e-12) {
                        graph_like = false;
                        break;
                    }
        if (graph_like) {
            RealMatrix sum(n, n);
            for (const RealMatrix& m : family.members) sum += m;
            const WeightedDigraph sum_graph = digraph_from_laplacian(LaplacianMatrix(sum));
            const SpanningTreeReport tree = has_spanning_directed_tree(reversal(sum_graph));
            msg << "; layer-sum reversal " << (tree.has_tree ? "has" : "lacks")
                << " a spanning directed tree";
        }
        throw HypothesisError(msg.str());
    }

    JointZeroIndex out;
    out.index = zeros.front();
    out.eigenvector.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
    return out;
}

}  // namespace multisync
