#pragma once

// Test-only oracles, all independent of the library's eigenvalue path:
// exact characteristic polynomials over Z[x], Durand-Kerner root finding,
// the circulant eigenvalue formula, adjacency-list reachability, and
// tolerance-aware multiset matching.

#include "multisync/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracles {

using multisync::Complex;
using multisync::RealMatrix;

// Polynomial with integer coefficients, ascending degree.
using IntPoly = std::vector<long long>;

inline IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
    IntPoly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline IntPoly poly_add(IntPoly a, const IntPoly& b) {
    if (b.size() > a.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

inline IntPoly poly_scale(IntPoly a, long long s) {
    for (long long& v : a) v *= s;
    return a;
}

// det(x I - A) by cofactor expansion over Z[x]; A must be integral.
inline IntPoly char_poly(const std::vector<std::vector<long long>>& a) {
    const std::size_t n = a.size();
    // entries of x I - A as degree-<=1 polynomials
    std::vector<std::vector<IntPoly>> m(n, std::vector<IntPoly>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = (i == j) ? IntPoly{-a[i][j], 1} : IntPoly{-a[i][j]};

    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;

    // recursive expansion over the first remaining row
    struct Expander {
        const std::vector<std::vector<IntPoly>>& m;
        IntPoly run(std::size_t row, std::vector<std::size_t> cols) {
            if (cols.size() == 1) return m[row][cols[0]];
            IntPoly det{0};
            for (std::size_t k = 0; k < cols.size(); ++k) {
                std::vector<std::size_t> rest;
                rest.reserve(cols.size() - 1);
                for (std::size_t l = 0; l < cols.size(); ++l)
                    if (l != k) rest.push_back(cols[l]);
                IntPoly minor = run(row + 1, rest);
                IntPoly term = poly_mul(m[row][cols[k]], minor);
                det = poly_add(std::move(det), (k % 2 == 0) ? term : poly_scale(term, -1));
            }
            return det;
        }
    };
    return Expander{m}.run(0, cols);
}

// Durand-Kerner on a monic-izable polynomial (ascending coefficients).
inline std::vector<Complex> poly_roots(const std::vector<double>& coeffs) {
    std::size_t deg = coeffs.size() - 1;
    while (deg > 0 && coeffs[deg] == 0.0) --deg;
    std::vector<Complex> c(deg + 1);
    for (std::size_t i = 0; i <= deg; ++i) c[i] = coeffs[i] / coeffs[deg];

    std::vector<Complex> z(deg);
    Complex seed(0.4, 0.9);
    Complex acc(1.0, 0.0);
    for (std::size_t i = 0; i < deg; ++i) {
        acc *= seed;
        z[i] = acc;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            Complex p(c[deg]);
            for (std::size_t k = deg; k-- > 0;) p = p * z[i] + c[k];
            Complex denom(1.0, 0.0);
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            const Complex delta = p / denom;
            z[i] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

inline std::vector<Complex> int_matrix_eigs(const std::vector<std::vector<long long>>& a) {
    const IntPoly p = char_poly(a);
    std::vector<double> coeffs(p.begin(), p.end());
    return poly_roots(coeffs);
}

// Eigenvalues of the circulant matrix with first row c: sum_k c_k w^(jk).
inline std::vector<Complex> circulant_eigs(const std::vector<double>& first_row) {
    const std::size_t n = first_row.size();
    std::vector<Complex> out(n);
    const double tau = 2.0 * 3.14159265358979323846;
    for (std::size_t j = 0; j < n; ++j) {
        Complex sum(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double angle = tau * static_cast<double>(j) * static_cast<double>(k) /
                                 static_cast<double>(n);
            sum += first_row[k] * Complex(std::cos(angle), std::sin(angle));
        }
        out[j] = sum;
    }
    return out;
}

// Circulant matrix with first row c, C(i, j) = c[(j - i) mod n].
inline RealMatrix circulant(const std::vector<double>& first_row) {
    const std::size_t n = first_row.size();
    RealMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = first_row[(j + n - i) % n];
    return m;
}

// Circulant Laplacian from nonnegative off-diagonal generator weights:
// first row (sum(w), -w_1, ..., -w_{n-1}).
inline RealMatrix circulant_laplacian(const std::vector<double>& offdiag) {
    std::vector<double> row(offdiag.size() + 1, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < offdiag.size(); ++k) {
        row[k + 1] = -offdiag[k];
        total += offdiag[k];
    }
    row[0] = total;
    return circulant(row);
}

// Plain adjacency-list BFS; edge u -> v present when weight(v, u) > 0.
inline bool reaches_all(const RealMatrix& weights, std::size_t start) {
    const std::size_t n = weights.rows();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v)
            if (!seen[v] && weights(v, u) > 0.0) {
                seen[v] = true;
                stack.push_back(v);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

inline bool spanning_tree_oracle(const RealMatrix& weights) {
    for (std::size_t r = 0; r < weights.rows(); ++r)
        if (reaches_all(weights, r)) return true;
    return false;
}

// Greedy global-minimum matching of two complex multisets.
inline bool multiset_match(std::vector<Complex> a, std::vector<Complex> b, double tol) {
    if (a.size() != b.size()) return false;
    while (!a.empty()) {
        double best = 1e300;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        if (best > tol) return false;
        a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return true;
}

inline std::vector<Complex> to_complex(const std::vector<double>& v) {
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = Complex(v[i], 0.0);
    return out;
}

}  // namespace oracles
