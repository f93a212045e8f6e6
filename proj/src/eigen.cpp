#include "multisync/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace multisync {

namespace {

constexpr double kMachEps = 2.220446049250313e-16;

// Index shorthand for the dense working arrays used by the QR kernels.
struct Workspace {
    int n = 0;
    std::vector<double> h;  // n x n, row-major
    std::vector<double> v;  // n x n, row-major
    std::vector<double> d;  // real parts
    std::vector<double> e;  // imaginary parts / off-diagonal
    std::vector<double> ort;

    explicit Workspace(const RealMatrix& a)
        : n(static_cast<int>(a.rows())),
          h(a.data()),
          v(static_cast<std::size_t>(n) * n, 0.0),
          d(n, 0.0),
          e(n, 0.0),
          ort(n, 0.0) {}

    double& H(int i, int j) { return h[static_cast<std::size_t>(i) * n + j]; }
    double& V(int i, int j) { return v[static_cast<std::size_t>(i) * n + j]; }
};

struct Cdiv {
    double re = 0.0;
    double im = 0.0;
};

// Complex scalar division (xr + i*xi) / (yr + i*yi), Smith's algorithm.
Cdiv cdiv(double xr, double xi, double yr, double yi) {
    Cdiv out;
    if (std::abs(yr) > std::abs(yi)) {
        const double r = yi / yr;
        const double den = yr + r * yi;
        out.re = (xr + r * xi) / den;
        out.im = (xi - r * xr) / den;
    } else {
        const double r = yr / yi;
        const double den = yi + r * yr;
        out.re = (r * xr + xi) / den;
        out.im = (r * xi - xr) / den;
    }
    return out;
}

// Symmetric Householder reduction to tridiagonal form (Algol tred2,
// Bowdler/Martin/Reinsch/Wilkinson; EISPACK lineage). Works on ws.v in place.
void tred2(Workspace& ws) {
    const int n = ws.n;
    for (int j = 0; j < n; ++j) ws.d[j] = ws.V(n - 1, j);

    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double hh = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(ws.d[k]);
        if (scale == 0.0) {
            ws.e[i] = ws.d[i - 1];
            for (int j = 0; j < i; ++j) {
                ws.d[j] = ws.V(i - 1, j);
                ws.V(i, j) = 0.0;
                ws.V(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                ws.d[k] /= scale;
                hh += ws.d[k] * ws.d[k];
            }
            double f = ws.d[i - 1];
            double g = std::sqrt(hh);
            if (f > 0) g = -g;
            ws.e[i] = scale * g;
            hh -= f * g;
            ws.d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) ws.e[j] = 0.0;

            for (int j = 0; j < i; ++j) {
                f = ws.d[j];
                ws.V(j, i) = f;
                g = ws.e[j] + ws.V(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += ws.V(k, j) * ws.d[k];
                    ws.e[k] += ws.V(k, j) * f;
                }
                ws.e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                ws.e[j] /= hh;
                f += ws.e[j] * ws.d[j];
            }
            const double scale2 = f / (hh + hh);
            for (int j = 0; j < i; ++j) ws.e[j] -= scale2 * ws.d[j];
            for (int j = 0; j < i; ++j) {
                f = ws.d[j];
                g = ws.e[j];
                for (int k = j; k <= i - 1; ++k) ws.V(k, j) -= (f * ws.e[k] + g * ws.d[k]);
                ws.d[j] = ws.V(i - 1, j);
                ws.V(i, j) = 0.0;
            }
        }
        ws.d[i] = hh;
    }

    for (int i = 0; i < n - 1; ++i) {
        ws.V(n - 1, i) = ws.V(i, i);
        ws.V(i, i) = 1.0;
        const double hh = ws.d[i + 1];
        if (hh != 0.0) {
            for (int k = 0; k <= i; ++k) ws.d[k] = ws.V(k, i + 1) / hh;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += ws.V(k, i + 1) * ws.V(k, j);
                for (int k = 0; k <= i; ++k) ws.V(k, j) -= g * ws.d[k];
            }
        }
        for (int k = 0; k <= i; ++k) ws.V(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        ws.d[j] = ws.V(n - 1, j);
        ws.V(n - 1, j) = 0.0;
    }
    ws.V(n - 1, n - 1) = 1.0;
    ws.e[0] = 0.0;
}

// Symmetric tridiagonal QL with implicit shifts (Algol tql2), eigenvalues
// sorted ascending with matching eigenvector columns.
void tql2(Workspace& ws) {
    const int n = ws.n;
    for (int i = 1; i < n; ++i) ws.e[i - 1] = ws.e[i];
    ws.e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(ws.d[l]) + std::abs(ws.e[l]));
        int m = l;
        while (m < n) {
            if (std::abs(ws.e[m]) <= kMachEps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 60) throw NumericalError("eig_sym: QL iteration failed to converge");

                double g = ws.d[l];
                double p = (ws.d[l + 1] - g) / (2.0 * ws.e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                ws.d[l] = ws.e[l] / (p + r);
                ws.d[l + 1] = ws.e[l] * (p + r);
                const double dl1 = ws.d[l + 1];
                double hh = g - ws.d[l];
                for (int i = l + 2; i < n; ++i) ws.d[i] -= hh;
                f += hh;

                p = ws.d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = ws.e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * ws.e[i];
                    hh = c * p;
                    r = std::hypot(p, ws.e[i]);
                    ws.e[i + 1] = s * r;
                    s = ws.e[i] / r;
                    c = p / r;
                    p = c * ws.d[i] - s * g;
                    ws.d[i + 1] = hh + s * (c * g + s * ws.d[i]);

                    for (int k = 0; k < n; ++k) {
                        hh = ws.V(k, i + 1);
                        ws.V(k, i + 1) = s * ws.V(k, i) + c * hh;
                        ws.V(k, i) = c * ws.V(k, i) - s * hh;
                    }
                }
                p = -s * s2 * c3 * el1 * ws.e[l] / dl1;
                ws.e[l] = s * p;
                ws.d[l] = c * p;
            } while (std::abs(ws.e[l]) > kMachEps * tst1);
        }
        ws.d[l] += f;
        ws.e[l] = 0.0;
    }

    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        double p = ws.d[i];
        for (int j = i + 1; j < n; ++j) {
            if (ws.d[j] < p) {
                k = j;
                p = ws.d[j];
            }
        }
        if (k != i) {
            ws.d[k] = ws.d[i];
            ws.d[i] = p;
            for (int j = 0; j < n; ++j) std::swap(ws.V(j, i), ws.V(j, k));
        }
    }
}

// Householder reduction to upper Hessenberg form with accumulated
// transformations (Algol orthes/ortran).
void orthes(Workspace& ws) {
    const int n = ws.n;
    const int low = 0;
    const int high = n - 1;

    for (int m = low + 1; m <= high - 1; ++m) {
        double scale = 0.0;
        for (int i = m; i <= high; ++i) scale += std::abs(ws.H(i, m - 1));
        if (scale != 0.0) {
            double hh = 0.0;
            for (int i = high; i >= m; --i) {
                ws.ort[i] = ws.H(i, m - 1) / scale;
                hh += ws.ort[i] * ws.ort[i];
            }
            double g = std::sqrt(hh);
            if (ws.ort[m] > 0) g = -g;
            hh -= ws.ort[m] * g;
            ws.ort[m] -= g;

            for (int j = m; j < n; ++j) {
                double f = 0.0;
                for (int i = high; i >= m; --i) f += ws.ort[i] * ws.H(i, j);
                f /= hh;
                for (int i = m; i <= high; ++i) ws.H(i, j) -= f * ws.ort[i];
            }
            for (int i = 0; i <= high; ++i) {
                double f = 0.0;
                for (int j = high; j >= m; --j) f += ws.ort[j] * ws.H(i, j);
                f /= hh;
                for (int j = m; j <= high; ++j) ws.H(i, j) -= f * ws.ort[j];
            }
            ws.ort[m] *= scale;
            ws.H(m, m - 1) = scale * g;
        }
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ws.V(i, j) = (i == j) ? 1.0 : 0.0;

    for (int m = high - 1; m >= low + 1; --m) {
        if (ws.H(m, m - 1) != 0.0) {
            for (int i = m + 1; i <= high; ++i) ws.ort[i] = ws.H(i, m - 1);
            for (int j = m; j <= high; ++j) {
                double g = 0.0;
                for (int i = m; i <= high; ++i) g += ws.ort[i] * ws.V(i, j);
                g = (g / ws.ort[m]) / ws.H(m, m - 1);
                for (int i = m; i <= high; ++i) ws.V(i, j) += g * ws.ort[i];
            }
        }
    }
}

// Francis double-shift QR on a Hessenberg matrix, with eigenvector
// back-substitution (Algol hqr2). Values land in ws.d/ws.e, vectors in ws.v
// with complex pairs encoded in adjacent columns.
void hqr2(Workspace& ws) {
    const int nn = ws.n;
    int n = nn - 1;
    const int low = 0;
    const int high = nn - 1;
    const double eps = kMachEps;
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, t, w, x, y;

    double norm = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(ws.H(i, j));
    if (norm == 0.0) return;  // zero matrix: d, e already hold the spectrum

    int iter = 0;
    int total_iter = 0;
    while (n >= low) {
        if (++total_iter > 80 * nn)
            throw NumericalError("eig: QR iteration failed to converge");

        int l = n;
        while (l > low) {
            s = std::abs(ws.H(l - 1, l - 1)) + std::abs(ws.H(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(ws.H(l, l - 1)) < eps * s) break;
            --l;
        }

        if (l == n) {
            ws.H(n, n) += exshift;
            ws.d[n] = ws.H(n, n);
            ws.e[n] = 0.0;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            w = ws.H(n, n - 1) * ws.H(n - 1, n);
            p = (ws.H(n - 1, n - 1) - ws.H(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            ws.H(n, n) += exshift;
            ws.H(n - 1, n - 1) += exshift;
            x = ws.H(n, n);

            if (q >= 0) {
                z = (p >= 0) ? (p + z) : (p - z);
                ws.d[n - 1] = x + z;
                ws.d[n] = ws.d[n - 1];
                if (z != 0.0) ws.d[n] = x - w / z;
                ws.e[n - 1] = 0.0;
                ws.e[n] = 0.0;
                x = ws.H(n, n - 1);
                s = std::abs(x) + std::abs(z);
                p = x / s;
                q = z / s;
                r = std::sqrt(p * p + q * q);
                p /= r;
                q /= r;

                for (int j = n - 1; j < nn; ++j) {
                    z = ws.H(n - 1, j);
                    ws.H(n - 1, j) = q * z + p * ws.H(n, j);
                    ws.H(n, j) = q * ws.H(n, j) - p * z;
                }
                for (int i = 0; i <= n; ++i) {
                    z = ws.H(i, n - 1);
                    ws.H(i, n - 1) = q * z + p * ws.H(i, n);
                    ws.H(i, n) = q * ws.H(i, n) - p * z;
                }
                for (int i = low; i <= high; ++i) {
                    z = ws.V(i, n - 1);
                    ws.V(i, n - 1) = q * z + p * ws.V(i, n);
                    ws.V(i, n) = q * ws.V(i, n) - p * z;
                }
            } else {
                ws.d[n - 1] = x + p;
                ws.d[n] = x + p;
                ws.e[n - 1] = z;
                ws.e[n] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = ws.H(n, n);
            y = 0.0;
            w = 0.0;
            if (l < n) {
                y = ws.H(n - 1, n - 1);
                w = ws.H(n, n - 1) * ws.H(n - 1, n);
            }

            if (iter == 10) {
                exshift += x;
                for (int i = low; i <= n; ++i) ws.H(i, i) -= x;
                s = std::abs(ws.H(n, n - 1)) + std::abs(ws.H(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = low; i <= n; ++i) ws.H(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            ++iter;

            int m = n - 2;
            while (m >= l) {
                z = ws.H(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / ws.H(m + 1, m) + ws.H(m, m + 1);
                q = ws.H(m + 1, m + 1) - z - r - s;
                r = ws.H(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(ws.H(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    eps * (std::abs(p) *
                           (std::abs(ws.H(m - 1, m - 1)) + std::abs(z) + std::abs(ws.H(m + 1, m + 1)))))
                    break;
                --m;
            }

            for (int i = m + 2; i <= n; ++i) {
                ws.H(i, i - 2) = 0.0;
                if (i > m + 2) ws.H(i, i - 3) = 0.0;
            }

            for (int k = m; k <= n - 1; ++k) {
                const bool notlast = (k != n - 1);
                if (k != m) {
                    p = ws.H(k, k - 1);
                    q = ws.H(k + 1, k - 1);
                    r = notlast ? ws.H(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x != 0.0) {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                if (x == 0.0) break;
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s != 0) {
                    if (k != m)
                        ws.H(k, k - 1) = -s * x;
                    else if (l != m)
                        ws.H(k, k - 1) = -ws.H(k, k - 1);
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for (int j = k; j < nn; ++j) {
                        p = ws.H(k, j) + q * ws.H(k + 1, j);
                        if (notlast) {
                            p += r * ws.H(k + 2, j);
                            ws.H(k + 2, j) -= p * z;
                        }
                        ws.H(k, j) -= p * x;
                        ws.H(k + 1, j) -= p * y;
                    }
                    for (int i = 0; i <= std::min(n, k + 3); ++i) {
                        p = x * ws.H(i, k) + y * ws.H(i, k + 1);
                        if (notlast) {
                            p += z * ws.H(i, k + 2);
                            ws.H(i, k + 2) -= p * r;
                        }
                        ws.H(i, k) -= p;
                        ws.H(i, k + 1) -= p * q;
                    }
                    for (int i = low; i <= high; ++i) {
                        p = x * ws.V(i, k) + y * ws.V(i, k + 1);
                        if (notlast) {
                            p += z * ws.V(i, k + 2);
                            ws.V(i, k + 2) -= p * r;
                        }
                        ws.V(i, k) -= p;
                        ws.V(i, k + 1) -= p * q;
                    }
                }
            }
        }
    }

    if (norm == 0.0) return;

    for (n = nn - 1; n >= 0; --n) {
        p = ws.d[n];
        q = ws.e[n];

        if (q == 0) {
            int l = n;
            ws.H(n, n) = 1.0;
            for (int i = n - 1; i >= 0; --i) {
                w = ws.H(i, i) - p;
                r = 0.0;
                for (int j = l; j <= n; ++j) r += ws.H(i, j) * ws.H(j, n);
                if (ws.e[i] < 0.0) {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if (ws.e[i] == 0.0) {
                        ws.H(i, n) = (w != 0.0) ? (-r / w) : (-r / (eps * norm));
                    } else {
                        x = ws.H(i, i + 1);
                        y = ws.H(i + 1, i);
                        q = (ws.d[i] - p) * (ws.d[i] - p) + ws.e[i] * ws.e[i];
                        t = (x * s - z * r) / q;
                        ws.H(i, n) = t;
                        ws.H(i + 1, n) =
                            (std::abs(x) > std::abs(z)) ? ((-r - w * t) / x) : ((-s - y * t) / z);
                    }
                    t = std::abs(ws.H(i, n));
                    if ((eps * t) * t > 1)
                        for (int j = i; j <= n; ++j) ws.H(j, n) /= t;
                }
            }
        } else if (q < 0) {
            int l = n - 1;

            if (std::abs(ws.H(n, n - 1)) > std::abs(ws.H(n - 1, n))) {
                ws.H(n - 1, n - 1) = q / ws.H(n, n - 1);
                ws.H(n - 1, n) = -(ws.H(n, n) - p) / ws.H(n, n - 1);
            } else {
                const Cdiv c = cdiv(0.0, -ws.H(n - 1, n), ws.H(n - 1, n - 1) - p, q);
                ws.H(n - 1, n - 1) = c.re;
                ws.H(n - 1, n) = c.im;
            }
            ws.H(n, n - 1) = 0.0;
            ws.H(n, n) = 1.0;
            for (int i = n - 2; i >= 0; --i) {
                double ra = 0.0;
                double sa = 0.0;
                for (int j = l; j <= n; ++j) {
                    ra += ws.H(i, j) * ws.H(j, n - 1);
                    sa += ws.H(i, j) * ws.H(j, n);
                }
                w = ws.H(i, i) - p;

                if (ws.e[i] < 0.0) {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if (ws.e[i] == 0) {
                        const Cdiv c = cdiv(-ra, -sa, w, q);
                        ws.H(i, n - 1) = c.re;
                        ws.H(i, n) = c.im;
                    } else {
                        x = ws.H(i, i + 1);
                        y = ws.H(i + 1, i);
                        double vr = (ws.d[i] - p) * (ws.d[i] - p) + ws.e[i] * ws.e[i] - q * q;
                        const double vi = (ws.d[i] - p) * 2.0 * q;
                        if (vr == 0.0 && vi == 0.0)
                            vr = eps * norm *
                                 (std::abs(w) + std::abs(q) + std::abs(x) + std::abs(y) + std::abs(z));
                        const Cdiv c = cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        ws.H(i, n - 1) = c.re;
                        ws.H(i, n) = c.im;
                        if (std::abs(x) > (std::abs(z) + std::abs(q))) {
                            ws.H(i + 1, n - 1) = (-ra - w * ws.H(i, n - 1) + q * ws.H(i, n)) / x;
                            ws.H(i + 1, n) = (-sa - w * ws.H(i, n) - q * ws.H(i, n - 1)) / x;
                        } else {
                            const Cdiv c2 = cdiv(-r - y * ws.H(i, n - 1), -s - y * ws.H(i, n), z, q);
                            ws.H(i + 1, n - 1) = c2.re;
                            ws.H(i + 1, n) = c2.im;
                        }
                    }
                    t = std::max(std::abs(ws.H(i, n - 1)), std::abs(ws.H(i, n)));
                    if ((eps * t) * t > 1)
                        for (int j = i; j <= n; ++j) {
                            ws.H(j, n - 1) /= t;
                            ws.H(j, n) /= t;
                        }
                }
            }
        }
    }

    for (int j = nn - 1; j >= low; --j)
        for (int i = low; i <= high; ++i) {
            z = 0.0;
            for (int k = low; k <= std::min(j, high); ++k) z += ws.V(i, k) * ws.H(k, j);
            ws.V(i, j) = z;
        }
}

void require_square(const RealMatrix& a, const char* op) {
    if (!a.square()) {
        std::ostringstream msg;
        msg << op << ": matrix must be square, got " << a.rows() << "x" << a.cols();
        throw ValidationError(msg.str());
    }
    ensure_finite(a, op);
}

}  // namespace

ComplexSpectrum sorted_spectrum(std::vector<Complex> values, double scale) {
    const double snap = 1e-9 * std::max(1.0, scale);
    for (Complex& v : values)
        if (std::abs(v.imag()) <= snap) v = Complex(v.real(), 0.0);
    std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return ComplexSpectrum{std::move(values)};
}

RealEigenSystem eig_full(const RealMatrix& a) {
    require_square(a, "eig");
    const int n = static_cast<int>(a.rows());
    Workspace ws(a);
    if (n == 1) {
        RealEigenSystem sys;
        sys.values = {Complex(a(0, 0), 0.0)};
        sys.vectors = ComplexMatrix::identity(1);
        return sys;
    }
    orthes(ws);
    hqr2(ws);

    RealEigenSystem sys;
    sys.values.resize(n);
    sys.vectors = ComplexMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        sys.values[j] = Complex(ws.d[j], ws.e[j]);
        if (ws.e[j] == 0.0) {
            for (int i = 0; i < n; ++i) sys.vectors(i, j) = Complex(ws.V(i, j), 0.0);
        } else if (ws.e[j] > 0.0) {
            for (int i = 0; i < n; ++i) sys.vectors(i, j) = Complex(ws.V(i, j), ws.V(i, j + 1));
        } else {
            for (int i = 0; i < n; ++i) sys.vectors(i, j) = Complex(ws.V(i, j - 1), -ws.V(i, j));
        }
    }
    for (int j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm += std::norm(sys.vectors(i, j));
        nrm = std::sqrt(nrm);
        if (nrm > 0.0)
            for (int i = 0; i < n; ++i) sys.vectors(i, j) /= nrm;
    }
    return sys;
}

ComplexSpectrum eig(const RealMatrix& a) {
    require_square(a, "eig");
    const int n = static_cast<int>(a.rows());
    Workspace ws(a);
    if (n > 1) {
        orthes(ws);
        hqr2(ws);
    } else {
        ws.d[0] = a(0, 0);
    }
    std::vector<Complex> values(n);
    for (int j = 0; j < n; ++j) values[j] = Complex(ws.d[j], ws.e[j]);
    return sorted_spectrum(std::move(values), a.frobenius_norm());
}

SymmetricEigenSystem eig_sym_full(const RealMatrix& a) {
    require_square(a, "eig_sym");
    const double fro = a.frobenius_norm();
    const double asym = (a - a.transpose()).frobenius_norm();
    if (asym > 1e-10 * std::max(1.0, fro))
        throw ValidationError("eig_sym: asymmetric input (||A - A^T|| = " + std::to_string(asym) + ")");

    Workspace ws(a);
    for (int i = 0; i < ws.n; ++i)
        for (int j = 0; j < ws.n; ++j) ws.V(i, j) = 0.5 * (a(i, j) + a(j, i));
    tred2(ws);
    tql2(ws);

    SymmetricEigenSystem sys;
    sys.values = ws.d;
    sys.vectors = RealMatrix(a.rows(), a.rows());
    for (int i = 0; i < ws.n; ++i)
        for (int j = 0; j < ws.n; ++j) sys.vectors(i, j) = ws.V(i, j);
    return sys;
}

std::vector<double> eig_sym(const RealMatrix& a) { return eig_sym_full(a).values; }

std::vector<Complex> eig_complex(ComplexMatrix h) {
    if (!h.square()) throw ValidationError("eig_complex: matrix must be square");
    const int m = static_cast<int>(h.rows());
    if (m == 1) return {h(0, 0)};

    // Householder reduction to upper Hessenberg form.
    for (int k = 0; k + 2 < m; ++k) {
        double scale = 0.0;
        for (int i = k + 1; i < m; ++i) scale += std::abs(h(i, k));
        if (scale == 0.0) continue;
        std::vector<Complex> wvec(m - k - 1);
        double norm2 = 0.0;
        for (int i = k + 1; i < m; ++i) {
            wvec[i - k - 1] = h(i, k) / scale;
            norm2 += std::norm(wvec[i - k - 1]);
        }
        const double alpha = std::sqrt(norm2);
        const double a0 = std::abs(wvec[0]);
        const Complex phase = (a0 > 0.0) ? (wvec[0] / a0) : Complex(1.0, 0.0);
        wvec[0] += phase * alpha;
        double wnorm2 = norm2 - a0 * a0 + std::norm(wvec[0]);
        if (wnorm2 == 0.0) continue;
        const double beta = 2.0 / wnorm2;

        // Left: rows k+1..m-1.
        for (int j = k; j < m; ++j) {
            Complex tsum(0.0, 0.0);
            for (int i = k + 1; i < m; ++i) tsum += std::conj(wvec[i - k - 1]) * h(i, j);
            tsum *= beta;
            for (int i = k + 1; i < m; ++i) h(i, j) -= tsum * wvec[i - k - 1];
        }
        // Right: columns k+1..m-1.
        for (int i = 0; i < m; ++i) {
            Complex tsum(0.0, 0.0);
            for (int j = k + 1; j < m; ++j) tsum += h(i, j) * wvec[j - k - 1];
            tsum *= beta;
            for (int j = k + 1; j < m; ++j) h(i, j) -= tsum * std::conj(wvec[j - k - 1]);
        }
        for (int i = k + 2; i < m; ++i) h(i, k) = Complex(0.0, 0.0);
    }

    double hnorm = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = std::max(i - 1, 0); j < m; ++j) hnorm += std::abs(h(i, j));
    if (hnorm == 0.0) return std::vector<Complex>(m, Complex(0.0, 0.0));

    std::vector<Complex> values;
    values.reserve(m);
    int high = m - 1;
    int iter = 0;
    int total_iter = 0;
    while (high >= 0) {
        if (++total_iter > 100 * m)
            throw NumericalError("eig_complex: QR iteration failed to converge");

        int l = high;
        while (l > 0) {
            double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = hnorm;
            if (std::abs(h(l, l - 1)) <= kMachEps * s) {
                h(l, l - 1) = Complex(0.0, 0.0);
                break;
            }
            --l;
        }
        if (l == high) {
            values.push_back(h(high, high));
            --high;
            iter = 0;
            continue;
        }

        // Wilkinson shift from the trailing 2x2 block.
        const Complex aa = h(high - 1, high - 1);
        const Complex bb = h(high - 1, high);
        const Complex cc = h(high, high - 1);
        const Complex dd = h(high, high);
        Complex mu;
        {
            const Complex tr = aa + dd;
            const Complex disc = std::sqrt(tr * tr - 4.0 * (aa * dd - bb * cc));
            const Complex mu1 = 0.5 * (tr + disc);
            const Complex mu2 = 0.5 * (tr - disc);
            mu = (std::abs(mu1 - dd) < std::abs(mu2 - dd)) ? mu1 : mu2;
        }
        ++iter;
        if (iter % 12 == 0) mu += Complex(std::abs(h(high, high - 1)), 0.0);

        for (int i = l; i <= high; ++i) h(i, i) -= mu;

        // Explicit QR sweep with Givens rotations, then RQ.
        std::vector<double> cs(high);
        std::vector<Complex> sn(high);
        for (int i = l; i < high; ++i) {
            const Complex f = h(i, i);
            const Complex g = h(i + 1, i);
            const double fn = std::abs(f);
            const double gn = std::abs(g);
            double c;
            Complex s;
            if (gn == 0.0) {
                c = 1.0;
                s = Complex(0.0, 0.0);
            } else if (fn == 0.0) {
                c = 0.0;
                s = std::conj(g) / gn;
            } else {
                const double dnorm = std::hypot(fn, gn);
                c = fn / dnorm;
                s = (f / fn) * std::conj(g) / dnorm;
            }
            cs[i] = c;
            sn[i] = s;
            for (int j = i; j <= high; ++j) {
                const Complex t1 = h(i, j);
                const Complex t2 = h(i + 1, j);
                h(i, j) = c * t1 + s * t2;
                h(i + 1, j) = -std::conj(s) * t1 + c * t2;
            }
        }
        for (int i = l; i < high; ++i) {
            const double c = cs[i];
            const Complex s = sn[i];
            const int top = l;
            for (int row = top; row <= std::min(i + 1, high); ++row) {
                const Complex t1 = h(row, i);
                const Complex t2 = h(row, i + 1);
                h(row, i) = c * t1 + std::conj(s) * t2;
                h(row, i + 1) = -s * t1 + c * t2;
            }
        }
        for (int i = l; i <= high; ++i) h(i, i) += mu;
    }
    return values;
}

std::vector<double> hermitian_eig(const ComplexMatrix& h) {
    if (!h.square()) throw ValidationError("hermitian_eig: matrix must be square");
    const std::size_t m = h.rows();
    RealMatrix embed(2 * m, 2 * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const Complex v = 0.5 * (h(i, j) + std::conj(h(j, i)));
            embed(i, j) = v.real();
            embed(i, j + m) = -v.imag();
            embed(i + m, j) = v.imag();
            embed(i + m, j + m) = v.real();
        }
    const std::vector<double> doubled = eig_sym(embed);
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = doubled[2 * i];
    return out;
}

PsdVerdict is_psd(const RealMatrix& a, double tol) {
    require_square(a, "is_psd");
    const RealMatrix s = sym_part(a);
    const std::vector<double> vals = eig_sym(s);
    PsdVerdict verdict;
    verdict.tolerance_used = tol * std::max(1.0, a.frobenius_norm());
    verdict.min_sym_eigenvalue = vals.front();
    verdict.is_psd = verdict.min_sym_eigenvalue >= -verdict.tolerance_used;
    return verdict;
}

RealMatrix cholesky_factor(const RealMatrix& v) {
    require_square(v, "cholesky_factor");
    const std::size_t n = v.rows();
    const double fro = v.frobenius_norm();
    if ((v - v.transpose()).frobenius_norm() > 1e-10 * std::max(1.0, fro))
        throw ValidationError("cholesky_factor: asymmetric input");

    RealMatrix lower(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = v(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
        if (diag <= 0.0) {
            std::ostringstream msg;
            msg << "cholesky_factor: matrix not positive definite (pivot " << j << " = " << diag
                << ")";
            throw ValidationError(msg.str());
        }
        lower(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = v(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
            lower(i, j) = sum / lower(j, j);
        }
    }
    return lower.transpose();
}

RealMatrix basis_e_perp(std::size_t n) {
    if (n < 2) throw ValidationError("basis_e_perp: need n >= 2");
    // Householder reflector sending e to -sqrt(n) e_1; columns 2..n span e-perp.
    std::vector<double> w(n, 1.0);
    w[0] += std::sqrt(static_cast<double>(n));
    double wnorm2 = 0.0;
    for (double x : w) wnorm2 += x * x;
    RealMatrix q(n, n - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j)
            q(i, j - 1) = (i == j ? 1.0 : 0.0) - 2.0 * w[i] * w[j] / wnorm2;
    return q;
}

double spectral_norm(const RealMatrix& a) {
    ensure_finite(a, "spectral_norm");
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const RealMatrix gram = a.transpose() * a;
    const std::vector<double> vals = eig_sym(gram);
    return std::sqrt(std::max(0.0, vals.back()));
}

double spectral_norm(const ComplexMatrix& a) {
    const ComplexMatrix gram = a.adjoint() * a;
    const std::vector<double> vals = hermitian_eig(gram);
    return std::sqrt(std::max(0.0, vals.back()));
}

}  // namespace multisync
