// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "relaycap/errors.hpp"

namespace relaycap {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Sized for the small systems handled here
/// (a few hundred rows at most); no blocking, no views.
struct CMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> data;

    CMatrix() = default;
    CMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

    cplx& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    const cplx& operator()(int i, int j) const {
        return data[static_cast<std::size_t>(i) * cols + j];
    }

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const cplx& v : data) s += std::norm(v);
        return std::sqrt(s);
    }
};

inline CMatrix multiply(const CMatrix& a, const CMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("multiply: inner dimensions differ");
    CMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline CMatrix conj_transpose(const CMatrix& a) {
    CMatrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = std::conj(a(i, j));
    return t;
}

/// A * A^H, exploiting Hermitian symmetry of the result.
inline CMatrix gram_aah(const CMatrix& a) {
    CMatrix g(a.rows, a.rows);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = i; j < a.rows; ++j) {
            cplx s{};
            for (int k = 0; k < a.cols; ++k) s += a(i, k) * std::conj(a(j, k));
            g(i, j) = s;
            g(j, i) = std::conj(s);
        }
        g(i, i) = cplx(g(i, i).real(), 0.0);
    }
    return g;
}

/// A^H * A.
inline CMatrix gram_aha(const CMatrix& a) {
    CMatrix g(a.cols, a.cols);
    for (int i = 0; i < a.cols; ++i) {
        for (int j = i; j < a.cols; ++j) {
            cplx s{};
            for (int k = 0; k < a.rows; ++k) s += std::conj(a(k, i)) * a(k, j);
            g(i, j) = s;
            g(j, i) = std::conj(s);
        }
        g(i, i) = cplx(g(i, i).real(), 0.0);
    }
    return g;
}

/// Replace A by (A + A^H)/2 to remove round-off asymmetry.
inline void hermitize(CMatrix& a) {
    for (int i = 0; i < a.rows; ++i) {
        a(i, i) = cplx(a(i, i).real(), 0.0);
        for (int j = i + 1; j < a.cols; ++j) {
            const cplx m = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = m;
            a(j, i) = std::conj(m);
        }
    }
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
/// Throws numerical_error when a pivot is not strictly positive.
inline CMatrix cholesky_lower(const CMatrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("cholesky_lower: matrix not square");
    const int n = a.rows;
    CMatrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0)) throw numerical_error("cholesky_lower: matrix not positive definite");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

/// ln det of a Hermitian positive definite matrix via its Cholesky factor.
inline double cholesky_logdet(const CMatrix& a) {
    const CMatrix l = cholesky_lower(a);
    double logdet = 0.0;
    for (int j = 0; j < l.rows; ++j) logdet += std::log(l(j, j).real());
    return 2.0 * logdet;
}

struct EighResult {
    std::vector<double> eigenvalues; // ascending
    CMatrix vectors;                 // columns, A = V diag(w) V^H
};

/// Cyclic Jacobi eigensolver for Hermitian matrices. Small dense inputs only;
/// the guaranteed-real spectrum makes this preferable to general eigenroutines.
inline EighResult jacobi_eigh(CMatrix a, int max_sweeps = 60) {
    if (a.rows != a.cols) throw std::invalid_argument("jacobi_eigh: matrix not square");
    const int n = a.rows;
    hermitize(a);
    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(a.frobenius_norm(), 1e-300);
    const double tol = 1e-14 * scale;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= tol) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r <= 1e-18 * scale) continue;
                const cplx phase = apq / r;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
                // smaller-magnitude root of t^2 - 2 tau t - 1 = 0, written in
                // the form that survives |tau| >> 1
                const double t = (tau >= 0.0 ? -1.0 : 1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx se = s * phase;

                // A <- U^H A U with U = [[c, -s e], [s conj(e), c]] in plane (p,q)
                for (int k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + std::conj(se) * akq;
                    a(k, q) = -se * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk + se * aqk;
                    a(q, k) = -std::conj(se) * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx(a(p, p).real(), 0.0);
                a(q, q) = cplx(a(q, q).real(), 0.0);
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp + std::conj(se) * vkq;
                    v(k, q) = -se * vkp + c * vkq;
                }
            }
        }
    }

    EighResult out;
    out.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i).real();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return out.eigenvalues[i] < out.eigenvalues[j]; });
    std::vector<double> w(n);
    CMatrix vs(n, n);
    for (int j = 0; j < n; ++j) {
        w[j] = out.eigenvalues[order[j]];
        for (int i = 0; i < n; ++i) vs(i, j) = v(i, order[j]);
    }
    out.eigenvalues = std::move(w);
    out.vectors = std::move(vs);
    return out;
}

/// Rebuild V f(diag) V^H from an eigendecomposition.
template <class F>
CMatrix apply_spectral(const EighResult& eig, F&& f) {
    const int n = static_cast<int>(eig.eigenvalues.size());
    CMatrix out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            cplx s{};
            for (int k = 0; k < n; ++k)
                s += eig.vectors(i, k) * f(eig.eigenvalues[k]) * std::conj(eig.vectors(j, k));
            out(i, j) = s;
            out(j, i) = std::conj(s);
        }
        out(i, i) = cplx(out(i, i).real(), 0.0);
    }
    return out;
}

} // namespace relaycap
