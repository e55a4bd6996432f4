#pragma once

// Minimal dense linear-algebra kernels for desk-scale matrices (<= ~32x32):
// rotations between unit vectors, rank-one factorisation, numerical rank,
// matrix exponential. Eigen/singular decompositions go through cyclic Jacobi
// sweeps; nothing here is tuned for size.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "orthoflow/common.hpp"

namespace orthoflow::numkit {

using Vec = std::vector<double>;

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    Vec a;  // row-major

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool finite() const {
        for (double x : a)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

using Mat = DenseMatrix;

inline Mat eye(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

inline Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

inline Mat mul(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw WrongSize("mul: inner dimensions differ");
    Mat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            double xik = x(i, k);
            if (xik == 0.0) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

inline Vec mul(const Mat& x, const Vec& v) {
    if (x.cols != static_cast<int>(v.size())) throw WrongSize("mul: matrix/vector size");
    Vec r(x.rows, 0.0);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) r[i] += x(i, j) * v[j];
    return r;
}

inline Mat add(const Mat& x, const Mat& y, double sy = 1.0) {
    if (x.rows != y.rows || x.cols != y.cols) throw WrongSize("add: shapes differ");
    Mat z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += sy * y.a[i];
    return z;
}

inline Mat scale(const Mat& x, double s) {
    Mat z = x;
    for (double& v : z.a) v *= s;
    return z;
}

inline double frob(const Mat& m) {
    double s = 0;
    for (double x : m.a) s += x * x;
    return std::sqrt(s);
}

inline double max_abs(const Mat& m) {
    double s = 0;
    for (double x : m.a) s = std::max(s, std::fabs(x));
    return s;
}

inline double dot(const Vec& x, const Vec& y) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec scaled(const Vec& x, double s) {
    Vec r = x;
    for (double& v : r) v *= s;
    return r;
}

inline Vec axpy(const Vec& x, const Vec& y, double sy) {
    Vec r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] += sy * y[i];
    return r;
}

inline Mat outer(const Vec& u, const Vec& v) {
    Mat m(static_cast<int>(u.size()), static_cast<int>(v.size()));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m(i, j) = u[i] * v[j];
    return m;
}

inline double trace(const Mat& m) {
    double s = 0;
    for (int i = 0; i < std::min(m.rows, m.cols); ++i) s += m(i, i);
    return s;
}

// LU with partial pivoting; returns determinant. `inv` optionally receives
// the inverse (must be square and nonsingular for that).
inline double det_lu(const Mat& m, Mat* inv = nullptr) {
    if (m.rows != m.cols) throw WrongSize("det_lu: square matrix required");
    int n = m.rows;
    Mat lu = m;
    std::vector<int> piv(n);
    double det = 1.0;
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int imax = k;
        double vmax = std::fabs(lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(lu(i, k)) > vmax) vmax = std::fabs(lu(i, k)), imax = i;
        if (imax != k) {
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(imax, j));
            std::swap(piv[k], piv[imax]);
            det = -det;
        }
        double pivot = lu(k, k);
        det *= pivot;
        if (pivot == 0.0) {
            if (inv) throw WrongSize("det_lu: singular matrix, no inverse");
            return 0.0;
        }
        for (int i = k + 1; i < n; ++i) {
            lu(i, k) /= pivot;
            for (int j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
        }
    }
    if (inv) {
        *inv = Mat(n, n);
        for (int col = 0; col < n; ++col) {
            Vec b(n, 0.0);
            b[col] = 1.0;
            Vec y(n);
            for (int i = 0; i < n; ++i) {
                y[i] = b[piv[i]];
                for (int j = 0; j < i; ++j) y[i] -= lu(i, j) * y[j];
            }
            for (int i = n - 1; i >= 0; --i) {
                for (int j = i + 1; j < n; ++j) y[i] -= lu(i, j) * y[j];
                y[i] /= lu(i, i);
            }
            for (int i = 0; i < n; ++i) (*inv)(i, col) = y[i];
        }
    }
    return det;
}

inline Mat inverse(const Mat& m) {
    Mat inv;
    det_lu(m, &inv);
    return inv;
}

struct EigSym {
    Vec values;   // descending
    Mat vectors;  // columns match values
};

// Cyclic Jacobi sweeps; convergence on off-diagonal mass relative to the
// Frobenius norm (threshold 1e-13).
inline EigSym jacobi_eig(const Mat& sym) {
    if (sym.rows != sym.cols) throw WrongSize("jacobi_eig: square matrix required");
    int n = sym.rows;
    Mat A = sym;
    Mat V = eye(n);
    double fnorm = frob(A);
    if (fnorm == 0.0) fnorm = 1.0;
    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2 * A(i, j) * A(i, j);
        if (std::sqrt(off) <= 1e-13 * fnorm) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = A(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                double theta = (A(q, q) - A(p, p)) / (2 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1));
                double c = 1.0 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i) > A(j, j); });
    EigSym e;
    e.values.resize(n);
    e.vectors = Mat(n, n);
    for (int k = 0; k < n; ++k) {
        e.values[k] = A(order[k], order[k]);
        for (int i = 0; i < n; ++i) e.vectors(i, k) = V(i, order[k]);
    }
    return e;
}

// Singular values (descending) via the Gram matrix of the smaller side.
inline Vec singular_values(const Mat& m) {
    const Mat& g = (m.rows >= m.cols) ? mul(transpose(m), m) : mul(m, transpose(m));
    EigSym e = jacobi_eig(g);
    Vec s(e.values.size());
    for (size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(std::max(0.0, e.values[i]));
    return s;
}

// Orthonormal basis (as columns) of the right null space {x : Mx = 0},
// singular values <= tol * sigma_max.
inline std::vector<Vec> kernel_basis(const Mat& m, double tol) {
    Mat g = mul(transpose(m), m);
    EigSym e = jacobi_eig(g);
    double smax = std::sqrt(std::max(0.0, e.values.empty() ? 0.0 : e.values[0]));
    double cut = tol * smax;
    std::vector<Vec> basis;
    for (int k = 0; k < g.rows; ++k) {
        double sv = std::sqrt(std::max(0.0, e.values[k]));
        if (smax == 0.0 || sv <= cut) {
            Vec v(g.rows);
            for (int i = 0; i < g.rows; ++i) v[i] = e.vectors(i, k);
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

inline int numerical_rank(const Mat& m, const Tolerances& tol = {}) {
    if (!m.finite()) throw BadParameters("numerical_rank: non-finite entries");
    Vec s = singular_values(m);
    if (s.empty() || s[0] == 0.0) return 0;
    int r = 0;
    for (double sv : s)
        if (sv > tol.rank * s[0]) ++r;
    return r;
}

// Special-orthogonal R with R a = b, acting as the identity on the
// orthogonal complement of span{a, b}. The antipodal case routes through a
// deterministic intermediate axis (standard basis vector of smallest index
// with minimal |<a, e_i>|) so results are reproducible.
inline Mat rotation_sending(const Vec& a, const Vec& b, const Tolerances& tol = {});

namespace detail {

// In-plane rotation for non-antipodal unit a, b.
inline Mat plane_rotation(const Vec& a, const Vec& b) {
    int n = static_cast<int>(a.size());
    double c = dot(a, b);
    Vec v = axpy(b, a, -c);
    double s = norm(v);
    if (s < 1e-15) return eye(n);  // a == b to machine precision
    v = scaled(v, 1.0 / s);
    Mat r = eye(n);
    // R = I + (c-1)(aa^T + vv^T) + s(va^T - av^T)
    r = add(r, outer(a, a), c - 1.0);
    r = add(r, outer(v, v), c - 1.0);
    r = add(r, outer(v, a), s);
    r = add(r, outer(a, v), -s);
    return r;
}

}  // namespace detail

inline Mat rotation_sending(const Vec& a, const Vec& b, const Tolerances& tol) {
    int n = static_cast<int>(a.size());
    if (static_cast<int>(b.size()) != n) throw WrongSize("rotation_sending: sizes differ");
    if (std::fabs(norm(a) - 1.0) > tol.algebraic || std::fabs(norm(b) - 1.0) > tol.algebraic)
        throw NonUnitInput("rotation_sending: inputs must be unit vectors");
    if (dot(a, b) > -1.0 + 1e-12) return detail::plane_rotation(a, b);
    if (n < 2) throw DimensionTooSmall("rotation_sending: no rotation sends a to -a in R^1");
    int best = 0;
    double bestAbs = std::fabs(a[0]);
    for (int i = 1; i < n; ++i)
        if (std::fabs(a[i]) < bestAbs) bestAbs = std::fabs(a[i]), best = i;
    Vec mid(n, 0.0);
    mid[best] = 1.0;
    mid = axpy(mid, a, -a[best]);
    mid = scaled(mid, 1.0 / norm(mid));
    return mul(detail::plane_rotation(mid, b), detail::plane_rotation(a, mid));
}

struct RankOneFactor {
    double scale;
    Vec unit;  // sign canonicalised: first nonzero component positive
};

inline RankOneFactor rank_one_factor(const Mat& q, const Tolerances& tol = {}) {
    if (q.rows != q.cols) throw WrongSize("rank_one_factor: square matrix required");
    double asym = frob(add(q, transpose(q), -1.0));
    if (asym > tol.algebraic * std::max(1.0, frob(q)))
        throw BadParameters("rank_one_factor: matrix not symmetric");
    EigSym e = jacobi_eig(q);
    double tr = trace(q);
    if (e.values.size() > 1 && std::fabs(e.values[1]) > tol.rank * std::max(std::fabs(tr), 1e-300))
        throw NotRankOne("rank_one_factor: second eigenvalue above rank tolerance");
    Vec u(q.rows);
    for (int i = 0; i < q.rows; ++i) u[i] = e.vectors(i, 0);
    for (int i = 0; i < q.rows; ++i) {
        if (std::fabs(u[i]) > 1e-12) {
            if (u[i] < 0)
                for (double& x : u) x = -x;
            break;
        }
    }
    Mat resid = add(q, outer(scaled(u, tr), u), -1.0);
    if (frob(resid) > tol.rank * std::max(frob(q), 1e-300))
        throw NotRankOne("rank_one_factor: residual above rank tolerance");
    return {tr, u};
}

// Scaling-and-squaring with an order-18 truncated series; squaring threshold
// 0.5 keeps the boost/rotation closed forms matched to ~1e-14 for |A| <= 5.
inline Mat matrix_exp(const Mat& a) {
    if (a.rows != a.cols) throw WrongSize("matrix_exp: square matrix required");
    if (!a.finite()) throw Overflow("matrix_exp: non-finite input");
    int n = a.rows;
    double nrm = max_abs(a) * n;
    int squarings = 0;
    if (nrm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
        squarings = std::min(squarings, 64);
    }
    Mat b = scale(a, std::ldexp(1.0, -squarings));
    Mat term = eye(n);
    Mat sum = eye(n);
    for (int k = 1; k <= 18; ++k) {
        term = scale(mul(term, b), 1.0 / k);
        sum = add(sum, term);
    }
    for (int s = 0; s < squarings; ++s) sum = mul(sum, sum);
    if (!sum.finite()) throw Overflow("matrix_exp: overflow in result");
    return sum;
}

}  // namespace orthoflow::numkit
