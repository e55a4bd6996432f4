#pragma once

// The group SO°(p,q) and its Lie algebra at desk scale: Gram matrix,
// membership and identity-component certificates, boosts, the j1/j2
// involutions, K embeddings and stabilizer subalgebras h_v.
//
// Identity-component certificate: det X = 1 and det(upper-left p x p block)
// positive. Inside a stabilizer of a non-null vector the same two-determinant
// rule is applied to the restriction in a basis adapted to the form on the
// complement; for null vectors membership is certified by an exponential
// path chase with at most 16 segments.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orthoflow/numkit.hpp"

namespace orthoflow::sopq {

using numkit::Mat;
using numkit::Vec;

struct Signature {
    int p = 3;
    int q = 3;

    Signature() = default;
    Signature(int pp, int qq) : p(pp), q(qq) {
        if (p < 3 || q < 3) throw BadSignature("signature requires p, q >= 3");
    }
    int n() const { return p + q; }
};

inline Mat gram(const Signature& sig) {
    Mat g(sig.n(), sig.n());
    for (int i = 0; i < sig.p; ++i) g(i, i) = -1.0;
    for (int i = sig.p; i < sig.n(); ++i) g(i, i) = 1.0;
    return g;
}

// Value of the signature-(p,q) quadratic form.
inline double form_value(const Signature& sig, const Vec& v) {
    double s = 0;
    for (int i = 0; i < sig.p; ++i) s -= v[i] * v[i];
    for (int i = sig.p; i < sig.n(); ++i) s += v[i] * v[i];
    return s;
}

inline double form_pairing(const Signature& sig, const Vec& x, const Vec& y) {
    double s = 0;
    for (int i = 0; i < sig.p; ++i) s -= x[i] * y[i];
    for (int i = sig.p; i < sig.n(); ++i) s += x[i] * y[i];
    return s;
}

// Ambient index bookkeeping. The p-block carries e1..ep, the q-block carries
// eps1..epsq; in particular the ambient "eps1" sits at index p. (The pole N
// of the S^p factor is a different vector entirely and lives in the engine.)
struct AmbientIndexing {
    Signature sig;
    int e(int i) const { return i - 1; }            // e_i, 1-based
    int eps(int k) const { return sig.p + k - 1; }  // eps_k, 1-based

    Vec basis_e(int i) const {
        Vec v(sig.n(), 0.0);
        v[e(i)] = 1.0;
        return v;
    }
    Vec basis_eps(int k) const {
        Vec v(sig.n(), 0.0);
        v[eps(k)] = 1.0;
        return v;
    }
};

struct GroupElement {
    Signature sig;
    Mat mat;
};

struct AlgebraElement {
    Signature sig;
    Mat mat;
};

struct MembershipReport {
    bool ok = false;
    std::string failed_check;  // empty when ok
    double residual = 0.0;
    std::optional<GroupElement> element;
};

inline double relation_residual(const Signature& sig, const Mat& x) {
    Mat g = gram(sig);
    return numkit::frob(numkit::add(numkit::mul(numkit::mul(x, g), numkit::transpose(x)), g, -1.0));
}

inline double p_block_det(const Signature& sig, const Mat& x) {
    Mat blk(sig.p, sig.p);
    for (int i = 0; i < sig.p; ++i)
        for (int j = 0; j < sig.p; ++j) blk(i, j) = x(i, j);
    return numkit::det_lu(blk);
}

inline MembershipReport is_in_group(const Mat& x, const Signature& sig, const Tolerances& tol = {}) {
    MembershipReport rep;
    if (x.rows != sig.n() || x.cols != sig.n()) throw WrongSize("is_in_group: wrong matrix size");
    double r = relation_residual(sig, x);
    if (r > tol.algebraic) {
        rep.failed_check = "X I X^T = I";
        rep.residual = r;
        return rep;
    }
    double d = numkit::det_lu(x);
    if (std::fabs(d - 1.0) > tol.algebraic * 10) {
        rep.failed_check = "det = 1";
        rep.residual = std::fabs(d - 1.0);
        return rep;
    }
    double pd = p_block_det(sig, x);
    if (pd <= 0) {
        rep.failed_check = "identity component (p-block orientation)";
        rep.residual = pd;
        return rep;
    }
    rep.ok = true;
    rep.element = GroupElement{sig, x};
    return rep;
}

inline GroupElement certify(const Mat& x, const Signature& sig, const Tolerances& tol = {}) {
    MembershipReport rep = is_in_group(x, sig, tol);
    if (!rep.ok) throw NotSpecialOrthogonal("certify: " + rep.failed_check);
    return *rep.element;
}

inline GroupElement identity(const Signature& sig) { return {sig, numkit::eye(sig.n())}; }

// Boost m(theta): hyperbolic rotation in the (e1, eps1) plane.
inline GroupElement boost(const Signature& sig, double theta) {
    if (std::fabs(theta) > 700.0) throw Overflow("boost: cosh overflow");
    Mat m = numkit::eye(sig.n());
    double c = std::cosh(theta), s = std::sinh(theta);
    int p = sig.p;
    m(0, 0) = c;
    m(p, p) = c;
    m(0, p) = s;
    m(p, 0) = s;
    return {sig, m};
}

inline GroupElement involution(const Signature& sig, int which) {
    Mat m = numkit::eye(sig.n());
    if (which == 1) {
        m(0, 0) = -1;
        m(1, 1) = -1;
    } else if (which == 2) {
        m(sig.p, sig.p) = -1;
        m(sig.p + 1, sig.p + 1) = -1;
    } else {
        throw BadParameters("involution: which must be 1 or 2");
    }
    return {sig, m};
}

inline bool is_special_orthogonal(const Mat& k, double tol) {
    if (k.rows != k.cols) return false;
    Mat r = numkit::add(numkit::mul(numkit::transpose(k), k), numkit::eye(k.rows), -1.0);
    return numkit::frob(r) <= tol && std::fabs(numkit::det_lu(k) - 1.0) <= tol * 10;
}

inline GroupElement embed_K(const Mat& k1, const Mat& k2, const Signature& sig,
                            const Tolerances& tol = {}) {
    if (k1.rows != sig.p || k2.rows != sig.q) throw WrongSize("embed_K: block sizes");
    if (!is_special_orthogonal(k1, tol.algebraic) || !is_special_orthogonal(k2, tol.algebraic))
        throw NotSpecialOrthogonal("embed_K: blocks must be special orthogonal");
    Mat m(sig.n(), sig.n());
    for (int i = 0; i < sig.p; ++i)
        for (int j = 0; j < sig.p; ++j) m(i, j) = k1(i, j);
    for (int i = 0; i < sig.q; ++i)
        for (int j = 0; j < sig.q; ++j) m(sig.p + i, sig.p + j) = k2(i, j);
    return {sig, m};
}

// kappa in SO(p) -> kappa~ in SO(p+1), fixing the pole e_{p+1}.
inline Mat embed_SOp_plus1(const Mat& k1) {
    Mat m(k1.rows + 1, k1.cols + 1);
    for (int i = 0; i < k1.rows; ++i)
        for (int j = 0; j < k1.cols; ++j) m(i, j) = k1(i, j);
    m(k1.rows, k1.cols) = 1.0;
    return m;
}

// Ordered basis of so(p,q): p-block rotations, q-block rotations, boost
// generators E_{i,p+k} + E_{p+k,i}.
inline std::vector<AlgebraElement> algebra_basis(const Signature& sig) {
    std::vector<AlgebraElement> basis;
    int n = sig.n(), p = sig.p;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            Mat m(n, n);
            m(i, j) = 1.0;
            m(j, i) = -1.0;
            basis.push_back({sig, m});
        }
    for (int i = p; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Mat m(n, n);
            m(i, j) = 1.0;
            m(j, i) = -1.0;
            basis.push_back({sig, m});
        }
    for (int i = 0; i < p; ++i)
        for (int k = p; k < n; ++k) {
            Mat m(n, n);
            m(i, k) = 1.0;
            m(k, i) = 1.0;
            basis.push_back({sig, m});
        }
    return basis;
}

inline int algebra_dim(const Signature& sig) {
    int n = sig.n();
    return n * (n - 1) / 2;
}

inline double algebra_residual(const Signature& sig, const Mat& x) {
    Mat g = gram(sig);
    return numkit::frob(numkit::add(numkit::mul(x, g), numkit::mul(g, numkit::transpose(x))));
}

inline AlgebraElement from_coefficients(const Signature& sig, const Vec& coeff) {
    auto basis = algebra_basis(sig);
    if (coeff.size() != basis.size()) throw WrongSize("from_coefficients: coefficient length");
    Mat m(sig.n(), sig.n());
    for (size_t i = 0; i < basis.size(); ++i)
        if (coeff[i] != 0.0) m = numkit::add(m, basis[i].mat, coeff[i]);
    return {sig, m};
}

// Basis of h_v = {X in so(p,q) : Xv = 0}, returned both as coefficient
// vectors over algebra_basis and as matrices.
struct StabilizerAlgebra {
    std::vector<Vec> coefficients;
    std::vector<AlgebraElement> elements;
};

inline StabilizerAlgebra stabilizer_algebra(const Signature& sig, const Vec& v,
                                            const Tolerances& tol = {}) {
    if (static_cast<int>(v.size()) != sig.n()) throw WrongSize("stabilizer_algebra: vector size");
    if (numkit::norm(v) < 1e-12) throw ZeroVector("stabilizer_algebra: zero vector rejected");
    auto basis = algebra_basis(sig);
    int d = static_cast<int>(basis.size());
    Mat map(sig.n(), d);
    for (int j = 0; j < d; ++j) {
        Vec img = numkit::mul(basis[j].mat, v);
        for (int i = 0; i < sig.n(); ++i) map(i, j) = img[i];
    }
    StabilizerAlgebra out;
    out.coefficients = numkit::kernel_basis(map, tol.rank);
    for (const Vec& c : out.coefficients) out.elements.push_back(from_coefficients(sig, c));
    return out;
}

namespace detail {

// Basis of the form-orthogonal complement of v, orthonormalised for the
// indefinite form, negative-norm vectors first. Requires v non-null.
struct AdaptedBasis {
    std::vector<Vec> vectors;
    std::vector<int> signs;  // -1 or +1 per vector
    int negatives = 0;
};

inline AdaptedBasis adapted_complement_basis(const Signature& sig, const Vec& v) {
    int n = sig.n();
    Vec w = numkit::mul(gram(sig), v);
    w = numkit::scaled(w, 1.0 / numkit::norm(w));
    // Euclidean-orthogonal complement of w spans the form-complement of v.
    std::vector<Vec> span;
    for (int i = 0; i < n && static_cast<int>(span.size()) < n - 1; ++i) {
        Vec c(n, 0.0);
        c[i] = 1.0;
        c = numkit::axpy(c, w, -numkit::dot(c, w));
        for (const Vec& u : span) c = numkit::axpy(c, u, -numkit::dot(c, u));
        double nc = numkit::norm(c);
        if (nc > 1e-8) span.push_back(numkit::scaled(c, 1.0 / nc));
    }
    if (static_cast<int>(span.size()) != n - 1)
        throw IllConditioned("adapted basis: complement construction failed");
    AdaptedBasis out;
    std::vector<Vec> rem = span;
    while (!rem.empty()) {
        int best = -1;
        double bestQ = 0;
        std::vector<Vec> reduced;
        for (size_t i = 0; i < rem.size(); ++i) {
            Vec r = rem[i];
            for (size_t k = 0; k < out.vectors.size(); ++k)
                r = numkit::axpy(r, out.vectors[k],
                                 -out.signs[k] * form_pairing(sig, out.vectors[k], r));
            reduced.push_back(r);
            double qv = std::fabs(form_value(sig, r));
            if (best < 0 || qv > bestQ) bestQ = qv, best = static_cast<int>(i);
        }
        if (bestQ < 1e-10)
            throw IllConditioned("adapted basis: degenerate restriction of the form");
        Vec r = reduced[best];
        double qv = form_value(sig, r);
        out.vectors.push_back(numkit::scaled(r, 1.0 / std::sqrt(std::fabs(qv))));
        out.signs.push_back(qv < 0 ? -1 : 1);
        rem.erase(rem.begin() + best);
    }
    // negative-norm vectors first
    std::vector<Vec> vs;
    std::vector<int> sg;
    for (int pass = 0; pass < 2; ++pass)
        for (size_t i = 0; i < out.vectors.size(); ++i)
            if ((pass == 0 && out.signs[i] < 0) || (pass == 1 && out.signs[i] > 0)) {
                vs.push_back(out.vectors[i]);
                sg.push_back(out.signs[i]);
            }
    out.vectors = std::move(vs);
    out.signs = std::move(sg);
    for (int s : out.signs) out.negatives += (s < 0);
    return out;
}

// Greedy exponential path chase: try to pull u back to the identity through
// exp of the given subalgebra, at most `segments` steps.
inline bool exp_path_reaches_identity(const Signature& sig, const Mat& u,
                                      const std::vector<AlgebraElement>& habits, int segments,
                                      double target) {
    // Orthonormalise the subalgebra basis under the Frobenius inner product.
    std::vector<Mat> basis;
    for (const auto& h : habits) {
        Mat b = h.mat;
        for (const Mat& e : basis) {
            double c = 0;
            for (size_t i = 0; i < b.a.size(); ++i) c += b.a[i] * e.a[i];
            b = numkit::add(b, e, -c);
        }
        double nb = numkit::frob(b);
        if (nb > 1e-10) basis.push_back(numkit::scale(b, 1.0 / nb));
    }
    Mat g = gram(sig);
    Mat cur = u;
    auto dist = [&](const Mat& m) { return numkit::frob(numkit::add(m, numkit::eye(sig.n()), -1.0)); };
    int kicks = 0;
    for (int seg = 0; seg < segments; ++seg) {
        double d0 = dist(cur);
        if (d0 <= target) return true;
        // (u - u^{-1})/2 is an exact so(p,q) element; u^{-1} = I u^T I.
        Mat inv = numkit::mul(numkit::mul(g, numkit::transpose(cur)), g);
        Mat logApprox = numkit::scale(numkit::add(cur, inv, -1.0), 0.5);
        Mat step(sig.n(), sig.n());
        for (const Mat& e : basis) {
            double c = 0;
            for (size_t i = 0; i < e.a.size(); ++i) c += logApprox.a[i] * e.a[i];
            step = numkit::add(step, e, c);
        }
        double ns = numkit::frob(step);
        bool stalled = ns < 1e-10;
        if (!stalled) {
            if (ns > 2.0) step = numkit::scale(step, 2.0 / ns);
            bool improved = false;
            for (double t : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
                Mat cand = numkit::mul(numkit::matrix_exp(numkit::scale(step, -t)), cur);
                if (dist(cand) < d0) {
                    cur = cand;
                    improved = true;
                    break;
                }
            }
            stalled = !improved;
        }
        if (stalled) {
            // the log surrogate vanishes at involutions (u = u^{-1});
            // nudge along a subalgebra direction and keep chasing
            if (kicks >= static_cast<int>(basis.size())) return false;
            Mat kick = numkit::matrix_exp(numkit::scale(basis[kicks % basis.size()], -0.7));
            cur = numkit::mul(kick, cur);
            ++kicks;
        }
    }
    return dist(cur) <= target;
}

}  // namespace detail

// Does u lie in the identity component of the stabilizer of v?  u must fix v
// (within tol.action); u itself may be any O(p,q) matrix so that rejection of
// wrong-component stabilizers is expressible.
inline bool stabilizer_identity_component_test(const Mat& u, const Vec& v, const Signature& sig,
                                               const Tolerances& tol = {}) {
    if (numkit::norm(v) < 1e-12) throw ZeroVector("component test: zero vector");
    Vec uv = numkit::mul(u, v);
    if (numkit::norm(numkit::axpy(uv, v, -1.0)) > tol.action * std::max(1.0, numkit::norm(v)))
        throw NotAStabilizer("component test: u does not fix v");
    double q = form_value(sig, v);
    double qscale = numkit::dot(v, v);
    if (std::fabs(q) > 1e-10 * qscale) {
        // Non-null: restrict to the form-complement and reuse the
        // two-determinant rule for the (p', q') restriction.
        auto ab = detail::adapted_complement_basis(sig, v);
        int m = sig.n() - 1;
        Mat rest(m, m);
        for (int j = 0; j < m; ++j) {
            Vec img = numkit::mul(u, ab.vectors[j]);
            for (int i = 0; i < m; ++i)
                rest(i, j) = ab.signs[i] * form_pairing(sig, ab.vectors[i], img);
        }
        double d = numkit::det_lu(rest);
        if (std::fabs(d - 1.0) > 1e-6) return false;
        Mat neg(ab.negatives, ab.negatives);
        for (int i = 0; i < ab.negatives; ++i)
            for (int j = 0; j < ab.negatives; ++j) neg(i, j) = rest(i, j);
        return numkit::det_lu(neg) > 0;
    }
    // Null vector: numerical path check within the stabilizer algebra.
    auto h = stabilizer_algebra(sig, v, tol);
    return detail::exp_path_reaches_identity(sig, u, h.elements, 16, 1e-6);
}

// Convenience sampling helpers shared by tests, suites and the CLI.
inline GroupElement random_group_element(const Signature& sig, Rng& rng, double maxCoeffNorm,
                                         const Tolerances& tol = {}) {
    auto basis = algebra_basis(sig);
    Vec c(basis.size());
    for (double& x : c) x = rng.uniform(-1.0, 1.0);
    double nc = numkit::norm(c);
    if (nc > maxCoeffNorm) c = numkit::scaled(c, maxCoeffNorm / nc);
    return certify(numkit::matrix_exp(from_coefficients(sig, c).mat), sig, tol);
}

inline Mat random_special_orthogonal(int n, Rng& rng) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double x = rng.uniform(-1.0, 1.0);
            a(i, j) = x;
            a(j, i) = -x;
        }
    return numkit::matrix_exp(a);
}

}  // namespace orthoflow::sopq
