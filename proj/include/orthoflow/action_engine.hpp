#pragma once

// The constructed SO°(p,q) actions.
//
// The product-sphere action evaluates g * x by canonicalising x = k0 * z
// onto the slice circle, factoring g k0 = k m(theta) u against the
// rank-one projector datum at z, and pushing z along the circle flow. The
// factorisation recovers theta from the trace of g P(z) g^T (a quadratic in
// e^{2 theta}), the K-part from the rank-one factor of g P(z) g^T / lambda,
// and certifies u by residual plus an identity-component test. Near the
// double-root boundary of the trace quadratic the solver refuses and the
// caller reroutes through the open-orbit charts F0/F1, which conjugate the
// action to the projective action on the sphere.
//
// The same solver core drives the sphere action (projective companion
// values) and the bundle action over the null-line parabolic, where the
// boost part of the factorisation is the fiber translation.

#include <array>
#include <limits>

#include "orthoflow/circleflow.hpp"
#include "orthoflow/sopq.hpp"

namespace orthoflow::engine {

using circleflow::CircleFlow;
using circleflow::FlowFunctionPair;
using circleflow::FlowKind;
using circleflow::ProjectivePoint;
using numkit::Mat;
using numkit::Vec;
using sopq::GroupElement;
using sopq::Signature;

// ---------------------------------------------------------------------------
// Points

struct ProductSpherePoint {
    Vec v;  // unit vector in R^{p+1}; the pole N is the last coordinate
    Vec w;  // unit vector in R^q
};

struct SpherePoint {
    Vec y;  // unit vector in R^{p+q}
};

inline ProductSpherePoint slice_point(const Signature& sig, double phi) {
    ProductSpherePoint x;
    x.v.assign(sig.p + 1, 0.0);
    x.w.assign(sig.q, 0.0);
    x.v[0] = std::cos(phi);
    x.v[sig.p] = std::sin(phi);
    x.w[0] = 1.0;
    return x;
}

inline Vec sphere_slice_vector(const Signature& sig, double phi) {
    Vec y(sig.n(), 0.0);
    y[0] = std::cos(phi);
    y[sig.p] = std::sin(phi);
    return y;
}

inline double chordal(const Vec& a, const Vec& b) { return numkit::norm(numkit::axpy(a, b, -1.0)); }

// max of the two chordal distances
inline double distance(const ProductSpherePoint& x, const ProductSpherePoint& y) {
    return std::max(chordal(x.v, y.v), chordal(x.w, y.w));
}

inline double distance(const SpherePoint& x, const SpherePoint& y) { return chordal(x.y, y.y); }

inline void check_unit(const Vec& v, const Tolerances& tol, const char* what) {
    if (std::fabs(numkit::norm(v) - 1.0) > tol.algebraic * 100)
        throw BadParameters(std::string(what) + ": not a unit vector");
}

// ---------------------------------------------------------------------------
// Rank-one projector datum and the trace quadratic

struct RankOneProjector {
    Signature sig;
    ProjectivePoint value;  // [f : 1] in the product construction
    Mat mat;
};

inline Vec datum_vector(const Signature& sig, const ProjectivePoint& val) {
    Vec u(sig.n(), 0.0);
    u[0] = val.a;
    u[sig.p] = val.b;
    return u;
}

inline RankOneProjector projector(const Signature& sig, const ProjectivePoint& val) {
    Vec u = datum_vector(sig, val);
    RankOneProjector p{sig, val, numkit::scale(numkit::outer(u, u), 1.0 / numkit::dot(u, u))};
    return p;
}

inline RankOneProjector projector(const Signature& sig, double f) {
    return projector(sig, ProjectivePoint::make(f, 1.0));
}

// lambda(theta, [a:b]) = cosh(2 theta) + s sinh(2 theta), s = 2ab/(a^2+b^2)
inline double lambda_scale(double theta, const ProjectivePoint& val) {
    double s = 2 * val.a * val.b / (val.a * val.a + val.b * val.b);
    return std::cosh(2 * theta) + s * std::sinh(2 * theta);
}

inline double lambda_scale(double theta, double f) {
    return lambda_scale(theta, ProjectivePoint::make(f, 1.0));
}

struct ThetaCandidates {
    std::vector<double> roots;
    bool boundary = false;  // within 1e-6 of the double-root locus
};

// Roots of (1+s) u^2 - 2 T u + (1-s) = 0 in u = e^{2 theta}.
inline ThetaCandidates solve_theta(double T, const ProjectivePoint& val) {
    double s = 2 * val.a * val.b / (val.a * val.a + val.b * val.b);
    ThetaCandidates out;
    double lamMin = std::sqrt(std::max(0.0, 1.0 - s * s));
    if (T < lamMin - 1e-9) throw NoRealRoot("solve_theta: trace below the minimum of lambda");
    if (std::fabs(1.0 + s) < 1e-12) {
        out.roots.push_back(-0.5 * std::log(T));
        return out;
    }
    if (std::fabs(1.0 - s) < 1e-12) {
        out.roots.push_back(0.5 * std::log(T));
        return out;
    }
    double disc = std::max(0.0, T * T - (1.0 - s * s));
    double sq = std::sqrt(disc);
    double u1 = (T + sq) / (1.0 + s);
    double u2 = (T - sq) / (1.0 + s);
    out.roots.push_back(0.5 * std::log(u1));
    if (std::fabs(u1 - u2) > 1e-14) out.roots.push_back(0.5 * std::log(u2));
    out.boundary = (T - lamMin) <= 1e-6;
    return out;
}

inline ThetaCandidates solve_theta(double T, double f) {
    return solve_theta(T, ProjectivePoint::make(f, 1.0));
}

// ---------------------------------------------------------------------------
// The factorisation g = k m(theta) u

struct BranchDiagnostic {
    double theta = 0.0;
    int sign = 0;
    double residual = 0.0;
    bool component_ok = false;
    bool accepted = false;
};

struct DecompositionResult {
    GroupElement k;
    double theta = 0.0;
    GroupElement u;
    ProjectivePoint transported;  // companion value at the flowed slice point
    double residual = 0.0;
    double margin = 0.0;  // runner-up residual / accepted residual
    bool boundary = false;
    std::vector<BranchDiagnostic> diagnostics;
};

namespace detail {

inline Mat k_inverse(const Mat& k) { return numkit::transpose(k); }

struct KCandidate {
    Mat k1, k2;
};

// K-block choices reproducing a rank-one direction r = +- k u' / |u'|.
inline std::vector<KCandidate> k_candidates(const Signature& sig, const Vec& r,
                                            const ProjectivePoint& target, int sigma,
                                            const Tolerances& tol) {
    Vec rp(r.begin(), r.begin() + sig.p);
    Vec rq(r.begin() + sig.p, r.end());
    double nrm = std::sqrt(target.a * target.a + target.b * target.b);
    std::vector<Mat> k1s, k2s;
    Vec e1(sig.p, 0.0), eps1(sig.q, 0.0);
    e1[0] = 1.0;
    eps1[0] = 1.0;
    if (std::fabs(target.a) > 1e-9) {
        Vec t = numkit::scaled(rp, sigma * nrm / target.a);
        double tn = numkit::norm(t);
        if (std::fabs(tn - 1.0) > 1e-6) return {};
        k1s.push_back(numkit::rotation_sending(e1, numkit::scaled(t, 1.0 / tn), tol));
    } else {
        // p-part of the datum vanishes; kappa1 is free modulo the stabilizer
        k1s.push_back(numkit::eye(sig.p));
        Mat j1p = numkit::eye(sig.p);
        j1p(0, 0) = j1p(1, 1) = -1.0;
        k1s.push_back(j1p);
    }
    if (std::fabs(target.b) > 1e-9) {
        Vec t = numkit::scaled(rq, sigma * nrm / target.b);
        double tn = numkit::norm(t);
        if (std::fabs(tn - 1.0) > 1e-6) return {};
        k2s.push_back(numkit::rotation_sending(eps1, numkit::scaled(t, 1.0 / tn), tol));
    } else {
        k2s.push_back(numkit::eye(sig.q));
        Mat j2q = numkit::eye(sig.q);
        j2q(0, 0) = j2q(1, 1) = -1.0;
        k2s.push_back(j2q);
    }
    std::vector<KCandidate> out;
    for (const Mat& k1 : k1s)
        for (const Mat& k2 : k2s) out.push_back({k1, k2});
    return out;
}

}  // namespace detail

// Factor g = k m(theta) u with u in the identity component of the
// stabilizer of the datum vector a e1 + b eps1. Unique on the open locus
// away from the double-root boundary; the runner-up residual must be at
// least 10x worse or NumericalAmbiguity is raised.
inline DecompositionResult decompose(const GroupElement& g, const ProjectivePoint& val,
                                     const Tolerances& tol = {}) {
    const Signature& sig = g.sig;
    Vec uz = datum_vector(sig, val);
    double uz2 = numkit::dot(uz, uz);
    Vec gu = numkit::mul(g.mat, uz);
    double T = numkit::dot(gu, gu) / uz2;
    ThetaCandidates cands = solve_theta(T, val);
    if (cands.boundary)
        throw OutsideWPlus("decompose: trace sits on the double-root boundary");

    struct Branch {
        double theta;
        int sigma;
        Mat k1, k2;
        GroupElement k, u;
        ProjectivePoint transported;
        double residual;
        bool component_ok = false;
    };
    std::vector<Branch> branches;
    for (double theta : cands.roots) {
        double lam = lambda_scale(theta, val);
        Mat Q = numkit::scale(numkit::outer(gu, gu), 1.0 / (uz2 * lam));
        numkit::RankOneFactor ro;
        try {
            ro = numkit::rank_one_factor(Q, tol);
        } catch (const NotRankOne&) {
            continue;
        }
        ProjectivePoint moved = val.transported(theta);
        for (int sigma : {+1, -1}) {
            for (const auto& kc : detail::k_candidates(sig, ro.unit, moved, sigma, tol)) {
                Branch br;
                br.theta = theta;
                br.sigma = sigma;
                br.k1 = kc.k1;
                br.k2 = kc.k2;
                br.k = sopq::embed_K(kc.k1, kc.k2, sig, tol);
                Mat u = numkit::mul(sopq::boost(sig, -theta).mat,
                                    numkit::mul(detail::k_inverse(br.k.mat), g.mat));
                br.u = GroupElement{sig, u};
                br.transported = moved;
                br.residual = numkit::norm(numkit::axpy(numkit::mul(u, uz), uz, -1.0)) /
                              std::sqrt(uz2);
                branches.push_back(std::move(br));
            }
        }
    }

    // residual gate, then the component certificate (adapted-basis rule for
    // non-null data, exponential path chase for the null datum)
    for (Branch& br : branches) {
        if (br.residual > tol.action) continue;
        br.component_ok = sopq::stabilizer_identity_component_test(br.u.mat, uz, sig, tol);
    }

    // deduplicate branches equal modulo the K-stabilizer of the moved point
    auto same_branch = [&](const Branch& x, const Branch& y) {
        if (std::fabs(x.theta - y.theta) > 1e-7) return false;
        Mat kd = numkit::mul(detail::k_inverse(x.k.mat), y.k.mat);
        Vec moved = datum_vector(sig, x.transported);
        return numkit::norm(numkit::axpy(numkit::mul(kd, moved), moved, -1.0)) < 1e-6;
    };
    std::vector<Branch*> distinct;
    for (Branch& br : branches) {
        bool matched = false;
        for (Branch*& rep : distinct) {
            if (same_branch(*rep, br)) {
                matched = true;
                if (br.residual < rep->residual) rep = &br;
                break;
            }
        }
        if (!matched) distinct.push_back(&br);
    }

    // Side condition: the canonical factorisation keeps the transported
    // value on the datum's side of the slice. The opposite-side twin (the
    // reflected-coset factorisation, which reproduces the same action
    // value) is excluded both from acceptance and from the ambiguity
    // margin.
    double ab = val.a * val.b;
    int want = ab > 1e-12 ? +1 : (ab < -1e-12 ? -1 : +1);
    auto side_of = [&](const Branch& br) {
        double mab = br.transported.a * br.transported.b;
        return mab > 0 ? +1 : (mab < 0 ? -1 : want);
    };

    std::vector<Branch*> accepted;
    double runnerUp = std::numeric_limits<double>::infinity();
    for (Branch* br : distinct) {
        if (side_of(*br) != want) continue;
        if (br->residual <= tol.action && br->component_ok)
            accepted.push_back(br);
        else
            runnerUp = std::min(runnerUp, br->residual);
    }

    DecompositionResult out;
    out.boundary = cands.boundary;
    for (const Branch* br : distinct)
        out.diagnostics.push_back({br->theta, br->sigma, br->residual, br->component_ok,
                                   br->residual <= tol.action && br->component_ok});
    if (accepted.empty())
        throw OutsideWPlus("decompose: no branch accepted");
    if (accepted.size() > 1)
        throw OutsideWPlus("decompose: multiple distinct branches accepted");
    const Branch* best = accepted.front();
    out.margin = runnerUp / std::max(best->residual, 1e-300);
    if (out.margin < 10.0)
        throw NumericalAmbiguity("decompose: runner-up within 10x of the accepted branch");
    out.k = best->k;
    out.theta = best->theta;
    out.u = best->u;
    out.transported = best->transported;
    out.residual = best->residual;
    return out;
}

// ---------------------------------------------------------------------------
// Standard K action and slice canonicalisation on S^p x S^{q-1}

inline ProductSpherePoint standard_K_act(const Mat& k1, const Mat& k2, const ProductSpherePoint& x,
                                         const Tolerances& tol = {}) {
    if (!sopq::is_special_orthogonal(k1, tol.algebraic) ||
        !sopq::is_special_orthogonal(k2, tol.algebraic))
        throw NotSpecialOrthogonal("standard_K_act: blocks must be special orthogonal");
    ProductSpherePoint out;
    out.v = numkit::mul(sopq::embed_SOp_plus1(k1), x.v);
    out.w = numkit::mul(k2, x.w);
    return out;
}

struct SliceCoordinates {
    Mat k1, k2;      // K witness with k0 * z = x
    double phi;      // slice angle, atan2(v_{p+1}, |v0|), in (-pi/2, pi/2]
};

inline SliceCoordinates point_to_slice(const Signature& sig, const ProductSpherePoint& x,
                                       const Tolerances& tol = {}) {
    check_unit(x.v, tol, "point_to_slice v");
    check_unit(x.w, tol, "point_to_slice w");
    Vec v0(x.v.begin(), x.v.begin() + sig.p);
    double alpha = numkit::norm(v0);
    SliceCoordinates sc;
    Vec e1(sig.p, 0.0), eps1(sig.q, 0.0);
    e1[0] = 1.0;
    eps1[0] = 1.0;
    sc.k1 = alpha < 1e-12 ? numkit::eye(sig.p)
                          : numkit::rotation_sending(e1, numkit::scaled(v0, 1.0 / alpha), tol);
    sc.k2 = numkit::rotation_sending(eps1, x.w, tol);
    sc.phi = std::atan2(x.v[sig.p], alpha);
    return sc;
}

// ---------------------------------------------------------------------------
// Open-orbit charts

namespace detail {

// Degree-8 even fit of an odd-function ratio F(s)/s, interpolated in s^2 at
// Chebyshev nodes of [0.0004, 0.04] and validated against samples on
// [0.02, 0.2].
struct EvenRatioFit {
    std::array<double, 5> c{};
    double lo = 4e-4, hi = 1e-2;

    double operator()(double s) const {
        double sigma = s * s;
        double t = std::clamp(2 * (sigma - lo) / (hi - lo) - 1.0, -1.2, 1.2);
        // Clenshaw
        double b1 = 0, b2 = 0;
        for (int j = 4; j >= 1; --j) {
            double b0 = 2 * t * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c[0];
    }
};

inline EvenRatioFit make_even_fit(const std::function<double(double)>& ratio) {
    EvenRatioFit fit;
    const int N = 5;
    std::array<double, N> vals;
    for (int k = 0; k < N; ++k) {
        double t = std::cos(kPi * (k + 0.5) / N);
        double sigma = fit.lo + (fit.hi - fit.lo) * (t + 1.0) / 2.0;
        vals[k] = ratio(std::sqrt(sigma));
    }
    for (int j = 0; j < N; ++j) {
        double acc = 0;
        for (int k = 0; k < N; ++k) acc += vals[k] * std::cos(j * kPi * (k + 0.5) / N);
        fit.c[j] = (j == 0 ? 1.0 : 2.0) * acc / N;
    }
    double worst = 0;
    for (int i = 0; i <= 18; ++i) {
        double s = 0.02 + (0.1 - 0.02) * i / 18.0;
        worst = std::max(worst, std::fabs(fit(s) - ratio(s)));
    }
    if (worst > 1e-10)
        throw BadParameters("even-ratio fit residual above 1e-10");
    return fit;
}

// Odd-over-s chart ratio: the even fit above handles the removable
// singularity of the zero-deformation closed form; the deformation is an
// even correction, continued numerically and frozen below a small floor
// (its variation there is O(floor^2)).
struct ChartRatio {
    EvenRatioFit baseFit;
    std::function<double(double)> baseExact;
    std::function<double(double)> exact;
    double floor = 1e-5;

    double operator()(double s) const {
        double se = std::max(s, floor);
        return baseFit(s) + (exact(se) - baseExact(se));
    }
};

inline ChartRatio make_chart_ratio(std::function<double(double)> baseExact,
                                   std::function<double(double)> exact) {
    ChartRatio r;
    r.baseFit = make_even_fit(baseExact);
    r.baseExact = std::move(baseExact);
    r.exact = std::move(exact);
    return r;
}

// a = 0 closed forms of the two chart ratios for the basic J1 family:
// f0(phi(s)) = tanh((n/2) atanh s) and cos(phi0*(s)) = tanh((2/n) atanh s).
inline double base_pole_ratio(int n, double s) {
    return std::tanh(0.5 * n * std::atanh(s)) / s;
}

inline double base_inverse_ratio(int n, double s) {
    return std::tanh((2.0 / n) * std::atanh(s)) / s;
}

}  // namespace detail

inline constexpr double kChartSwitch = 0.02;  // |v0| below this uses the even fit

// F0: open orbit of a pole -> the projective-model orbit O^1 = {|x| < |y|}.
// The side (which pole's orbit) is read from the sign of v_{p+1}.
inline SpherePoint chart_F0(const Signature& sig, const ProductSpherePoint& x,
                            const FlowFunctionPair& pair, const Tolerances& tol = {}) {
    check_unit(x.v, tol, "chart_F0 v");
    Vec v0(x.v.begin(), x.v.begin() + sig.p);
    double seg = numkit::norm(v0);
    double beta = x.v[sig.p];
    if (std::fabs(beta) < 1e-12) throw OutsideDomain("chart_F0: point on the closed orbit");
    double phi = std::atan2(beta, seg);
    double fv = pair.f(phi);
    if (std::fabs(fv) >= 1.0 - 1e-12) throw OutsideDomain("chart_F0: |f| = 1");
    double H;
    if (seg >= kChartSwitch) {
        H = fv / seg;
    } else {
        bool plus = beta > 0;
        int n = pair.flow.n;
        auto exact = [&pair, plus](double s) {
            double ph = std::atan2(plus ? std::sqrt(1 - s * s) : -std::sqrt(1 - s * s), s);
            return pair.f(ph) / s;
        };
        auto base = [n](double s) { return detail::base_pole_ratio(n, s); };
        H = detail::make_chart_ratio(base, exact)(seg);
    }
    SpherePoint out;
    out.y.assign(sig.n(), 0.0);
    double scale = 1.0 / std::sqrt(1.0 + fv * fv);
    for (int i = 0; i < sig.p; ++i) out.y[i] = H * v0[i] * scale;
    for (int k = 0; k < sig.q; ++k) out.y[sig.p + k] = x.w[k] * scale;
    double n = numkit::norm(out.y);
    for (double& c : out.y) c /= n;
    return out;
}

enum class OrbitSide { PolePlus, PoleMinus };

// F1 = F0^{-1}, into the orbit selected by `side`.
inline ProductSpherePoint chart_F1(const Signature& sig, const SpherePoint& ypt,
                                   const FlowFunctionPair& pair, OrbitSide side,
                                   const Tolerances& tol = {}) {
    check_unit(ypt.y, tol, "chart_F1 y");
    Vec xpart(ypt.y.begin(), ypt.y.begin() + sig.p);
    Vec ypartv(ypt.y.begin() + sig.p, ypt.y.end());
    double nx = numkit::norm(xpart), ny = numkit::norm(ypartv);
    if (!(nx < ny)) throw OutsideDomain("chart_F1: needs |x| < |y|");
    double s = nx / ny;
    const auto& geo = pair.geometry();
    int arcIndex = (side == OrbitSide::PolePlus) ? 0 : 1;
    ProductSpherePoint out;
    out.v.assign(sig.p + 1, 0.0);
    out.w.assign(sig.q, 0.0);
    double alpha, beta;
    if (s < 1e-300) {
        alpha = 0.0;
        beta = (side == OrbitSide::PolePlus) ? 1.0 : -1.0;
    } else {
        double phiStar = circleflow::invert_transit(geo, arcIndex, std::atanh(std::min(s, 1.0 - 1e-16)));
        alpha = std::cos(phiStar);
        beta = std::sin(phiStar);
    }
    if (s >= kChartSwitch) {
        for (int i = 0; i < sig.p; ++i) out.v[i] = alpha / nx * xpart[i];
    } else if (s >= 1e-300) {
        int n = pair.flow.n;
        auto exact = [&geo, arcIndex](double ss) {
            double phi = circleflow::invert_transit(geo, arcIndex, std::atanh(ss));
            return std::cos(phi) / ss;
        };
        auto base = [n](double ss) { return detail::base_inverse_ratio(n, ss); };
        double A = detail::make_chart_ratio(base, exact)(s);
        for (int i = 0; i < sig.p; ++i) out.v[i] = A / ny * xpart[i];
    }
    out.v[sig.p] = beta;
    double nv = numkit::norm(out.v);
    for (double& c : out.v) c /= nv;
    out.w = numkit::scaled(ypartv, 1.0 / ny);
    return out;
}

inline SpherePoint projective_act(const GroupElement& g, const SpherePoint& y) {
    SpherePoint out{numkit::mul(g.mat, y.y)};
    double n = numkit::norm(out.y);
    if (n < 1e-300) throw EvaluatorFailure("projective_act: zero image");
    for (double& c : out.y) c /= n;
    return out;
}

// ---------------------------------------------------------------------------
// The product-sphere action

inline ProductSpherePoint act_via_chart(const GroupElement& g, const ProductSpherePoint& x,
                                        const FlowFunctionPair& pair, const Tolerances& tol = {}) {
    const Signature& sig = g.sig;
    double beta = x.v[sig.p];
    if (std::fabs(beta) < 1e-12) throw OutsideDomain("act_via_chart: closed-orbit point");
    OrbitSide side = beta > 0 ? OrbitSide::PolePlus : OrbitSide::PoleMinus;
    SpherePoint y = chart_F0(sig, x, pair, tol);
    return chart_F1(sig, projective_act(g, y), pair, side, tol);
}

inline ProductSpherePoint act_product(const GroupElement& g, const ProductSpherePoint& x,
                                      const FlowFunctionPair& pair, const Tolerances& tol = {}) {
    if (pair.flow.kind != FlowKind::BasicJ1)
        throw WrongKind("act_product: BasicJ1 flow/function pair required");
    const Signature& sig = g.sig;
    SliceCoordinates sc = point_to_slice(sig, x, tol);
    double fv = pair.f(sc.phi);
    GroupElement gk0{sig, numkit::mul(g.mat, sopq::embed_K(sc.k1, sc.k2, sig, tol).mat)};
    try {
        DecompositionResult dec = decompose(gk0, ProjectivePoint::make(fv, 1.0), tol);
        double phiMoved = circleflow::flow_map(pair.flow, dec.theta, sc.phi, tol);
        Mat k1(sig.p, sig.p), k2(sig.q, sig.q);
        for (int i = 0; i < sig.p; ++i)
            for (int j = 0; j < sig.p; ++j) k1(i, j) = dec.k.mat(i, j);
        for (int i = 0; i < sig.q; ++i)
            for (int j = 0; j < sig.q; ++j) k2(i, j) = dec.k.mat(sig.p + i, sig.p + j);
        return standard_K_act(k1, k2, slice_point(sig, phiMoved), tol);
    } catch (const OutsideWPlus&) {
        if (std::fabs(fv) >= 1.0 - 1e-9)
            throw Unreachable("act_product: closed-orbit factorisation failed");
        return act_via_chart(g, x, pair, tol);
    }
}

// ---------------------------------------------------------------------------
// The sphere action (projective companion values)

inline SpherePoint act_sphere(const GroupElement& g, const SpherePoint& ypt,
                              const FlowFunctionPair& pair, const Tolerances& tol = {}) {
    if (pair.flow.kind != FlowKind::BasicJ1J2)
        throw WrongKind("act_sphere: BasicJ1J2 flow/function pair required");
    const Signature& sig = g.sig;
    check_unit(ypt.y, tol, "act_sphere y");
    Vec yp(ypt.y.begin(), ypt.y.begin() + sig.p);
    Vec yq(ypt.y.begin() + sig.p, ypt.y.end());
    double np = numkit::norm(yp), nq = numkit::norm(yq);
    Vec e1(sig.p, 0.0), eps1(sig.q, 0.0);
    e1[0] = 1.0;
    eps1[0] = 1.0;
    Mat k1 = np < 1e-12 ? numkit::eye(sig.p)
                        : numkit::rotation_sending(e1, numkit::scaled(yp, 1.0 / np), tol);
    Mat k2 = nq < 1e-12 ? numkit::eye(sig.q)
                        : numkit::rotation_sending(eps1, numkit::scaled(yq, 1.0 / nq), tol);
    double phi = std::atan2(nq, np);
    ProjectivePoint val = pair.f_tilde(phi);
    GroupElement gk0{sig, numkit::mul(g.mat, sopq::embed_K(k1, k2, sig, tol).mat)};
    DecompositionResult dec = decompose(gk0, val, tol);
    double phiMoved = circleflow::flow_map(pair.flow, dec.theta, phi, tol);
    SpherePoint out{numkit::mul(dec.k.mat, sphere_slice_vector(sig, phiMoved))};
    double n = numkit::norm(out.y);
    for (double& c : out.y) c /= n;
    return out;
}

// ---------------------------------------------------------------------------
// Identity checks for the projector conjugation law

struct ConjugationCheck {
    double projector_residual = 0.0;   // |m P m - lambda P(moved)|_F
    double stabilizer_residual = 0.0;  // conjugated stabilizer basis vs moved stabilizer
};

inline ConjugationCheck conjugation_identity_check(const Signature& sig, double theta, double f,
                                                   const Tolerances& tol = {}) {
    ConjugationCheck out;
    ProjectivePoint val = ProjectivePoint::make(f, 1.0);
    Mat m = sopq::boost(sig, theta).mat;
    Mat lhs = numkit::mul(numkit::mul(m, projector(sig, val).mat), m);
    ProjectivePoint moved = val.transported(theta);
    Mat rhs = numkit::scale(projector(sig, moved).mat, lambda_scale(theta, val));
    out.projector_residual = numkit::frob(numkit::add(lhs, rhs, -1.0));

    // m(theta) h_z m(-theta) should equal the stabilizer algebra of the
    // transported datum. (The boost conjugation transports the stabilizer
    // forward along the flow.)
    Vec uz = datum_vector(sig, val);
    Vec uMoved = datum_vector(sig, moved);
    auto hz = sopq::stabilizer_algebra(sig, uz, tol);
    auto hMoved = sopq::stabilizer_algebra(sig, uMoved, tol);
    std::vector<Mat> basis;
    for (const auto& el : hMoved.elements) {
        Mat b = el.mat;
        for (const Mat& e : basis) {
            double c = 0;
            for (size_t i = 0; i < b.a.size(); ++i) c += b.a[i] * e.a[i];
            b = numkit::add(b, e, -c);
        }
        double nb = numkit::frob(b);
        if (nb > 1e-10) basis.push_back(numkit::scale(b, 1.0 / nb));
    }
    Mat mInv = sopq::boost(sig, -theta).mat;
    for (const auto& el : hz.elements) {
        Mat conj = numkit::mul(numkit::mul(m, el.mat), mInv);
        Mat resid = conj;
        for (const Mat& e : basis) {
            double c = 0;
            for (size_t i = 0; i < resid.a.size(); ++i) c += conj.a[i] * e.a[i];
            resid = numkit::add(resid, e, -c);
        }
        out.stabilizer_residual =
            std::max(out.stabilizer_residual, numkit::frob(resid) / numkit::frob(conj));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bundle action over the null-line parabolic

struct BundlePoint {
    GroupElement g;
    double phi = 0.0;
};

// The boost parameter of an element preserving the null line through
// e1 + eps1: p (e1 + eps1) = c (e1 + eps1), pi(p) = log |c|.
inline double bundle_pi(const GroupElement& pelem, const Tolerances& tol = {}) {
    const Signature& sig = pelem.sig;
    Vec u0(sig.n(), 0.0);
    u0[0] = 1.0;
    u0[sig.p] = 1.0;
    Vec r = numkit::mul(pelem.mat, u0);
    double c = 0.5 * (r[0] + r[sig.p]);
    double resid = numkit::norm(numkit::axpy(r, u0, -c));
    if (resid > tol.action * std::max(1.0, numkit::norm(r)) || std::fabs(c) < 1e-300)
        throw NotInP("bundle_pi: the null line is not preserved");
    return std::log(std::fabs(c));
}

inline GroupElement group_inverse(const GroupElement& g) {
    Mat gm = sopq::gram(g.sig);
    return {g.sig, numkit::mul(numkit::mul(gm, numkit::transpose(g.mat)), gm)};
}

inline BundlePoint bundle_canonical(const BundlePoint& pt, const CircleFlow& flow,
                                    const Tolerances& tol = {}) {
    try {
        DecompositionResult dec = decompose(pt.g, ProjectivePoint::make(1.0, 1.0), tol);
        double phi = circleflow::flow_map(flow, dec.theta, pt.phi, tol);
        return {dec.k, phi};
    } catch (const Error& e) {
        throw CanonicalizationFailure(std::string("bundle_canonical: ") + e.what());
    }
}

inline BundlePoint bundle_act(const GroupElement& g, const BundlePoint& pt, const CircleFlow& flow,
                              const Tolerances& tol = {}) {
    BundlePoint moved{GroupElement{g.sig, numkit::mul(g.mat, pt.g.mat)}, pt.phi};
    return bundle_canonical(moved, flow, tol);
}

inline bool bundle_eq(const BundlePoint& a, const BundlePoint& b, const CircleFlow& flow,
                      const Tolerances& tol = {}) {
    GroupElement diff{a.g.sig, numkit::mul(group_inverse(b.g).mat, a.g.mat)};
    double theta;
    try {
        theta = bundle_pi(diff, tol);
    } catch (const NotInP&) {
        return false;
    }
    double moved = circleflow::flow_map(flow, theta, a.phi, tol);
    return angle_dist(moved, b.phi) <= std::max(tol.action, 100 * tol.ode);
}

// ---------------------------------------------------------------------------
// Role-swap adapter: the analogous construction on S^{p-1} x S^q

// Conjugating by the block-swap permutation identifies SO°(p,q) with
// SO°(q,p); the swapped product-sphere engine then acts on S^q x S^{p-1}
// and the adapter re-exposes the result in the original ordering.
struct SwapAdapter {
    Signature orig;
    Signature swapped;
    Mat perm;  // maps the q-block to the front
    FlowFunctionPair pair;

    SwapAdapter(const Signature& sig, const FlowFunctionPair& swappedPair)
        : orig(sig), swapped(sig.q, sig.p), perm(sig.n(), sig.n()), pair(swappedPair) {
        for (int k = 0; k < sig.q; ++k) perm(k, sig.p + k) = 1.0;
        for (int i = 0; i < sig.p; ++i) perm(sig.q + i, i) = 1.0;
    }

    GroupElement conjugate(const GroupElement& g, const Tolerances& tol = {}) const {
        Mat m = numkit::mul(numkit::mul(perm, g.mat), numkit::transpose(perm));
        return sopq::certify(m, swapped, tol);
    }

    // x = (v, w) with v in S^{p-1} subset R^p and w in S^q subset R^{q+1}
    std::pair<Vec, Vec> act(const GroupElement& g, const Vec& v, const Vec& w,
                            const Tolerances& tol = {}) const {
        ProductSpherePoint sw{w, v};
        ProductSpherePoint moved = act_product(conjugate(g, tol), sw, pair, tol);
        return {moved.w, moved.v};
    }
};

inline SwapAdapter swap_roles_adapter(const Signature& sig, const FlowFunctionPair& swappedPair) {
    return SwapAdapter(sig, swappedPair);
}

// ---------------------------------------------------------------------------
// Samplers shared by tests and verification suites

inline ProductSpherePoint random_product_point(const Signature& sig, Rng& rng) {
    auto unit = [&rng](int n) {
        Vec v(n);
        double s = 0;
        do {
            for (double& x : v) x = rng.uniform(-1.0, 1.0);
            s = numkit::norm(v);
        } while (s < 1e-3);
        return numkit::scaled(v, 1.0 / s);
    };
    return {unit(sig.p + 1), unit(sig.q)};
}

inline SpherePoint random_sphere_point(const Signature& sig, Rng& rng) {
    Vec v(sig.n());
    double s = 0;
    do {
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        s = numkit::norm(v);
    } while (s < 1e-3);
    return {numkit::scaled(v, 1.0 / s)};
}

}  // namespace orthoflow::engine
