#pragma once

// Numerical orbit analysis of the constructed actions: infinitesimal
// generator fields by central differences, orbit dimension and isotropy
// algebra by numerical rank, extraction of the projective companion value
// from the isotropy algebra, and orbit-type classification.

#include <memory>
#include <optional>

#include "orthoflow/action_engine.hpp"

namespace orthoflow::orbitlab {

using circleflow::ProjectivePoint;
using engine::ProductSpherePoint;
using engine::SpherePoint;
using numkit::Mat;
using numkit::Vec;
using sopq::GroupElement;
using sopq::Signature;

enum class PointSpace { ProductSphere, Sphere, Bundle };

// A point is a flat coordinate vector: v ++ w for the product sphere, the
// ambient vector for the sphere, and the flattened group matrix followed by
// the fiber angle for the bundle.
using Point = Vec;

struct ActionHandle {
    Signature sig;
    PointSpace space = PointSpace::ProductSphere;
    std::function<Point(const GroupElement&, const Point&)> evaluate;
    std::function<Vec(const Point&)> embed;  // equivalence-invariant embedding
};

inline Point pack(const ProductSpherePoint& x) {
    Point p = x.v;
    p.insert(p.end(), x.w.begin(), x.w.end());
    return p;
}

inline ProductSpherePoint unpack_product(const Signature& sig, const Point& p) {
    ProductSpherePoint x;
    x.v.assign(p.begin(), p.begin() + sig.p + 1);
    x.w.assign(p.begin() + sig.p + 1, p.end());
    return x;
}

inline Point pack(const GroupElement& g, double phi) {
    Point p = g.mat.a;
    p.push_back(phi);
    return p;
}

inline ActionHandle product_action_handle(const Signature& sig,
                                          const circleflow::FlowFunctionPair& pair,
                                          const Tolerances& tol = {}) {
    ActionHandle h;
    h.sig = sig;
    h.space = PointSpace::ProductSphere;
    auto pairCopy = std::make_shared<circleflow::FlowFunctionPair>(pair);
    h.evaluate = [sig, pairCopy, tol](const GroupElement& g, const Point& p) {
        return pack(engine::act_product(g, unpack_product(sig, p), *pairCopy, tol));
    };
    h.embed = [](const Point& p) { return p; };
    return h;
}

inline ActionHandle sphere_action_handle(const Signature& sig,
                                         const circleflow::FlowFunctionPair& pair,
                                         const Tolerances& tol = {}) {
    ActionHandle h;
    h.sig = sig;
    h.space = PointSpace::Sphere;
    auto pairCopy = std::make_shared<circleflow::FlowFunctionPair>(pair);
    h.evaluate = [pairCopy, tol](const GroupElement& g, const Point& p) {
        return engine::act_sphere(g, SpherePoint{p}, *pairCopy, tol).y;
    };
    h.embed = [](const Point& p) { return p; };
    return h;
}

// The bundle handle acts by plain left multiplication on representatives
// and embeds classes through P-invariants: the projector onto the moved
// null line together with the fiber coordinate transported to the K-frame.
// The boost part of g relative to the null datum is log |g u0| / |u0|, so
// no factorisation is needed along the differentiation path.
inline ActionHandle bundle_action_handle(const Signature& sig, const circleflow::CircleFlow& flow,
                                         const Tolerances& tol = {}) {
    ActionHandle h;
    h.sig = sig;
    h.space = PointSpace::Bundle;
    auto flowCopy = std::make_shared<circleflow::CircleFlow>(flow);
    h.evaluate = [sig](const GroupElement& g, const Point& p) {
        Mat gm(sig.n(), sig.n());
        gm.a.assign(p.begin(), p.end() - 1);
        Point out = numkit::mul(g.mat, gm).a;
        out.push_back(p.back());
        return out;
    };
    h.embed = [sig, flowCopy, tol](const Point& p) {
        Mat gm(sig.n(), sig.n());
        gm.a.assign(p.begin(), p.end() - 1);
        double phi = p.back();
        Vec u0(sig.n(), 0.0);
        u0[0] = 1.0;
        u0[sig.p] = 1.0;
        Vec gu = numkit::mul(gm, u0);
        double boostPart = std::log(numkit::norm(gu) / std::sqrt(2.0));
        double tau = circleflow::flow_map(*flowCopy, boostPart, phi, tol);
        Vec e = numkit::scale(numkit::outer(gu, gu), 1.0 / numkit::dot(gu, gu)).a;
        e.push_back(std::cos(tau));
        e.push_back(std::sin(tau));
        return e;
    };
    return h;
}

// ---------------------------------------------------------------------------
// Generator fields and rank analysis

// Central differences with one Richardson step (h and h/2), one tangent
// vector per algebra basis element.
inline std::vector<Vec> generator_fields(const ActionHandle& action, const Point& x,
                                         double h = 1e-4) {
    if (h < 1e-6 || h > 1e-3) throw BadParameters("generator_fields: h outside [1e-6, 1e-3]");
    auto basis = sopq::algebra_basis(action.sig);
    std::vector<Vec> fields;
    try {
        for (const auto& b : basis) {
            auto tangent = [&](double step) {
                GroupElement plus{action.sig, numkit::matrix_exp(numkit::scale(b.mat, step))};
                GroupElement minus{action.sig, numkit::matrix_exp(numkit::scale(b.mat, -step))};
                Vec fp = action.embed(action.evaluate(plus, x));
                Vec fm = action.embed(action.evaluate(minus, x));
                return numkit::scaled(numkit::axpy(fp, fm, -1.0), 1.0 / (2 * step));
            };
            Vec coarse = tangent(h), fine = tangent(h / 2);
            fields.push_back(numkit::axpy(numkit::scaled(fine, 4.0 / 3.0), coarse, -1.0 / 3.0));
        }
    } catch (const Error& e) {
        throw EvaluatorFailure(std::string("generator_fields: ") + e.what());
    }
    return fields;
}

inline Mat stack_fields(const std::vector<Vec>& fields) {
    Mat m(static_cast<int>(fields[0].size()), static_cast<int>(fields.size()));
    for (size_t j = 0; j < fields.size(); ++j)
        for (size_t i = 0; i < fields[j].size(); ++i)
            m(static_cast<int>(i), static_cast<int>(j)) = fields[j][i];
    return m;
}

struct RankReport {
    int rank = 0;
    double gap = 0.0;  // singular value ratio across the cut
};

inline RankReport rank_with_gap(const Mat& stacked, const Tolerances& tol) {
    Vec s = numkit::singular_values(stacked);
    RankReport rep;
    if (s.empty() || s[0] == 0.0) return rep;
    for (double sv : s)
        if (sv > tol.rank * s[0]) ++rep.rank;
    if (rep.rank == 0 || rep.rank >= static_cast<int>(s.size()))
        rep.gap = std::numeric_limits<double>::infinity();
    else
        rep.gap = s[rep.rank - 1] / std::max(s[rep.rank], 1e-300);
    return rep;
}

inline int orbit_dimension(const ActionHandle& action, const Point& x, const Tolerances& tol = {},
                           double h = 1e-4) {
    RankReport rep = rank_with_gap(stack_fields(generator_fields(action, x, h)), tol);
    if (std::isfinite(rep.gap) && rep.gap < 10.0)
        throw IllConditioned("orbit_dimension: singular value gap below 10");
    return rep.rank;
}

// Kernel of c -> sum_i c_i V_i(x), as coefficient vectors over
// algebra_basis and as algebra elements.
struct IsotropyAlgebra {
    std::vector<Vec> coefficients;
    std::vector<sopq::AlgebraElement> elements;
};

inline IsotropyAlgebra isotropy_algebra(const ActionHandle& action, const Point& x,
                                        const Tolerances& tol = {}, double h = 1e-4) {
    Mat stacked = stack_fields(generator_fields(action, x, h));
    IsotropyAlgebra out;
    out.coefficients = numkit::kernel_basis(stacked, tol.rank);
    for (const Vec& c : out.coefficients)
        out.elements.push_back(sopq::from_coefficients(action.sig, c));
    return out;
}

// ---------------------------------------------------------------------------
// Companion-value extraction and classification

namespace detail {

// Largest principal angle (as a residual in [0, 1]) of the containment
// h_{[a:b]} <= span(iso).
inline double containment_residual(const Signature& sig, const ProjectivePoint& val,
                                   const std::vector<sopq::AlgebraElement>& iso,
                                   const Tolerances& tol) {
    Vec v = engine::datum_vector(sig, val);
    auto hv = sopq::stabilizer_algebra(sig, v, tol);
    // orthonormal basis of the isotropy span under the Frobenius product
    std::vector<Mat> basis;
    for (const auto& el : iso) {
        Mat b = el.mat;
        for (const Mat& e : basis) {
            double c = 0;
            for (size_t i = 0; i < b.a.size(); ++i) c += b.a[i] * e.a[i];
            b = numkit::add(b, e, -c);
        }
        double nb = numkit::frob(b);
        if (nb > 1e-10) basis.push_back(numkit::scale(b, 1.0 / nb));
    }
    double worst = 0;
    for (const auto& el : hv.elements) {
        Mat resid = el.mat;
        for (const Mat& e : basis) {
            double c = 0;
            for (size_t i = 0; i < resid.a.size(); ++i) c += el.mat.a[i] * e.a[i];
            resid = numkit::add(resid, e, -c);
        }
        worst = std::max(worst, numkit::frob(resid) / numkit::frob(el.mat));
    }
    return worst;
}

inline double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              int iters) {
    const double inv = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv * (b - a), x2 = a + inv * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace detail

// The projective point [a : b] whose stabilizer algebra sits inside the
// isotropy algebra at z, located by golden-section search over the
// projective angle with three window restarts.
inline ProjectivePoint extract_f_tilde(const ActionHandle& action, const Point& z,
                                       const Tolerances& tol = {}) {
    IsotropyAlgebra iso = isotropy_algebra(action, z, tol);
    auto objective = [&](double psi) {
        return detail::containment_residual(action.sig,
                                            ProjectivePoint::make(std::cos(psi), std::sin(psi)),
                                            iso.elements, tol);
    };
    double best = 0, bestVal = std::numeric_limits<double>::infinity();
    for (int w = 0; w < 3; ++w) {
        double lo = kPi * w / 3.0, hi = kPi * (w + 1) / 3.0;
        double psi = detail::golden_minimize(objective, lo, hi, 40);
        double val = objective(psi);
        if (val < bestVal) {
            bestVal = val;
            best = psi;
        }
    }
    // refine around the winner
    double psi = detail::golden_minimize(objective, best - 0.05, best + 0.05, 48);
    if (objective(psi) > 1e-3)
        throw NoContainment("extract_f_tilde: no stabilizer algebra contained in the isotropy");
    return ProjectivePoint::make(std::cos(psi), std::sin(psi));
}

enum class OrbitType { Open, ClosedPnull, Nullcone, StabSOp1q, StabSOpq1, Unknown };

struct OrbitReport {
    int dimension = 0;
    int isotropyDim = 0;
    std::optional<ProjectivePoint> fTilde;
    OrbitType orbitType = OrbitType::Unknown;
    OrbitType stabilizerLabel = OrbitType::Unknown;  // StabSO* refinement of Open
    double stabilizedFormValue = 0.0;  // form value of the common fixed vector
    int excessIsotropy = 0;            // isotropy dim minus dim h_{[a:b]}
};

inline bool is_open(OrbitType t) {
    return t == OrbitType::Open || t == OrbitType::StabSOp1q || t == OrbitType::StabSOpq1 ||
           t == OrbitType::Nullcone;
}

inline OrbitReport classify_orbit(const ActionHandle& action, const Point& x,
                                  const Tolerances& tol = {}) {
    const Signature& sig = action.sig;
    Mat stacked = stack_fields(generator_fields(action, x));
    RankReport rep = rank_with_gap(stacked, tol);
    OrbitReport out;
    out.dimension = rep.rank;
    IsotropyAlgebra iso;
    iso.coefficients = numkit::kernel_basis(stacked, tol.rank);
    for (const Vec& c : iso.coefficients)
        iso.elements.push_back(sopq::from_coefficients(sig, c));
    out.isotropyDim = static_cast<int>(iso.elements.size());

    // common fixed vector of the isotropy algebra
    std::optional<Vec> fixedVec;
    if (!iso.elements.empty()) {
        Mat stackedIso(static_cast<int>(iso.elements.size()) * sig.n(), sig.n());
        for (size_t k = 0; k < iso.elements.size(); ++k)
            for (int i = 0; i < sig.n(); ++i)
                for (int j = 0; j < sig.n(); ++j)
                    stackedIso(static_cast<int>(k) * sig.n() + i, j) = iso.elements[k].mat(i, j);
        auto kernel = numkit::kernel_basis(stackedIso, 1e-6);
        if (kernel.size() == 1) fixedVec = kernel.front();
    }

    int nm1 = sig.n() - 1;
    if (out.dimension == nm1 && fixedVec) {
        double q = sopq::form_value(sig, *fixedVec) / numkit::dot(*fixedVec, *fixedVec);
        out.stabilizedFormValue = q;
        if (std::fabs(q) < 1e-6) {
            out.orbitType = OrbitType::Nullcone;
        } else {
            out.orbitType = OrbitType::Open;
            out.stabilizerLabel = q > 0 ? OrbitType::StabSOpq1 : OrbitType::StabSOp1q;
        }
        // planar stabilized vector => the slice companion value
        double offPlane = 0;
        for (int i = 0; i < sig.n(); ++i)
            if (i != 0 && i != sig.p) offPlane = std::max(offPlane, std::fabs((*fixedVec)[i]));
        if (offPlane < 1e-6) {
            out.fTilde = ProjectivePoint::make((*fixedVec)[0], (*fixedVec)[sig.p]);
            Vec v = engine::datum_vector(sig, *out.fTilde);
            out.excessIsotropy = out.isotropyDim -
                                 static_cast<int>(sopq::stabilizer_algebra(sig, v, tol)
                                                      .elements.size());
        }
    } else if (out.dimension == nm1 - 1) {
        out.orbitType = OrbitType::ClosedPnull;
        // the isotropy holds a full parabolic, which preserves a null line
        // rather than fixing a vector; at slice points that line is one of
        // the two planar null directions
        for (double sgn : {1.0, -1.0}) {
            ProjectivePoint cand = ProjectivePoint::make(sgn, 1.0);
            if (detail::containment_residual(sig, cand, iso.elements, tol) < 1e-3) {
                out.fTilde = cand;
                Vec v = engine::datum_vector(sig, cand);
                out.excessIsotropy =
                    out.isotropyDim -
                    static_cast<int>(sopq::stabilizer_algebra(sig, v, tol).elements.size());
                break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed-set scan along the slice circle

enum class ScanSubgroup { SOp, SOq, H };

// Tests invariance of slice points under a generating sample of the
// subgroup: two seeded random elements plus the reflection involution.
// `mirror` scans the second slice circle of the product model (the one
// with the reflected second factor).
inline std::vector<double> fixed_set_scan(const ActionHandle& action, ScanSubgroup sub,
                                          int gridsize = 360, const Tolerances& tol = {},
                                          std::uint64_t seed = 42, bool mirror = false) {
    const Signature& sig = action.sig;
    Rng rng(seed);
    std::vector<GroupElement> gens;
    auto so = [&](int n) { return sopq::random_special_orthogonal(n, rng); };
    if (sub == ScanSubgroup::SOp) {
        gens.push_back(sopq::embed_K(so(sig.p), numkit::eye(sig.q), sig, tol));
        gens.push_back(sopq::embed_K(so(sig.p), numkit::eye(sig.q), sig, tol));
        gens.push_back(sopq::involution(sig, 1));
    } else if (sub == ScanSubgroup::SOq) {
        gens.push_back(sopq::embed_K(numkit::eye(sig.p), so(sig.q), sig, tol));
        gens.push_back(sopq::embed_K(numkit::eye(sig.p), so(sig.q), sig, tol));
        gens.push_back(sopq::involution(sig, 2));
    } else {
        Mat h1 = numkit::eye(sig.p), h2 = numkit::eye(sig.q);
        Mat r1 = so(sig.p - 1), r2 = so(sig.q - 1);
        for (int i = 0; i < sig.p - 1; ++i)
            for (int j = 0; j < sig.p - 1; ++j) h1(i + 1, j + 1) = r1(i, j);
        for (int i = 0; i < sig.q - 1; ++i)
            for (int j = 0; j < sig.q - 1; ++j) h2(i + 1, j + 1) = r2(i, j);
        gens.push_back(sopq::embed_K(h1, h2, sig, tol));
    }
    std::vector<double> fixed;
    for (int k = 0; k < gridsize; ++k) {
        double phi = kTwoPi * k / gridsize;
        Point x;
        if (action.space == PointSpace::ProductSphere) {
            engine::ProductSpherePoint z = engine::slice_point(sig, phi);
            if (mirror) z.w[0] = -1.0;
            x = pack(z);
        } else if (action.space == PointSpace::Sphere) {
            x = engine::sphere_slice_vector(sig, phi);
        } else {
            x = pack(sopq::identity(sig), phi);
        }
        Vec ex = action.embed(x);
        bool allFixed = true;
        for (const auto& g : gens) {
            Vec moved = action.embed(action.evaluate(g, x));
            if (numkit::norm(numkit::axpy(moved, ex, -1.0)) > tol.action) {
                allFixed = false;
                break;
            }
        }
        if (allFixed) fixed.push_back(phi);
    }
    return fixed;
}

}  // namespace orthoflow::orbitlab
