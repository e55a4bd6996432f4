#pragma once

// Seeded verification suites over the whole engine. Each suite runs a set
// of named checks against pinned thresholds and reports values; the CLI
// `verify` subcommand and the acceptance runner are thin wrappers. Samples
// draw their randomness from per-index seeds (seed + i), so results do not
// depend on evaluation order.

#include <chrono>

#include "orthoflow/action_engine.hpp"
#include "orthoflow/ledger.hpp"
#include "orthoflow/orbit_lab.hpp"

namespace orthoflow::verify {

using circleflow::CircleFlow;
using circleflow::FlowFunctionPair;
using circleflow::FlowKind;
using circleflow::ProjectivePoint;
using engine::ProductSpherePoint;
using engine::SpherePoint;
using numkit::Mat;
using numkit::Vec;
using sopq::GroupElement;
using sopq::Signature;

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;

    SuiteReport() = default;
    explicit SuiteReport(std::string name) : suite(std::move(name)) {}

    void add(const std::string& name, double value, double threshold) {
        checks.push_back({name, value, threshold, value <= threshold});
    }
    void add_flag(const std::string& name, bool ok) {
        checks.push_back({name, ok ? 0.0 : 1.0, 0.5, ok});
    }
    bool pass() const {
        for (const Check& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct VerifyConfig {
    int p = 3;
    int q = 3;
    FlowKind kind = FlowKind::BasicJ1;
    int n = 1;
    double a = 0.0;
    int samples = 100;
    std::uint64_t seed = 42;
    Tolerances tol;
};

namespace detail {

class Timer {
public:
    Timer(SuiteReport& rep) : rep_(rep), start_(std::chrono::steady_clock::now()) {}
    ~Timer() {
        rep_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                           .count();
    }

private:
    SuiteReport& rep_;
    std::chrono::steady_clock::time_point start_;
};

inline GroupElement sample_group(const Signature& sig, std::uint64_t seed, double normCap,
                                 const Tolerances& tol) {
    Rng rng(seed);
    return sopq::random_group_element(sig, rng, normCap, tol);
}

}  // namespace detail

// Group membership of random exponentials across three signatures.
inline SuiteReport suite_membership(const VerifyConfig& cfg) {
    SuiteReport rep{"membership"};
    detail::Timer timer(rep);
    for (auto [p, q] : {std::pair{3, 3}, {3, 4}, {4, 5}}) {
        Signature sig(p, q);
        double worst = 0;
        for (int i = 0; i < 500; ++i) {
            Rng rng(cfg.seed + i + 1000ull * p + q);
            auto basis = sopq::algebra_basis(sig);
            Vec c(basis.size());
            for (double& x : c) x = rng.uniform(-1.0, 1.0);
            Mat g = numkit::matrix_exp(sopq::from_coefficients(sig, c).mat);
            worst = std::max(worst, sopq::relation_residual(sig, g));
        }
        rep.add("relation residual (" + std::to_string(p) + "," + std::to_string(q) + ")", worst,
                1e-9);
    }
    return rep;
}

inline SuiteReport suite_action_axiom(const VerifyConfig& cfg) {
    SuiteReport rep{"action-axiom"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    FlowFunctionPair pair = circleflow::make_pair(circleflow::make_flow(FlowKind::BasicJ1, 1, 0.3));
    double worst = 0;
    for (int i = 0; i < cfg.samples; ++i) {
        Rng rng(cfg.seed + i);
        GroupElement g1 = sopq::random_group_element(sig, rng, 1.5, cfg.tol);
        GroupElement g2 = sopq::random_group_element(sig, rng, 1.5, cfg.tol);
        ProductSpherePoint x = engine::random_product_point(sig, rng);
        ProductSpherePoint seq =
            engine::act_product(g1, engine::act_product(g2, x, pair, cfg.tol), pair, cfg.tol);
        GroupElement g12{sig, numkit::mul(g1.mat, g2.mat)};
        ProductSpherePoint comp = engine::act_product(g12, x, pair, cfg.tol);
        worst = std::max(worst, engine::distance(seq, comp));
    }
    rep.add("composed vs sequential", worst, 1e-6);
    return rep;
}

inline SuiteReport suite_k_extension(const VerifyConfig& cfg) {
    SuiteReport rep{"k-extension"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    FlowFunctionPair pair =
        circleflow::make_pair(circleflow::make_flow(FlowKind::BasicJ1, cfg.n, cfg.a));
    double worst = 0;
    for (int i = 0; i < cfg.samples; ++i) {
        Rng rng(cfg.seed + i);
        Mat k1 = sopq::random_special_orthogonal(sig.p, rng);
        Mat k2 = sopq::random_special_orthogonal(sig.q, rng);
        ProductSpherePoint x = engine::random_product_point(sig, rng);
        ProductSpherePoint a = engine::act_product(sopq::embed_K(k1, k2, sig), x, pair, cfg.tol);
        ProductSpherePoint b = engine::standard_K_act(k1, k2, x, cfg.tol);
        worst = std::max(worst, engine::distance(a, b));
    }
    rep.add("action vs standard K action", worst, 1e-10);
    return rep;
}

inline SuiteReport suite_cross_ratio(const VerifyConfig& cfg) {
    SuiteReport rep{"cross-ratio"};
    detail::Timer timer(rep);
    FlowFunctionPair pair =
        circleflow::make_pair(circleflow::make_flow(FlowKind::BasicJ1, cfg.n, cfg.a));
    double worst = 0;
    for (int i = 0; i < 30; ++i) {
        double theta = -2.0 + 4.0 * i / 29;
        for (int k = 0; k < 30; ++k) {
            double phi = kTwoPi * (k + 0.5) / 30;
            if (pair.geometry().nearest_fixed_point_dist(phi) < 1e-3) continue;
            double fv = pair.f(phi), t = std::tanh(theta);
            double lhs = pair.f(circleflow::flow_map(pair.flow, theta, phi, cfg.tol));
            worst = std::max(worst, std::fabs(lhs - (fv + t) / (1 + fv * t)));
        }
    }
    rep.add("transport law residual on the 30x30 grid", worst, 1e-7);
    return rep;
}

inline SuiteReport suite_eq10(const VerifyConfig& cfg) {
    SuiteReport rep{"eq10"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    double worst = 0;
    for (int i = 0; i <= 20; ++i) {
        double theta = -2.0 + 4.0 * i / 20;
        for (int k = 0; k <= 20; ++k) {
            double f = -0.95 + 1.9 * k / 20;
            worst = std::max(
                worst, engine::conjugation_identity_check(sig, theta, f, cfg.tol).projector_residual);
        }
    }
    rep.add("projector conjugation residual", worst, 1e-9);
    return rep;
}

inline SuiteReport suite_charts(const VerifyConfig& cfg) {
    SuiteReport rep{"charts"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    FlowFunctionPair pair = circleflow::make_pair(circleflow::make_flow(FlowKind::BasicJ1, 1, 0.3));
    double worstRound = 0, worstRoute = 0;
    int used = 0;
    for (int i = 0; used < cfg.samples; ++i) {
        Rng rng(cfg.seed + i);
        ProductSpherePoint x = engine::random_product_point(sig, rng);
        if (std::fabs(x.v[sig.p]) < 1e-3) continue;
        engine::OrbitSide side =
            x.v[sig.p] > 0 ? engine::OrbitSide::PolePlus : engine::OrbitSide::PoleMinus;
        ProductSpherePoint back = engine::chart_F1(
            sig, engine::chart_F0(sig, x, pair, cfg.tol), pair, side, cfg.tol);
        worstRound = std::max(worstRound, engine::distance(back, x));
        GroupElement g = sopq::random_group_element(sig, rng, 1.2, cfg.tol);
        ProductSpherePoint a = engine::act_product(g, x, pair, cfg.tol);
        ProductSpherePoint b = engine::act_via_chart(g, x, pair, cfg.tol);
        worstRoute = std::max(worstRoute, engine::distance(a, b));
        ++used;
    }
    rep.add("F1 o F0 round trip", worstRound, 1e-8);
    rep.add("chart route vs slice route", worstRoute, 1e-6);
    return rep;
}

inline SuiteReport suite_decomposition(const VerifyConfig& cfg) {
    SuiteReport rep{"decomposition"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    double worstResidual = 0, minMargin = std::numeric_limits<double>::infinity();
    int boundaryViolations = 0, accepted = 0;
    for (int i = 0; i < 500; ++i) {
        Rng rng(cfg.seed + i);
        GroupElement g = sopq::random_group_element(sig, rng, 1.5, cfg.tol);
        double f = rng.uniform(-0.9, 0.9);
        try {
            engine::DecompositionResult d =
                engine::decompose(g, ProjectivePoint::make(f, 1.0), cfg.tol);
            worstResidual = std::max(worstResidual, d.residual);
            minMargin = std::min(minMargin, d.margin);
            ++accepted;
        } catch (const OutsideWPlus&) {
            Vec uz(sig.n(), 0.0);
            uz[0] = f;
            uz[sig.p] = 1.0;
            Vec gu = numkit::mul(g.mat, uz);
            double T = numkit::dot(gu, gu) / numkit::dot(uz, uz);
            double s = 2 * f / (1 + f * f);
            if (T - std::sqrt(1 - s * s) > 1e-6) ++boundaryViolations;
        }
    }
    rep.add("accepted-branch residual", worstResidual, cfg.tol.action);
    rep.add("refusals away from the boundary", boundaryViolations, 0.0);
    rep.checks.push_back({"uniqueness margin (min)", minMargin, 10.0, minMargin >= 10.0});
    rep.add_flag("acceptances observed", accepted > 400);
    return rep;
}

inline SuiteReport suite_tables(const VerifyConfig& cfg) {
    (void)cfg;
    SuiteReport rep{"tables"};
    detail::Timer timer(rep);
    int mismatches = 0, codimViolations = 0;
    for (int p = 3; p <= 9; ++p)
        for (int q = 3; q <= p; ++q) {
            try {
                ledger::ParabolicDims nl = ledger::parabolic_dims(ledger::ParabolicKind::NullLine, p, q);
                if (nl.codim != p + q - 2) ++codimViolations;
                ledger::parabolic_dims(ledger::ParabolicKind::MaxIsotropic, p, q);
            } catch (const Error&) {
                ++mismatches;  // the op cross-checks its two routes internally
            }
        }
    rep.add("closed form vs root count mismatches", mismatches, 0.0);
    rep.add("null-line codimension rule violations", codimViolations, 0.0);
    rep.add("max-isotropic codim at (4,3)",
            std::fabs(ledger::parabolic_dims(ledger::ParabolicKind::MaxIsotropic, 4, 3).codim - 6.0),
            0.0);
    rep.add("max-isotropic codim at (3,3)",
            std::fabs(ledger::parabolic_dims(ledger::ParabolicKind::MaxIsotropic, 3, 3).codim - 3.0),
            0.0);
    int rowMismatches = 0;
    for (const auto& row : ledger::table1_rows(3, 12))
        if (row.dimOrbit != row.dimOrbitPrinted) ++rowMismatches;
    rep.add("orbit table printed-dimension mismatches", rowMismatches, 0.0);
    return rep;
}

inline SuiteReport suite_orbit_census(const VerifyConfig& cfg) {
    SuiteReport rep{"orbit-census"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    FlowFunctionPair pair = circleflow::make_pair(circleflow::make_flow(FlowKind::BasicJ1, 1, 0.3));
    orbitlab::ActionHandle handle = orbitlab::product_action_handle(sig, pair, cfg.tol);

    // rank-based dimensions at an open-orbit point (f = 0.4) and a slice
    // fixed point
    double lo = 1e-6, hi = kPi - 1e-6;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (pair.f(mid) > 0.4 ? lo : hi) = mid;
    }
    int dimOpen = orbitlab::orbit_dimension(handle, orbitlab::pack(engine::slice_point(sig, lo)),
                                            cfg.tol);
    int dimClosed =
        orbitlab::orbit_dimension(handle, orbitlab::pack(engine::slice_point(sig, 0.0)), cfg.tol);
    rep.add("open orbit dimension error", std::fabs(dimOpen - (sig.n() - 1.0)), 0.0);
    rep.add("closed orbit dimension error", std::fabs(dimClosed - (sig.n() - 2.0)), 0.0);

    double worstAngle = 0;
    for (int k = 0; k < 20; ++k) {
        double theta = -1.4 + 2.8 * k / 19.0;
        double phi = circleflow::flow_map(pair.flow, theta, kPi / 2, cfg.tol);
        ProjectivePoint got =
            orbitlab::extract_f_tilde(handle, orbitlab::pack(engine::slice_point(sig, phi)), cfg.tol);
        ProjectivePoint expect = ProjectivePoint::make(std::tanh(theta), 1.0);
        worstAngle = std::max(worstAngle, ProjectivePoint::distance(got, expect));
    }
    rep.add("extracted companion value vs tanh transport", worstAngle, 1e-3);

    auto fixedP = orbitlab::fixed_set_scan(handle, orbitlab::ScanSubgroup::SOp, 360, cfg.tol,
                                           cfg.seed);
    auto fixedQ = orbitlab::fixed_set_scan(handle, orbitlab::ScanSubgroup::SOq, 360, cfg.tol,
                                           cfg.seed);
    bool poles = fixedP.size() == 2 && angle_dist(fixedP[0], kPi / 2) < 1e-9 &&
                 angle_dist(fixedP[1], 3 * kPi / 2) < 1e-9;
    rep.add_flag("first-factor fixed set is the pole pair", poles);
    rep.add_flag("second-factor fixed set empty", fixedQ.empty());

    CircleFlow bundleFlow = circleflow::make_flow(FlowKind::BasicJ1, 1, 0.2);
    orbitlab::ActionHandle hb = orbitlab::bundle_action_handle(sig, bundleFlow, cfg.tol);
    rep.add_flag("bundle: no first-factor fixed points",
                 orbitlab::fixed_set_scan(hb, orbitlab::ScanSubgroup::SOp, 90, cfg.tol, cfg.seed)
                     .empty());
    rep.add_flag("bundle: no second-factor fixed points",
                 orbitlab::fixed_set_scan(hb, orbitlab::ScanSubgroup::SOq, 90, cfg.tol, cfg.seed)
                     .empty());
    return rep;
}

inline SuiteReport suite_flow_oracles(const VerifyConfig& cfg) {
    SuiteReport rep{"flow-oracles"};
    detail::Timer timer(rep);
    double worstFlow = 0, worstF = 0;
    for (int n : {1, 2, 3}) {
        CircleFlow flow = circleflow::make_flow(FlowKind::BasicJ1, n, 0.0);
        FlowFunctionPair pair = circleflow::make_pair(flow);
        for (double theta : {-5.0, -2.5, -1.0, 1.0, 2.5, 5.0}) {
            for (int k = 1; k < 16; ++k) {
                double phi = kPi * k / 16.0;
                double t = std::tan(phi / 2) * std::exp(-2.0 * theta / n);
                double closed = wrap_angle(2 * std::atan(t));
                worstFlow = std::max(
                    worstFlow, angle_dist(circleflow::flow_map(flow, theta, phi, cfg.tol), closed));
            }
        }
        for (int k = 1; k < 100; ++k) {
            double phi = kTwoPi * k / 100;
            if (pair.geometry().nearest_fixed_point_dist(phi) < 1e-6) continue;
            double t = std::pow(std::fabs(std::tan(phi / 2)), n);
            worstF = std::max(worstF, std::fabs(pair.f(phi) - (1 - t) / (1 + t)));
        }
    }
    rep.add("integrator vs tan-half-angle closed form", worstFlow, 1e-8);
    rep.add("companion function vs closed form", worstF, 1e-8);
    return rep;
}

inline SuiteReport suite_mu(const VerifyConfig& cfg) {
    (void)cfg;
    SuiteReport rep{"mu"};
    detail::Timer timer(rep);
    rep.add("pv invariant at a = 0",
            std::fabs(circleflow::pv_global_invariant(circleflow::make_flow(FlowKind::BasicJ1, 1, 0.0))),
            1e-6);
    // independent fine-grid midpoint oracle with pole-straddling nodes
    CircleFlow f05 = circleflow::make_flow(FlowKind::BasicJ1, 1, 0.5);
    long N = 1 << 20;
    double h = kTwoPi / N, oracle = 0;
    for (long k = 0; k < N; ++k) oracle += h / f05.g((k + 0.5) * h);
    rep.add("pv invariant vs fine-grid oracle at a = 0.5",
            std::fabs(circleflow::pv_global_invariant(f05) - oracle), 1e-4);
    bool monotone = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 9; ++i) {
        double a = 0.1 * i;
        double mu = circleflow::pv_global_invariant(circleflow::make_flow(FlowKind::BasicJ1, 1, a));
        if (mu <= prev) monotone = false;
        prev = mu;
    }
    rep.add_flag("pv invariant strictly monotone on [0, 0.9]", monotone);
    return rep;
}

inline SuiteReport suite_conjugacy(const VerifyConfig& cfg) {
    SuiteReport rep{"conjugacy"};
    detail::Timer timer(rep);
    circleflow::ConjugacyResult same =
        circleflow::conjugacy_map(circleflow::make_flow(FlowKind::BasicJ1, 1, 0.2),
                                  circleflow::make_flow(FlowKind::BasicJ1, 1, 0.2), cfg.tol);
    rep.add_flag("identical flows conjugate", same.success);
    rep.add("identity conjugacy defect", same.defect, 1e-6);
    circleflow::ConjugacyResult jac =
        circleflow::conjugacy_map(circleflow::make_flow(FlowKind::BasicJ1, 1, 0.2),
                                  circleflow::make_flow(FlowKind::BasicJ1, 2, 0.2), cfg.tol);
    rep.add_flag("Jacobian mismatch certified",
                 !jac.success && jac.certificate.find("Jacobian") != std::string::npos);
    circleflow::ConjugacyResult mu =
        circleflow::conjugacy_map(circleflow::make_flow(FlowKind::BasicJ1, 1, 0.0),
                                  circleflow::make_flow(FlowKind::BasicJ1, 1, 0.5), cfg.tol);
    rep.add_flag("global-invariant mismatch certified", !mu.success && !mu.certificate.empty());
    return rep;
}

inline SuiteReport suite_bundle(const VerifyConfig& cfg) {
    SuiteReport rep{"bundle"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    CircleFlow flow = circleflow::make_flow(FlowKind::BasicJ1, 1, 0.2);

    double worstPi = 0;
    for (double theta : {-2.0, -0.5, 0.25, 1.0, 2.3})
        worstPi = std::max(worstPi,
                           std::fabs(engine::bundle_pi(sopq::boost(sig, theta), cfg.tol) - theta));
    rep.add("boost parameter recovery", worstPi, 1e-12);

    Vec u0(sig.n(), 0.0);
    u0[0] = 1.0;
    u0[sig.p] = 1.0;
    auto h = sopq::stabilizer_algebra(sig, u0, cfg.tol);
    double worstNull = 0;
    for (int i = 0; i < 50; ++i) {
        Rng rng(cfg.seed + i);
        Vec c(h.elements.size());
        for (double& x : c) x = rng.uniform(-1.0, 1.0);
        Mat xm(sig.n(), sig.n());
        for (size_t k = 0; k < h.elements.size(); ++k) xm = numkit::add(xm, h.elements[k].mat, c[k]);
        worstNull = std::max(
            worstNull,
            std::fabs(engine::bundle_pi(GroupElement{sig, numkit::matrix_exp(xm)}, cfg.tol)));
    }
    rep.add("boost parameter on null-stabilizer exponentials", worstNull, 1e-9);

    int axiomFailures = 0;
    for (int i = 0; i < cfg.samples; ++i) {
        Rng rng(cfg.seed + 100 + i);
        GroupElement g1 = sopq::random_group_element(sig, rng, 1.2, cfg.tol);
        GroupElement g2 = sopq::random_group_element(sig, rng, 1.2, cfg.tol);
        engine::BundlePoint pt{sopq::random_group_element(sig, rng, 1.0, cfg.tol),
                               rng.uniform(0.0, kTwoPi)};
        engine::BundlePoint seq =
            engine::bundle_act(g1, engine::bundle_act(g2, pt, flow, cfg.tol), flow, cfg.tol);
        GroupElement g12{sig, numkit::mul(g1.mat, g2.mat)};
        engine::BundlePoint comp = engine::bundle_act(g12, pt, flow, cfg.tol);
        if (!engine::bundle_eq(seq, comp, flow, cfg.tol)) ++axiomFailures;
    }
    rep.add("bundle action axiom failures", axiomFailures, 0.0);

    circleflow::CircleFlow cover = circleflow::make_flow(FlowKind::BasicJ1J2, 2, 0.3);
    circleflow::RP1Flow down = circleflow::project_to_rp1(cover);
    circleflow::LiftedFlow lift = circleflow::lift_double_cover(down);
    rep.add("double-cover covering defect", circleflow::covering_defect(lift, down, cfg.tol), 1e-8);
    return rep;
}

inline SuiteReport suite_uchida(const VerifyConfig& cfg) {
    SuiteReport rep{"uchida"};
    detail::Timer timer(rep);
    Signature sig(cfg.p, cfg.q);
    FlowFunctionPair pair =
        circleflow::make_pair(circleflow::make_flow(FlowKind::BasicJ1J2, 1, 0.2));

    double worstK = 0;
    for (int i = 0; i < cfg.samples; ++i) {
        Rng rng(cfg.seed + i);
        Mat k1 = sopq::random_special_orthogonal(sig.p, rng);
        Mat k2 = sopq::random_special_orthogonal(sig.q, rng);
        SpherePoint y = engine::random_sphere_point(sig, rng);
        SpherePoint a = engine::act_sphere(sopq::embed_K(k1, k2, sig), y, pair, cfg.tol);
        SpherePoint b{numkit::mul(sopq::embed_K(k1, k2, sig).mat, y.y)};
        worstK = std::max(worstK, engine::distance(a, b));
    }
    rep.add("orthogonal K extension", worstK, 1e-10);

    double worstAxiom = 0;
    for (int i = 0; i < cfg.samples; ++i) {
        Rng rng(cfg.seed + 1000 + i);
        GroupElement g1 = sopq::random_group_element(sig, rng, 1.2, cfg.tol);
        GroupElement g2 = sopq::random_group_element(sig, rng, 1.2, cfg.tol);
        SpherePoint y = engine::random_sphere_point(sig, rng);
        SpherePoint seq =
            engine::act_sphere(g1, engine::act_sphere(g2, y, pair, cfg.tol), pair, cfg.tol);
        GroupElement g12{sig, numkit::mul(g1.mat, g2.mat)};
        worstAxiom = std::max(worstAxiom, engine::distance(seq, engine::act_sphere(g12, y, pair,
                                                                                    cfg.tol)));
    }
    rep.add("sphere action axiom", worstAxiom, 1e-5);

    double worstTransport = 0;
    for (double theta : {-1.1, -0.4, 0.6, 1.3}) {
        for (int k = 0; k < 12; ++k) {
            double phi = kTwoPi * (k + 0.3) / 12;
            if (pair.geometry().nearest_fixed_point_dist(phi) < 0.05) continue;
            SpherePoint moved = engine::act_sphere(sopq::boost(sig, theta),
                                                   SpherePoint{engine::sphere_slice_vector(sig, phi)},
                                                   pair, cfg.tol);
            double phiMoved = circleflow::flow_map(pair.flow, theta, phi, cfg.tol);
            worstTransport = std::max(
                worstTransport,
                engine::distance(moved, SpherePoint{engine::sphere_slice_vector(sig, phiMoved)}));
            worstTransport = std::max(
                worstTransport, ProjectivePoint::distance(pair.f_tilde(phiMoved),
                                                          pair.f_tilde(phi).transported(theta)));
        }
    }
    rep.add("hyperbolic companion transport", worstTransport, 1e-5);
    return rep;
}

inline std::vector<std::string> suite_names() {
    return {"membership", "action-axiom", "k-extension", "cross-ratio", "eq10",
            "charts",     "decomposition", "tables",     "orbit-census", "flow-oracles",
            "mu",         "conjugacy",     "bundle",     "uchida"};
}

inline SuiteReport run_suite(const std::string& name, const VerifyConfig& cfg) {
    if (name == "membership") return suite_membership(cfg);
    if (name == "action-axiom") return suite_action_axiom(cfg);
    if (name == "k-extension") return suite_k_extension(cfg);
    if (name == "cross-ratio") return suite_cross_ratio(cfg);
    if (name == "eq10") return suite_eq10(cfg);
    if (name == "charts") return suite_charts(cfg);
    if (name == "decomposition") return suite_decomposition(cfg);
    if (name == "tables") return suite_tables(cfg);
    if (name == "orbit-census") return suite_orbit_census(cfg);
    if (name == "flow-oracles") return suite_flow_oracles(cfg);
    if (name == "mu") return suite_mu(cfg);
    if (name == "conjugacy") return suite_conjugacy(cfg);
    if (name == "bundle") return suite_bundle(cfg);
    if (name == "uchida") return suite_uchida(cfg);
    throw BadParameters("unknown suite: " + name);
}

}  // namespace orthoflow::verify
