#include <catch2/catch_amalgamated.hpp>

#include "orthoflow/action_engine.hpp"

using namespace orthoflow;
using namespace orthoflow::numkit;
using namespace orthoflow::sopq;
using namespace orthoflow::circleflow;
using namespace orthoflow::engine;

namespace {
const Signature sig33(3, 3);

FlowFunctionPair pair_j1() { return make_pair(make_flow(FlowKind::BasicJ1, 1, 0.3)); }
FlowFunctionPair pair_j1_plain() { return make_pair(make_flow(FlowKind::BasicJ1, 1, 0.0)); }
FlowFunctionPair pair_uchida() { return make_pair(make_flow(FlowKind::BasicJ1J2, 1, 0.2)); }

Vec unit(int n, int i) {
    Vec v(n, 0.0);
    v[i] = 1.0;
    return v;
}
}  // namespace

TEST_CASE("projector and lambda") {
    RankOneProjector p = projector(sig33, 0.4);
    CHECK(trace(p.mat) == Catch::Approx(1.0).margin(1e-14));
    CHECK(frob(add(p.mat, transpose(p.mat), -1.0)) < 1e-15);

    CHECK(lambda_scale(0.0, 0.77) == Catch::Approx(1.0).margin(1e-15));
    CHECK(lambda_scale(1.0, 0.0) == Catch::Approx(std::cosh(2.0)).margin(1e-12));
    CHECK(std::cosh(2.0) == Catch::Approx(3.76220).margin(1e-5));
    CHECK(lambda_scale(1.0, 1.0) == Catch::Approx(std::exp(2.0)).margin(1e-12));

    // termwise form of lambda
    for (double theta : {-1.1, 0.3, 2.0})
        for (double f : {-0.8, 0.0, 0.5}) {
            double direct = (std::pow(f * std::cosh(theta) + std::sinh(theta), 2) +
                             std::pow(f * std::sinh(theta) + std::cosh(theta), 2)) /
                            (f * f + 1);
            CHECK(lambda_scale(theta, f) == Catch::Approx(direct).margin(1e-12));
        }
}

TEST_CASE("projector conjugation identity") {
    auto chk0 = conjugation_identity_check(sig33, 0.0, 0.37);
    CHECK(chk0.projector_residual < 1e-14);
    CHECK(chk0.stabilizer_residual < 1e-9);

    auto chk = conjugation_identity_check(sig33, 0.8, 0.3);
    CHECK(chk.projector_residual < 1e-9);
    CHECK(chk.stabilizer_residual < 1e-9);

    double worst = 0;
    for (double theta = -2.0; theta <= 2.0; theta += 0.4)
        for (double f = -0.95; f <= 0.95; f += 0.19)
            worst = std::max(worst,
                             conjugation_identity_check(sig33, theta, f).projector_residual);
    CHECK(worst < 1e-9);
}

TEST_CASE("solve_theta") {
    SECTION("double root at the minimum is flagged") {
        ThetaCandidates c = solve_theta(1.0, 0.0);
        CHECK(c.boundary);
        REQUIRE_FALSE(c.roots.empty());
        CHECK(c.roots[0] == Catch::Approx(0.0).margin(1e-7));
    }
    SECTION("cosh inversion at f = 0") {
        ThetaCandidates c = solve_theta(std::cosh(2.0), 0.0);
        REQUIRE(c.roots.size() == 2);
        std::vector<double> r = c.roots;
        std::sort(r.begin(), r.end());
        CHECK(r[0] == Catch::Approx(-1.0).margin(1e-10));
        CHECK(r[1] == Catch::Approx(1.0).margin(1e-10));
        CHECK_FALSE(c.boundary);
    }
    SECTION("unique root on the null datum") {
        ThetaCandidates c = solve_theta(std::exp(2.0), 1.0);
        REQUIRE(c.roots.size() == 1);
        CHECK(c.roots[0] == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("below the minimum") {
        CHECK_THROWS_AS(solve_theta(0.5, 0.0), NoRealRoot);
    }
}

TEST_CASE("decompose recovers pure factors") {
    Tolerances tol;
    SECTION("a boost with f = 0") {
        DecompositionResult d = decompose(boost(sig33, 0.7), ProjectivePoint::make(0, 1), tol);
        CHECK(d.theta == Catch::Approx(0.7).margin(1e-9));
        CHECK(frob(add(d.k.mat, eye(6), -1.0)) < 1e-7);
        CHECK(frob(add(d.u.mat, eye(6), -1.0)) < 1e-7);
    }
    SECTION("a K element (f != 0 keeps the trace off the boundary)") {
        Rng rng(101);
        for (int t = 0; t < 10; ++t) {
            GroupElement k = embed_K(random_special_orthogonal(3, rng),
                                     random_special_orthogonal(3, rng), sig33);
            DecompositionResult d = decompose(k, ProjectivePoint::make(0.37, 1.0), tol);
            CHECK(std::fabs(d.theta) < 1e-8);
            Mat recon = mul(mul(d.k.mat, boost(sig33, d.theta).mat), d.u.mat);
            CHECK(frob(add(recon, k.mat, -1.0)) < 1e-7);
        }
    }
    SECTION("a stabilizer exponential decomposes as u alone") {
        Rng rng(103);
        double f = 0.4;
        Vec uz(6, 0.0);
        uz[0] = f;
        uz[3] = 1.0;
        auto h = stabilizer_algebra(sig33, uz);
        for (int t = 0; t < 10; ++t) {
            Vec c(h.elements.size());
            for (double& x : c) x = rng.uniform(-1.0, 1.0);
            double nc = norm(c);
            if (nc > 1.0) c = scaled(c, 1.0 / nc);
            Mat xm(6, 6);
            for (size_t i = 0; i < h.elements.size(); ++i) xm = add(xm, h.elements[i].mat, c[i]);
            GroupElement u = certify(matrix_exp(xm), sig33);
            DecompositionResult d = decompose(u, ProjectivePoint::make(f, 1.0), tol);
            CHECK(std::fabs(d.theta) < 1e-8);
            CHECK(frob(add(d.k.mat, eye(6), -1.0)) < 1e-6);
            Mat recon = mul(mul(d.k.mat, boost(sig33, d.theta).mat), d.u.mat);
            CHECK(frob(add(recon, u.mat, -1.0)) < 1e-8);
        }
    }
}

TEST_CASE("decompose uniqueness margin on random samples") {
    Tolerances tol;
    Rng rng(202);
    int done = 0;
    while (done < 60) {
        GroupElement g = random_group_element(sig33, rng, 1.5, tol);
        double f = rng.uniform(-0.9, 0.9);
        try {
            DecompositionResult d = decompose(g, ProjectivePoint::make(f, 1.0), tol);
            CHECK(d.margin >= 10.0);
            CHECK(d.residual < 1e-7);
            Mat recon = mul(mul(d.k.mat, boost(sig33, d.theta).mat), d.u.mat);
            CHECK(frob(add(recon, g.mat, -1.0)) < 1e-7);
            ++done;
        } catch (const OutsideWPlus&) {
            // admissible only near the declared boundary
            Vec uz(6, 0.0);
            uz[0] = f;
            uz[3] = 1.0;
            Vec gu = mul(g.mat, uz);
            double T = dot(gu, gu) / dot(uz, uz);
            double s = 2 * f / (1 + f * f);
            CHECK(T - std::sqrt(1 - s * s) <= 1e-6);
            ++done;
        }
    }
}

TEST_CASE("standard K action on the product sphere") {
    Rng rng(7);
    ProductSpherePoint x = random_product_point(sig33, rng);
    ProductSpherePoint same = standard_K_act(eye(3), eye(3), x);
    CHECK(distance(same, x) < 1e-15);

    // j1 on a slice point flips the e1 coordinate only
    ProductSpherePoint z = slice_point(sig33, 0.9);
    Mat j1p = eye(3);
    j1p(0, 0) = j1p(1, 1) = -1.0;
    ProductSpherePoint moved = standard_K_act(j1p, eye(3), z);
    CHECK(moved.v[0] == Catch::Approx(-std::cos(0.9)));
    CHECK(moved.v[3] == Catch::Approx(std::sin(0.9)));
    CHECK(distance(moved, slice_point(sig33, kPi - 0.9)) < 1e-12);

    // pole invariance
    Mat k1 = random_special_orthogonal(3, rng);
    ProductSpherePoint pole = slice_point(sig33, kPi / 2);
    CHECK(standard_K_act(k1, eye(3), pole).v[3] == Catch::Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(standard_K_act(scale(eye(3), 2.0), eye(3), x), NotSpecialOrthogonal);
}

TEST_CASE("point_to_slice canonicalises") {
    Rng rng(8);
    for (int t = 0; t < 40; ++t) {
        ProductSpherePoint x = random_product_point(sig33, rng);
        SliceCoordinates sc = point_to_slice(sig33, x);
        ProductSpherePoint recon = standard_K_act(sc.k1, sc.k2, slice_point(sig33, sc.phi));
        CHECK(distance(recon, x) < 1e-10);
    }
    ProductSpherePoint pole = slice_point(sig33, kPi / 2);
    SliceCoordinates sc = point_to_slice(sig33, pole);
    CHECK(sc.phi == Catch::Approx(kPi / 2));
    CHECK(frob(add(sc.k1, eye(3), -1.0)) < 1e-14);
}

TEST_CASE("act_product extends the standard K action") {
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    Rng rng(9);
    double worst = 0;
    for (int t = 0; t < 40; ++t) {
        Mat k1 = random_special_orthogonal(3, rng);
        Mat k2 = random_special_orthogonal(3, rng);
        ProductSpherePoint x = random_product_point(sig33, rng);
        ProductSpherePoint viaAction = act_product(embed_K(k1, k2, sig33), x, pair, tol);
        ProductSpherePoint direct = standard_K_act(k1, k2, x);
        worst = std::max(worst, distance(viaAction, direct));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("act_product moves the pole along the slice") {
    FlowFunctionPair pair = pair_j1_plain();
    Tolerances tol;
    ProductSpherePoint pole = slice_point(sig33, kPi / 2);
    ProductSpherePoint moved = act_product(boost(sig33, 0.5), pole, pair, tol);
    // slice trace has f = tanh(0.5); for the plain family that is the angle
    // 2 atan(e^{-1}); the w factor stays at eps1
    double phiExpect = 2 * std::atan(std::exp(-1.0));
    CHECK(distance(moved, slice_point(sig33, phiExpect)) < 1e-8);
    SliceCoordinates sc = point_to_slice(sig33, moved);
    CHECK(pair.f(sc.phi) == Catch::Approx(std::tanh(0.5)).margin(1e-8));
}

TEST_CASE("act_product fixes slice points under their stabilizer") {
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    Rng rng(11);
    double phi = 0.8;
    double f = pair.f(phi);
    Vec uz(6, 0.0);
    uz[0] = f;
    uz[3] = 1.0;
    auto h = stabilizer_algebra(sig33, uz);
    ProductSpherePoint z = slice_point(sig33, phi);
    for (int t = 0; t < 10; ++t) {
        Vec c(h.elements.size());
        for (double& x : c) x = rng.uniform(-1.0, 1.0);
        double nc = norm(c);
        if (nc > 1.0) c = scaled(c, 1.0 / nc);
        Mat xm(6, 6);
        for (size_t i = 0; i < h.elements.size(); ++i) xm = add(xm, h.elements[i].mat, c[i]);
        GroupElement u = certify(matrix_exp(xm), sig33);
        CHECK(distance(act_product(u, z, pair, tol), z) < 1e-7);
    }
}

TEST_CASE("action axiom on the product sphere") {
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    Rng rng(12);
    double worst = 0;
    for (int t = 0; t < 25; ++t) {
        GroupElement g1 = random_group_element(sig33, rng, 1.5, tol);
        GroupElement g2 = random_group_element(sig33, rng, 1.5, tol);
        ProductSpherePoint x = random_product_point(sig33, rng);
        ProductSpherePoint seq = act_product(g1, act_product(g2, x, pair, tol), pair, tol);
        GroupElement g12{sig33, mul(g1.mat, g2.mat)};
        ProductSpherePoint comp = act_product(g12, x, pair, tol);
        worst = std::max(worst, distance(seq, comp));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("well-definedness under re-expression of the base point") {
    // Evaluate the action through two different witnesses for the same
    // point: x = k0 * z and x = (k0 j1 h) * (j1 z) with h in the principal
    // isotropy group. The value must not depend on the witness.
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    Rng rng(13);

    auto act_with_witness = [&](const GroupElement& g, const Mat& k0, double phi) {
        double fv = pair.f(phi);
        GroupElement gk0{sig33, mul(g.mat, k0)};
        DecompositionResult dec = decompose(gk0, ProjectivePoint::make(fv, 1.0), tol);
        double phiMoved = flow_map(pair.flow, dec.theta, phi, tol);
        Mat k1(3, 3), k2(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                k1(i, j) = dec.k.mat(i, j);
                k2(i, j) = dec.k.mat(3 + i, 3 + j);
            }
        return standard_K_act(k1, k2, slice_point(sig33, phiMoved), tol);
    };

    for (int t = 0; t < 12; ++t) {
        double phi = rng.uniform(0.2, 1.3);
        GroupElement g = random_group_element(sig33, rng, 1.0, tol);
        Mat k0a = sopq::embed_K(random_special_orthogonal(3, rng),
                                random_special_orthogonal(3, rng), sig33)
                      .mat;
        // second witness: k0 j1 h with h = (h1, h2) in SO(2) x SO(2)
        // embedded to fix e1 and eps1, paired with the flipped slice point
        Mat h1 = eye(3), h2 = eye(3);
        Mat r1 = random_special_orthogonal(2, rng), r2 = random_special_orthogonal(2, rng);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                h1(i + 1, j + 1) = r1(i, j);
                h2(i + 1, j + 1) = r2(i, j);
            }
        Mat k0b = mul(mul(k0a, involution(sig33, 1).mat), sopq::embed_K(h1, h2, sig33).mat);

        ProductSpherePoint viaA = act_with_witness(g, k0a, phi);
        ProductSpherePoint viaB = act_with_witness(g, k0b, wrap_angle(kPi - phi));
        CHECK(distance(viaA, viaB) < 1e-8);
    }
}

TEST_CASE("equivariance under the involutions") {
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    Rng rng(14);
    for (int which : {1, 2}) {
        GroupElement j = involution(sig33, which);
        Mat jp = eye(3);
        jp(0, 0) = jp(1, 1) = -1.0;
        for (int t = 0; t < 6; ++t) {
            GroupElement g = random_group_element(sig33, rng, 1.0, tol);
            ProductSpherePoint x = random_product_point(sig33, rng);
            GroupElement conj{sig33, mul(mul(j.mat, g.mat), j.mat)};
            ProductSpherePoint inner =
                which == 1 ? standard_K_act(jp, eye(3), x) : standard_K_act(eye(3), jp, x);
            ProductSpherePoint lhs = act_product(conj, inner, pair, tol);
            ProductSpherePoint outer = act_product(g, x, pair, tol);
            ProductSpherePoint rhs =
                which == 1 ? standard_K_act(jp, eye(3), outer) : standard_K_act(eye(3), jp, outer);
            CHECK(distance(lhs, rhs) < 1e-7);
        }
    }
}

TEST_CASE("charts: F0 values and the round trip") {
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;

    SECTION("the pole maps to eps1") {
        SpherePoint y = chart_F0(sig33, slice_point(sig33, kPi / 2), pair, tol);
        CHECK(norm(axpy(y.y, unit(6, 3), -1.0)) < 1e-12);
    }

    SECTION("flowed pole matches the closed form") {
        for (double theta : {-0.9, 0.4, 1.2}) {
            double phi = flow_map(pair.flow, theta, kPi / 2, tol);
            SpherePoint y = chart_F0(sig33, slice_point(sig33, phi), pair, tol);
            double t = std::tanh(theta), s = 1.0 / std::sqrt(1 + t * t);
            Vec expect(6, 0.0);
            expect[0] = t * s;
            expect[3] = s;
            CHECK(norm(axpy(y.y, expect, -1.0)) < 1e-8);
        }
    }

    SECTION("round trip on random open-orbit points") {
        Rng rng(15);
        double worst = 0;
        for (int t = 0; t < 100; ++t) {
            ProductSpherePoint x = random_product_point(sig33, rng);
            if (std::fabs(x.v[3]) < 1e-3) continue;
            OrbitSide side = x.v[3] > 0 ? OrbitSide::PolePlus : OrbitSide::PoleMinus;
            ProductSpherePoint back =
                chart_F1(sig33, chart_F0(sig33, x, pair, tol), pair, side, tol);
            worst = std::max(worst, distance(back, x));
        }
        CHECK(worst < 1e-8);
    }

    SECTION("smoothness across |v0| = 0: both evaluation paths agree") {
        // straddle the even-fit switch radius
        for (double alpha : {0.019, 0.02001, 0.021}) {
            ProductSpherePoint x;
            x.v = {alpha, 0.0, 0.0, std::sqrt(1 - alpha * alpha)};
            x.w = {1.0, 0.0, 0.0};
            SpherePoint y = chart_F0(sig33, x, pair, tol);
            double fv = pair.f(std::atan2(x.v[3], alpha));
            CHECK(y.y[0] == Catch::Approx(fv / std::sqrt(1 + fv * fv)).margin(1e-9));
        }
    }

    SECTION("closed-orbit points are outside the chart domain") {
        CHECK_THROWS_AS(chart_F0(sig33, slice_point(sig33, 0.0), pair, tol), OutsideDomain);
    }
}

TEST_CASE("projective action") {
    Rng rng(16);
    SpherePoint y = random_sphere_point(sig33, rng);
    CHECK(distance(projective_act(identity(sig33), y), y) < 1e-15);
    SpherePoint img = projective_act(boost(sig33, 0.8), SpherePoint{unit(6, 3)});
    double c = std::cosh(0.8), s = std::sinh(0.8);
    double nrm = std::sqrt(c * c + s * s);
    CHECK(img.y[0] == Catch::Approx(s / nrm).margin(1e-12));
    CHECK(img.y[3] == Catch::Approx(c / nrm).margin(1e-12));
    // the sign of the quadratic form is preserved
    for (int t = 0; t < 20; ++t) {
        SpherePoint x = random_sphere_point(sig33, rng);
        GroupElement g = random_group_element(sig33, rng, 1.5);
        double before = form_value(sig33, x.y);
        double after = form_value(sig33, projective_act(g, x).y);
        if (std::fabs(before) > 1e-6) CHECK(before * after > 0);
    }
}

TEST_CASE("chart route agrees with the slice route") {
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    Rng rng(17);
    double worst = 0;
    int used = 0;
    for (int t = 0; t < 120 && used < 60; ++t) {
        ProductSpherePoint x = random_product_point(sig33, rng);
        if (std::fabs(x.v[3]) < 5e-2) continue;
        GroupElement g = random_group_element(sig33, rng, 1.2, tol);
        ProductSpherePoint a = act_product(g, x, pair, tol);
        ProductSpherePoint b = act_via_chart(g, x, pair, tol);
        worst = std::max(worst, distance(a, b));
        ++used;
    }
    REQUIRE(used == 60);
    CHECK(worst < 1e-6);
}

TEST_CASE("near the double-root boundary the action reroutes through the charts") {
    // g = k m(theta*) u with tanh(theta*) = -f lands the transported value
    // on the pole, where the trace quadratic degenerates; the solver must
    // refuse and the chart route must carry the evaluation.
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    int rerouted = 0;
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
        Rng rng(4242 + i);
        double phi = rng.uniform(0.15, 1.4);
        double f = pair.f(phi);
        double thetaStar = std::atanh(-f) + rng.uniform(-1e-7, 1e-7);
        Vec uz(6, 0.0);
        uz[0] = f;
        uz[3] = 1.0;
        auto h = stabilizer_algebra(sig33, uz);
        Vec c(h.elements.size());
        for (double& x : c) x = rng.uniform(-0.5, 0.5);
        Mat xm(6, 6);
        for (size_t k = 0; k < h.elements.size(); ++k) xm = add(xm, h.elements[k].mat, c[k]);
        Mat k1 = random_special_orthogonal(3, rng), k2 = random_special_orthogonal(3, rng);
        GroupElement g{sig33, mul(mul(embed_K(k1, k2, sig33).mat, boost(sig33, thetaStar).mat),
                                  matrix_exp(xm))};
        try {
            decompose(g, ProjectivePoint::make(f, 1.0), tol);
        } catch (const OutsideWPlus&) {
            ++rerouted;
        }
        ProductSpherePoint z = slice_point(sig33, phi);
        ProductSpherePoint moved = act_product(g, z, pair, tol);
        GroupElement g2 = boost(sig33, 0.37);
        GroupElement g1{sig33, mul(g.mat, boost(sig33, -0.37).mat)};
        ProductSpherePoint seq = act_product(g1, act_product(g2, z, pair, tol), pair, tol);
        worst = std::max(worst, distance(moved, seq));
    }
    CHECK(rerouted == 40);
    CHECK(worst < 1e-6);
}

TEST_CASE("closed orbits stay closed") {
    FlowFunctionPair pair = pair_j1();
    Tolerances tol;
    Rng rng(18);
    for (double phi0 : {0.0, kPi}) {
        ProductSpherePoint z = slice_point(sig33, phi0);
        for (int t = 0; t < 8; ++t) {
            GroupElement g = random_group_element(sig33, rng, 1.2, tol);
            ProductSpherePoint moved = act_product(g, z, pair, tol);
            SliceCoordinates sc = point_to_slice(sig33, moved);
            CHECK(std::fabs(std::fabs(pair.f(sc.phi)) - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("sphere action extends the orthogonal K action") {
    FlowFunctionPair pair = pair_uchida();
    Tolerances tol;
    Rng rng(19);
    double worst = 0;
    for (int t = 0; t < 30; ++t) {
        Mat k1 = random_special_orthogonal(3, rng);
        Mat k2 = random_special_orthogonal(3, rng);
        SpherePoint y = random_sphere_point(sig33, rng);
        SpherePoint viaAction = act_sphere(embed_K(k1, k2, sig33), y, pair, tol);
        SpherePoint direct{mul(embed_K(k1, k2, sig33).mat, y.y)};
        worst = std::max(worst, distance(viaAction, direct));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("sphere action transports the companion value hyperbolically") {
    FlowFunctionPair pair = pair_uchida();
    Tolerances tol;
    for (double theta : {-0.8, 0.5, 1.1}) {
        // from eps1 the action value is the flowed slice point, whose
        // companion value is the transported [0 : 1]
        SpherePoint moved = act_sphere(boost(sig33, theta), SpherePoint{unit(6, 3)}, pair, tol);
        double phiMoved = flow_map(pair.flow, theta, kPi / 2, tol);
        CHECK(distance(moved, SpherePoint{sphere_slice_vector(sig33, phiMoved)}) < 1e-6);
        ProjectivePoint expect = ProjectivePoint::make(std::sinh(theta), std::cosh(theta));
        CHECK(ProjectivePoint::distance(pair.f_tilde(phiMoved), expect) < 1e-6);

        // from e1: the transported [1 : 0]
        SpherePoint movedE = act_sphere(boost(sig33, theta), SpherePoint{unit(6, 0)}, pair, tol);
        double phiMovedE = flow_map(pair.flow, theta, 0.0, tol);
        CHECK(distance(movedE, SpherePoint{sphere_slice_vector(sig33, phiMovedE)}) < 1e-6);
        ProjectivePoint expectE = ProjectivePoint::make(std::cosh(theta), std::sinh(theta));
        CHECK(ProjectivePoint::distance(pair.f_tilde(phiMovedE), expectE) < 1e-6);
    }
}

TEST_CASE("sphere action axiom") {
    FlowFunctionPair pair = pair_uchida();
    Tolerances tol;
    Rng rng(20);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        GroupElement g1 = random_group_element(sig33, rng, 1.2, tol);
        GroupElement g2 = random_group_element(sig33, rng, 1.2, tol);
        SpherePoint y = random_sphere_point(sig33, rng);
        SpherePoint seq = act_sphere(g1, act_sphere(g2, y, pair, tol), pair, tol);
        GroupElement g12{sig33, mul(g1.mat, g2.mat)};
        worst = std::max(worst, distance(seq, act_sphere(g12, y, pair, tol)));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("bundle boost parameter") {
    Tolerances tol;
    CHECK(bundle_pi(boost(sig33, 1.0), tol) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::exp(1.0) == Catch::Approx(2.71828).margin(1e-5));
    for (double theta : {-2.3, 0.4})
        CHECK(bundle_pi(boost(sig33, theta), tol) == Catch::Approx(theta).margin(1e-12));

    // null-vector stabilizer exponentials have pi = 0
    Rng rng(21);
    Vec u0(6, 0.0);
    u0[0] = 1.0;
    u0[3] = 1.0;
    auto h = stabilizer_algebra(sig33, u0);
    for (int t = 0; t < 20; ++t) {
        Vec c(h.elements.size());
        for (double& x : c) x = rng.uniform(-1.0, 1.0);
        Mat xm(6, 6);
        for (size_t i = 0; i < h.elements.size(); ++i) xm = add(xm, h.elements[i].mat, c[i]);
        CHECK(std::fabs(bundle_pi(GroupElement{sig33, matrix_exp(xm)}, tol)) < 1e-9);
    }

    // homomorphism law on products
    for (int t = 0; t < 10; ++t) {
        double t1 = rng.uniform(-1.0, 1.0), t2 = rng.uniform(-1.0, 1.0);
        Vec c(h.elements.size());
        for (double& x : c) x = rng.uniform(-0.5, 0.5);
        Mat xm(6, 6);
        for (size_t i = 0; i < h.elements.size(); ++i) xm = add(xm, h.elements[i].mat, c[i]);
        Mat p1 = mul(boost(sig33, t1).mat, matrix_exp(xm));
        Mat p2 = boost(sig33, t2).mat;
        double lhs = bundle_pi(GroupElement{sig33, mul(p1, p2)}, tol);
        double rhs =
            bundle_pi(GroupElement{sig33, p1}, tol) + bundle_pi(GroupElement{sig33, p2}, tol);
        CHECK(std::fabs(lhs - rhs) < 1e-10);
    }

    CHECK_THROWS_AS(bundle_pi(involution(sig33, 1), tol), NotInP);
}

TEST_CASE("bundle canonical form and the action law") {
    CircleFlow flow = make_flow(FlowKind::BasicJ1, 1, 0.2);
    Tolerances tol;

    SECTION("a boost representative moves the fiber coordinate") {
        BundlePoint pt{boost(sig33, 0.7), 1.1};
        BundlePoint canon = bundle_canonical(pt, flow, tol);
        CHECK(angle_dist(canon.phi, flow_map(flow, 0.7, 1.1)) < 1e-8);
        CHECK(bundle_eq(pt, canon, flow, tol));
    }

    SECTION("identity acts trivially") {
        Rng rng(22);
        BundlePoint pt{random_group_element(sig33, rng, 1.0, tol), 0.9};
        BundlePoint moved = bundle_act(identity(sig33), pt, flow, tol);
        CHECK(bundle_eq(moved, pt, flow, tol));
    }

    SECTION("canonical form is a fixed point of re-canonicalisation") {
        Rng rng(26);
        BundlePoint pt{random_group_element(sig33, rng, 1.3, tol), 2.2};
        BundlePoint canon = bundle_canonical(pt, flow, tol);
        BundlePoint again = bundle_canonical(canon, flow, tol);
        CHECK(angle_dist(canon.phi, again.phi) < 1e-9);
        CHECK(bundle_eq(canon, again, flow, tol));
    }

    SECTION("action law through bundle_eq") {
        Rng rng(23);
        for (int t = 0; t < 12; ++t) {
            GroupElement g1 = random_group_element(sig33, rng, 1.2, tol);
            GroupElement g2 = random_group_element(sig33, rng, 1.2, tol);
            BundlePoint pt{random_group_element(sig33, rng, 1.0, tol), rng.uniform(0.0, kTwoPi)};
            BundlePoint seq = bundle_act(g1, bundle_act(g2, pt, flow, tol), flow, tol);
            GroupElement g12{sig33, mul(g1.mat, g2.mat)};
            BundlePoint comp = bundle_act(g12, pt, flow, tol);
            CHECK(bundle_eq(seq, comp, flow, tol));
        }
    }
}

TEST_CASE("role-swap adapter") {
    Signature sig34(3, 4);
    FlowFunctionPair swappedPair = make_pair(make_flow(FlowKind::BasicJ1, 1, 0.25));
    SwapAdapter ad = swap_roles_adapter(sig34, swappedPair);
    Tolerances tol;

    SECTION("the permutation squares away") {
        Mat p2 = mul(ad.perm, transpose(ad.perm));
        CHECK(frob(add(p2, eye(7), -1.0)) < 1e-15);
    }

    SECTION("swapping twice returns the original element") {
        Rng rng(29);
        SwapAdapter back = swap_roles_adapter(Signature(4, 3), swappedPair);
        GroupElement g = random_group_element(sig34, rng, 1.0, tol);
        GroupElement once = ad.conjugate(g, tol);
        GroupElement twice = back.conjugate(once, tol);
        CHECK(frob(add(twice.mat, g.mat, -1.0)) < 1e-12);
    }

    SECTION("conjugated Gram matrix flips sign blocks") {
        Mat g = mul(mul(ad.perm, gram(sig34)), transpose(ad.perm));
        for (int i = 0; i < 4; ++i) CHECK(g(i, i) == Catch::Approx(1.0));
        for (int i = 4; i < 7; ++i) CHECK(g(i, i) == Catch::Approx(-1.0));
    }

    SECTION("K restriction matches the standard action on S^{p-1} x S^q") {
        Rng rng(24);
        for (int t = 0; t < 10; ++t) {
            Mat k1 = random_special_orthogonal(3, rng);
            Mat k2 = random_special_orthogonal(4, rng);
            GroupElement k = embed_K(k1, k2, sig34);
            Vec v(3), w(5);
            for (double& c : v) c = rng.uniform(-1.0, 1.0);
            for (double& c : w) c = rng.uniform(-1.0, 1.0);
            v = scaled(v, 1.0 / norm(v));
            w = scaled(w, 1.0 / norm(w));
            auto [v2, w2] = ad.act(k, v, w, tol);
            CHECK(norm(axpy(v2, mul(k1, v), -1.0)) < 1e-9);
            CHECK(norm(axpy(w2, mul(embed_SOp_plus1(k2), w), -1.0)) < 1e-9);
        }
    }
}
