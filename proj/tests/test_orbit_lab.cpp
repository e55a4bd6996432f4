#include <catch2/catch_amalgamated.hpp>

#include "orthoflow/orbit_lab.hpp"

using namespace orthoflow;
using namespace orthoflow::numkit;
using namespace orthoflow::sopq;
using namespace orthoflow::circleflow;
using namespace orthoflow::engine;
using namespace orthoflow::orbitlab;

namespace {
const Signature sig33(3, 3);

ActionHandle basic_handle() {
    static FlowFunctionPair pair = make_pair(make_flow(FlowKind::BasicJ1, 1, 0.3));
    return product_action_handle(sig33, pair);
}

double f_at(double phi) {
    static FlowFunctionPair pair = make_pair(make_flow(FlowKind::BasicJ1, 1, 0.3));
    return pair.f(phi);
}

double slice_angle_with_f(double target) {
    // bisection on the arc through the +pole, where f decreases in phi
    double lo = 1e-6, hi = kPi - 1e-6;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (f_at(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("generator fields vanish for stabilizer directions") {
    ActionHandle h = basic_handle();
    double phi = slice_angle_with_f(0.4);
    Point z = pack(slice_point(sig33, phi));
    Vec uz(6, 0.0);
    uz[0] = 0.4;
    uz[3] = 1.0;
    auto stab = stabilizer_algebra(sig33, uz);

    auto fields = generator_fields(h, z);
    for (const Vec& c : stab.coefficients) {
        Vec combo(fields[0].size(), 0.0);
        for (size_t i = 0; i < c.size(); ++i) combo = axpy(combo, fields[i], c[i]);
        CHECK(norm(combo) < 1e-6);
    }
}

TEST_CASE("rotation generator matches the exact K derivative") {
    ActionHandle h = basic_handle();
    Point z = pack(slice_point(sig33, 0.7));
    auto fields = generator_fields(h, z);
    // generator 0 is the rotation E_{12} - E_{21} in the p block; its flow
    // moves v = (cos 0.7, 0, 0, sin 0.7) with derivative cos 0.7 along e2
    Vec exact(10, 0.0);
    exact[1] = -std::cos(0.7);
    CHECK(norm(axpy(fields[0], exact, -1.0)) < 1e-6);
}

TEST_CASE("Richardson consistency across step sizes") {
    ActionHandle h = basic_handle();
    Point z = pack(slice_point(sig33, 1.1));
    auto f1 = generator_fields(h, z, 1e-4);
    auto f2 = generator_fields(h, z, 5e-5);
    for (size_t i = 0; i < f1.size(); ++i) CHECK(norm(axpy(f1[i], f2[i], -1.0)) < 1e-6);
}

TEST_CASE("orbit dimensions of the basic construction") {
    ActionHandle h = basic_handle();
    Tolerances tol;

    SECTION("open orbit at f = 0.4") {
        Point z = pack(slice_point(sig33, slice_angle_with_f(0.4)));
        CHECK(orbit_dimension(h, z, tol) == 5);
    }
    SECTION("closed orbit at the slice fixed point") {
        Point z1 = pack(slice_point(sig33, 0.0));
        CHECK(orbit_dimension(h, z1, tol) == 4);
    }
    SECTION("rank splits are consistent") {
        for (double phi : {0.0, 0.5, kPi / 2, 2.2, kPi}) {
            Point z = pack(slice_point(sig33, phi));
            int dim = orbit_dimension(h, z, tol);
            int iso = static_cast<int>(isotropy_algebra(h, z, tol).elements.size());
            CHECK(dim + iso == 15);
        }
    }
}

TEST_CASE("isotropy algebra matches the ambient stabilizer") {
    ActionHandle h = basic_handle();
    Tolerances tol;
    double phi = slice_angle_with_f(0.4);
    Point z = pack(slice_point(sig33, phi));
    IsotropyAlgebra iso = isotropy_algebra(h, z, tol);
    CHECK(iso.elements.size() == 10);
    CHECK(orbitlab::detail::containment_residual(
              sig33, ProjectivePoint::make(0.4, 1.0), iso.elements, tol) < 1e-3);
}

TEST_CASE("isotropy at the slice fixed point is the full parabolic") {
    ActionHandle h = basic_handle();
    Point z1 = pack(slice_point(sig33, 0.0));
    IsotropyAlgebra iso = isotropy_algebra(h, z1);
    CHECK(iso.elements.size() == 11);
}

TEST_CASE("isotropy at the pole contains the whole p-rotation block") {
    ActionHandle h = basic_handle();
    Tolerances tol;
    Point pole = pack(slice_point(sig33, kPi / 2));
    IsotropyAlgebra iso = isotropy_algebra(h, pole, tol);
    CHECK(iso.elements.size() == 10);
    std::vector<Mat> span;
    for (const auto& el : iso.elements) {
        Mat b = el.mat;
        for (const Mat& e : span) {
            double c = 0;
            for (size_t i = 0; i < b.a.size(); ++i) c += b.a[i] * e.a[i];
            b = add(b, e, -c);
        }
        double nb = frob(b);
        if (nb > 1e-10) span.push_back(scale(b, 1.0 / nb));
    }
    auto basis = algebra_basis(sig33);
    for (int r = 0; r < 3; ++r) {  // the three p-rotations
        Mat resid = basis[r].mat;
        for (const Mat& e : span) {
            double c = 0;
            for (size_t i = 0; i < resid.a.size(); ++i) c += basis[r].mat.a[i] * e.a[i];
            resid = add(resid, e, -c);
        }
        CHECK(frob(resid) / frob(basis[r].mat) < 1e-3);
    }
}

TEST_CASE("isotropy transports along the flow by boost conjugation") {
    ActionHandle h = basic_handle();
    Tolerances tol;
    FlowFunctionPair pair = make_pair(make_flow(FlowKind::BasicJ1, 1, 0.3));
    double phi = slice_angle_with_f(0.25);
    double theta = 0.6;
    double phiMoved = flow_map(pair.flow, theta, phi);

    IsotropyAlgebra isoMoved = isotropy_algebra(h, pack(slice_point(sig33, phiMoved)), tol);
    IsotropyAlgebra isoBase = isotropy_algebra(h, pack(slice_point(sig33, phi)), tol);
    Mat m = boost(sig33, theta).mat;
    Mat mInv = boost(sig33, -theta).mat;
    std::vector<Mat> span;
    for (const auto& el : isoMoved.elements) {
        Mat b = el.mat;
        for (const Mat& e : span) {
            double c = 0;
            for (size_t i = 0; i < b.a.size(); ++i) c += b.a[i] * e.a[i];
            b = add(b, e, -c);
        }
        double nb = frob(b);
        if (nb > 1e-10) span.push_back(scale(b, 1.0 / nb));
    }
    double worst = 0;
    for (const auto& el : isoBase.elements) {
        Mat conj = mul(mul(m, el.mat), mInv);
        Mat resid = conj;
        for (const Mat& e : span) {
            double c = 0;
            for (size_t i = 0; i < resid.a.size(); ++i) c += conj.a[i] * e.a[i];
            resid = add(resid, e, -c);
        }
        worst = std::max(worst, frob(resid) / frob(conj));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("extract_f_tilde finds the slice companion value") {
    ActionHandle h = basic_handle();
    Tolerances tol;
    FlowFunctionPair pair = make_pair(make_flow(FlowKind::BasicJ1, 1, 0.3));

    SECTION("the pole carries [0 : 1]") {
        ProjectivePoint p = extract_f_tilde(h, pack(slice_point(sig33, kPi / 2)), tol);
        CHECK(ProjectivePoint::distance(p, ProjectivePoint::make(0, 1)) < 1e-3);
    }

    SECTION("transported points carry [tanh theta : 1]") {
        for (double theta : {-0.7, 0.4, 1.0}) {
            double phi = flow_map(pair.flow, theta, kPi / 2);
            ProjectivePoint p = extract_f_tilde(h, pack(slice_point(sig33, phi)), tol);
            ProjectivePoint expect = ProjectivePoint::make(std::tanh(theta), 1.0);
            CHECK(ProjectivePoint::distance(p, expect) < 1e-3);
        }
    }

    SECTION("the slice fixed point carries [1 : 1]") {
        ProjectivePoint p = extract_f_tilde(h, pack(slice_point(sig33, 0.0)), tol);
        CHECK(ProjectivePoint::distance(p, ProjectivePoint::make(1, 1)) < 1e-3);
    }
}

TEST_CASE("f tilde transported along the slice obeys the cross-ratio law") {
    ActionHandle h = basic_handle();
    Tolerances tol;
    FlowFunctionPair pair = make_pair(make_flow(FlowKind::BasicJ1, 1, 0.3));
    double phi0 = slice_angle_with_f(0.2);
    double f0 = 0.2;
    for (double theta : {-0.5, 0.8}) {
        double phi = flow_map(pair.flow, theta, phi0);
        ProjectivePoint p = extract_f_tilde(h, pack(slice_point(sig33, phi)), tol);
        double expect = (f0 + std::tanh(theta)) / (1 + f0 * std::tanh(theta));
        CHECK(ProjectivePoint::distance(p, ProjectivePoint::make(expect, 1.0)) < 1e-3);
    }
}

TEST_CASE("extract_f_tilde refuses points whose isotropy is not slice-shaped") {
    // a generic (non-slice) point has isotropy conjugated away from the
    // e1/eps1 plane, so no planar stabilizer algebra is contained in it
    ActionHandle h = basic_handle();
    Rng rng(57);
    ProductSpherePoint x = random_product_point(sig33, rng);
    CHECK_THROWS_AS(extract_f_tilde(h, pack(x), Tolerances{}), NoContainment);
}

TEST_CASE("evaluator errors surface as EvaluatorFailure") {
    ActionHandle broken;
    broken.sig = sig33;
    broken.space = PointSpace::ProductSphere;
    broken.evaluate = [](const GroupElement&, const Point&) -> Point {
        throw IntegrationFailure("synthetic");
    };
    broken.embed = [](const Point& p) { return p; };
    CHECK_THROWS_AS(generator_fields(broken, pack(slice_point(sig33, 1.0))), EvaluatorFailure);
    CHECK_THROWS_AS(generator_fields(basic_handle(), pack(slice_point(sig33, 1.0)), 1e-8),
                    BadParameters);
}

TEST_CASE("orbit classification census of the basic construction") {
    ActionHandle h = basic_handle();
    Tolerances tol;

    OrbitReport openA = classify_orbit(h, pack(slice_point(sig33, kPi / 2)), tol);
    CHECK(openA.orbitType == OrbitType::Open);
    CHECK(openA.dimension == 5);
    CHECK(openA.stabilizerLabel == OrbitType::StabSOpq1);  // spacelike stabilized vector

    OrbitReport openB = classify_orbit(h, pack(slice_point(sig33, 3 * kPi / 2)), tol);
    CHECK(openB.orbitType == OrbitType::Open);

    OrbitReport closed1 = classify_orbit(h, pack(slice_point(sig33, 0.0)), tol);
    CHECK(closed1.orbitType == OrbitType::ClosedPnull);
    CHECK(closed1.dimension == 4);
    REQUIRE(closed1.fTilde.has_value());
    CHECK(ProjectivePoint::distance(*closed1.fTilde, ProjectivePoint::make(1, 1)) < 1e-6);
    CHECK(closed1.excessIsotropy == 1);  // the parabolic exceeds the vector stabilizer

    OrbitReport closed2 = classify_orbit(h, pack(slice_point(sig33, kPi)), tol);
    CHECK(closed2.orbitType == OrbitType::ClosedPnull);
}

TEST_CASE("open orbit at f = 0.4 classifies with a spacelike stabilizer") {
    ActionHandle h = basic_handle();
    OrbitReport rep = classify_orbit(h, pack(slice_point(sig33, slice_angle_with_f(0.4))));
    CHECK(rep.orbitType == OrbitType::Open);
    CHECK(rep.stabilizerLabel == OrbitType::StabSOpq1);
    REQUIRE(rep.fTilde.has_value());
    CHECK(ProjectivePoint::distance(*rep.fTilde, ProjectivePoint::make(0.4, 1.0)) < 1e-3);
    CHECK(rep.stabilizedFormValue > 0);
}

TEST_CASE("bundle orbits classify as nullcone") {
    CircleFlow flow = make_flow(FlowKind::BasicJ1, 1, 0.2);
    ActionHandle h = bundle_action_handle(sig33, flow);
    Tolerances tol;

    Point generic = pack(identity(sig33), 1.0);  // away from the flow's fixed points
    OrbitReport rep = classify_orbit(h, generic, tol);
    CHECK(rep.dimension == 5);
    CHECK(rep.isotropyDim == 10);
    CHECK(rep.orbitType == OrbitType::Nullcone);
    CHECK(std::fabs(rep.stabilizedFormValue) < 1e-6);
}

TEST_CASE("fixed set scans") {
    ActionHandle h = basic_handle();
    Tolerances tol;

    SECTION("SO(p) fixes exactly the two poles on the basic construction") {
        std::vector<double> fixed = fixed_set_scan(h, ScanSubgroup::SOp, 360, tol);
        REQUIRE(fixed.size() == 2);
        CHECK(angle_dist(fixed[0], kPi / 2) < 1e-9);
        CHECK(angle_dist(fixed[1], 3 * kPi / 2) < 1e-9);
    }
    SECTION("SO(q) fixes nothing on the basic construction") {
        CHECK(fixed_set_scan(h, ScanSubgroup::SOq, 360, tol).empty());
    }
    SECTION("the mirrored slice circle carries its own pole pair") {
        std::vector<double> fixed = fixed_set_scan(h, ScanSubgroup::SOp, 360, tol, 42, true);
        REQUIRE(fixed.size() == 2);
        CHECK(angle_dist(fixed[0], kPi / 2) < 1e-9);
        CHECK(angle_dist(fixed[1], 3 * kPi / 2) < 1e-9);
        CHECK(fixed_set_scan(h, ScanSubgroup::SOq, 360, tol, 42, true).empty());
    }
    SECTION("H fixes the whole slice") {
        CHECK(fixed_set_scan(h, ScanSubgroup::H, 72, tol).size() == 72);
    }
    SECTION("neither factor has fixed points on the bundle") {
        CircleFlow flow = make_flow(FlowKind::BasicJ1, 1, 0.2);
        ActionHandle hb = bundle_action_handle(sig33, flow);
        CHECK(fixed_set_scan(hb, ScanSubgroup::SOp, 90, tol).empty());
        CHECK(fixed_set_scan(hb, ScanSubgroup::SOq, 90, tol).empty());
    }
}
