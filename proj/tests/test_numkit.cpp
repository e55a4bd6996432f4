#include <catch2/catch_amalgamated.hpp>

#include "orthoflow/numkit.hpp"

using namespace orthoflow;
using namespace orthoflow::numkit;

namespace {
Vec unit(int n, int i) {
    Vec v(n, 0.0);
    v[i] = 1.0;
    return v;
}

Vec random_unit(int n, Rng& rng) {
    Vec v(n);
    double s = 0;
    do {
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        s = norm(v);
    } while (s < 1e-3);
    return scaled(v, 1.0 / s);
}
}  // namespace

TEST_CASE("rotation_sending: identity case") {
    Mat r = rotation_sending(unit(3, 0), unit(3, 0));
    CHECK(frob(add(r, eye(3), -1.0)) < 1e-12);
}

TEST_CASE("rotation_sending: quarter turn in the plane") {
    Mat r = rotation_sending(unit(2, 0), unit(2, 1));
    CHECK(r(0, 0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(r(0, 1) == Catch::Approx(-1.0).margin(1e-14));
    CHECK(r(1, 0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(r(1, 1) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("rotation_sending: antipodal route") {
    Vec a = unit(3, 0), b = scaled(a, -1.0);
    Mat r = rotation_sending(a, b);
    CHECK(norm(axpy(mul(r, a), a, 1.0)) < 1e-12);  // Ra = -a
    CHECK(det_lu(r) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("rotation_sending: rejects non-unit input") {
    Vec a = {2.0, 0.0};
    CHECK_THROWS_AS(rotation_sending(a, unit(2, 1)), NonUnitInput);
    Vec one = {1.0}, mone = {-1.0};
    CHECK_THROWS_AS(rotation_sending(one, mone), DimensionTooSmall);
}

TEST_CASE("rotation_sending: random pairs land and stay orthogonal") {
    Rng rng(20240811);
    for (int trial = 0; trial < 10000; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform01() * 12);
        Vec a = random_unit(n, rng), b = random_unit(n, rng);
        Mat r = rotation_sending(a, b);
        CHECK(norm(axpy(mul(r, a), b, -1.0)) < 1e-10);
        CHECK(frob(add(mul(transpose(r), r), eye(n), -1.0)) < 1e-10);
    }
}

TEST_CASE("rank_one_factor: coordinate projectors") {
    Mat q1 = outer(unit(4, 0), unit(4, 0));
    auto f1 = rank_one_factor(q1);
    CHECK(f1.scale == Catch::Approx(1.0));
    CHECK(norm(axpy(f1.unit, unit(4, 0), -1.0)) < 1e-12);

    // P(z) at f = 0 for (p,q) = (3,3) is the projector onto eps1 (index 3)
    Mat q2 = outer(unit(6, 3), unit(6, 3));
    auto f2 = rank_one_factor(q2);
    CHECK(f2.scale == Catch::Approx(1.0));
    CHECK(norm(axpy(f2.unit, unit(6, 3), -1.0)) < 1e-12);
}

TEST_CASE("rank_one_factor: scaled outer products round-trip") {
    Rng rng(7);
    for (int trial = 0; trial < 10000; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform01() * 7);
        Vec u = random_unit(n, rng);
        auto f = rank_one_factor(outer(scaled(u, 2.0), u));
        CHECK(f.scale == Catch::Approx(2.0).margin(1e-9));
        double d = std::min(norm(axpy(f.unit, u, -1.0)), norm(axpy(f.unit, u, 1.0)));
        CHECK(d < 1e-9);
        bool canonical = false;
        for (double x : f.unit) {
            if (std::fabs(x) > 1e-12) {
                canonical = x > 0;
                break;
            }
        }
        CHECK(canonical);
    }
}

TEST_CASE("rank_one_factor: rejects rank two") {
    Mat q = add(outer(unit(3, 0), unit(3, 0)), outer(unit(3, 1), unit(3, 1)));
    CHECK_THROWS_AS(rank_one_factor(q), NotRankOne);
}

TEST_CASE("numerical_rank") {
    CHECK(numerical_rank(Mat(3, 3)) == 0);
    CHECK(numerical_rank(eye(4)) == 4);
    Rng rng(11);
    Vec u = random_unit(5, rng), v = random_unit(7, rng);
    CHECK(numerical_rank(outer(u, v)) == 1);
}

TEST_CASE("matrix_exp: zero matrix") {
    CHECK(frob(add(matrix_exp(Mat(5, 5)), eye(5), -1.0)) < 1e-15);
}

TEST_CASE("matrix_exp: boost generator matches the hyperbolic closed form") {
    // theta (E_{1,p+1} + E_{p+1,1}) for (p,q) = (3,3)
    Mat a(6, 6);
    a(0, 3) = 0.7;
    a(3, 0) = 0.7;
    Mat e = matrix_exp(a);
    double c = std::cosh(0.7), s = std::sinh(0.7);
    CHECK(e(0, 0) == Catch::Approx(c).margin(1e-12));
    CHECK(e(3, 3) == Catch::Approx(c).margin(1e-12));
    CHECK(e(0, 3) == Catch::Approx(s).margin(1e-12));
    CHECK(e(3, 0) == Catch::Approx(s).margin(1e-12));
    CHECK(std::fabs(c - 1.255169) < 1e-6);
    CHECK(std::fabs(s - 0.758584) < 1e-6);
    for (int i = 1; i < 6; ++i)
        if (i != 3) CHECK(e(i, i) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("matrix_exp: rotation generator matches the trigonometric closed form") {
    Mat a(4, 4);
    double theta = kPi / 2;
    a(0, 1) = theta;
    a(1, 0) = -theta;
    Mat e = matrix_exp(a);
    CHECK(e(0, 0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(e(0, 1) == Catch::Approx(1.0).margin(1e-12));
    CHECK(e(1, 0) == Catch::Approx(-1.0).margin(1e-12));
    CHECK(e(2, 2) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("matrix_exp: overflow is reported") {
    Mat a(2, 2);
    a(0, 1) = 800.0;
    a(1, 0) = 800.0;
    CHECK_THROWS_AS(matrix_exp(a), Overflow);
}

TEST_CASE("jacobi eigensolver handles a known spectrum") {
    Mat m(3, 3);
    m(0, 0) = 2;
    m(1, 1) = 5;
    m(2, 2) = -1;
    m(0, 1) = m(1, 0) = 1;
    EigSym e = jacobi_eig(m);
    double tr = e.values[0] + e.values[1] + e.values[2];
    CHECK(tr == Catch::Approx(6.0).margin(1e-10));
    for (int k = 0; k < 3; ++k) {
        Vec v(3);
        for (int i = 0; i < 3; ++i) v[i] = e.vectors(i, k);
        Vec mv = mul(m, v);
        CHECK(norm(axpy(mv, v, -e.values[k])) < 1e-10);
    }
}
