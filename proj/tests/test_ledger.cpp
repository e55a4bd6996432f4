#include <catch2/catch_amalgamated.hpp>

#include "orthoflow/ledger.hpp"

using namespace orthoflow;
using namespace orthoflow::ledger;

TEST_CASE("parabolic dimensions: null-line kind") {
    ParabolicDims d44 = parabolic_dims(ParabolicKind::NullLine, 4, 4);
    CHECK(d44.dimPTheta == 22);
    CHECK(d44.codim == 6);  // p + q - 2

    ParabolicDims d53 = parabolic_dims(ParabolicKind::NullLine, 5, 3);
    CHECK(d53.dimPTheta == 22);
    CHECK(d53.codim == 6);
    CHECK(so_dim(8) == 28);

    ParabolicDims d33 = parabolic_dims(ParabolicKind::NullLine, 3, 3);
    CHECK(d33.codim == 4);
}

TEST_CASE("parabolic dimensions: maximal-isotropic kind") {
    ParabolicDims d33 = parabolic_dims(ParabolicKind::MaxIsotropic, 3, 3);
    CHECK(d33.dimPTheta == 12);
    CHECK(d33.codim == 3);

    ParabolicDims d43 = parabolic_dims(ParabolicKind::MaxIsotropic, 4, 3);
    CHECK(d43.codim == 6);  // = p + q - 1 at (4,3)
}

TEST_CASE("closed forms, root counts and the codimension rule over the grid") {
    for (int p = 3; p <= 9; ++p)
        for (int q = 3; q <= p; ++q) {
            // parabolic_dims itself cross-checks the two routes exactly and
            // throws on any disagreement
            ParabolicDims nl = parabolic_dims(ParabolicKind::NullLine, p, q);
            CHECK(nl.codim == p + q - 2);
            ParabolicDims mi = parabolic_dims(ParabolicKind::MaxIsotropic, p, q);
            CHECK(mi.dimPTheta + mi.codim == so_dim(p + q));
            if (p == q)
                CHECK(mi.codim == (p * p - p) / 2);
            else
                CHECK(mi.codim == (-q * q + 2 * p * q - q) / 2);
        }
    CHECK_THROWS_AS(parabolic_dims(ParabolicKind::NullLine, 2, 3), BadSignature);
}

TEST_CASE("orbit table rows reproduce their printed dimensions") {
    for (const OrbitRow& row : table1_rows(3, 12)) {
        INFO(row.subgroup << " at p = " << row.p);
        CHECK(row.dimOrbit == row.dimOrbitPrinted);
    }
}

TEST_CASE("orbit table spot values") {
    auto rows = table1_rows(3, 12);
    auto find = [&](const std::string& sub, int p) -> const OrbitRow& {
        for (const auto& r : rows)
            if (r.subgroup == sub && r.p == p) return r;
        throw std::runtime_error("row not found");
    };
    CHECK(find("Spin(7)", 9).dimOrbit == 15);
    CHECK(find("G2", 7).dimOrbit == 7);
    CHECK(find("SO(p-1)", 7).dimOrbit == 6);
    CHECK(find("SO(p-1)", 11).dimOrbit == 10);
    CHECK(find("Spin(7)", 8).dimOrbit == 7);
    CHECK(find("U2", 4).dimOrbit == 2);
    CHECK(find("SU2", 4).dimOrbit == 3);
    CHECK(find("{1}", 3).dimOrbit == 3);
    CHECK(find("SO(3) (irreducible)", 5).dimOrbit == 7);
}

TEST_CASE("dimension filter") {
    SECTION("the known flagged pair at (4,4)") {
        FilterVerdict v = dimension_filter(4, 4, 4, 4, 1);
        CHECK(v.feasible);  // arithmetic passes
        CHECK(v.annotation.find("flagged") != std::string::npos);
    }
    SECTION("one-dimensional second-factor orbits are excluded") {
        FilterVerdict v = dimension_filter(9, 7, 15, 1, 1);
        CHECK_FALSE(v.feasible);
        CHECK(v.annotation.find("1-dimensional") != std::string::npos);
    }
    SECTION("the small sphere pair is feasible") {
        FilterVerdict v = dimension_filter(3, 3, 2, 2, 1);
        CHECK(v.feasible);
        CHECK(v.annotation.empty());
    }
    SECTION("arithmetic bound") {
        CHECK_FALSE(dimension_filter(5, 4, 7, 4, 0).feasible);
        CHECK_THROWS_AS(dimension_filter(3, 3, 2, 2, 2), BadParameters);
    }
}
