#pragma once

// Exact integer bookkeeping: dimensions of the two kinds of maximal
// parabolic subalgebras of so(p,q), computed once through closed forms and
// once by enumerating restricted roots, plus the compact-orbit dimension
// table and the arithmetic feasibility filter for orbit pairs.

#include <functional>
#include <string>
#include <vector>

#include "orthoflow/common.hpp"

namespace orthoflow::ledger {

enum class ParabolicKind { NullLine, MaxIsotropic };

struct ParabolicDims {
    ParabolicKind kind = ParabolicKind::NullLine;
    int p = 0, q = 0;
    long dimM = 0;           // centralizer of the maximal split torus in k
    long dimNplusTheta = 0;  // positive roots inside the Theta span
    long dimNTheta = 0;      // positive roots outside the Theta span
    long dimPTheta = 0;      // m + a + nTheta + 2 nplusTheta, a of full rank min(p,q)
    long codim = 0;
};

inline long so_dim(long k) { return k * (k - 1) / 2; }

namespace detail {

// One restricted root with multiplicity: +-f_i +- f_j (i < j <= q, mult 1)
// and +-f_i (mult p - q). Theta membership depends on the parabolic kind.
struct RootCount {
    long inSpanPositive = 0;   // positive roots lying in the Theta span
    long outSpanPositive = 0;  // positive roots outside it
    long totalWithMult = 0;    // all roots, with multiplicity
};

inline RootCount count_roots(ParabolicKind kind, long p, long q) {
    RootCount rc;
    for (long i = 1; i <= q; ++i)
        for (long j = i + 1; j <= q; ++j)
            for (int sj : {+1, -1}) {
                // positive root f_i - f_j or f_i + f_j
                bool inSpan;
                if (kind == ParabolicKind::NullLine)
                    inSpan = (i >= 2);  // Theta spans f_2 .. f_q
                else
                    inSpan = (sj < 0);  // Theta spans the differences f_i - f_j
                (inSpan ? rc.inSpanPositive : rc.outSpanPositive) += 1;
                rc.totalWithMult += 2;  // the root and its negative
            }
    long mult = p - q;
    if (mult > 0) {
        for (long i = 1; i <= q; ++i) {
            bool inSpan = (kind == ParabolicKind::NullLine) ? (i >= 2) : false;
            (inSpan ? rc.inSpanPositive : rc.outSpanPositive) += mult;
            rc.totalWithMult += 2 * mult;
        }
    }
    return rc;
}

}  // namespace detail

inline ParabolicDims parabolic_dims(ParabolicKind kind, int pIn, int qIn) {
    if (pIn < 3 || qIn < 3) throw BadSignature("parabolic_dims: p, q >= 3 required");
    long p = std::max(pIn, qIn), q = std::min(pIn, qIn);

    ParabolicDims out;
    out.kind = kind;
    out.p = static_cast<int>(p);
    out.q = static_cast<int>(q);
    out.dimM = so_dim(p - q);

    // closed forms
    long totalClosed;
    if (kind == ParabolicKind::NullLine) {
        if (p == q) {
            out.dimNplusTheta = p * p - 3 * p + 2;
            out.dimNTheta = 2 * (p - 1);
            totalClosed = 2 * p * p - 3 * p + 2;
        } else {
            out.dimNplusTheta = p * q - 2 * q - p + 2;
            out.dimNTheta = p + q - 2;
            totalClosed = (p * p + q * q + 2 * p * q - 3 * p - 3 * q + 4) / 2;
        }
    } else {
        if (p == q) {
            out.dimNplusTheta = (p * p - p) / 2;
            out.dimNTheta = (p * p - p) / 2;
            totalClosed = (3 * p * p - p) / 2;
        } else {
            out.dimNplusTheta = (q * q - q) / 2;
            out.dimNTheta = (q * q - q) / 2 + p * q - q * q;
            totalClosed = (p * p + 2 * q * q - p) / 2;
        }
    }

    // direct counting route; the two must agree exactly
    detail::RootCount rc = detail::count_roots(kind, p, q);
    long totalCounted = out.dimM + q + rc.outSpanPositive + 2 * rc.inSpanPositive;
    if (rc.inSpanPositive != out.dimNplusTheta || rc.outSpanPositive != out.dimNTheta ||
        totalCounted != totalClosed)
        throw Error("parabolic_dims: closed form and root count disagree");
    if (out.dimM + q + rc.totalWithMult != so_dim(p + q))
        throw Error("parabolic_dims: root multiplicities do not partition so(p,q)");

    out.dimPTheta = totalClosed;
    out.codim = so_dim(p + q) - totalClosed;
    return out;
}

// ---------------------------------------------------------------------------
// Compact orbit table

struct OrbitRow {
    int p = 0;
    std::string subgroup;
    long dimOrbit = 0;       // recomputed: dim SO(p) - dim subgroup
    long dimOrbitPrinted = 0;
    long dimBound = 0;       // printed bound on the manifold dimension
    int qLo = 0, qHi = 0;
    bool bottomPart = false;
};

struct Table1Entry {
    std::string subgroup;
    bool genericP = false;  // row parameterised by p
    int p = 0;              // concrete p when genericP is false
    std::function<long(long)> subgroupDim;
    std::function<long(long)> dimOrbitPrinted;
    std::function<long(long)> dimBound;
    std::function<long(long)> qLo;
    std::function<long(long)> qHi;
    bool bottomPart = false;
};

inline std::vector<Table1Entry> table1_entries() {
    auto cnst = [](long v) { return [v](long) { return v; }; };
    std::vector<Table1Entry> rows;
    // top part
    rows.push_back({"SO(p-2)", true, 0, [](long p) { return so_dim(p - 2); },
                    [](long p) { return 2 * p - 3; }, [](long p) { return 2 * p - 1; },
                    [](long p) { return p - 2; }, [](long p) { return p; }, false});
    rows.push_back({"SO(p-2) x SO(2)", true, 0, [](long p) { return so_dim(p - 2) + 1; },
                    [](long p) { return 2 * p - 4; }, [](long p) { return 2 * p - 1; },
                    [](long p) { return p - 3; }, [](long p) { return p; }, false});
    rows.push_back({"Spin(7)", false, 9, cnst(21), cnst(15), cnst(17), cnst(7), cnst(9), false});
    rows.push_back({"G2", false, 8, cnst(14), cnst(14), cnst(15), cnst(7), cnst(8), false});
    rows.push_back({"U4", false, 8, cnst(16), cnst(12), cnst(15), cnst(5), cnst(8), false});
    rows.push_back({"SU4", false, 8, cnst(15), cnst(13), cnst(15), cnst(6), cnst(8), false});
    rows.push_back({"G2", false, 7, cnst(14), cnst(7), cnst(13), cnst(3), cnst(7), false});
    rows.push_back({"U3", false, 7, cnst(9), cnst(12), cnst(13), cnst(6), cnst(7), false});
    rows.push_back({"SO(3) x SO(4)", false, 7, cnst(9), cnst(12), cnst(13), cnst(6), cnst(7), false});
    rows.push_back({"SO(3) x SO(3)", false, 6, cnst(6), cnst(9), cnst(11), cnst(4), cnst(6), false});
    rows.push_back({"U3", false, 6, cnst(9), cnst(6), cnst(11), cnst(3), cnst(6), false});
    rows.push_back({"SU3", false, 6, cnst(8), cnst(7), cnst(11), cnst(3), cnst(6), false});
    rows.push_back({"U2 x U1", false, 6, cnst(5), cnst(10), cnst(11), cnst(5), cnst(6), false});
    rows.push_back({"U2", false, 5, cnst(4), cnst(6), cnst(9), cnst(3), cnst(5), false});
    rows.push_back({"SU2", false, 5, cnst(3), cnst(7), cnst(9), cnst(3), cnst(5), false});
    rows.push_back({"U1 x U1", false, 5, cnst(2), cnst(8), cnst(9), cnst(4), cnst(5), false});
    // SO(3) in its irreducible 5-dimensional representation
    rows.push_back({"SO(3) (irreducible)", false, 5, cnst(3), cnst(7), cnst(9), cnst(3), cnst(5),
                    false});
    rows.push_back({"{1}", false, 3, cnst(0), cnst(3), cnst(5), cnst(3), cnst(3), false});
    // bottom part
    rows.push_back({"SO(p-1)", true, 0, [](long p) { return so_dim(p - 1); },
                    [](long p) { return p - 1; }, [](long p) { return 2 * p - 1; },
                    [](long) { return 3; }, [](long p) { return p; }, true});
    rows.push_back({"Spin(7)", false, 8, cnst(21), cnst(7), cnst(15), cnst(3), cnst(8), true});
    rows.push_back({"SU2", false, 4, cnst(3), cnst(3), cnst(7), cnst(3), cnst(4), true});
    rows.push_back({"U2", false, 4, cnst(4), cnst(2), cnst(7), cnst(3), cnst(4), true});
    return rows;
}

inline OrbitRow instantiate_row(const Table1Entry& e, int p) {
    OrbitRow row;
    row.p = p;
    row.subgroup = e.subgroup;
    row.dimOrbit = so_dim(p) - e.subgroupDim(p);
    row.dimOrbitPrinted = e.dimOrbitPrinted(p);
    row.dimBound = e.dimBound(p);
    row.qLo = static_cast<int>(std::max<long>(3, e.qLo(p)));
    row.qHi = static_cast<int>(e.qHi(p));
    row.bottomPart = e.bottomPart;
    return row;
}

// All rows, with generic-p rows instantiated over [pLo, pHi].
inline std::vector<OrbitRow> table1_rows(int pLo = 3, int pHi = 12) {
    std::vector<OrbitRow> rows;
    for (const auto& e : table1_entries()) {
        if (e.genericP) {
            for (int p = pLo; p <= pHi; ++p) rows.push_back(instantiate_row(e, p));
        } else {
            rows.push_back(instantiate_row(e, e.p));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Feasibility filter for an orbit pair

struct FilterVerdict {
    bool feasible = false;
    std::string annotation;  // static exclusion note when a known obstruction applies
};

inline FilterVerdict dimension_filter(int p, int q, int dimOp, int dimOq, int deltaV) {
    if (deltaV != 0 && deltaV != 1)
        throw BadParameters("dimension_filter: deltaV must be 0 or 1");
    FilterVerdict v;
    v.feasible = (q <= p) && (dimOp <= p + q - 1) && (dimOq <= (p + q - 1) - dimOp + deltaV);
    if (dimOq == 1) {
        v.feasible = false;
        v.annotation = "excluded: the orbit of the second factor cannot be 1-dimensional";
    } else if (p == 4 && q == 4 && dimOp == 4 && dimOq == 4) {
        v.annotation =
            "flagged: the 4-dimensional orbit pair forces a non-locally-effective action";
    } else if (dimOq == 0 && (p + q - 1) - dimOp <= q - 1) {
        v.feasible = false;
        v.annotation =
            "excluded: a second-factor fixed point would make its isotropy representation trivial";
    }
    return v;
}

}  // namespace orthoflow::ledger
