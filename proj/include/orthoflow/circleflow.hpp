#pragma once

// Analytic circle flows used by the constructed actions.
//
// Two parametric families realise the defining properties (two or four
// hyperbolic fixed points, reflection equivariance, Jacobians +-2/n):
//
//   basic J1 flow:      g(phi) = -(2/n) sin(phi) (1 + a sin(phi))
//   basic (J1,J2) flow: g(phi) =  (1/n) cos(2phi)(1 + a cos(2phi))
//
// with n >= 1 and |a| < 1. The parameter a deforms the global invariant mu
// while leaving the Jacobians untouched.
//
// The companion function f (resp. projective f~) is evaluated through the
// transit-time coordinate T(phi) from the arc anchor: f = tanh(T) solves
// g f' = 1 - f^2 with f(anchor) = 0. Quadrature of 1/g is regularised at
// the hyperbolic arc ends; inside radius 1e-3 of a fixed point f switches to
// the asymptotic form 1 -+ f ~ C d^n with C fitted at the switch radius.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orthoflow/common.hpp"

namespace orthoflow::circleflow {

enum class FlowKind { BasicJ1, BasicJ1J2 };

enum class AnchorType { EpsPole, EPole };  // f~ = [0:1] resp. [1:0] at the anchor

struct ProjectivePoint {
    double a = 0.0;
    double b = 1.0;

    // canonical: unit norm, b > 0, or b == 0 and a > 0
    static ProjectivePoint make(double a, double b) {
        double n = std::sqrt(a * a + b * b);
        if (n == 0.0) throw BadParameters("projective point needs a nonzero pair");
        a /= n;
        b /= n;
        if (b < 0 || (b == 0 && a < 0)) {
            a = -a;
            b = -b;
        }
        return {a, b};
    }

    ProjectivePoint transported(double theta) const {
        double c = std::cosh(theta), s = std::sinh(theta);
        return make(a * c + b * s, a * s + b * c);
    }

    // angle in (-pi/2, pi/2], projective distance folds mod pi
    double angle() const { return std::atan2(a, b); }

    static double distance(const ProjectivePoint& x, const ProjectivePoint& y) {
        double d = std::fabs(x.angle() - y.angle());
        return d > kPi / 2 ? kPi - d : d;
    }
};

struct FixedPointInfo {
    double angle;
    double jacobian;  // g'(angle)
};

struct FlowValidation {
    bool ok = true;
    double zero_residual = 0.0;      // max |g| over the declared fixed points
    double symmetry_residual = 0.0;  // J-equivariance at field level
    std::vector<FixedPointInfo> fixed_points;
};

struct CircleFlow {
    FlowKind kind = FlowKind::BasicJ1;
    int n = 1;
    double a = 0.0;
    FlowValidation validation;

    double g(double phi) const {
        if (kind == FlowKind::BasicJ1) return -(2.0 / n) * std::sin(phi) * (1.0 + a * std::sin(phi));
        return (1.0 / n) * std::cos(2 * phi) * (1.0 + a * std::cos(2 * phi));
    }

    double gprime(double phi) const {
        if (kind == FlowKind::BasicJ1) return -(2.0 / n) * std::cos(phi) * (1.0 + 2 * a * std::sin(phi));
        return -(2.0 / n) * std::sin(2 * phi) * (1.0 + 2 * a * std::cos(2 * phi));
    }

    std::vector<double> fixed_points() const {
        if (kind == FlowKind::BasicJ1) return {0.0, kPi};
        return {kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4};
    }
};

inline CircleFlow make_flow(FlowKind kind, int n, double a) {
    if (n < 1) throw BadParameters("make_flow: n must be a positive integer");
    if (!(std::fabs(a) < 1.0)) throw BadParameters("make_flow: |a| < 1 required");
    CircleFlow flow{kind, n, a, {}};
    FlowValidation& val = flow.validation;
    for (double z : flow.fixed_points()) {
        val.zero_residual = std::max(val.zero_residual, std::fabs(flow.g(z)));
        val.fixed_points.push_back({z, flow.gprime(z)});
    }
    for (int i = 0; i < 64; ++i) {
        double phi = kTwoPi * i / 64.0;
        double r = std::fabs(flow.g(kPi - phi) - flow.g(phi));
        if (kind == FlowKind::BasicJ1J2) r = std::max(r, std::fabs(flow.g(-phi) - flow.g(phi)));
        val.symmetry_residual = std::max(val.symmetry_residual, r);
    }
    val.ok = val.zero_residual < 1e-12 && val.symmetry_residual < 1e-12;
    if (!val.ok) throw BadParameters("make_flow: family invariants violated");
    return flow;
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

}  // namespace detail

// One open arc between adjacent fixed points, in an unwrapped coordinate
// (hi may exceed 2pi for the wrap-around arc).
struct Arc {
    double lo = 0.0, hi = 0.0;
    double anchor = 0.0;
    AnchorType type = AnchorType::EpsPole;
    double jac_lo = 0.0, jac_hi = 0.0;
};

// Transit-time table for one arc. T(phi) = int_anchor^phi 1/g splits as
// R(phi) + log(phi-lo)/J_lo + log(hi-phi)/J_hi - (same at anchor), where R
// is analytic on the closed arc and interpolated at Chebyshev-Lobatto
// nodes. Immutable after construction.
struct TransitTable {
    double lo = 0, hi = 0, jlo = 0, jhi = 0, anchorL = 0;
    std::vector<double> nodes;
    std::vector<double> rvals;

    double logpart(double phi) const {
        double dlo = std::max(phi - lo, 1e-300);
        double dhi = std::max(hi - phi, 1e-300);
        return std::log(dlo) / jlo + std::log(dhi) / jhi;
    }

    double rvalue(double phi) const {
        // barycentric interpolation, Lobatto weights
        size_t N = nodes.size() - 1;
        double num = 0, den = 0;
        for (size_t k = 0; k <= N; ++k) {
            double diff = phi - nodes[k];
            if (std::fabs(diff) < 1e-14) return rvals[k];
            double w = ((k % 2) ? -1.0 : 1.0) * ((k == 0 || k == N) ? 0.5 : 1.0);
            num += w / diff * rvals[k];
            den += w / diff;
        }
        return num / den;
    }

    double transit(double phi) const { return rvalue(phi) + logpart(phi) - anchorL; }
};

// Field + fixed-point view shared by the parametric families and lifted
// flows; conjugacy construction and the integrator work at this level.
struct FlowGeometry {
    std::function<double(double)> g;
    std::function<double(double)> gprime;
    std::vector<double> fixed_points;  // sorted, in [0, 2pi)
    std::vector<Arc> arcs;
    std::vector<TransitTable> tables;  // one per arc once built

    static FlowGeometry from(const CircleFlow& flow) {
        FlowGeometry geo;
        geo.g = [flow](double phi) { return flow.g(phi); };
        geo.gprime = [flow](double phi) { return flow.gprime(phi); };
        geo.fixed_points = flow.fixed_points();
        if (flow.kind == FlowKind::BasicJ1) {
            geo.arcs = {{0.0, kPi, kPi / 2, AnchorType::EpsPole, flow.gprime(0.0), flow.gprime(kPi)},
                        {kPi, kTwoPi, 3 * kPi / 2, AnchorType::EpsPole, flow.gprime(kPi),
                         flow.gprime(kTwoPi)}};
        } else {
            geo.arcs = {
                {kPi / 4, 3 * kPi / 4, kPi / 2, AnchorType::EpsPole, flow.gprime(kPi / 4),
                 flow.gprime(3 * kPi / 4)},
                {3 * kPi / 4, 5 * kPi / 4, kPi, AnchorType::EPole, flow.gprime(3 * kPi / 4),
                 flow.gprime(5 * kPi / 4)},
                {5 * kPi / 4, 7 * kPi / 4, 3 * kPi / 2, AnchorType::EpsPole, flow.gprime(5 * kPi / 4),
                 flow.gprime(7 * kPi / 4)},
                {7 * kPi / 4, 9 * kPi / 4, kTwoPi, AnchorType::EPole, flow.gprime(7 * kPi / 4),
                 flow.gprime(kPi / 4)}};
        }
        geo.build_tables();
        return geo;
    }

    void build_tables();  // defined below, after the quadrature helpers

    // Index of the arc containing phi plus the unwrapped coordinate.
    std::pair<int, double> locate(double phi) const {
        double w = wrap_angle(phi);
        for (size_t i = 0; i < arcs.size(); ++i) {
            if (w > arcs[i].lo && w < arcs[i].hi) return {static_cast<int>(i), w};
            double shifted = w + kTwoPi;
            if (shifted > arcs[i].lo && shifted < arcs[i].hi) return {static_cast<int>(i), shifted};
        }
        throw AtFixedPoint("locate: angle sits on a fixed point");
    }

    double nearest_fixed_point_dist(double phi) const {
        double d = kTwoPi;
        for (double z : fixed_points) d = std::min(d, angle_dist(phi, z));
        return d;
    }
};

inline constexpr double kAsymptoticRadius = 1e-3;
inline constexpr double kStationaryClamp = 1e-14;

// Signed transit time along the arc from `from` to `to` (both strictly
// inside the same arc, unwrapped coordinates): integral of 1/g with the
// simple-pole part peeled off near the ends.
namespace detail {

inline double transit_in_arc(const FlowGeometry& geo, const Arc& arc, double from, double to) {
    if (from == to) return 0.0;
    auto invg = [&](double psi) { return 1.0 / geo.g(psi); };
    // Split the path so each piece is either away from the ends or handled
    // with the regularised integrand around one end.
    double total = 0.0;
    double reg = kAsymptoticRadius;
    auto piece = [&](double a, double b) {
        if (a == b) return;
        double endLo = arc.lo, endHi = arc.hi;
        double lo = std::min(a, b), hi = std::max(a, b);
        double sign = (b >= a) ? 1.0 : -1.0;
        // near the lower end?
        if (lo < endLo + reg) {
            double z = endLo, J = arc.jac_lo;
            double cut = std::min(hi, endLo + reg);
            auto regf = [&](double psi) { return 1.0 / geo.g(psi) - 1.0 / (J * (psi - z)); };
            double d1 = std::max(lo - z, 1e-300), d2 = cut - z;
            total += sign * (detail::integrate(regf, lo, cut) + (std::log(d2) - std::log(d1)) / J);
            lo = cut;
            if (lo >= hi) return;
        }
        if (hi > endHi - reg) {
            double z = endHi, J = arc.jac_hi;
            double cut = std::max(lo, endHi - reg);
            auto regf = [&](double psi) { return 1.0 / geo.g(psi) - 1.0 / (J * (psi - z)); };
            double d1 = cut - z, d2 = std::min(hi - z, -1e-300);
            total += sign * (detail::integrate(regf, cut, hi) +
                             (std::log(-d2) - std::log(-d1)) / J);
            hi = cut;
            if (lo >= hi) return;
        }
        total += sign * detail::integrate(invg, lo, hi);
    };
    piece(from, to);
    return total;
}

}  // namespace detail

inline void FlowGeometry::build_tables() {
    tables.clear();
    const int N = 96;
    // Keep the nodes 1e-4 away from the hyperbolic ends: there the
    // regularised integrand is computable without cancellation, and the
    // remainder R is analytic, so the interpolant extrapolates across the
    // last sliver.
    const double inset = 1e-4;
    for (const Arc& arc : arcs) {
        TransitTable tab;
        tab.lo = arc.lo;
        tab.hi = arc.hi;
        tab.jlo = arc.jac_lo;
        tab.jhi = arc.jac_hi;
        double a = arc.lo + inset, b = arc.hi - inset;
        double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
        auto field = g;
        double jlo = tab.jlo, jhi = tab.jhi, lo = tab.lo, hi = tab.hi;
        auto reg = [field, jlo, jhi, lo, hi](double psi) {
            return 1.0 / field(psi) - 1.0 / (jlo * (psi - lo)) + 1.0 / (jhi * (hi - psi));
        };
        tab.nodes.resize(N + 1);
        for (int k = 0; k <= N; ++k) tab.nodes[k] = mid - hw * std::cos(kPi * k / N);
        tab.rvals.assign(N + 1, 0.0);
        for (int k = 1; k <= N; ++k)
            tab.rvals[k] = tab.rvals[k - 1] +
                           detail::integrate(reg, tab.nodes[k - 1], tab.nodes[k], 1e-12);
        // shift so that T(anchor) = 0
        double ra = 0.0;
        {
            // R at the anchor relative to the first node
            int k = 0;
            while (k < N && tab.nodes[k + 1] < arc.anchor) ++k;
            ra = tab.rvals[k] + detail::integrate(reg, tab.nodes[k], arc.anchor, 1e-12);
        }
        for (double& r : tab.rvals) r -= ra;
        tab.anchorL = tab.logpart(arc.anchor);
        tables.push_back(std::move(tab));
    }
    // spot-check the tables against direct quadrature
    for (size_t i = 0; i < arcs.size(); ++i) {
        const Arc& arc = arcs[i];
        for (double frac : {0.13, 0.5, 0.91}) {
            double phi = arc.lo + (arc.hi - arc.lo) * frac;
            double direct = detail::transit_in_arc(*this, arc, arc.anchor, phi);
            if (std::fabs(tables[i].transit(phi) - direct) > 1e-9) {
                tables.clear();  // fall back to direct quadrature
                return;
            }
        }
    }
}

// Time from the arc anchor; the coordinate in which the flow is translation.
inline double transit_from_anchor(const FlowGeometry& geo, int arcIndex, double unwrapped) {
    if (!geo.tables.empty()) return geo.tables[arcIndex].transit(unwrapped);
    const Arc& arc = geo.arcs[arcIndex];
    return detail::transit_in_arc(geo, arc, arc.anchor, unwrapped);
}

// Inverse of transit_from_anchor on one arc (T is strictly monotone there).
// Coarse bisection to localise, then Newton through T' = 1/g.
inline double invert_transit(const FlowGeometry& geo, int arcIndex, double T) {
    const Arc& arc = geo.arcs[arcIndex];
    double eps = 1e-13;
    double lo = arc.lo + eps, hi = arc.hi - eps;
    double Tlo = transit_from_anchor(geo, arcIndex, lo);
    double Thi = transit_from_anchor(geo, arcIndex, hi);
    bool increasing = Thi > Tlo;
    if ((increasing && T <= Tlo) || (!increasing && T >= Tlo)) return lo;
    if ((increasing && T >= Thi) || (!increasing && T <= Thi)) return hi;
    for (int it = 0; it < 24; ++it) {
        double mid = 0.5 * (lo + hi);
        double Tm = transit_from_anchor(geo, arcIndex, mid);
        if ((Tm < T) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 30; ++it) {
        double Tx = transit_from_anchor(geo, arcIndex, x);
        double step = -(Tx - T) * geo.g(x);
        double next = std::clamp(x + step, lo, hi);
        if (std::fabs(next - x) < 1e-15) return next;
        x = next;
    }
    return x;
}

// Adaptive RK4 with step doubling for d phi / d theta = g(phi). Fixed points
// are hard-clamped: |g| < 1e-14 means stationary.
inline double flow_map_field(const std::function<double(double)>& g, double theta, double phi,
                             const Tolerances& tol = {}) {
    if (!std::isfinite(theta) || !std::isfinite(phi))
        throw IntegrationFailure("flow_map: non-finite input");
    if (std::fabs(theta) < 1e-12) return wrap_angle(phi + theta * g(phi));
    if (std::fabs(g(phi)) < kStationaryClamp) return wrap_angle(phi);
    auto rk4 = [&](double x, double h) {
        double k1 = g(x);
        double k2 = g(x + 0.5 * h * k1);
        double k3 = g(x + 0.5 * h * k2);
        double k4 = g(x + h * k3);
        return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    };
    double remaining = std::fabs(theta);
    double dir = theta > 0 ? 1.0 : -1.0;
    double x = phi;
    double h = std::min(0.05, remaining);
    double localTarget = (tol.ode / 10.0) / std::max(1.0, std::fabs(theta));
    long guard = 0;
    while (remaining > 0) {
        if (++guard > 2000000) throw IntegrationFailure("flow_map: step limit reached");
        h = std::min(h, remaining);
        double full = rk4(x, dir * h);
        double half = rk4(rk4(x, dir * h / 2), dir * h / 2);
        double err = std::fabs(half - full);
        double budget = localTarget * h;
        // the absolute floor keeps rounding noise from stalling the controller
        double floor = 4e-15 * (1.0 + std::fabs(x));
        bool accepted = err <= budget || err <= floor || h <= 1e-9;
        if (accepted) {
            x = half + (half - full) / 15.0;
            remaining -= h;
            if (remaining <= 0) break;
            if (std::fabs(g(x)) < kStationaryClamp) break;
        }
        double scale = (err > 0) ? 0.9 * std::pow(budget / err, 0.2) : 5.0;
        h *= std::clamp(scale, 0.2, 5.0);
        if (!accepted && h < 1e-13)
            throw IntegrationFailure("flow_map: step size underflow");
        h = std::max(h, 1e-13);
    }
    return wrap_angle(x);
}

inline double flow_map(const CircleFlow& flow, double theta, double phi, const Tolerances& tol = {}) {
    return flow_map_field([&flow](double x) { return flow.g(x); }, theta, phi, tol);
}

// theta with Phi_theta(from) = to; both angles must lie strictly inside the
// same arc.
inline double transit_time(const CircleFlow& flow, double from, double to,
                           const Tolerances& tol = {}) {
    (void)tol;
    FlowGeometry geo = FlowGeometry::from(flow);
    if (geo.nearest_fixed_point_dist(from) < 1e-13 || geo.nearest_fixed_point_dist(to) < 1e-13)
        throw AtFixedPoint("transit_time: endpoint at a fixed point");
    auto [ia, ua] = geo.locate(from);
    auto [ib, ub] = geo.locate(to);
    if (ia != ib) throw DifferentArcs("transit_time: endpoints on different arcs");
    return detail::transit_in_arc(geo, geo.arcs[ia], ua, ub);
}

// ---------------------------------------------------------------------------
// Companion function machinery

struct PairValidation {
    bool ok = true;
    double a1 = 0.0;  // flow reflection equivariance
    double a2 = 0.0;  // f(j z) = -f(z)
    double a3 = 0.0;  // cross-ratio / hyperbolic transport
    double a4 = 0.0;  // anchor values
    double ode = 0.0; // g f' = 1 - f^2 residual away from the ends
};

class FlowFunctionPair {
public:
    CircleFlow flow;
    PairValidation validation;

    explicit FlowFunctionPair(const CircleFlow& fl) : flow(fl), geo_(FlowGeometry::from(fl)) {
        // asymptotic coefficients 1 -+ f ~ C d^n fitted at the switch radius
        for (size_t i = 0; i < geo_.arcs.size(); ++i) {
            const Arc& arc = geo_.arcs[i];
            double Tlo = transit_from_anchor(geo_, static_cast<int>(i), arc.lo + kAsymptoticRadius);
            double Thi = transit_from_anchor(geo_, static_cast<int>(i), arc.hi - kAsymptoticRadius);
            double cn = std::pow(kAsymptoticRadius, flow.n);
            clo_.push_back((1.0 - std::tanh(std::fabs(Tlo))) / cn);
            chi_.push_back((1.0 - std::tanh(std::fabs(Thi))) / cn);
            tlo_.push_back(Tlo);
            thi_.push_back(Thi);
        }
        validate();
    }

    const FlowGeometry& geometry() const { return geo_; }

    // Transit coordinate, usable for either family.
    double transit(double phi) const {
        auto [i, u] = geo_.locate(phi);
        return transit_from_anchor(geo_, i, u);
    }

    // f on the main slice circle; BasicJ1 families only.
    double f(double phi) const {
        if (flow.kind != FlowKind::BasicJ1) throw WrongKind("f: BasicJ1 flow required");
        return f_generic(phi);
    }

    ProjectivePoint f_tilde(double phi) const {
        if (flow.kind != FlowKind::BasicJ1J2) throw WrongKind("f_tilde: BasicJ1J2 flow required");
        double w = wrap_angle(phi);
        if (geo_.nearest_fixed_point_dist(w) < 1e-13) {
            // the limit value [+-1 : 1], sign from the adjacent arc
            for (size_t i = 0; i < geo_.arcs.size(); ++i) {
                const Arc& arc = geo_.arcs[i];
                for (double rep : {w, w + kTwoPi}) {
                    if (std::fabs(rep - arc.lo) < 1e-12)
                        return ProjectivePoint::make(tlo_[i] > 0 ? 1.0 : -1.0, 1.0);
                    if (std::fabs(rep - arc.hi) < 1e-12)
                        return ProjectivePoint::make(thi_[i] > 0 ? 1.0 : -1.0, 1.0);
                }
            }
            throw Unreachable("f_tilde: fixed point not on any arc boundary");
        }
        auto [i, u] = geo_.locate(w);
        double t = std::tanh(transit_from_anchor(geo_, i, u));
        if (geo_.arcs[i].type == AnchorType::EpsPole) return ProjectivePoint::make(t, 1.0);
        return ProjectivePoint::make(1.0, t);
    }

    // Slice value as a projective point for either kind (BasicJ1 gives
    // [f : 1]); used by the engine's projector construction.
    ProjectivePoint value(double phi) const {
        if (flow.kind == FlowKind::BasicJ1J2) return f_tilde(phi);
        double v = f_generic(phi);
        return ProjectivePoint::make(v, 1.0);
    }

private:
    FlowGeometry geo_;
    std::vector<double> clo_, chi_;  // asymptotic coefficients per arc end
    std::vector<double> tlo_, thi_;  // transit at the switch radius

    double f_generic(double phi) const {
        double w = wrap_angle(phi);
        double dfix = geo_.nearest_fixed_point_dist(w);
        if (dfix < 1e-13) {
            // f(z1) = +1 at attracting fixed points, -1 at repelling
            for (double z : geo_.fixed_points)
                if (angle_dist(w, z) < 1e-12) return geo_.gprime(z) < 0 ? 1.0 : -1.0;
        }
        auto [i, u] = geo_.locate(w);
        const Arc& arc = geo_.arcs[i];
        double dlo = u - arc.lo, dhi = arc.hi - u;
        if (dlo < kAsymptoticRadius) {
            double mag = 1.0 - clo_[i] * std::pow(dlo, flow.n);
            return tlo_[i] > 0 ? mag : -mag;
        }
        if (dhi < kAsymptoticRadius) {
            double mag = 1.0 - chi_[i] * std::pow(dhi, flow.n);
            return thi_[i] > 0 ? mag : -mag;
        }
        return std::tanh(transit_from_anchor(geo_, i, u));
    }

    void validate() {
        PairValidation& v = validation;
        const int grid = 48;
        for (int k = 0; k < grid; ++k) {
            double phi = kTwoPi * (k + 0.5) / grid;
            double r = std::fabs(flow.g(kPi - phi) - flow.g(phi));
            if (flow.kind == FlowKind::BasicJ1J2)
                r = std::max(r, std::fabs(flow.g(-phi) - flow.g(phi)));
            v.a1 = std::max(v.a1, r);
        }
        if (flow.kind == FlowKind::BasicJ1) {
            v.a4 = std::max(std::fabs(f_generic(kPi / 2)), std::fabs(f_generic(3 * kPi / 2)));
            for (int k = 1; k < 24; ++k) {
                double phi = kPi * k / 24.0;
                v.a2 = std::max(v.a2, std::fabs(f_generic(kPi - phi) + f_generic(phi)));
            }
            for (double theta : {-1.0, 0.4, 1.3}) {
                for (int k = 1; k < 12; ++k) {
                    double phi = kPi * k / 12.0;
                    if (geo_.nearest_fixed_point_dist(phi) < 0.05) continue;
                    double lhs = f_generic(flow_map(flow, theta, phi));
                    double fv = f_generic(phi), t = std::tanh(theta);
                    v.a3 = std::max(v.a3, std::fabs(lhs - (fv + t) / (1 + fv * t)));
                }
            }
            for (int k = 0; k < 64; ++k) {
                double phi = kTwoPi * (k + 0.5) / 64;
                if (geo_.nearest_fixed_point_dist(phi) < 1e-2) continue;
                double h = 1e-5;
                double fp = (f_generic(phi + h) - f_generic(phi - h)) / (2 * h);
                double fv = f_generic(phi);
                v.ode = std::max(v.ode, std::fabs(flow.g(phi) * fp - (1 - fv * fv)));
            }
        } else {
            v.a4 = std::max(
                {ProjectivePoint::distance(f_tilde(kPi / 2), ProjectivePoint::make(0, 1)),
                 ProjectivePoint::distance(f_tilde(3 * kPi / 2), ProjectivePoint::make(0, 1)),
                 ProjectivePoint::distance(f_tilde(0), ProjectivePoint::make(1, 0)),
                 ProjectivePoint::distance(f_tilde(kPi), ProjectivePoint::make(1, 0))});
            for (int k = 1; k < 24; ++k) {
                double phi = kTwoPi * k / 24.0;
                if (geo_.nearest_fixed_point_dist(phi) < 1e-6 ||
                    geo_.nearest_fixed_point_dist(kPi - phi) < 1e-6 ||
                    geo_.nearest_fixed_point_dist(-phi) < 1e-6)
                    continue;
                ProjectivePoint p = f_tilde(phi);
                ProjectivePoint flipped = ProjectivePoint::make(p.a, -p.b);
                v.a2 = std::max(v.a2, ProjectivePoint::distance(f_tilde(kPi - phi), flipped));
                v.a2 = std::max(v.a2, ProjectivePoint::distance(f_tilde(-phi), flipped));
            }
            for (double theta : {-0.9, 0.6}) {
                for (int k = 1; k < 16; ++k) {
                    double phi = kTwoPi * k / 16.0 + 0.03;
                    if (geo_.nearest_fixed_point_dist(phi) < 0.05) continue;
                    ProjectivePoint lhs = f_tilde(flow_map(flow, theta, phi));
                    ProjectivePoint rhs = f_tilde(phi).transported(theta);
                    v.a3 = std::max(v.a3, ProjectivePoint::distance(lhs, rhs));
                }
            }
        }
        v.ok = v.a1 < 1e-12 && v.a2 < 1e-6 && v.a3 < 1e-6 && v.a4 < 1e-9 && v.ode < 1e-6;
        if (!v.ok) throw BadParameters("flow/function pair failed its defining relations");
    }
};

inline FlowFunctionPair make_pair(const CircleFlow& flow) { return FlowFunctionPair(flow); }

// f_of / f_tilde_of operation entry points.
inline double f_of(const FlowFunctionPair& pair, double phi) { return pair.f(phi); }
inline ProjectivePoint f_tilde_of(const FlowFunctionPair& pair, double phi) {
    return pair.f_tilde(phi);
}

// ---------------------------------------------------------------------------
// Extension to F = S u j2*S (main and mirrored slice circles)

enum class Component { Main, Mirror };

struct ExtendedPoint {
    Component comp;
    double phi;
};

// Phi_theta(z) := j2 * Phi_{-theta}(j2 * z) and f := -f o j2 on the mirror.
struct ExtendedPair {
    const FlowFunctionPair& base;

    explicit ExtendedPair(const FlowFunctionPair& p) : base(p) {
        if (p.flow.kind != FlowKind::BasicJ1) throw WrongKind("extend_to_F: BasicJ1 pair required");
    }

    double f(const ExtendedPoint& z) const {
        return z.comp == Component::Main ? base.f(z.phi) : -base.f(z.phi);
    }

    ExtendedPoint flow_to(double theta, const ExtendedPoint& z, const Tolerances& tol = {}) const {
        if (z.comp == Component::Main) return {z.comp, flow_map(base.flow, theta, z.phi, tol)};
        return {z.comp, flow_map(base.flow, -theta, z.phi, tol)};
    }

    ExtendedPoint j1(const ExtendedPoint& z) const { return {z.comp, wrap_angle(kPi - z.phi)}; }
    ExtendedPoint j2(const ExtendedPoint& z) const {
        return {z.comp == Component::Main ? Component::Mirror : Component::Main, z.phi};
    }
};

inline ExtendedPair extend_to_F(const FlowFunctionPair& pair) { return ExtendedPair(pair); }

// ---------------------------------------------------------------------------
// Principal-value surrogate for the global invariant mu

// Symmetric-epsilon principal value of the circle integral of 1/g, excising
// matched intervals around each zero and extrapolating eps -> 0 through the
// schedule {1e-2, 1e-3, 1e-4}.
inline double pv_global_invariant(const CircleFlow& flow) {
    std::vector<double> zeros = flow.fixed_points();
    double residueSum = 0.0, residueMax = 0.0;
    for (double z : zeros) {
        double r = 1.0 / flow.gprime(z);
        residueSum += r;
        residueMax = std::max(residueMax, std::fabs(r));
    }
    if (std::fabs(residueSum) > 1e-8 * std::max(residueMax, 1.0))
        throw NonCancellingResidues("pv_global_invariant: residues of 1/g do not cancel");
    auto invg = [&flow](double phi) { return 1.0 / flow.g(phi); };
    auto excised = [&](double eps) {
        double total = 0.0;
        size_t m = zeros.size();
        for (size_t i = 0; i < m; ++i) {
            double a = zeros[i] + eps;
            double b = (i + 1 < m ? zeros[i + 1] : zeros[0] + kTwoPi) - eps;
            total += detail::integrate(invg, a, b, 1e-11);
        }
        return total;
    };
    double e1 = 1e-2, e2 = 1e-3, e3 = 1e-4;
    double I1 = excised(e1), I2 = excised(e2), I3 = excised(e3);
    // quadratic Lagrange extrapolation to eps = 0
    double w1 = (e2 * e3) / ((e1 - e2) * (e1 - e3));
    double w2 = (e1 * e3) / ((e2 - e1) * (e2 - e3));
    double w3 = (e1 * e2) / ((e3 - e1) * (e3 - e2));
    return w1 * I1 + w2 * I2 + w3 * I3;
}

// ---------------------------------------------------------------------------
// Conjugacy construction

struct ConjugacyResult {
    bool success = false;
    std::string certificate;  // names the violated invariant on failure
    double defect = 0.0;      // sup |Psi(Phi^A_theta) - Phi^B_theta(Psi)|
    double derivative_gap = 0.0;
    std::function<double(double)> psi;  // defined on success and for diagnostics
};

// Core construction on geometry pairs: match arcs in order, transport the
// arc transit coordinate. Succeeds iff Jacobian patterns agree, the sampled
// conjugacy defect stays below tol.action and the one-sided derivatives of
// Psi agree at every fixed point.
inline ConjugacyResult conjugacy_map_geo(const FlowGeometry& A, const FlowGeometry& B,
                                         const Tolerances& tol = {}) {
    ConjugacyResult out;
    if (A.fixed_points.size() != B.fixed_points.size()) {
        out.certificate = "fixed point count mismatch";
        return out;
    }
    for (size_t i = 0; i < A.arcs.size(); ++i) {
        double ja = A.gprime(A.fixed_points[i]);
        double jb = B.gprime(B.fixed_points[i]);
        if (std::fabs(ja - jb) > 1e-9) {
            out.certificate = "Jacobian mismatch " + std::to_string(ja) + " vs " +
                              std::to_string(jb);
            return out;
        }
    }
    auto psi = [A, B](double phi) -> double {
        double w = wrap_angle(phi);
        for (size_t i = 0; i < A.fixed_points.size(); ++i)
            if (angle_dist(w, A.fixed_points[i]) < 1e-13) return B.fixed_points[i];
        auto [i, u] = A.locate(w);
        double T = transit_from_anchor(A, i, u);
        return wrap_angle(invert_transit(B, i, T));
    };
    out.psi = psi;
    // sampled conjugacy defect
    for (double theta : {-1.5, -0.5, 0.5, 1.5}) {
        for (size_t i = 0; i < A.arcs.size(); ++i) {
            const Arc& arc = A.arcs[i];
            for (int k = 1; k <= 7; ++k) {
                double phi = arc.lo + (arc.hi - arc.lo) * k / 8.0;
                double lhs = psi(flow_map_field(A.g, theta, phi));
                double rhs = flow_map_field(B.g, theta, psi(phi));
                out.defect = std::max(out.defect, angle_dist(lhs, rhs));
            }
        }
    }
    if (out.defect > tol.action) {
        out.certificate = "conjugacy defect above tolerance";
        return out;
    }
    // one-sided derivative consistency of Psi at the fixed points; the gap
    // detects a mu mismatch even when Jacobians agree.
    double h = 1e-4;
    for (size_t i = 0; i < A.fixed_points.size(); ++i) {
        double za = A.fixed_points[i], zb = B.fixed_points[i];
        double dPlus = angle_dist(psi(za + h), zb) / h;
        double dMinus = angle_dist(psi(za - h), zb) / h;
        out.derivative_gap = std::max(out.derivative_gap, std::fabs(dPlus - dMinus) /
                                                              std::max({1.0, dPlus, dMinus}));
    }
    if (out.derivative_gap > 1e-3) {
        out.certificate = "fixed-point derivative mismatch (global invariant)";
        return out;
    }
    out.success = true;
    return out;
}

inline ConjugacyResult conjugacy_map(const CircleFlow& a, const CircleFlow& b,
                                     const Tolerances& tol = {}) {
    if (a.kind != b.kind) throw KindMismatch("conjugacy_map: flows of different kinds");
    return conjugacy_map_geo(FlowGeometry::from(a), FlowGeometry::from(b), tol);
}

// ---------------------------------------------------------------------------
// RP^1 double-cover lift

// A flow on RP^1 presented in the angle coordinate psi in [0, pi) with
// antipodal identification.
struct RP1Flow {
    std::function<double(double)> g;   // pi-periodic by construction
    std::vector<double> fixed_points;  // exactly two, in [0, pi)
};

inline RP1Flow project_to_rp1(const CircleFlow& flow) {
    if (flow.kind != FlowKind::BasicJ1J2) throw WrongKind("project_to_rp1: BasicJ1J2 required");
    RP1Flow out;
    out.g = [flow](double psi) { return flow.g(psi); };
    out.fixed_points = {kPi / 4, 3 * kPi / 4};
    return out;
}

struct LiftedFlow {
    std::function<double(double)> g;
    std::vector<double> fixed_points;  // four, in [0, 2pi)

    FlowGeometry geometry() const {
        FlowGeometry geo;
        geo.g = g;
        auto field = g;
        geo.gprime = [field](double phi) {
            double h = 1e-6;
            return (field(phi + h) - field(phi - h)) / (2 * h);
        };
        geo.fixed_points = fixed_points;
        // anchors are the reflection-fixed angles {0, pi/2, pi, 3pi/2}
        std::vector<double> anchors = {0.0, kPi / 2, kPi, 3 * kPi / 2, kTwoPi};
        for (size_t i = 0; i < fixed_points.size(); ++i) {
            double lo = fixed_points[i];
            double hi = (i + 1 < fixed_points.size()) ? fixed_points[i + 1]
                                                      : fixed_points[0] + kTwoPi;
            double anchor = 0.5 * (lo + hi);
            for (double c : anchors)
                if (c > lo && c < hi) anchor = c;
            Arc arc;
            arc.lo = lo;
            arc.hi = hi;
            arc.anchor = anchor;
            arc.jac_lo = geo.gprime(lo);
            arc.jac_hi = geo.gprime(hi);
            geo.arcs.push_back(arc);
        }
        geo.build_tables();
        return geo;
    }
};

// Lift through the double cover S^1 -> RP^1: the field pulls back
// periodically and the four fixed points are the preimages of the two
// downstairs.
inline LiftedFlow lift_double_cover(const RP1Flow& in) {
    if (in.fixed_points.size() != 2) throw BadInputFlow("lift: exactly 2 fixed points required");
    for (double z : in.fixed_points) {
        if (std::fabs(in.g(z)) > 1e-10) throw BadInputFlow("lift: declared fixed point not fixed");
        double h = 1e-6;
        if (std::fabs((in.g(z + h) - in.g(z - h)) / (2 * h)) < 1e-6)
            throw BadInputFlow("lift: fixed point not hyperbolic");
    }
    for (int k = 0; k < 32; ++k) {
        double psi = kPi * (k + 0.5) / 32;
        if (std::fabs(in.g(std::fmod(kPi - psi, kPi)) - in.g(psi)) > 1e-10)
            throw BadInputFlow("lift: input flow is not j0-equivariant");
    }
    LiftedFlow out;
    auto gin = in.g;
    out.g = [gin](double phi) {
        double psi = std::fmod(wrap_angle(phi), kPi);
        return gin(psi);
    };
    std::vector<double> fps;
    for (double z : in.fixed_points) {
        fps.push_back(wrap_angle(z));
        fps.push_back(wrap_angle(z + kPi));
    }
    std::sort(fps.begin(), fps.end());
    out.fixed_points = fps;
    return out;
}

// sup over a theta x phi grid of the covering defect |pi(Phi''_theta) -
// Phi'_theta(pi(.))| on RP^1.
inline double covering_defect(const LiftedFlow& lift, const RP1Flow& base,
                              const Tolerances& tol = {}) {
    auto rp1dist = [](double x, double y) {
        double d = std::fabs(std::fmod(x, kPi) - std::fmod(y, kPi));
        return d > kPi / 2 ? kPi - d : d;
    };
    double worst = 0.0;
    for (double theta = -3.0; theta <= 3.0001; theta += 0.75) {
        for (int k = 0; k < 16; ++k) {
            double phi = kTwoPi * (k + 0.37) / 16;
            double up = flow_map_field(lift.g, theta, phi, tol);
            double down = flow_map_field(base.g, theta, std::fmod(wrap_angle(phi), kPi), tol);
            worst = std::max(worst, rp1dist(std::fmod(up, kPi), down));
        }
    }
    return worst;
}

}  // namespace orthoflow::circleflow
