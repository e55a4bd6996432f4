#pragma once

// Shared plumbing: error types, tolerance bundle, deterministic RNG.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace orthoflow {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define ORTHOFLOW_ERROR(Name)                                            \
    struct Name : Error {                                                \
        explicit Name(const std::string& what = #Name) : Error(what) {} \
    }

ORTHOFLOW_ERROR(NonUnitInput);
ORTHOFLOW_ERROR(DimensionTooSmall);
ORTHOFLOW_ERROR(NotRankOne);
ORTHOFLOW_ERROR(Overflow);
ORTHOFLOW_ERROR(WrongSize);
ORTHOFLOW_ERROR(NotSpecialOrthogonal);
ORTHOFLOW_ERROR(ZeroVector);
ORTHOFLOW_ERROR(NotAStabilizer);
ORTHOFLOW_ERROR(BadSignature);
ORTHOFLOW_ERROR(BadParameters);
ORTHOFLOW_ERROR(WrongKind);
ORTHOFLOW_ERROR(IntegrationFailure);
ORTHOFLOW_ERROR(DifferentArcs);
ORTHOFLOW_ERROR(AtFixedPoint);
ORTHOFLOW_ERROR(NonCancellingResidues);
ORTHOFLOW_ERROR(KindMismatch);
ORTHOFLOW_ERROR(BadInputFlow);
ORTHOFLOW_ERROR(NoRealRoot);
ORTHOFLOW_ERROR(OutsideWPlus);
ORTHOFLOW_ERROR(NumericalAmbiguity);
ORTHOFLOW_ERROR(OutsideDomain);
ORTHOFLOW_ERROR(Unreachable);
ORTHOFLOW_ERROR(NotInP);
ORTHOFLOW_ERROR(CanonicalizationFailure);
ORTHOFLOW_ERROR(EvaluatorFailure);
ORTHOFLOW_ERROR(IllConditioned);
ORTHOFLOW_ERROR(NoContainment);

#undef ORTHOFLOW_ERROR

struct Tolerances {
    double algebraic = 1e-9;
    double ode = 1e-8;
    double rank = 1e-7;
    double action = 1e-6;

    void validate() const {
        if (algebraic <= 0 || ode <= 0 || rank <= 0 || action <= 0)
            throw BadParameters("tolerances must be strictly positive");
        if (algebraic > action)
            throw BadParameters("algebraic tolerance must not exceed action tolerance");
    }
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;  // fmod can round up to the period
    return w;
}

// Distance between angles on the circle, in [0, pi].
inline double angle_dist(double a, double b) {
    double d = std::fabs(wrap_angle(a) - wrap_angle(b));
    return d > kPi ? kTwoPi - d : d;
}

// mt19937_64 with a hand-rolled uniform so reports are bit-stable for a
// given seed regardless of the standard library's distribution choices.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // xorshift* keeps this self-contained and reproducible.
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::uint64_t state_;
};

}  // namespace orthoflow
