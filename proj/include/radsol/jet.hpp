#pragma once

#include <cmath>

namespace radsol {

/// Second-order forward-mode jet: value with first and second derivative
/// along a single variable. Closed-form profiles are written once against
/// this type and yield exact slopes and curvatures.
struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    static constexpr Jet constant(double c) { return {c, 0.0, 0.0}; }
    static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator*(Jet a, Jet b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
inline Jet operator*(double s, Jet a) { return {s * a.v, s * a.d1, s * a.d2}; }
inline Jet operator*(Jet a, double s) { return s * a; }
inline Jet operator+(Jet a, double c) { return {a.v + c, a.d1, a.d2}; }
inline Jet operator+(double c, Jet a) { return a + c; }
inline Jet operator-(Jet a, double c) { return {a.v - c, a.d1, a.d2}; }
inline Jet operator-(double c, Jet a) { return {c - a.v, -a.d1, -a.d2}; }
inline Jet operator/(Jet a, double s) { return {a.v / s, a.d1 / s, a.d2 / s}; }

/// Applies a scalar function given its value and first two derivatives at a.v.
inline Jet chain(Jet a, double f, double df, double ddf) {
    return {f, df * a.d1, ddf * a.d1 * a.d1 + df * a.d2};
}

inline Jet exp(Jet a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}

inline Jet log(Jet a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

inline Jet tanh(Jet a) {
    const double t = std::tanh(a.v);
    const double s2 = 1.0 - t * t;
    return chain(a, t, s2, -2.0 * t * s2);
}

/// log(1 + e^a), evaluated without overflow.
inline Jet softplus(Jet a) {
    const double x = a.v;
    const double f = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    const double s = 1.0 / (1.0 + std::exp(-x));
    return chain(a, f, s, s * (1.0 - s));
}

inline Jet relu(Jet a) { return a.v > 0.0 ? a : Jet{}; }

inline Jet reciprocal(Jet a) {
    const double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}

}  // namespace radsol
